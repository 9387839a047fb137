"""Command-line orchestration of the corpus pipeline.

Subcommands: extract, link, annotate, stats, enrich, eval, pipeline. A plain
key=value configuration file supplies defaults; flags override it, and the
UNER_SPARQL_ENDPOINT environment variable overrides the endpoint. All output
files are written atomically (temp file + rename) and every run emits a
manifest with per-stage counters and wall times. The pipeline itself is free
of randomness: identical inputs produce byte-identical corpora at any
concurrency level.

Exit codes: 0 success, 1 usage/configuration, 2 data error, 3 network
exhaustion.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import annotator, enrich, evaluation, ingest, linker, mapping, stats
from .errors import (
    ConfigurationError,
    DataError,
    NetworkExhaustedError,
    PipelineError,
    UsageError,
)

log = logging.getLogger(__name__)

CONFIG_KEYS = (
    "input",
    "format",
    "out",
    "equivalence",
    "priority",
    "cache",
    "endpoint",
    "resource_base",
    "offline",
    "batch_size",
    "timeout",
    "retries",
    "rate_limit",
    "concurrency",
    "experiments",
    "collapse_depth",
    "kg_map",
)


@dataclass
class RunConfig:
    input: Path | None = None
    format: str = "json_lines"
    out: Path = Path("out")
    equivalence: Path = field(default_factory=mapping.default_equivalence_path)
    priority: Path = field(default_factory=mapping.default_priority_path)
    cache: Path | None = None
    endpoint: str | None = None
    resource_base: str = linker.DEFAULT_RESOURCE_BASE
    offline: bool = False
    batch_size: int = 50
    timeout: float = 30.0
    retries: int = 3
    rate_limit: float = 2.0
    concurrency: int = 1
    experiments: tuple[int, ...] = ()
    collapse_depth: int | None = None
    kg_map: Path | None = None

    def snapshot(self) -> dict:
        data = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            data[f.name] = value
        return data


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {value!r}")


def _parse_experiments(value: str) -> tuple[int, ...]:
    if not value.strip():
        return ()
    try:
        ids = tuple(int(piece) for piece in value.split(","))
    except ValueError:
        raise UsageError(f"bad experiment list {value!r}; expected e.g. 1,4,6")
    for experiment_id in ids:
        if experiment_id not in enrich.EXPERIMENT_IDS:
            raise ConfigurationError(f"unknown experiment id {experiment_id}; expected 1..7")
    return ids


def read_config_file(path: Path) -> dict[str, str]:
    """Parse ``key = value`` lines; # comments and blank lines ignored."""
    values: dict[str, str] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{line_no}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge config-file values and CLI overrides into a validated RunConfig."""
    config = RunConfig()
    file_values: dict[str, str] = {}
    if getattr(args, "config", None):
        file_values = read_config_file(Path(args.config))

    def pick(key: str, flag_value):
        if flag_value is not None:
            return flag_value
        return file_values.get(key)

    raw_input = pick("input", getattr(args, "input", None))
    if raw_input:
        config.input = Path(raw_input)
    fmt = pick("format", getattr(args, "format", None))
    if fmt:
        if fmt not in ingest.DUMP_FORMATS:
            raise UsageError(f"unknown dump format {fmt!r}")
        config.format = fmt
    out = pick("out", getattr(args, "out", None))
    if out:
        config.out = Path(out)
    for key in ("equivalence", "priority"):
        value = pick(key, getattr(args, key, None))
        if value:
            setattr(config, key, Path(value))
    cache = pick("cache", getattr(args, "cache", None))
    if cache:
        config.cache = Path(cache)
    kg_map = pick("kg_map", getattr(args, "kg_map", None))
    if kg_map:
        config.kg_map = Path(kg_map)
    endpoint = pick("endpoint", getattr(args, "endpoint", None))
    if endpoint:
        config.endpoint = endpoint
    config.endpoint = linker.endpoint_from_environment(config.endpoint)
    resource_base = pick("resource_base", None)
    if resource_base:
        config.resource_base = resource_base
    if getattr(args, "offline", False):
        config.offline = True
    elif "offline" in file_values:
        config.offline = _parse_bool(file_values["offline"])
    for key, caster in (
        ("batch_size", int),
        ("timeout", float),
        ("retries", int),
        ("rate_limit", float),
        ("concurrency", int),
    ):
        value = pick(key, getattr(args, key, None))
        if value is not None and value != "":
            try:
                setattr(config, key, caster(value))
            except ValueError:
                raise UsageError(f"bad value for {key}: {value!r}")
    experiments = pick("experiments", getattr(args, "experiments", None))
    if experiments:
        config.experiments = (
            experiments if isinstance(experiments, tuple) else _parse_experiments(experiments)
        )
    collapse = pick("collapse_depth", getattr(args, "collapse_depth", None))
    if collapse is not None and collapse != "":
        try:
            config.collapse_depth = int(collapse)
        except ValueError:
            raise UsageError(f"bad collapse depth {collapse!r}")
        if config.collapse_depth < 1:
            raise UsageError("collapse depth must be >= 1")
    if config.batch_size < 1 or config.concurrency < 1:
        raise UsageError("batch_size and concurrency must be >= 1")
    return config


def validate_config_paths(config: RunConfig, command: str) -> None:
    """Fail fast: every referenced path is checked before any stage runs."""
    if command in ("extract", "pipeline"):
        _require_input(config)
    if config.input is not None and not config.input.exists():
        raise UsageError(f"input file not found: {config.input}")
    if command in ("annotate", "enrich", "pipeline"):
        for path in (config.equivalence, config.priority):
            if not Path(path).exists():
                raise UsageError(f"mapping table not found: {path}")
    if command in ("enrich", "pipeline"):
        needing_kg = [e for e in config.experiments if e in (4, 5, 6, 7)]
        if needing_kg:
            if config.kg_map is None:
                raise ConfigurationError(
                    f"experiments {needing_kg} need a knowledge-graph map (--kg-map)"
                )
            if not config.kg_map.exists():
                raise UsageError(f"knowledge-graph map not found: {config.kg_map}")


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _write_conll(path: Path, corpus: annotator.AnnotatedCorpus) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            written = annotator.emit_conll(corpus, fh)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return written


class Manifest:
    """Per-run record: config snapshot, per-stage counters, wall times."""

    def __init__(self, config: RunConfig, command: str):
        self.data = {
            "tool": "uner-pipeline",
            "version": __version__,
            "command": command,
            "config": config.snapshot(),
            "stages": {},
            "status": "ok",
        }

    def stage(self, name: str):
        return _StageTimer(self, name)

    def fail(self, error: Exception) -> None:
        self.data["status"] = "error"
        self.data["error"] = f"{type(error).__name__}: {error}"

    def write(self, out_dir: Path) -> None:
        _atomic_write_text(out_dir / "manifest.json", json.dumps(self.data, indent=2) + "\n")


class _StageTimer:
    def __init__(self, manifest: Manifest, name: str):
        self.manifest = manifest
        self.name = name
        self.counters: Counter = Counter()

    def __enter__(self):
        self._start = time.perf_counter()
        return self.counters

    def __exit__(self, exc_type, exc, tb):
        self.manifest.data["stages"][self.name] = {
            "counters": dict(sorted(self.counters.items())),
            "wall_time_s": round(time.perf_counter() - self._start, 6),
        }
        return False


def _require_input(config: RunConfig) -> Path:
    if config.input is None:
        raise UsageError("no input file given (use --input or the config file)")
    if not config.input.exists():
        raise UsageError(f"input file not found: {config.input}")
    return config.input


def _document_to_json(doc: ingest.Document) -> str:
    return json.dumps(
        {
            "id": doc.doc_id,
            "title": doc.title,
            "text": doc.text,
            "links": [
                {"start": s.start, "end": s.end, "surface": s.surface, "target": s.target}
                for s in doc.links
            ],
        },
        ensure_ascii=False,
    )


def _document_from_json(line: str, line_no: int) -> ingest.Document:
    try:
        obj = json.loads(line)
        links = tuple(
            ingest.LinkSpan(l["start"], l["end"], l["surface"], l["target"]) for l in obj["links"]
        )
        return ingest.Document(str(obj["id"]), obj.get("title", ""), obj["text"], links)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"documents file line {line_no}: {exc}") from exc


def load_documents(path: Path) -> list[ingest.Document]:
    documents = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                documents.append(_document_from_json(line, line_no))
    return documents


def stage_extract(config: RunConfig, counters: Counter) -> tuple[list[ingest.Document], list[str]]:
    input_path = _require_input(config)
    documents: list[ingest.Document] = []
    with open(input_path, encoding="utf-8") as fh:
        for raw in ingest.parse_dump_stream(fh, config.format, counters):
            documents.append(ingest.build_document(raw, counters))
    counters["links"] += sum(len(doc.links) for doc in documents)
    targets = ingest.collect_unique_targets(documents)
    counters["unique_targets"] += len(targets)
    log.info(
        "extracted %d documents, %d links, %d unique targets",
        counters["documents"], counters["links"], counters["unique_targets"],
    )
    return documents, targets


def cmd_extract(config: RunConfig, manifest: Manifest) -> tuple[list[ingest.Document], list[str]]:
    with manifest.stage("extract") as counters:
        documents, targets = stage_extract(config, counters)
    _atomic_write_text(
        config.out / "documents.jsonl",
        "".join(_document_to_json(doc) + "\n" for doc in documents),
    )
    _atomic_write_text(
        config.out / "targets.txt", "".join(target + "\n" for target in targets)
    )
    return documents, targets


def _make_client(config: RunConfig) -> linker.SparqlClient | None:
    if config.offline or not config.endpoint:
        return None
    return linker.SparqlClient(
        config.endpoint,
        resource_base=config.resource_base,
        timeout=config.timeout,
        retries=config.retries,
        batch_size=config.batch_size,
        rate_limit=config.rate_limit,
        concurrency=config.concurrency,
    )


def stage_link(
    config: RunConfig, targets: list[str], counters: Counter, client=None
) -> linker.ClassCatalog:
    cache = linker.ClassCatalog()
    if config.cache and config.cache.exists():
        cache = linker.load_catalog(config.cache)
    if client is None:
        client = _make_client(config)
    catalog = linker.resolve_all(targets, cache, client, counters)
    log.info(
        "resolved %d targets (%d cache hits, %d unresolved)",
        counters["targets"], counters["cache_hits"], counters["unresolved"],
    )
    if config.cache:
        linker.save_catalog(cache, config.cache)
    if (
        client is not None
        and counters["unresolved"] > 0
        and counters["resolved_by_query"] == 0
        and client.request_count > 0
    ):
        raise NetworkExhaustedError(
            f"all {counters['unresolved']} queried targets failed; endpoint unreachable?"
        )
    return catalog


def cmd_link(config: RunConfig, manifest: Manifest, targets: list[str] | None = None) -> linker.ClassCatalog:
    if targets is None:
        targets_path = config.out / "targets.txt"
        if config.input is not None and config.input.suffix == ".txt":
            targets_path = config.input
        if not targets_path.exists():
            raise UsageError(f"targets file not found: {targets_path} (run extract first)")
        targets = [
            line.rstrip("\n") for line in targets_path.read_text(encoding="utf-8").splitlines() if line
        ]
    with manifest.stage("link") as counters:
        catalog = stage_link(config, targets, counters)
    linker.save_catalog(catalog, config.out / "catalog.tsv")
    return catalog


def _load_tables(config: RunConfig) -> tuple[mapping.EquivalenceMap, mapping.PriorityMap]:
    for path in (config.equivalence, config.priority):
        if not Path(path).exists():
            raise UsageError(f"mapping table not found: {path}")
    return mapping.load_mapping_tables(config.equivalence, config.priority)


def build_label_map(
    catalog: linker.ClassCatalog,
    equivalences: mapping.EquivalenceMap,
    priorities: mapping.PriorityMap,
    counters: Counter,
) -> dict[str, mapping.UnerLabel]:
    labels: dict[str, mapping.UnerLabel] = {}
    for target, classes in catalog.entries.items():
        label = mapping.label_for_classes(classes, equivalences, priorities, counters)
        if label is None:
            counters["targets_unmapped"] += 1
        else:
            labels[target] = label
    return labels


def stage_annotate(
    config: RunConfig,
    documents: list[ingest.Document],
    catalog: linker.ClassCatalog,
    counters: Counter,
) -> annotator.AnnotatedCorpus:
    equivalences, priorities = _load_tables(config)
    labels = build_label_map(catalog, equivalences, priorities, counters)

    def annotate_one(doc: ingest.Document):
        doc_counters: Counter = Counter()
        sentences = annotator.annotate_document(doc, labels, doc_counters)
        return doc.doc_id, sentences, doc_counters

    # document-level parallelism; executor.map preserves input order, so the
    # merged corpus is identical at any concurrency level
    if config.concurrency > 1:
        with ThreadPoolExecutor(max_workers=config.concurrency) as executor:
            outcomes = list(executor.map(annotate_one, documents))
    else:
        outcomes = [annotate_one(doc) for doc in documents]

    corpus = annotator.AnnotatedCorpus()
    for doc_id, sentences, doc_counters in outcomes:
        counters.update(doc_counters)
        if sentences:
            corpus.documents.append((doc_id, sentences))
    counters["documents_kept"] += len(corpus.documents)
    counters["tokens"] += sum(
        len(sentence.tokens) for _, sentences in corpus.documents for sentence in sentences
    )
    return corpus


def cmd_annotate(
    config: RunConfig,
    manifest: Manifest,
    documents: list[ingest.Document] | None = None,
    catalog: linker.ClassCatalog | None = None,
) -> annotator.AnnotatedCorpus:
    if documents is None:
        documents_path = config.input if config.input else config.out / "documents.jsonl"
        if not documents_path.exists():
            raise UsageError(f"documents file not found: {documents_path} (run extract first)")
        documents = load_documents(documents_path)
    if catalog is None:
        catalog_path = config.out / "catalog.tsv"
        if catalog_path.exists():
            catalog = linker.load_catalog(catalog_path)
        elif config.cache and config.cache.exists():
            catalog = linker.load_catalog(config.cache)
        else:
            raise UsageError("no class catalog found (run link first or point --cache at one)")
    with manifest.stage("annotate") as counters:
        corpus = stage_annotate(config, documents, catalog, counters)
    _write_conll(config.out / "corpus.conll", corpus)
    return corpus


def _load_corpus(path: Path) -> annotator.AnnotatedCorpus:
    if not path.exists():
        raise UsageError(f"corpus file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return annotator.parse_conll(fh)


def cmd_stats(
    config: RunConfig, manifest: Manifest, corpus: annotator.AnnotatedCorpus | None = None
) -> stats.CorpusStats:
    if corpus is None:
        corpus = _load_corpus(config.input if config.input else config.out / "corpus.conll")
    with manifest.stage("stats") as counters:
        report = stats.compute_stats(corpus)
        entities = stats.list_entities(corpus)
        counters["total_tokens"] += report.total_tokens
        counters["entities"] += report.entity_count
    _atomic_write_text(config.out / "stats.txt", stats.render_text(report))
    _atomic_write_text(config.out / "stats.json", stats.render_json(report))
    _atomic_write_text(
        config.out / "entities.tsv",
        "".join(f"{surface}\t{label}\n" for surface, label in entities),
    )
    return report


def stage_enrich(
    config: RunConfig,
    corpus: annotator.AnnotatedCorpus,
    experiment_ids: tuple[int, ...],
    counters: Counter,
) -> tuple[dict[int, annotator.AnnotatedCorpus], enrich.ExperimentResources]:
    resources = enrich.ExperimentResources()
    needs_global = any(e in (1, 4, 6) for e in experiment_ids)
    needs_multi = any(e in (2, 5, 7) for e in experiment_ids)
    if needs_global:
        resources.global_dictionary = enrich.build_global_dictionary(corpus)
        counters["global_dictionary_size"] += len(resources.global_dictionary.entries)
    if needs_multi:
        resources.global_multi_dictionary = enrich.build_global_dictionary(corpus, multi_token_only=True)
        counters["global_multi_dictionary_size"] += len(resources.global_multi_dictionary.entries)
    if any(e in (4, 5, 6, 7) for e in experiment_ids):
        if config.kg_map is None or not config.kg_map.exists():
            needing = [e for e in experiment_ids if e in (4, 5, 6, 7)]
            raise ConfigurationError(
                f"experiments {needing} need a knowledge-graph map (--kg-map)"
            )
        resources.kg_map = enrich.load_kg_map(config.kg_map)
        resources.equivalences = _load_tables(config)[0]
    results: dict[int, annotator.AnnotatedCorpus] = {}
    for experiment_id in experiment_ids:
        enriched = enrich.run_experiment(experiment_id, corpus, resources, counters)
        counters[f"exp{experiment_id}_entities"] += stats.compute_stats(enriched).entity_count
        results[experiment_id] = enriched
    return results, resources


def cmd_enrich(
    config: RunConfig, manifest: Manifest, corpus: annotator.AnnotatedCorpus | None = None
) -> dict[int, annotator.AnnotatedCorpus]:
    if not config.experiments:
        raise UsageError("no experiments selected (use --experiments, e.g. 1,4,6)")
    if corpus is None:
        corpus = _load_corpus(config.input if config.input else config.out / "corpus.conll")
    with manifest.stage("enrich") as counters:
        results, resources = stage_enrich(config, corpus, config.experiments, counters)
    # the built dictionaries are outputs too, in application order
    config.out.mkdir(parents=True, exist_ok=True)
    if resources.global_dictionary is not None:
        enrich.save_dictionary(resources.global_dictionary, config.out / "dictionary_global.tsv")
    if resources.global_multi_dictionary is not None:
        enrich.save_dictionary(
            resources.global_multi_dictionary, config.out / "dictionary_global_multi.tsv"
        )
    for experiment_id, enriched in results.items():
        _write_conll(config.out / f"corpus_exp{experiment_id}.conll", enriched)
    return results


def cmd_eval(
    config: RunConfig,
    manifest: Manifest,
    golden: Path,
    system: Path,
    include_o: bool = False,
) -> evaluation.EvalReport:
    for path in (golden, system):
        if not path.exists():
            raise UsageError(f"file not found: {path}")
    with manifest.stage("eval") as counters:
        with open(golden, encoding="utf-8") as g, open(system, encoding="utf-8") as s:
            pairs = evaluation.align(g, s)
        report = evaluation.per_tag_metrics(pairs, config.collapse_depth)
        counters["aligned_tokens"] += len(pairs)
        counters["tags_scored"] += len(report.per_tag)
    payload = json.loads(evaluation.render_json(report, include_o))
    try:
        with open(system, encoding="utf-8") as s:
            coarse = evaluation.coarse_report(annotator.parse_conll(s))
        payload["system_coarse_counts"] = {
            name: {"count": count, "share": share} for name, (count, share) in coarse.items()
        }
    except DataError:
        pass  # golden-style files with non-standard tags still get scored
    _atomic_write_text(config.out / "eval.json", json.dumps(payload, indent=2) + "\n")
    _atomic_write_text(config.out / "eval.txt", evaluation.render_text(report, include_o))
    sys.stdout.write(evaluation.render_text(report, include_o))
    return report


def cmd_pipeline(config: RunConfig, manifest: Manifest) -> None:
    documents, targets = cmd_extract(config, manifest)
    catalog = cmd_link(config, manifest, targets)
    corpus = cmd_annotate(config, manifest, documents, catalog)
    cmd_stats(config, manifest, corpus)
    if config.experiments:
        cmd_enrich(config, manifest, corpus)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="uner-pipeline", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--input", help="input file for this command")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=ingest.DUMP_FORMATS, default=None)
        p.add_argument("--equivalence", help="class->label TSV")
        p.add_argument("--priority", help="class->priority TSV")
        p.add_argument("--cache", help="class catalog cache TSV")
        p.add_argument("--endpoint", help="SPARQL endpoint URL")
        p.add_argument("--offline", action="store_true", help="never touch the network")
        p.add_argument("--batch-size", dest="batch_size")
        p.add_argument("--timeout", dest="timeout")
        p.add_argument("--retries", dest="retries")
        p.add_argument("--rate-limit", dest="rate_limit")
        p.add_argument("--concurrency", dest="concurrency")
        p.add_argument("--experiments", help="comma-separated ids, e.g. 1,4,6")
        p.add_argument("--collapse-depth", dest="collapse_depth")
        p.add_argument("--kg-map", dest="kg_map", help="surface->class TSV")

    for name in ("extract", "link", "annotate", "stats", "enrich", "pipeline"):
        add_common(sub.add_parser(name))
    eval_parser = sub.add_parser("eval")
    add_common(eval_parser)
    eval_parser.add_argument("golden", help="golden CoNLL file")
    eval_parser.add_argument("system", help="system CoNLL file")
    eval_parser.add_argument(
        "--include-o", action="store_true", help="report the O tag (never in the macro)"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    manifest = None
    try:
        config = build_config(args)
        validate_config_paths(config, args.command)
        config.out.mkdir(parents=True, exist_ok=True)
        manifest = Manifest(config, args.command)
        if args.command == "extract":
            cmd_extract(config, manifest)
        elif args.command == "link":
            cmd_link(config, manifest)
        elif args.command == "annotate":
            cmd_annotate(config, manifest)
        elif args.command == "stats":
            cmd_stats(config, manifest)
        elif args.command == "enrich":
            cmd_enrich(config, manifest)
        elif args.command == "eval":
            cmd_eval(config, manifest, Path(args.golden), Path(args.system), args.include_o)
        elif args.command == "pipeline":
            cmd_pipeline(config, manifest)
        manifest.write(config.out)
        return 0
    except (PipelineError, OSError) as exc:
        if manifest is not None:
            manifest.fail(exc)
            try:
                manifest.write(config.out)
            except OSError:
                pass
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, UsageError):
            return 1
        if isinstance(exc, NetworkExhaustedError):
            return 3
        return 2


if __name__ == "__main__":
    sys.exit(main())
