"""Dictionary-based annotation completion.

Builds annotation dictionaries out of an annotated corpus (global, global
multi-token, knowledge-graph-filtered) and applies them to retag runs of
O tokens, plus per-document local lookup propagation. Seven experiment
wirings combine these strategies. Existing non-O tags are never overwritten,
and dictionary application is longest-surface-first.
"""

from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, field

from .annotator import AnnotatedCorpus, AnnotatedSentence, IobTag
from .errors import ConfigurationError, DataError
from .mapping import EquivalenceMap, UnerLabel, map_to_uner, parse_uner_label
from .stats import iter_entities

EXPERIMENT_IDS = (1, 2, 3, 4, 5, 6, 7)

PROVENANCES = ("global", "global_multi", "kg_filtered", "kg_filtered_multi")

MIN_SURFACE_CHARS = 3


@dataclass
class Dictionary:
    """Surface -> label map with its build provenance.

    Invariants enforced at build time: every surface has at least
    MIN_SURFACE_CHARS characters and at least one alphabetic character;
    multi-token variants hold only surfaces spanning two or more tokens.
    """

    entries: dict[str, UnerLabel] = field(default_factory=dict)
    provenance: str = "global"


@dataclass
class KgClassMap:
    """Surface (or link target) -> ontology class name, from an external graph."""

    entries: dict[str, str] = field(default_factory=dict)


def surface_token_count(surface: str) -> int:
    # corpus-derived surfaces are token texts joined by single spaces
    return len(surface.split(" "))


def surface_is_admissible(surface: str) -> bool:
    """Dictionary filter: length over two characters, not purely non-alphabetic."""
    if len(surface) < MIN_SURFACE_CHARS:
        return False
    return any(ch.isalpha() for ch in surface)


def application_order(surfaces) -> list[str]:
    """Longest first: char count desc, then token count desc, then lexicographic."""
    return sorted(surfaces, key=lambda s: (-len(s), -surface_token_count(s), s))


def build_global_dictionary(
    corpus: AnnotatedCorpus, multi_token_only: bool = False
) -> Dictionary:
    """Modal label per distinct entity surface, ties to the smallest label string.

    Surfaces shorter than three characters or with no alphabetic character are
    excluded; with ``multi_token_only`` single-token surfaces are dropped too.
    """
    occurrences: dict[str, Counter[str]] = {}
    labels_by_string: dict[str, UnerLabel] = {}
    for _, surface, label in iter_entities(corpus):
        occurrences.setdefault(surface, Counter())[str(label)] += 1
        labels_by_string[str(label)] = label
    entries: dict[str, UnerLabel] = {}
    for surface, counts in occurrences.items():
        if not surface_is_admissible(surface):
            continue
        if multi_token_only and surface_token_count(surface) < 2:
            continue
        best = min(counts, key=lambda label_string: (-counts[label_string], label_string))
        entries[surface] = labels_by_string[best]
    return Dictionary(entries, "global_multi" if multi_token_only else "global")


def load_dictionary(path, provenance: str = "global") -> Dictionary:
    """Read a ``surface<TAB>label`` TSV; # comments allowed."""
    entries: dict[str, UnerLabel] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            surface, sep, label_string = line.partition("\t")
            if not sep or not surface or not label_string:
                raise DataError(f"{path}:{line_no}: expected 'surface<TAB>label'")
            if surface in entries:
                raise DataError(f"{path}:{line_no}: duplicate surface {surface!r}")
            if not surface_is_admissible(surface):
                raise DataError(f"{path}:{line_no}: inadmissible surface {surface!r}")
            if provenance.endswith("_multi") and surface_token_count(surface) < 2:
                raise DataError(f"{path}:{line_no}: single-token surface in multi dictionary")
            entries[surface] = parse_uner_label(label_string)
    return Dictionary(entries, provenance)


def save_dictionary(dictionary: Dictionary, path) -> None:
    """Write entries in application order so the file mirrors matching behavior."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# provenance = {dictionary.provenance}\n")
        for surface in application_order(dictionary.entries):
            fh.write(f"{surface}\t{dictionary.entries[surface]}\n")


def load_kg_map(path) -> KgClassMap:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, sep, cls = line.partition("\t")
            if not sep or not key or not cls:
                raise DataError(f"{path}:{line_no}: expected 'surface<TAB>class'")
            entries[key] = cls
    return KgClassMap(entries)


def filter_by_kg(
    dictionary: Dictionary,
    kg: KgClassMap,
    equivalences: EquivalenceMap,
    counters: Counter | None = None,
) -> Dictionary:
    """Keep only surfaces known to the graph, retyped through its class.

    Entries whose graph class maps to NULL or is absent from the equivalence
    table are dropped and counted.
    """
    counters = counters if counters is not None else Counter()
    entries: dict[str, UnerLabel] = {}
    for surface in dictionary.entries:
        cls = kg.entries.get(surface)
        if cls is None:
            continue
        label = map_to_uner(cls, equivalences, counters)
        if label is None:
            counters["kg_entries_dropped"] += 1
            continue
        entries[surface] = label
    provenance = "kg_filtered_multi" if dictionary.provenance == "global_multi" else "kg_filtered"
    return Dictionary(entries, provenance)


def _match_at(sentence: AnnotatedSentence, start: int, parts: list[str]) -> bool:
    """True if the all-O token run at ``start`` spells out ``parts``."""
    if start + len(parts) > len(sentence.tokens):
        return False
    for offset, part in enumerate(parts):
        token, tag = sentence.tokens[start + offset]
        if tag.prefix != "O" or token.text != part:
            return False
    return True


def _retag(sentence: AnnotatedSentence, start: int, length: int, label: UnerLabel) -> None:
    for offset in range(length):
        token, _ = sentence.tokens[start + offset]
        sentence.tokens[start + offset] = (token, IobTag("B" if offset == 0 else "I", label))


def apply_dictionary(corpus: AnnotatedCorpus, dictionary: Dictionary) -> AnnotatedCorpus:
    """Retag O-token runs that spell out dictionary surfaces; input unchanged.

    Surfaces are tried longest first; within one surface the scan is left to
    right and never overlaps its own matches. Non-O tags are never modified.
    """
    result = copy.deepcopy(corpus)
    ordered = [(s, s.split(" ")) for s in application_order(dictionary.entries)]
    for _, sentences in result.documents:
        for sentence in sentences:
            for surface, parts in ordered:
                label = dictionary.entries[surface]
                i = 0
                limit = len(sentence.tokens) - len(parts)
                while i <= limit:
                    if _match_at(sentence, i, parts):
                        _retag(sentence, i, len(parts), label)
                        i += len(parts)
                    else:
                        i += 1
    return result


def apply_local_dictionaries(corpus: AnnotatedCorpus) -> AnnotatedCorpus:
    """Per document, propagate each linked entity's label forward.

    A single left-to-right pass: when an entity run is seen its surface is
    cached (first label wins); when an O run spells out a cached surface it is
    retagged. Earlier occurrences are never back-filled, and nothing leaks
    across documents.
    """
    result = copy.deepcopy(corpus)
    for _, sentences in result.documents:
        cache: dict[str, UnerLabel] = {}
        ordered_surfaces: list[tuple[str, list[str]]] = []
        dirty = False
        for sentence in sentences:
            i = 0
            while i < len(sentence.tokens):
                token, tag = sentence.tokens[i]
                if tag.prefix == "B":
                    j = i + 1
                    while j < len(sentence.tokens) and sentence.tokens[j][1].prefix == "I":
                        j += 1
                    surface = " ".join(t.text for t, _ in sentence.tokens[i:j])
                    if surface not in cache:
                        cache[surface] = tag.label
                        dirty = True
                    i = j
                    continue
                if tag.prefix == "O" and cache:
                    if dirty:
                        ordered_surfaces = [(s, s.split(" ")) for s in application_order(cache)]
                        dirty = False
                    matched = False
                    for surface, parts in ordered_surfaces:
                        if _match_at(sentence, i, parts):
                            _retag(sentence, i, len(parts), cache[surface])
                            i += len(parts)
                            matched = True
                            break
                    if matched:
                        continue
                i += 1
    return result


@dataclass
class ExperimentResources:
    """Inputs the experiments draw on; unused fields may stay None."""

    global_dictionary: Dictionary | None = None
    global_multi_dictionary: Dictionary | None = None
    kg_map: KgClassMap | None = None
    equivalences: EquivalenceMap | None = None


def _require(resource, name: str, experiment_id: int):
    if resource is None:
        raise ConfigurationError(f"experiment {experiment_id} needs {name}")
    return resource


def run_experiment(
    experiment_id: int,
    corpus: AnnotatedCorpus,
    resources: ExperimentResources,
    counters: Counter | None = None,
) -> AnnotatedCorpus:
    """Run one of the seven completion strategies and return the new corpus."""
    if experiment_id not in EXPERIMENT_IDS:
        raise ConfigurationError(
            f"unknown experiment id {experiment_id}; expected 1..{EXPERIMENT_IDS[-1]}"
        )
    if experiment_id == 1:
        return apply_dictionary(corpus, _require(resources.global_dictionary, "the global dictionary", 1))
    if experiment_id == 2:
        return apply_dictionary(
            corpus, _require(resources.global_multi_dictionary, "the multi-token global dictionary", 2)
        )
    if experiment_id == 3:
        return apply_local_dictionaries(corpus)
    kg = _require(resources.kg_map, "a knowledge-graph class map", experiment_id)
    equivalences = _require(resources.equivalences, "the equivalence table", experiment_id)
    if experiment_id in (4, 6):
        base = _require(resources.global_dictionary, "the global dictionary", experiment_id)
    else:
        base = _require(resources.global_multi_dictionary, "the multi-token global dictionary", experiment_id)
    kg_dictionary = filter_by_kg(base, kg, equivalences, counters)
    if experiment_id in (4, 5):
        return apply_dictionary(corpus, kg_dictionary)
    return apply_dictionary(apply_local_dictionaries(corpus), kg_dictionary)
