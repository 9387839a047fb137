"""Corpus statistics and entity inventories.

Counts tokens, entity tokens (B/I), entities (B), occurrences per tag, and
the coarse Person/Location/Organization split: Person is the exact label
Name-Person-Name, Location and Organization are label-prefix families.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .annotator import AnnotatedCorpus
from .mapping import UnerLabel

COARSE_CLASSES = ("Person", "Location", "Organization")

_PERSON_LABEL = ("Name", "Person", "Name")
_LOCATION_PREFIX = ("Name", "Location")
_ORGANIZATION_PREFIX = ("Name", "Organization")


@dataclass
class CorpusStats:
    total_tokens: int = 0
    non_entity_tokens: int = 0
    entity_tokens: int = 0
    entity_count: int = 0
    distinct_entity_count: int = 0
    per_tag_counts: dict[str, int] = field(default_factory=dict)
    coarse_counts: dict[str, tuple[int, float]] = field(default_factory=dict)


def coarse_class(label: UnerLabel) -> str | None:
    """Coarse bucket for a label, or None if it falls outside all three."""
    if label.levels == _PERSON_LABEL:
        return "Person"
    if label.levels[:2] == _LOCATION_PREFIX:
        return "Location"
    if label.levels[:2] == _ORGANIZATION_PREFIX:
        return "Organization"
    return None


def iter_entities(corpus: AnnotatedCorpus):
    """Yield (doc_id, surface, label) for every B..I entity run."""
    for doc_id, sentences in corpus.documents:
        for sentence in sentences:
            run_tokens: list[str] = []
            run_label: UnerLabel | None = None
            for token, tag in sentence.tokens:
                if tag.prefix == "B":
                    if run_tokens:
                        yield doc_id, " ".join(run_tokens), run_label
                    run_tokens = [token.text]
                    run_label = tag.label
                elif tag.prefix == "I" and run_tokens:
                    run_tokens.append(token.text)
                else:
                    if run_tokens:
                        yield doc_id, " ".join(run_tokens), run_label
                    run_tokens, run_label = [], None
            if run_tokens:
                yield doc_id, " ".join(run_tokens), run_label


def list_entities(corpus: AnnotatedCorpus) -> list[tuple[str, UnerLabel]]:
    """Distinct (surface, label) pairs, sorted by surface then label."""
    pairs = {(surface, label) for _, surface, label in iter_entities(corpus)}
    return sorted(pairs, key=lambda pair: (pair[0], str(pair[1])))


def compute_stats(corpus: AnnotatedCorpus) -> CorpusStats:
    """Count tokens, entities, per-tag occurrences, and coarse classes."""
    stats = CorpusStats()
    tag_counts: Counter[str] = Counter()
    coarse: Counter[str] = Counter()
    for _, sentences in corpus.documents:
        for sentence in sentences:
            for _, tag in sentence.tokens:
                stats.total_tokens += 1
                if tag.prefix == "O":
                    stats.non_entity_tokens += 1
                    continue
                stats.entity_tokens += 1
                tag_counts[str(tag)] += 1
                if tag.prefix == "B":
                    stats.entity_count += 1
                    bucket = coarse_class(tag.label)
                    if bucket is not None:
                        coarse[bucket] += 1
    stats.per_tag_counts = dict(tag_counts)
    stats.coarse_counts = {
        name: (coarse[name], coarse[name] / stats.entity_count if stats.entity_count else 0.0)
        for name in COARSE_CLASSES
    }
    stats.distinct_entity_count = len(list_entities(corpus))
    assert stats.total_tokens == stats.non_entity_tokens + stats.entity_tokens
    return stats


def _sorted_tag_counts(stats: CorpusStats) -> list[tuple[str, int]]:
    return sorted(stats.per_tag_counts.items(), key=lambda item: (-item[1], item[0]))


def render_text(stats: CorpusStats) -> str:
    """Human-readable report; per-tag counts by descending count then tag."""
    lines = [
        f"total_tokens\t{stats.total_tokens}",
        f"non_entity_tokens\t{stats.non_entity_tokens}",
        f"entity_tokens\t{stats.entity_tokens}",
        f"entity_count\t{stats.entity_count}",
        f"distinct_entity_count\t{stats.distinct_entity_count}",
        "",
        "per-tag counts:",
    ]
    for tag, count in _sorted_tag_counts(stats):
        lines.append(f"{tag}\t{count}")
    lines.append("")
    lines.append("coarse classes:")
    for name in COARSE_CLASSES:
        count, share = stats.coarse_counts.get(name, (0, 0.0))
        lines.append(f"{name}\t{count}\t{share * 100:.1f}%")
    return "\n".join(lines) + "\n"


def render_json(stats: CorpusStats) -> str:
    payload = {
        "total_tokens": stats.total_tokens,
        "non_entity_tokens": stats.non_entity_tokens,
        "entity_tokens": stats.entity_tokens,
        "entity_count": stats.entity_count,
        "distinct_entity_count": stats.distinct_entity_count,
        "per_tag_counts": dict(_sorted_tag_counts(stats)),
        "coarse_counts": {
            name: {"count": count, "share": share}
            for name, (count, share) in stats.coarse_counts.items()
        },
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
