"""Shared test utilities: corpus builders, random generators, brute-force oracles."""

from __future__ import annotations

import io
import random
import string

from uner_pipeline.annotator import AnnotatedCorpus, emit_conll, parse_conll
from uner_pipeline.mapping import UnerLabel

LABEL_POOL = [
    "Name-Person-Name",
    "Name-Location-GPE-City",
    "Name-Location-Region",
    "Name-Organization-Corporation-Company",
    "Name-Event-Occasion-Game",
]


def corpus_from_rows(rows: list[tuple[str, list[list[tuple[str, str]]]]]) -> AnnotatedCorpus:
    """Build a corpus (canonical offsets) from (doc_id, sentences of (token, tag))."""
    lines: list[str] = []
    for doc_id, sentences in rows:
        lines.append(f"# doc_id = {doc_id}\n")
        for sentence in sentences:
            for token, tag in sentence:
                lines.append(f"{token}\t{tag}\n")
            lines.append("\n")
    return parse_conll(lines)


def corpus_to_text(corpus: AnnotatedCorpus) -> str:
    buffer = io.StringIO()
    emit_conll(corpus, buffer)
    return buffer.getvalue()


def random_word(rng: random.Random, min_len: int = 1, max_len: int = 8) -> str:
    return "".join(
        rng.choice(string.ascii_letters) for _ in range(rng.randint(min_len, max_len))
    )


def random_corpus(rng: random.Random, max_docs: int = 3) -> AnnotatedCorpus:
    """Random well-formed corpus: every sentence gets at least one entity."""
    rows = []
    for d in range(rng.randint(1, max_docs)):
        sentences = []
        for _ in range(rng.randint(1, 4)):
            n_tokens = rng.randint(1, 12)
            tokens = [random_word(rng) for _ in range(n_tokens)]
            tags = ["O"] * n_tokens
            for _ in range(rng.randint(1, 3)):
                start = rng.randrange(n_tokens)
                length = min(rng.randint(1, 3), n_tokens - start)
                if any(tags[i] != "O" for i in range(start, start + length)):
                    continue
                label = rng.choice(LABEL_POOL)
                tags[start] = f"B-{label}"
                for i in range(start + 1, start + length):
                    tags[i] = f"I-{label}"
            if all(tag == "O" for tag in tags):
                label = rng.choice(LABEL_POOL)
                tags[0] = f"B-{label}"
            sentences.append(list(zip(tokens, tags)))
        rows.append((f"doc{d}", sentences))
    return corpus_from_rows(rows)


def random_markup_document(rng: random.Random, labeled_targets: dict[str, UnerLabel]):
    """Random markup text mixing plain words, linked spans, and noise.

    Returns (markup_text, expected-labelable target pool was given).
    """
    target_pool = list(labeled_targets) + ["Unlabeled_Page", "Another_Unknown"]
    pieces: list[str] = []
    for _ in range(rng.randint(1, 6)):
        n = rng.randint(0, 6)
        words = [random_word(rng) for _ in range(n)]
        pieces.extend(words)
        roll = rng.random()
        if roll < 0.55:
            target = rng.choice(target_pool)
            surface_words = [random_word(rng) for _ in range(rng.randint(1, 3))]
            surface = " ".join(surface_words)
            if rng.random() < 0.5:
                pieces.append(f"[[{target}|{surface}]]")
            else:
                pieces.append(f'<a href="{target}">{surface}</a>')
        elif roll < 0.65:
            pieces.append("[[")  # unclosed markup noise
        elif roll < 0.75:
            pieces.append(f'<a href="{rng.choice(target_pool)}">no close')
        if rng.random() < 0.3:
            pieces.append(rng.choice([".", "!", "?"]))
        if rng.random() < 0.2:
            pieces.append("\n\n")
    return " ".join(pieces)


def brute_force_metrics(
    gold_tags: list[str], system_tags: list[str], collapse_depth: int | None = None
):
    """Independent confusion-matrix scorer over raw tag strings.

    Walks every (tag, position) combination explicitly; returns
    (per_tag, macro, counted) with percentages at full precision.
    """

    def collapse(tag: str) -> str:
        if collapse_depth is None or tag == "O":
            return tag
        parts = tag.split("-")
        return "-".join(parts[: 1 + max(1, collapse_depth)])

    gold = [collapse(t) for t in gold_tags]
    system = [collapse(t) for t in system_tags]
    tags = sorted(set(gold) | set(system))
    per_tag = {}
    for tag in tags:
        tp = sum(1 for g, s in zip(gold, system) if g == tag and s == tag)
        fp = sum(1 for g, s in zip(gold, system) if g != tag and s == tag)
        fn = sum(1 for g, s in zip(gold, system) if g == tag and s != tag)
        precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
        recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_tag[tag] = (precision, recall, f1, tp + fn)
    counted = [t for t in tags if t != "O" and per_tag[t][:3] != (0.0, 0.0, 0.0)]
    if counted:
        macro = (
            sum(per_tag[t][0] for t in counted) / len(counted),
            sum(per_tag[t][1] for t in counted) / len(counted),
            sum(per_tag[t][2] for t in counted) / len(counted),
        )
    else:
        macro = (0.0, 0.0, 0.0)
    return per_tag, macro, counted
