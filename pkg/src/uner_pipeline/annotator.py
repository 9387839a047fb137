"""Tokenization, sentence splitting, IOB projection, and CoNLL serialization.

Tokens are whitespace-delimited chunks with every punctuation or symbol
character isolated into its own token; offsets always address the source
text. Sentences are split by a deliberately simple rule (terminator followed
by whitespace and an uppercase letter, or a blank line): determinism matters
more here than linguistic perfection, and the known abbreviation errors are
fixture-documented. Only sentences carrying at least one B tag survive
projection.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import DataError
from .ingest import Document
from .mapping import UnerLabel, parse_uner_label

_TERMINATORS = frozenset(".!?")

DOC_HEADER_PREFIX = "# doc_id = "


@dataclass(frozen=True)
class Token:
    """Non-empty text chunk at [start, end) in the document text."""

    text: str
    start: int
    end: int


@dataclass(frozen=True)
class IobTag:
    """IOB tag: prefix O carries no label, B/I carry exactly one."""

    prefix: str  # "B", "I", or "O"
    label: UnerLabel | None = None

    def __post_init__(self) -> None:
        if self.prefix not in ("B", "I", "O"):
            raise ValueError(f"bad IOB prefix {self.prefix!r}")
        if (self.prefix == "O") != (self.label is None):
            raise ValueError("O carries no label; B/I carry exactly one")

    def __str__(self) -> str:
        if self.prefix == "O":
            return "O"
        return f"{self.prefix}-{self.label}"


O_TAG = IobTag("O")


def parse_iob_tag(s: str) -> IobTag:
    """Parse a tag string like ``O`` or ``B-Name-Location-GPE-City``."""
    if s == "O":
        return O_TAG
    prefix, sep, rest = s.partition("-")
    if prefix not in ("B", "I") or not sep:
        raise DataError(f"bad IOB tag {s!r}")
    return IobTag(prefix, parse_uner_label(rest))


@dataclass
class AnnotatedSentence:
    """Sentence as a list of (token, tag) pairs."""

    tokens: list[tuple[Token, IobTag]]


@dataclass
class AnnotatedCorpus:
    """Documents (id, sentences) in deterministic input order."""

    documents: list[tuple[str, list[AnnotatedSentence]]] = field(default_factory=list)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def tokenize(text: str) -> list[Token]:
    """Whitespace-split, then isolate each punctuation/symbol character.

    Offset-faithful: every token's text equals the source substring at its
    offsets, so tokens plus the original whitespace reproduce the text.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_punct(ch):
            tokens.append(Token(ch, i, i + 1))
            i += 1
            continue
        j = i + 1
        while j < n and not text[j].isspace() and not _is_punct(text[j]):
            j += 1
        tokens.append(Token(text[i:j], i, j))
        i = j
    return tokens


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Sentence ranges covering all non-whitespace text, in order.

    Boundaries fall after ``.``, ``!``, ``?`` followed by whitespace and an
    uppercase letter, and at blank lines. Returned ranges are trimmed of
    surrounding whitespace and never overlap.
    """
    n = len(text)
    breaks: list[int] = []  # positions where a new sentence may start
    i = 0
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j > i + 1 and j < n and text[j].isupper():
                breaks.append(i + 1)
        elif ch == "\n":
            # a blank (whitespace-only) line is an unconditional boundary
            j = i + 1
            while j < n and text[j] != "\n" and text[j].isspace():
                j += 1
            if j < n and text[j] == "\n":
                breaks.append(i + 1)
        i += 1
    ranges: list[tuple[int, int]] = []
    start = 0
    for brk in breaks + [n]:
        piece_start, piece_end = start, brk
        while piece_start < piece_end and text[piece_start].isspace():
            piece_start += 1
        while piece_end > piece_start and text[piece_end - 1].isspace():
            piece_end -= 1
        if piece_start < piece_end:
            ranges.append((piece_start, piece_end))
        start = brk
    return ranges


def project_annotations(
    doc: Document,
    labels: dict[str, UnerLabel],
    tokens: list[Token],
    sentences: list[tuple[int, int]],
    counters: Counter | None = None,
) -> list[AnnotatedSentence]:
    """Project link spans onto tokens as B/I tags, keep entity sentences only.

    A token overlapping a labeled span counts as inside the entity (greedy
    inclusion); the first overlapping token still untagged gets B, the rest I.
    Spans whose target has no label are skipped; spans crossing a sentence
    boundary are truncated at it, with a warning counted.
    """
    counters = counters if counters is not None else Counter()
    sentence_of_token = []
    sentence_idx = 0
    for token in tokens:
        while sentence_idx < len(sentences) and token.start >= sentences[sentence_idx][1]:
            sentence_idx += 1
        sentence_of_token.append(sentence_idx if sentence_idx < len(sentences) else -1)
    tags: list[IobTag] = [O_TAG] * len(tokens)

    for span in doc.links:
        label = labels.get(span.target)
        if label is None:
            counters["spans_unlabeled"] += 1
            continue
        overlapping = [
            i
            for i, token in enumerate(tokens)
            if token.start < span.end and token.end > span.start
        ]
        if not overlapping:
            counters["spans_without_tokens"] += 1
            continue
        home = sentence_of_token[overlapping[0]]
        in_home = [i for i in overlapping if sentence_of_token[i] == home]
        if len(in_home) != len(overlapping):
            counters["spans_truncated"] += 1
        untagged = [i for i in in_home if tags[i].prefix == "O"]
        if not untagged:
            counters["spans_shadowed"] += 1
            continue
        tags[untagged[0]] = IobTag("B", label)
        for i in untagged[1:]:
            tags[i] = IobTag("I", label)

    result: list[AnnotatedSentence] = []
    for s_idx in range(len(sentences)):
        pairs = [
            (tokens[i], tags[i])
            for i in range(len(tokens))
            if sentence_of_token[i] == s_idx
        ]
        if not pairs:
            continue
        counters["sentences_total"] += 1
        if any(tag.prefix == "B" for _, tag in pairs):
            counters["sentences_kept"] += 1
            result.append(AnnotatedSentence(pairs))
        else:
            counters["sentences_dropped"] += 1
    return result


def annotate_document(
    doc: Document, labels: dict[str, UnerLabel], counters: Counter | None = None
) -> list[AnnotatedSentence]:
    """Tokenize, split, and project one document."""
    tokens = tokenize(doc.text)
    sentences = split_sentences(doc.text)
    return project_annotations(doc, labels, tokens, sentences, counters)


def validate_iob(corpus: AnnotatedCorpus) -> list[str]:
    """Return IOB well-formedness violations, one message per offense."""
    violations: list[str] = []
    for doc_id, sentences in corpus.documents:
        for s_idx, sentence in enumerate(sentences):
            previous: IobTag = O_TAG
            saw_b = False
            for t_idx, (token, tag) in enumerate(sentence.tokens):
                if tag.prefix == "B":
                    saw_b = True
                elif tag.prefix == "I":
                    if previous.prefix == "O" or previous.label != tag.label:
                        violations.append(
                            f"doc {doc_id} sentence {s_idx} token {t_idx} ({token.text!r}): "
                            f"I-{tag.label} not preceded by B/I of the same label"
                        )
                previous = tag
            if not saw_b:
                violations.append(f"doc {doc_id} sentence {s_idx}: no B tag")
    return violations


def emit_conll(corpus: AnnotatedCorpus, writer: IO[str]) -> int:
    """Write the corpus in CoNLL layout; returns the UTF-8 byte count.

    Per document: a ``# doc_id = <id>`` header, one ``token<TAB>tag`` line per
    token, and a blank line after every sentence.
    """
    written = 0

    def put(chunk: str) -> None:
        nonlocal written
        writer.write(chunk)
        written += len(chunk.encode("utf-8"))

    for doc_id, sentences in corpus.documents:
        put(f"{DOC_HEADER_PREFIX}{doc_id}\n")
        for sentence in sentences:
            for token, tag in sentence.tokens:
                put(f"{token.text}\t{tag}\n")
            put("\n")
    return written


def read_conll_events(
    lines: Iterable[str],
) -> Iterator[tuple[str, list[list[tuple[str, str, int]]]]]:
    """Structural CoNLL reader: yields (doc_id, sentences of (text, tag, line_no)).

    Validates layout only (headers, tab-separated token lines); tags are kept
    as raw strings so files with unusual tag inventories still load.
    """
    doc_id: str | None = None
    sentences: list[list[tuple[str, str, int]]] = []
    current: list[tuple[str, str, int]] = []
    line_no = 0
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if line.startswith(DOC_HEADER_PREFIX):
            if current:
                raise DataError(f"line {line_no}: document header inside a sentence")
            if doc_id is not None:
                yield doc_id, sentences
            doc_id = line[len(DOC_HEADER_PREFIX) :]
            sentences = []
            continue
        if not line:
            if current:
                sentences.append(current)
                current = []
            continue
        if doc_id is None:
            raise DataError(f"line {line_no}: token line before any document header")
        text, sep, tag = line.partition("\t")
        if not sep or not text or not tag:
            raise DataError(f"line {line_no}: expected 'token<TAB>tag', got {line!r}")
        current.append((text, tag, line_no))
    if current:
        sentences.append(current)
    if doc_id is not None:
        yield doc_id, sentences


def parse_conll(lines: Iterable[str]) -> AnnotatedCorpus:
    """Parse a CoNLL stream into a corpus, enforcing all invariants.

    Token offsets are synthesized canonically: tokens joined by single spaces,
    sentences by single newlines, per document starting at zero.
    """
    corpus = AnnotatedCorpus()
    for doc_id, raw_sentences in read_conll_events(lines):
        sentences: list[AnnotatedSentence] = []
        offset = 0
        for raw_sentence in raw_sentences:
            pairs: list[tuple[Token, IobTag]] = []
            for i, (text, tag_string, line_no) in enumerate(raw_sentence):
                try:
                    tag = parse_iob_tag(tag_string)
                except DataError as exc:
                    raise DataError(f"line {line_no}: {exc}") from exc
                if i > 0:
                    offset += 1  # single space between tokens
                pairs.append((Token(text, offset, offset + len(text)), tag))
                offset += len(text)
            sentences.append(AnnotatedSentence(pairs))
            offset += 1  # single newline between sentences
        corpus.documents.append((doc_id, sentences))
    violations = validate_iob(corpus)
    if violations:
        raise DataError("corpus violates IOB invariants: " + "; ".join(violations[:5]))
    return corpus
