import io
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import corpus_from_rows, corpus_to_text, random_corpus
from uner_pipeline.annotator import (
    AnnotatedCorpus,
    IobTag,
    Token,
    annotate_document,
    emit_conll,
    parse_conll,
    parse_iob_tag,
    project_annotations,
    split_sentences,
    tokenize,
    validate_iob,
)
from uner_pipeline.errors import DataError
from uner_pipeline.ingest import Document, LinkSpan
from uner_pipeline.mapping import parse_uner_label

GAME = parse_uner_label("Name-Event-Occasion-Game")
CITY = parse_uner_label("Name-Location-GPE-City")


class TestTokenize:
    def test_punctuation_isolated(self):
        assert [t.text for t in tokenize("Hello, world.")] == ["Hello", ",", "world", "."]

    def test_empty(self):
        assert tokenize("") == []

    def test_acronym_known_limitation(self):
        # every punctuation character becomes its own token, by design
        assert [t.text for t in tokenize("U.S.-based")] == ["U", ".", "S", ".", "-", "based"]

    def test_offsets_faithful(self):
        text = "a-b  ,c\n\ndéjà."
        for token in tokenize(text):
            assert text[token.start : token.end] == token.text

    def test_symbols_isolated_too(self):
        assert [t.text for t in tokenize("$5+€3")] == ["$", "5", "+", "€", "3"]


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=60))
def test_tokenize_reconstruction(text):
    tokens = tokenize(text)
    # tokens cover exactly the non-whitespace, non-overlapping, in order
    covered = []
    for token in tokens:
        assert token.text == text[token.start : token.end]
        assert token.text and not any(ch.isspace() for ch in token.text)
        covered.extend(range(token.start, token.end))
    assert covered == sorted(set(covered))
    outside = set(range(len(text))) - set(covered)
    assert all(text[i].isspace() for i in outside)


class TestSplitSentences:
    def test_two_sentences(self):
        text = "A b. C d."
        assert split_sentences(text) == [(0, 4), (5, 9)]

    def test_single_sentence(self):
        assert split_sentences("one sentence") == [(0, 12)]

    def test_abbreviation_limitation(self):
        # naive rule splits after "Mr." because an uppercase letter follows
        text = "Mr. X came."
        ranges = split_sentences(text)
        assert len(ranges) == 2
        assert text[slice(*ranges[0])] == "Mr."

    def test_blank_line_boundary(self):
        text = "first block\n\nsecond. block"
        ranges = split_sentences(text)
        assert [text[slice(*r)] for r in ranges] == ["first block", "second. block"]

    def test_no_split_without_uppercase(self):
        assert len(split_sentences("version 2.5 shipped")) == 1

    def test_ranges_cover_non_whitespace(self):
        text = "One two. Three!  Four?\n\nFive."
        ranges = split_sentences(text)
        for a, b in ranges:
            assert not text[a].isspace() and not text[b - 1].isspace()
        joined = "".join(text[a:b] for a, b in ranges)
        stripped = "".join(ch for ch in text if not ch.isspace())
        assert "".join(ch for ch in joined if not ch.isspace()) == stripped


class TestProjectAnnotations:
    def make(self, text, links, labels):
        doc = Document("d1", "t", text, tuple(links))
        return project_annotations(doc, labels, tokenize(text), split_sentences(text))

    def test_multi_token_span_projection(self):
        text = "the 2015 European Games began"
        sentences = self.make(text, [LinkSpan(4, 23, "2015 European Games", "G")], {"G": GAME})
        assert len(sentences) == 1
        tags = [str(tag) for _, tag in sentences[0].tokens]
        assert tags == [
            "O",
            "B-Name-Event-Occasion-Game",
            "I-Name-Event-Occasion-Game",
            "I-Name-Event-Occasion-Game",
            "O",
        ]

    def test_sentence_without_entity_dropped(self):
        text = "Has the Games entity. Nothing here."
        sentences = self.make(text, [LinkSpan(8, 13, "Games", "G")], {"G": GAME})
        assert len(sentences) == 1
        assert sentences[0].tokens[0][0].text == "Has"

    def test_unlabeled_target_stays_o(self):
        text = "only Thing here"
        sentences = self.make(text, [LinkSpan(5, 10, "Thing", "T")], {})
        assert sentences == []

    def test_span_crossing_boundary_truncated(self):
        text = "He visited St. Petersburg yesterday."
        doc = Document("d1", "t", text, (LinkSpan(11, 25, "St. Petersburg", "SP"),))
        counters = Counter()
        sentences = project_annotations(
            doc, {"SP": CITY}, tokenize(text), split_sentences(text), counters
        )
        assert counters["spans_truncated"] == 1
        assert len(sentences) == 1
        texts_tags = [(t.text, str(tag)) for t, tag in sentences[0].tokens]
        assert texts_tags == [
            ("He", "O"),
            ("visited", "O"),
            ("St", "B-Name-Location-GPE-City"),
            (".", "I-Name-Location-GPE-City"),
        ]

    def test_partial_token_overlap_greedy(self):
        # span covers only "aris" of token "Paris"; greedy inclusion tags it
        text = "in Paris now"
        sentences = self.make(text, [LinkSpan(4, 8, "aris", "P")], {"P": CITY})
        assert [str(tag) for _, tag in sentences[0].tokens] == [
            "O",
            "B-Name-Location-GPE-City",
            "O",
        ]


class TestConllRoundTrip:
    def test_layout_single_sentence(self):
        corpus = corpus_from_rows([("d7", [[("Hello", "B-Name"), ("there", "O")]])])
        out = io.StringIO()
        written = emit_conll(corpus, out)
        expected = "# doc_id = d7\nHello\tB-Name\nthere\tO\n\n"
        assert out.getvalue() == expected
        assert written == len(expected.encode("utf-8"))

    def test_empty_corpus(self):
        out = io.StringIO()
        assert emit_conll(AnnotatedCorpus(), out) == 0
        assert out.getvalue() == ""

    def test_round_trip_random_corpora(self):
        rng = random.Random(20240811)
        for _ in range(50):
            corpus = random_corpus(rng)
            text = corpus_to_text(corpus)
            reparsed = parse_conll(io.StringIO(text))
            assert reparsed == corpus
            assert corpus_to_text(reparsed) == text

    def test_parse_rejects_token_before_header(self):
        with pytest.raises(DataError, match="before any document header"):
            parse_conll(io.StringIO("tok\tO\n"))

    def test_parse_rejects_untabbed_line(self):
        with pytest.raises(DataError, match="token<TAB>tag"):
            parse_conll(io.StringIO("# doc_id = d\ntok O\n"))

    def test_parse_rejects_ill_formed_iob(self):
        bad = "# doc_id = d\na\tI-Name\n\n"
        with pytest.raises(DataError, match="IOB"):
            parse_conll(io.StringIO(bad))

    def test_parse_rejects_bad_tag(self):
        with pytest.raises(DataError):
            parse_conll(io.StringIO("# doc_id = d\na\tQ-Name\n\n"))


class TestValidateIob:
    def test_clean_corpus(self):
        corpus = corpus_from_rows(
            [("d", [[("a", "B-Name"), ("b", "I-Name"), ("c", "O")]])]
        )
        assert validate_iob(corpus) == []

    def test_label_switch_flagged(self):
        corpus = AnnotatedCorpus(
            [
                (
                    "d",
                    [
                        __import__("uner_pipeline.annotator", fromlist=["AnnotatedSentence"]).AnnotatedSentence(
                            [
                                (Token("a", 0, 1), IobTag("B", parse_uner_label("Name-God"))),
                                (Token("b", 2, 3), IobTag("I", CITY)),
                            ]
                        )
                    ],
                )
            ]
        )
        violations = validate_iob(corpus)
        assert len(violations) == 1 and "not preceded" in violations[0]

    def test_missing_b_flagged(self):
        sentence = __import__("uner_pipeline.annotator", fromlist=["AnnotatedSentence"]).AnnotatedSentence(
            [(Token("a", 0, 1), IobTag("O"))]
        )
        violations = validate_iob(AnnotatedCorpus([("d", [sentence])]))
        assert violations == ["doc d sentence 0: no B tag"]


def test_parse_iob_tag():
    assert str(parse_iob_tag("O")) == "O"
    assert str(parse_iob_tag("B-Name-Location-GPE-City")) == "B-Name-Location-GPE-City"
    with pytest.raises(DataError):
        parse_iob_tag("X-Name")


def test_annotate_document_end_to_end():
    text = "The 2015 European Games were in Baku. No entities here."
    doc = Document(
        "42",
        "t",
        text,
        (LinkSpan(4, 23, "2015 European Games", "G"), LinkSpan(32, 36, "Baku", "B")),
    )
    counters = Counter()
    sentences = annotate_document(doc, {"G": GAME, "B": CITY}, counters)
    assert counters["sentences_kept"] == 1
    assert counters["sentences_dropped"] == 1
    tags = [str(tag) for _, tag in sentences[0].tokens]
    assert tags.count("B-Name-Event-Occasion-Game") == 1
    assert tags.count("B-Name-Location-GPE-City") == 1
