import re
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from buglocate.porter import porter_stem
from buglocate.textprep import (
    JAVA_KEYWORDS,
    REPORT_TEXT,
    SOURCE_CODE,
    STOP_WORDS,
    TextPreprocessor,
    raw_terms,
    split_identifier,
    tokenize,
)

# Output of the reference Porter (1980) algorithm on Porter's own test
# vocabulary; every stem listed here is also a fixed point of the stemmer.
PORTER_VOCABULARY = [
    ("caresses", "caress"), ("ponies", "poni"), ("ties", "ti"), ("caress", "caress"),
    ("cats", "cat"), ("feed", "feed"), ("plastered", "plaster"), ("bled", "bled"),
    ("motoring", "motor"), ("sing", "sing"), ("conflated", "conflat"), ("troubled", "troubl"),
    ("sized", "size"), ("hopping", "hop"), ("tanned", "tan"), ("falling", "fall"),
    ("hissing", "hiss"), ("fizzed", "fizz"), ("failing", "fail"), ("filing", "file"),
    ("happy", "happi"), ("sky", "sky"), ("relational", "relat"), ("conditional", "condit"),
    ("rational", "ration"), ("valenci", "valenc"), ("digitizer", "digit"), ("radicalli", "radic"),
    ("vietnamization", "vietnam"), ("predication", "predic"), ("feudalism", "feudal"),
    ("hopefulness", "hope"), ("formaliti", "formal"), ("sensibiliti", "sensibl"),
    ("triplicate", "triplic"), ("formative", "form"), ("electrical", "electr"), ("goodness", "good"),
    ("revival", "reviv"), ("allowance", "allow"), ("inference", "infer"), ("airliner", "airlin"),
    ("adjustable", "adjust"), ("irritant", "irrit"), ("replacement", "replac"), ("adoption", "adopt"),
    ("communism", "commun"), ("effective", "effect"), ("bowdlerize", "bowdler"), ("probate", "probat"),
    ("controll", "control"), ("generalizations", "gener"), ("oscillators", "oscil"),
]

# Stems that are not fixed points: the stemmer keeps eating.
NOT_IDEMPOTENT = [("agreed", "agre", "agr"), ("decisiveness", "decis", "deci")]


@pytest.mark.parametrize("word, stem", PORTER_VOCABULARY)
def test_porter_vocabulary(word, stem):
    assert porter_stem(word) == stem


@pytest.mark.parametrize("word, stem", PORTER_VOCABULARY)
def test_porter_is_idempotent_on_vocabulary(word, stem):
    assert porter_stem(porter_stem(word)) == porter_stem(word)


@pytest.mark.parametrize("word, once, twice", NOT_IDEMPOTENT)
def test_some_stems_are_not_fixed_points(word, once, twice):
    assert porter_stem(word) == once
    assert porter_stem(once) == twice


@pytest.mark.parametrize("word", ["a", "is", "as", "at", "sky"])
def test_short_words_are_left_alone(word):
    assert porter_stem(word) == word


def test_empty_text():
    assert tokenize("") == []
    assert tokenize("", SOURCE_CODE) == []
    assert tokenize("  ...  ") == []


def test_report_text_example():
    assert tokenize("the NullPointerException", REPORT_TEXT) == ["nullpointerexcept", "null", "pointer", "except"]


def test_source_code_drops_keywords():
    tokens = tokenize("public void parseFile", SOURCE_CODE)
    assert "public" not in tokens and "void" not in tokens
    assert tokens == [porter_stem("parsefile"), porter_stem("parse"), porter_stem("file")]
    assert tokens == ["parsefil", "pars", "file"]


def test_keywords_survive_in_report_text():
    assert tokenize("public void", REPORT_TEXT) == ["public", "void"]


def test_compound_identifier_is_kept_whole():
    assert tokenize("BugLocator") == ["bugloc", "bug", "locat"]
    assert tokenize("max_retry_count") == ["maxretrycount", "max", "retri", "count"]


@pytest.mark.parametrize(
    "ident, parts",
    [
        ("parseFile", ["parse", "File"]),
        ("HTTPServer", ["HTTP", "Server"]),
        ("getURL", ["get", "URL"]),
        ("utf8Decoder", ["utf", "8", "Decoder"]),
        ("MAX_VALUE", ["MAX", "VALUE"]),
        ("simple", ["simple"]),
        ("__init__", ["init"]),
    ],
)
def test_split_identifier(ident, parts):
    assert split_identifier(ident) == parts


def test_digits_are_kept():
    assert "404" in tokenize("HTTP 404 returned")
    assert raw_terms("log4j") == ["log4j", "log", "4", "j"]


def test_non_ascii_splits_tokens():
    assert raw_terms("naïve café") == ["na", "ve", "caf"]


def test_stemmed_token_colliding_with_stop_word_is_dropped():
    assert "class" not in tokenize("classes", SOURCE_CODE)


def test_shipped_term_lists():
    assert 120 <= len(STOP_WORDS) <= 140
    assert {"the", "a", "of", "and"} <= STOP_WORDS
    assert len(JAVA_KEYWORDS) == 53
    assert {"class", "goto", "const", "true", "false", "null"} <= JAVA_KEYWORDS


def test_custom_lists(tmp_path):
    stop = tmp_path / "stop.txt"
    stop.write_text("# mine\nwidget\n", encoding="utf-8")
    pre = TextPreprocessor.from_files(stop_words_path=stop)
    assert pre.tokenize("the widget") == ["the"]
    with pytest.raises(ValueError):
        pre.tokenize("x", "markdown")


_TOKEN = re.compile(r"^[a-z0-9]+$")
_stop = sorted(STOP_WORDS)
_keywords = sorted(JAVA_KEYWORDS)
_vocab = [w for w, _ in PORTER_VOCABULARY]


def _styled(word, style):
    return {"lower": word, "upper": word.upper(), "title": word.capitalize()}[style]


def _sentences(words):
    return st.lists(
        st.tuples(
            st.sampled_from(words),
            st.sampled_from(["lower", "upper", "title"]),
            st.sampled_from([" ", ", ", ". ", "\n", "(", ")", "-", "/"]),
        ),
        max_size=25,
    ).map(lambda parts: "".join(_styled(w, s) + sep for w, s, sep in parts))


sentences = _sentences(_vocab + _stop + _keywords)
# Words whose stems are fixed points, plus words the pipeline drops.
fixed_point_sentences = _sentences(_vocab + _stop)


@settings(max_examples=200, deadline=None)
@given(sentences, st.sampled_from([REPORT_TEXT, SOURCE_CODE]))
def test_tokens_are_clean(text, kind):
    tokens = tokenize(text, kind)
    for tok in tokens:
        assert _TOKEN.match(tok)
        assert tok not in STOP_WORDS
        if kind == SOURCE_CODE:
            assert tok not in JAVA_KEYWORDS


@settings(max_examples=200, deadline=None)
@given(fixed_point_sentences, st.sampled_from([REPORT_TEXT, SOURCE_CODE]))
def test_pipeline_is_idempotent_on_fixed_point_vocabulary(text, kind):
    tokens = tokenize(text, kind)
    assert Counter(tokenize(" ".join(tokens), kind)) == Counter(tokens)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=200))
def test_tokenize_is_total(text):
    for tok in tokenize(text, SOURCE_CODE):
        assert tok and _TOKEN.match(tok)
