from hypothesis import given, settings

from cti2graph.lexicon import default_lexicon
from cti2graph.normalize import tokenize
from cti2graph.textmodel import (
    Pos, Sentence, detect_passive, make_tokens, pos_tag, split_words, subject_span,
)
from strategies import generated_sentence, raw_text, report_text

LX = default_lexicon()


def tags(text):
    return [(t.surface, t.pos) for t in make_tokens(text, LX)]


def test_creates_copy_of_itself():
    toks = make_tokens("Creates a copy of itself", LX)
    assert toks[0].pos is Pos.VERB and toks[0].lemma == "create"
    assert toks[-1].pos is Pos.PRON


def test_passive_phrase_tags():
    toks = {t.surface: t for t in make_tokens("the file is deleted by the malware", LX)}
    assert toks["is"].pos is Pos.AUX
    assert toks["deleted"].pos is Pos.VERB and toks["deleted"].participle
    assert toks["by"].pos is Pos.PREP


def test_empty_input_gives_no_tags():
    assert pos_tag([], LX) == []
    assert make_tokens("", LX) == []


def test_entities_are_sym():
    got = dict(tags("It drops payload.dll to 10.13.13.1"))
    assert got["payload.dll"] is Pos.SYM and got["10.13.13.1"] is Pos.SYM


def test_negators_and_be_forms():
    got = dict(tags("svchost.exe does not fork explorer.exe"))
    assert got["not"] is Pos.NEG
    assert got["fork"] is Pos.VERB


def test_unknown_word_defaults_to_noun():
    assert dict(tags("the zorblax"))["zorblax"] is Pos.NOUN


def test_detect_passive_with_agent():
    s = Sentence(make_tokens("the downloaded file is deleted by the malware", LX))
    pa = detect_passive(s, LX.words.be_forms)
    assert pa.is_passive
    assert [t.surface for t in s.tokens[slice(*pa.patient)]] == ["the", "downloaded", "file"]
    assert [t.surface for t in s.tokens[slice(*pa.agent)]] == ["the", "malware"]


def test_detect_passive_active_and_implicit():
    s = Sentence(make_tokens("the malware deletes the file", LX))
    assert not detect_passive(s, LX.words.be_forms).is_passive
    s = Sentence(make_tokens("the payload is dropped", LX))
    pa = detect_passive(s, LX.words.be_forms)
    assert pa.is_passive and pa.agent is None


def test_subject_span_skips_leading_clause():
    s = Sentence(make_tokens("When executed , the malware writes a file", LX))
    lo, hi = subject_span(s)
    assert [t.surface for t in s.tokens[lo:hi]] == ["the", "malware"]


def test_split_words_keeps_env_paths():
    words = [w for w, _ in split_words(r"copies to %APPDATA%\Microsoft\x.exe.")]
    assert r"%APPDATA%\Microsoft\x.exe" in words


@settings(max_examples=300, deadline=None)
@given(report_text)
def test_pos_tag_is_total(text):
    toks = make_tokens(text, LX)
    again = pos_tag(toks, LX)
    assert len(again) == len(toks)
    assert all(isinstance(t.pos, Pos) for t in again)


@settings(max_examples=300, deadline=None)
@given(generated_sentence)
def test_no_passive_without_be_form(text):
    s = Sentence(make_tokens(text, LX))
    has_be = any(t.pos is Pos.AUX and t.lemma in LX.words.be_forms or t.lower in LX.words.be_forms
                 for t in s.tokens)
    if not has_be:
        assert not detect_passive(s, LX.words.be_forms).is_passive


@settings(max_examples=300, deadline=None)
@given(report_text)
def test_no_passive_without_be_form_free_text(text):
    s = Sentence(make_tokens(text, LX))
    if not any(t.lower in LX.words.be_forms for t in s.tokens):
        assert not detect_passive(s, LX.words.be_forms).is_passive


@settings(max_examples=300, deadline=None)
@given(raw_text)
def test_token_spans_reconstruct(raw):
    doc = tokenize(raw, LX)
    last = 0
    for s in doc.sentences:
        assert s.tokens
        for t in s.tokens:
            a, b = t.span
            assert 0 <= a < b <= len(raw)
            assert raw[a:b] == t.surface
            assert a >= last
            last = b


@settings(max_examples=200, deadline=None)
@given(report_text)
def test_sentence_indices_unique(text):
    doc = tokenize(text, LX)
    assert [s.index for s in doc.sentences] == list(range(len(doc.sentences)))
