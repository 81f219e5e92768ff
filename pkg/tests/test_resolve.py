from hypothesis import given, settings, strategies as st

from cti2graph.lexicon import CANONICAL_VERBS, default_lexicon
from cti2graph.normalize import homogenize, to_active, tokenize
from cti2graph.resolve import (
    resolve_ellipsis, resolve_entities, resolve_pronouns, subject_candidates,
)
from cti2graph.textmodel import Pos, subject_span
from strategies import generated_report, report_text

LX = default_lexicon()


def norm(text):
    return to_active(homogenize(tokenize(text, LX), LX), LX)


def esr(text, window=5):
    return resolve_ellipsis(norm(text), window)


def full(text):
    return resolve_entities(resolve_pronouns(esr(text), LX), LX)


def texts(doc):
    return [s.text for s in doc.sentences]


def subject_text(s):
    span = subject_span(s)
    return " ".join(t.surface for t in s.tokens[span[0]:span[1]]) if span else None


def test_bullet_takes_introducer_subject():
    doc = esr("It performs the following actions:\n- Creates a copy of itself in %TEMP%")
    assert texts(doc)[1] == "It write a copy of itself in TEMP"


def test_first_sentence_without_subject_gets_wildcard():
    assert texts(esr("Deletes the original file.")) == ["* unlink the original file"]


def test_nearest_candidate_wins():
    doc = esr("loader.exe runs. The dropper is idle. agent.exe runs. Deletes the file.")
    assert texts(doc)[-1].startswith("agent.exe unlink")


def test_candidates_ordered_by_distance():
    doc = norm("loader.exe runs. The dropper is idle. agent.exe runs. Deletes the file.")
    cands = subject_candidates(doc.sentences, 3, 5)
    dists = [c.distance for c in cands]
    assert dists == sorted(dists) and all(d >= 1 for d in dists)
    assert cands[0].surface == "agent.exe"


def test_window_limits_candidates():
    text = "loader.exe runs. " + "Nothing happened here. " * 3 + "Deletes the file."
    assert texts(esr(text, window=1))[-1].startswith("* unlink")


def test_implicit_agent_is_filled():
    doc = esr("svc.exe starts. The payload is dropped.")
    assert texts(doc)[1] == "svc.exe write The payload"


def test_pronouns_bind_to_subject():
    doc = resolve_pronouns(esr("Authorization.exe is the main component. "
                               "It writes a copy of itself."), LX)
    assert texts(doc)[1] == "Authorization.exe write a copy of Authorization.exe"


def test_pronoun_without_antecedent():
    doc = resolve_pronouns(esr("It connects to the C&C."), LX)
    assert texts(doc) == ["* connect to the IP:.*"]


def test_pronoun_chain():
    doc = resolve_pronouns(esr("dropper.exe starts. It drops a.dll. It runs a.dll. It exits."), LX)
    assert all(t.startswith("dropper.exe ") for t in texts(doc))


def test_plural_pronoun_prefers_plural_nominal():
    doc = resolve_pronouns(esr("The attackers use loader.exe. They deliver payload.dll."), LX)
    assert texts(doc)[1].startswith("The attackers")
    # the most recent plural nominal wins over an older plural subject
    doc = resolve_pronouns(esr("The attackers send emails. They deliver payload.dll."), LX)
    assert texts(doc)[1].startswith("emails")


def test_anaphora_expansion():
    doc = full("The malware deletes the following files:\nmscno.exe\nauthorization.EXE-0AD199D6.pf")
    assert texts(doc) == ["The malware unlink mscno.exe",
                          "The malware unlink authorization.EXE-0AD199D6.pf"]
    assert [s.index for s in doc.sentences] == [0, 1]


def test_anaphora_inline_list():
    doc = full("It drops the following files: a.dll, b.dll and c.dll.")
    assert len(doc.sentences) == 3


def test_nominalization_and_auxiliary():
    assert texts(full("The malware makes a modification to the registry.")) == [
        "The malware write to the registry"]
    assert texts(full("The malware tries to open explorer.exe.")) == [
        "The malware exec explorer.exe"]


@settings(max_examples=300, deadline=None)
@given(report_text)
def test_no_pronoun_left_in_subject(text):
    doc = resolve_pronouns(esr(text), LX)
    for s in doc.sentences:
        span = subject_span(s)
        if span:
            for t in s.tokens[span[0]:span[1]]:
                assert not (t.pos is Pos.PRON and t.lower in LX.words.pronouns)


@settings(max_examples=300, deadline=None)
@given(generated_report)
def test_no_pronoun_left_in_subject_reports(text):
    test_no_pronoun_left_in_subject.hypothesis.inner_test(text)


@settings(max_examples=300, deadline=None)
@given(st.one_of(report_text, generated_report))
def test_every_verb_sentence_has_subject(text):
    for s in esr(text).sentences:
        if s.header or not any(t.pos in (Pos.VERB, Pos.AUX) for t in s.tokens):
            continue
        assert subject_span(s) is not None, s.text


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["a.dll", "b.exe", "c.bin", "d.sys", "e.ps1"]),
                min_size=1, max_size=5),
       st.sampled_from(["deletes", "drops", "downloads"]), st.booleans())
def test_anaphora_conserves_actions(items, verb, inline):
    if inline:
        text = f"loader.exe {verb} the following files: {', '.join(items)}."
    else:
        text = f"loader.exe {verb} the following files:\n" + "\n".join(items)
    doc = full(text)
    assert len(doc.sentences) == len(items)
    assert len({s.tokens[1].lemma for s in doc.sentences}) == 1
    assert {subject_text(s) for s in doc.sentences} == {"loader.exe"}


@settings(max_examples=300, deadline=None)
@given(st.one_of(report_text, generated_report))
def test_resolve_entities_introduces_no_new_tokens(text):
    before = resolve_pronouns(esr(text), LX)
    after = resolve_entities(before, LX)
    seen = {t.surface for s in before.sentences for t in s.tokens}
    allowed = seen | set(CANONICAL_VERBS) | set(LX.nouns)
    for s in after.sentences:
        for t in s.tokens:
            assert t.surface in allowed
