from hypothesis import given, settings, strategies as st

from cti2graph.frames import (
    Frame, Role, candidate_frames, extract_frames, prune_non_syscall, purge_negated,
)
from cti2graph.lexicon import CANONICAL_VERBS, default_lexicon
from cti2graph.normalize import homogenize, tokenize
from cti2graph.pipeline import extract
from cti2graph.textmodel import Pos
from strategies import generated_report, report_text

LX = default_lexicon()


def frames_of(text):
    s = homogenize(tokenize(text, LX), LX).sentences[0]
    return extract_frames(s, LX)


def test_simple_frame():
    (f,) = frames_of("The malware unlink the regex.exe")
    assert (f.agent, f.action, f.patient) == ("The malware", "unlink", "the regex.exe")
    assert not f.negated


def test_negated_frame():
    (f,) = frames_of("svchost.exe does not fork explorer.exe")
    assert f.negated and not f.conditional
    assert purge_negated([f]) == []


def test_location_extra():
    (f,) = frames_of("Authorization.exe write a copy of itself in TEMP")
    assert f.patient == "a copy of itself"
    assert f.extras == ((Role.LOCATION, "TEMP"),)


def test_preposition_roles():
    (f,) = frames_of("loader.exe downloads stage2.bin from evil.com to C:\\Temp")
    assert f.extras_of(Role.SOURCE) == ["evil.com"]
    assert f.extras_of(Role.TARGET) == ["C:\\Temp"]


def test_patient_from_target_when_no_object():
    (f,) = frames_of("It connects to 10.13.13.1")
    assert f.patient == "10.13.13.1"


def test_conditional_clause():
    (f,) = frames_of("If the mutex exists, loader.exe does not delete config.dat")
    assert f.negated and f.conditional
    assert f.extras_of(Role.TEMPORAL) == ["If the mutex exists"]
    assert purge_negated([f]) == [f]


def test_coordination_fans_out():
    fs = frames_of("dropper.exe writes a.dll and b.dll")
    assert [f.patient for f in fs] == ["a.dll", "b.dll"]


def test_two_verbs_two_frames():
    fs = frames_of("dropper.exe downloads a.dll and executes it")
    assert [f.action for f in fs] == ["read", "exec"]


def test_prune_examples():
    raw = [Frame("*", "bypass", "uac"), Frame("*", "download", "x.bin")]
    kept = prune_non_syscall(raw, LX)
    assert [f.action for f in kept] == ["read"]
    assert prune_non_syscall([], LX) == []


def test_no_nominal_is_skipped():
    s = homogenize(tokenize("Then runs .", LX), LX).sentences[0]
    assert candidate_frames(s, LX) == []


def test_purge_identity_without_negation():
    fs = [Frame("a", "write", "b"), Frame("a", "read", "c", conditional=True)]
    assert purge_negated(fs) == fs


@settings(max_examples=200, deadline=None)
@given(st.one_of(report_text, generated_report))
def test_frame_invariants(text):
    res = extract(text, LX)
    last = -1
    for f in res.frames:
        assert f.action in CANONICAL_VERBS
        assert f.agent and f.patient
        assert f.sentence >= last
        last = f.sentence
    for s in res.summary.sentences:
        fs = extract_frames(s, LX)
        verbs = sum(1 for t in s.tokens if t.pos is Pos.VERB and LX.canonical_verb(t.lemma))
        # coordination may fan one verb out, but each frame hangs on its own verb token
        assert len({f.verb_at for f in fs}) <= verbs


flags = st.tuples(st.booleans(), st.booleans())


@given(st.lists(flags, max_size=12))
def test_purge_is_set_difference(fl):
    fs = [Frame("a", "write", f"p{i}", negated=n, conditional=c) for i, (n, c) in enumerate(fl)]
    expected = [f for f in fs if f not in {g for g in fs if g.negated and not g.conditional}]
    assert purge_negated(fs) == expected
