from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from cti2graph.lexicon import CANONICAL_VERBS, Direction, LexiconError, default_lexicon, load_lexicon

DATA = Path(__file__).parents[1] / "src" / "cti2graph" / "data"


def _bundled_rows():
    rows = []
    for line in (DATA / "syscalls.lex").read_text().splitlines():
        if line and not line.startswith("#"):
            head, items = line.split("\t")
            rows.append((head, items.split(",")))
    return rows


def test_canonical_verb_examples(lx):
    assert lx.canonical_verb("drop") == "write"
    for w in ("install", "save", "copy"):
        assert lx.canonical_verb(w) == "write"
    assert lx.canonical_verb("write") == "write"
    assert lx.canonical_verb("frobnicate") is None
    assert lx.canonical_verb("spawn") == "fork"
    assert lx.canonical_verb("delete") == "unlink"
    assert lx.canonical_verb("connect") == "connect"


def test_lookup_is_case_insensitive(lx):
    assert lx.canonical_verb("Drop") == lx.canonical_verb("DROP") == "write"


def test_canonical_set_and_self_mapping(lx):
    assert set(lx.syscalls) == set(CANONICAL_VERBS)
    assert len(CANONICAL_VERBS) == 10
    for v in CANONICAL_VERBS:
        assert v in lx.syscalls[v]
        assert lx.canonical_verb(v) == v


def test_every_bundled_synonym_maps_back():
    lx = load_lexicon()
    prio = {("read", "receive"): "read", ("write", "read"): "write"}
    owner = {}
    for head, items in _bundled_rows():
        for s in items:
            owner.setdefault(s, set()).add(head)
    for syn, heads in owner.items():
        got = lx.canonical_verb(syn)
        if len(heads) == 1:
            assert got == next(iter(heads)), syn
        else:
            assert got in {prio.get(tuple(sorted(heads, key=CANONICAL_VERBS.index)))}, syn


def test_shared_lemmas_follow_priority(lx):
    # "get" sits under read and receive, "exfiltrate" under write and read
    assert lx.canonical_verb("get") == "read"
    assert lx.canonical_verb("exfiltrate") == "write"


def test_canonical_noun_examples(lx):
    assert lx.canonical_noun(["C&C"])[0] == "IP:.*"
    assert lx.canonical_noun(["%TEMP%"])[0] == "TEMP"
    assert lx.canonical_noun(["notepad.exe"]) is None
    assert lx.canonical_noun("command and control".split()) == ("IP:.*", (0, 3))
    # '&' and 'and' are interchangeable
    assert lx.canonical_noun("Command & Control".split())[0] == "IP:.*"


def test_noun_longest_match_wins(lx):
    hit = lx.canonical_noun("the command and control server".split())
    assert hit is not None
    assert hit[1][1] - hit[1][0] >= 3


def test_noun_dictionary_invariants(lx):
    seen = {}
    for canon, phrases in lx.nouns.items():
        assert canon and canon == canon.strip()
        for p in phrases:
            assert seen.setdefault(p.casefold(), canon) == canon


def test_directions_total():
    lx = load_lexicon()
    assert set(lx.directions) == set(CANONICAL_VERBS)
    s2o, o2s = Direction.SUBJECT_TO_OBJECT, Direction.OBJECT_TO_SUBJECT
    assert lx.direction("send") is s2o and lx.direction("write") is s2o
    assert lx.direction("receive") is o2s and lx.direction("read") is o2s
    for v in ("unlink", "exec", "fork", "exit", "mmap", "connect"):
        assert lx.direction(v) is s2o


def test_word_lists_lowercase(lx):
    for name in ("pronouns", "be_forms", "negators", "discourse_markers", "known_processes"):
        assert all(w == w.lower() for w in getattr(lx.words, name))


def test_round_trip_is_byte_equal(tmp_path, lx):
    lx.save(tmp_path)
    again = load_lexicon(tmp_path)
    assert again == lx
    assert again.canonical_files() == lx.canonical_files()


def test_duplicate_noun_phrase_names_both_lines(tmp_path):
    (tmp_path / "nouns.lex").write_text("IP:.*\tC2,C&C\nTEMP\t%TEMP%,c2\n")
    with pytest.raises(LexiconError) as exc:
        load_lexicon(tmp_path)
    msg = str(exc.value)
    assert "nouns.lex:1" in msg and "nouns.lex:2" in msg


def test_unknown_canonical_verb_rejected(tmp_path):
    rows = (DATA / "syscalls.lex").read_text() + "frob\tfrobnicate\n"
    (tmp_path / "syscalls.lex").write_text(rows)
    with pytest.raises(LexiconError, match="frob"):
        load_lexicon(tmp_path)


def test_trailing_comma_rejected(tmp_path):
    (tmp_path / "nouns.lex").write_text("TEMP\t%TEMP%,\n")
    with pytest.raises(LexiconError):
        load_lexicon(tmp_path)


def test_user_dir_overrides_only_given_files(tmp_path, lx):
    (tmp_path / "nouns.lex").write_text("TEMP\t%TEMP%,<TEMP>\n")
    custom = load_lexicon(tmp_path)
    assert custom.syscalls == lx.syscalls
    assert custom.canonical_noun(["C&C"]) is None


def test_lemmatize(lx):
    assert lx.lemmatize("drops") == "drop"
    assert lx.lemmatize("dropped") == "drop"
    assert lx.lemmatize("creating") == "create"
    assert lx.lemmatize("written") == "write"
    assert lx.lemmatize("regex.exe") == "regex.exe"


@settings(max_examples=200)
@given(st.text(max_size=20))
def test_canonical_verb_is_pure(word):
    lx = default_lexicon()
    first = lx.canonical_verb(word)
    assert lx.canonical_verb(word) == first
    assert first is None or first in CANONICAL_VERBS
