"""Domain dictionaries and closed-class word lists.

Every later stage is driven by the data loaded here: the system-call synonym
dictionary, the CTI noun dictionary, the edge-direction map, nominalization
pairs, the antonym table used for solution-graph inversion and a handful of
closed word lists.  All files share one line format::

    canonical<TAB>item1,item2,...

Blank lines and lines starting with ``#`` are ignored.  A Lexicon is treated
as read-only once loaded and can be shared between workers.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

CANONICAL_VERBS = (
    "write", "read", "unlink", "send", "receive",
    "connect", "fork", "exec", "exit", "mmap",
)

# When a lemma is listed under two calls, the earlier call in each pair keeps it.
_SYNONYM_PRIORITY = {("read", "receive"): "read", ("write", "read"): "write"}

LEXICON_FILES = (
    "syscalls.lex", "nouns.lex", "directions.lex", "nominals.lex",
    "antonyms.lex", "wordlists.lex", "irregular.lex",
)
OPTIONAL_FILES = ("patterns.lex",)

_WORDLIST_NAMES = (
    "pronouns", "reflexives", "plural_pronouns", "be_forms", "auxiliaries",
    "modals", "infinitive_markers", "light_verbs", "discourse_markers",
    "negators", "determiners", "prepositions", "conjunctions", "subordinators",
    "conditional_markers", "anaphora_cues", "general_verbs", "known_processes",
)


class LexiconError(ValueError):
    """Raised when a lexicon file is malformed or inconsistent."""


class Direction(str, enum.Enum):
    SUBJECT_TO_OBJECT = "S2O"
    OBJECT_TO_SUBJECT = "O2S"


def phrase_key(text: str) -> str:
    """Matching key for noun phrases: case-folded, '&' read as 'and', no spacing."""
    text = text.casefold().replace("&", "and")
    return re.sub(r"[\s\-_]+", "", text)


@dataclass(frozen=True)
class _Line:
    source: str
    lineno: int
    head: str
    items: tuple[str, ...]

    @property
    def where(self) -> str:
        return f"{self.source}:{self.lineno}"


def _parse_lines(text: str, source: str, split_items: bool = True) -> list[_Line]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise LexiconError(f"{source}:{lineno}: expected 'canonical<TAB>items'")
        head, rest = line.split("\t", 1)
        head = head.strip()
        if not head:
            raise LexiconError(f"{source}:{lineno}: empty canonical entry")
        if split_items:
            if rest.rstrip().endswith(","):
                raise LexiconError(f"{source}:{lineno}: trailing comma")
            items = tuple(i.strip() for i in rest.split(","))
            if any(not i for i in items):
                raise LexiconError(f"{source}:{lineno}: empty item")
        else:
            items = (rest.strip(),)
        out.append(_Line(source, lineno, head, items))
    return out


@dataclass(frozen=True)
class ClosedClassLists:
    pronouns: frozenset[str]
    reflexives: frozenset[str]
    plural_pronouns: frozenset[str]
    be_forms: frozenset[str]
    auxiliaries: frozenset[str]
    modals: frozenset[str]
    infinitive_markers: frozenset[str]
    light_verbs: frozenset[str]
    discourse_markers: frozenset[str]
    negators: frozenset[str]
    determiners: frozenset[str]
    prepositions: frozenset[str]
    conjunctions: frozenset[str]
    subordinators: frozenset[str]
    conditional_markers: frozenset[str]
    anaphora_cues: tuple[tuple[str, ...], ...]
    general_verbs: frozenset[str]
    known_processes: frozenset[str]

    def is_member(self, name: str, word: str) -> bool:
        return word.lower() in getattr(self, name)


@dataclass(frozen=True)
class Lexicon:
    syscalls: Mapping[str, frozenset[str]]
    nouns: Mapping[str, frozenset[str]]
    directions: Mapping[str, Direction]
    nominals: Mapping[str, str]
    antonyms: Mapping[str, str]
    words: ClosedClassLists
    irregular: Mapping[str, str]
    patterns: tuple[tuple[str, str], ...] = ()
    _verb_index: dict = field(default_factory=dict, repr=False, compare=False)
    _noun_index: dict = field(default_factory=dict, repr=False, compare=False)
    _known_lemmas: frozenset = field(default=frozenset(), repr=False, compare=False)
    noun_span_max: int = field(default=1, repr=False, compare=False)

    def __post_init__(self):
        verb_index = {}
        for canon, syns in self.syscalls.items():
            for s in syns:
                verb_index[s.lower()] = canon
        noun_index = {}
        span_max = 1
        for canon, phrases in self.nouns.items():
            for p in phrases:
                noun_index[phrase_key(p)] = canon
                span_max = max(span_max, len(p.split()))
        known = set(verb_index) | set(self.nominals.values()) | set(self.irregular.values())
        w = self.words
        known |= w.infinitive_markers | w.light_verbs | w.general_verbs
        known |= {n.lower() for n in self.nominals}
        object.__setattr__(self, "_verb_index", verb_index)
        object.__setattr__(self, "_noun_index", noun_index)
        object.__setattr__(self, "_known_lemmas", frozenset(known))
        object.__setattr__(self, "noun_span_max", span_max)

    # -- lookups ---------------------------------------------------------

    def canonical_verb(self, lemma: str) -> str | None:
        return self._verb_index.get(lemma.lower())

    def is_canonical_verb(self, word: str) -> bool:
        return word in self.syscalls

    def noun_at(self, words: list[str], start: int) -> tuple[str, int] | None:
        """Longest noun-dictionary match beginning at ``words[start]``.

        Returns ``(canonical token, end index)`` or None.
        """
        limit = min(len(words), start + self.noun_span_max)
        for end in range(limit, start, -1):
            canon = self._noun_index.get(phrase_key("".join(words[start:end])))
            if canon is not None:
                return canon, end
        return None

    def canonical_noun(self, words: list[str] | str) -> tuple[str, tuple[int, int]] | None:
        """Longest noun-dictionary phrase anywhere in ``words`` (leftmost on ties)."""
        if isinstance(words, str):
            words = words.split()
        best = None
        for i in range(len(words)):
            hit = self.noun_at(words, i)
            if hit and (best is None or hit[1] - i > best[1][1] - best[1][0]):
                best = (hit[0], (i, hit[1]))
        return best

    def direction(self, syscall: str) -> Direction:
        return self.directions[syscall]

    def is_known_lemma(self, word: str) -> bool:
        return word in self._known_lemmas

    def lemmatize(self, word: str) -> str:
        """Suffix-stripping lemmatizer over the closed vocabulary.

        A stripped candidate is only accepted when it is a known lemma, so
        unfamiliar words (file names, nouns) come back lower-cased but intact.
        """
        w = word.lower()
        if w in self.irregular:
            return self.irregular[w]
        if w in self._known_lemmas:
            return w
        for cand in _suffix_candidates(w):
            if cand in self._known_lemmas:
                return cand
        return w

    # -- serialization ---------------------------------------------------

    def canonical_files(self) -> dict[str, str]:
        """Canonical text of every lexicon file (sorted, comment-free)."""
        def rows(pairs):
            return "".join(f"{h}\t{','.join(items)}\n" for h, items in pairs)

        files = {
            "syscalls.lex": rows((v, sorted(self.syscalls[v])) for v in CANONICAL_VERBS),
            "nouns.lex": rows((k, sorted(v)) for k, v in sorted(self.nouns.items())),
            "directions.lex": rows((v, [self.directions[v].value]) for v in CANONICAL_VERBS),
            "nominals.lex": rows((k, [v]) for k, v in sorted(self.nominals.items())),
            "antonyms.lex": rows((k, [v]) for k, v in sorted(self.antonyms.items())),
            "irregular.lex": rows(_invert_irregular(self.irregular)),
        }
        wl = []
        for name in _WORDLIST_NAMES:
            val = getattr(self.words, name)
            if name == "anaphora_cues":
                wl.append((name, sorted(" ".join(c) for c in val)))
            else:
                wl.append((name, sorted(val)))
        files["wordlists.lex"] = rows(wl)
        if self.patterns:
            files["patterns.lex"] = "".join(f"{c}\t{e}\n" for c, e in self.patterns)
        return files

    def save(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in self.canonical_files().items():
            (d / name).write_text(text, encoding="utf-8")


def _invert_irregular(irregular: Mapping[str, str]):
    by_lemma: dict[str, list[str]] = {}
    for form, lemma in irregular.items():
        by_lemma.setdefault(lemma, []).append(form)
    return sorted((k, sorted(v)) for k, v in by_lemma.items())


def _suffix_candidates(w: str) -> Iterable[str]:
    if w.endswith("ies") and len(w) > 4:
        yield w[:-3] + "y"
    if w.endswith("es") and len(w) > 3:
        yield w[:-2]
    if w.endswith("s") and not w.endswith("ss") and len(w) > 2:
        yield w[:-1]
    if w.endswith("ied") and len(w) > 4:
        yield w[:-3] + "y"
    for suf in ("ed", "ing"):
        if w.endswith(suf) and len(w) > len(suf) + 2:
            stem = w[: -len(suf)]
            yield stem
            yield stem + "e"
            if len(stem) > 2 and stem[-1] == stem[-2]:
                yield stem[:-1]


# -- loading -------------------------------------------------------------

def _read(directory: Path | None, name: str) -> tuple[str, str] | None:
    if directory is not None:
        p = directory / name
        if p.exists():
            return p.read_text(encoding="utf-8"), str(p)
    if name in OPTIONAL_FILES:
        return None
    res = resources.files("cti2graph").joinpath("data", name)
    return res.read_text(encoding="utf-8"), name


def _load_syscalls(lines: list[_Line]) -> dict[str, frozenset[str]]:
    owner: dict[str, tuple[str, _Line]] = {}
    table: dict[str, set[str]] = {}
    for ln in lines:
        canon = ln.head.lower()
        if canon not in CANONICAL_VERBS:
            raise LexiconError(f"{ln.where}: unknown canonical verb {ln.head!r}")
        if canon in table:
            raise LexiconError(f"{ln.where}: canonical verb {canon!r} listed twice")
        table[canon] = {canon}
        for syn in ln.items:
            syn = syn.lower()
            prev = owner.get(syn)
            if prev is not None and prev[0] != canon:
                pair = (prev[0], canon) if (prev[0], canon) in _SYNONYM_PRIORITY else (canon, prev[0])
                winner = _SYNONYM_PRIORITY.get(pair)
                if winner is None:
                    raise LexiconError(
                        f"{ln.where}: synonym {syn!r} already mapped to "
                        f"{prev[0]!r} at {prev[1].where}")
                if winner == prev[0]:
                    continue
                table[prev[0]].discard(syn)
            owner[syn] = (canon, ln)
            table[canon].add(syn)
    missing = [v for v in CANONICAL_VERBS if v not in table]
    if missing:
        raise LexiconError(f"syscalls.lex: missing canonical verbs {missing}")
    return {v: frozenset(table[v]) for v in CANONICAL_VERBS}


def _load_nouns(lines: list[_Line]) -> dict[str, frozenset[str]]:
    seen: dict[str, tuple[str, _Line]] = {}
    table: dict[str, set[str]] = {}
    for ln in lines:
        if ln.head != ln.head.strip() or not ln.head:
            raise LexiconError(f"{ln.where}: canonical token has surrounding whitespace")
        table.setdefault(ln.head, set())
        for phrase in ln.items:
            key = phrase_key(phrase)
            prev = seen.get(key)
            if prev is not None and prev[0] != ln.head:
                raise LexiconError(
                    f"duplicate surface phrase {phrase!r}: {prev[1].where} "
                    f"({prev[0]}) and {ln.where} ({ln.head})")
            seen[key] = (ln.head, ln)
            table[ln.head].add(phrase)
    return {k: frozenset(v) for k, v in table.items()}


def _load_directions(lines: list[_Line]) -> dict[str, Direction]:
    out = {}
    for ln in lines:
        if ln.head not in CANONICAL_VERBS:
            raise LexiconError(f"{ln.where}: unknown canonical verb {ln.head!r}")
        try:
            out[ln.head] = Direction(ln.items[0])
        except ValueError:
            raise LexiconError(f"{ln.where}: direction must be S2O or O2S") from None
    missing = [v for v in CANONICAL_VERBS if v not in out]
    if missing:
        raise LexiconError(f"directions.lex: no direction for {missing}")
    return out


def _load_pairs(lines: list[_Line]) -> dict[str, str]:
    out = {}
    for ln in lines:
        if len(ln.items) != 1:
            raise LexiconError(f"{ln.where}: expected exactly one value")
        out[ln.head.lower()] = ln.items[0].lower()
    return out


def _load_wordlists(lines: list[_Line]) -> ClosedClassLists:
    lists = {}
    for ln in lines:
        if ln.head not in _WORDLIST_NAMES:
            raise LexiconError(f"{ln.where}: unknown word list {ln.head!r}")
        lists[ln.head] = [i.lower() for i in ln.items]
    missing = [n for n in _WORDLIST_NAMES if n not in lists]
    if missing:
        raise LexiconError(f"wordlists.lex: missing lists {missing}")
    kw = {n: frozenset(v) for n, v in lists.items() if n != "anaphora_cues"}
    # longest cue first so "the following files" wins over "the following"
    cues = sorted({tuple(c.split()) for c in lists["anaphora_cues"]}, key=lambda c: (-len(c), c))
    return ClosedClassLists(anaphora_cues=tuple(cues), **kw)


def _load_irregular(lines: list[_Line]) -> dict[str, str]:
    out = {}
    for ln in lines:
        for form in ln.items:
            out[form.lower()] = ln.head.lower()
    return out


def load_lexicon(directory: str | Path | None = None) -> Lexicon:
    """Load and validate a lexicon.

    Files missing from ``directory`` fall back to the bundled defaults, so a
    user directory only needs the files it overrides.
    """
    d = Path(directory) if directory is not None else None
    texts = {}
    for name in LEXICON_FILES + OPTIONAL_FILES:
        got = _read(d, name)
        if got is not None:
            texts[name] = got

    def lines(name, split=True):
        text, src = texts[name]
        return _parse_lines(text, src, split)

    patterns = ()
    if "patterns.lex" in texts:
        patterns = tuple((ln.head, ln.items[0]) for ln in lines("patterns.lex", split=False))
        for cls, expr in patterns:
            try:
                re.compile(expr)
            except re.error as exc:
                raise LexiconError(f"patterns.lex: bad expression for {cls}: {exc}") from None

    return Lexicon(
        syscalls=_load_syscalls(lines("syscalls.lex")),
        nouns=_load_nouns(lines("nouns.lex")),
        directions=_load_directions(lines("directions.lex")),
        nominals=_load_pairs(lines("nominals.lex")),
        antonyms=_load_pairs(lines("antonyms.lex")),
        words=_load_wordlists(lines("wordlists.lex")),
        irregular=_load_irregular(lines("irregular.lex")),
        patterns=patterns,
    )


@lru_cache(maxsize=None)
def default_lexicon() -> Lexicon:
    return load_lexicon(None)
