"""Make implicit references explicit: ellipsis subjects, pronouns, entity redundancy."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .lexicon import Lexicon
from .see import WILDCARD
from .textmodel import (
    HEADS, IMPLICIT, Document, Pos, Sentence, Token,
    leading_clause, nominal_run_after, subject_span,
)

DEFAULT_ESR_WINDOW = 5


@dataclass(frozen=True)
class SubjectCandidate:
    tokens: tuple[Token, ...]
    distance: int
    role: str  # "subject" | "object"

    @property
    def surface(self) -> str:
        return " ".join(t.surface for t in self.tokens)


def wildcard_token(at: tuple[int, int] = (0, 0)) -> Token:
    return Token(WILDCARD, WILDCARD, Pos.SYM, (at[0], at[0]))


def _main_verb(s: Sentence) -> int | None:
    lead = leading_clause(s)
    start = lead[1] if lead else 0
    for i in range(start, len(s.tokens)):
        if s.tokens[i].pos in (Pos.VERB, Pos.AUX, Pos.NEG):
            return i
    return None


def _subject_slot(s: Sentence) -> int:
    """Where a subject would start: after any leading clause, adverbs and punctuation."""
    lead = leading_clause(s)
    i = lead[1] if lead else 0
    while i < len(s.tokens) and s.tokens[i].pos in (Pos.ADV, Pos.PUNCT):
        i += 1
    return i


def _object_of(s: Sentence) -> tuple[Token, ...] | None:
    v = _main_verb(s)
    if v is None:
        return None
    j = v + 1
    while j < len(s.tokens) and s.tokens[j].pos in (Pos.VERB, Pos.AUX, Pos.ADV, Pos.NEG):
        j += 1
    run = nominal_run_after(s.tokens, j)
    if run and any(t.pos in HEADS for t in s.tokens[run[0]:run[1]]):
        return tuple(s.tokens[run[0]:run[1]])
    return None


def subject_candidates(sentences: list[Sentence], i: int, window: int) -> list[SubjectCandidate]:
    """Subjects and objects of up to ``window`` preceding sentences, nearest first."""
    out = []
    for j in range(i - 1, max(-1, i - 1 - window), -1):
        prev = sentences[j]
        if prev.header:
            continue
        dist = i - j
        span = subject_span(prev)
        if span:
            out.append(SubjectCandidate(tuple(prev.tokens[span[0]:span[1]]), dist, "subject"))
        obj = _object_of(prev)
        if obj:
            out.append(SubjectCandidate(obj, dist, "object"))
    return out


def _introducer_subject(sentences: list[Sentence], i: int) -> tuple[Token, ...] | None:
    j = i - 1
    while j >= 0 and sentences[j].bulleted:
        j -= 1
    if j < 0 or not sentences[j].list_introducer:
        return None
    span = subject_span(sentences[j])
    return tuple(sentences[j].tokens[span[0]:span[1]]) if span else None


def _copies(tokens, at) -> list[Token]:
    return [replace(t, span=(at[0], at[0]) if t.span == (0, 0) else t.span) for t in tokens]


def resolve_ellipsis(doc: Document, window: int = DEFAULT_ESR_WINDOW) -> Document:
    """Give every subject-less (or IMPLICIT-agent) sentence the nearest prior subject.

    Bulleted sentences under a colon-terminated introducer take the
    introducer's subject.  With no candidate the subject is '*'.
    """
    done: list[Sentence] = []
    for i, s in enumerate(doc.sentences):
        toks = s.tokens
        implicit = [k for k, t in enumerate(toks) if t.surface == IMPLICIT]
        needs = not s.header and (implicit or (
            subject_span(s) is None and any(t.pos in (Pos.VERB, Pos.AUX) for t in toks)))
        if not needs:
            done.append(s)
            continue
        cand = _introducer_subject(done, i) if s.bulleted else None
        if cand is None:
            ranked = subject_candidates(done, i, window)
            cand = ranked[0].tokens if ranked else None
        new = list(toks)
        for k in reversed(implicit):
            fill = _copies(cand, new[k].span) if cand else [wildcard_token(new[k].span)]
            new[k:k + 1] = fill
        if subject_span(Sentence(new)) is None and any(
                t.pos in (Pos.VERB, Pos.AUX) for t in new):
            k = _subject_slot(Sentence(new))
            at = new[min(k, len(new) - 1)].span
            fill = _copies(cand, at) if cand else [wildcard_token(at)]
            new[k:k] = fill
        done.append(s.copy(tokens=new))
    return Document(doc.source, doc.raw, done)


def _is_plural(tok: Token) -> bool:
    low = tok.lower
    return tok.pos is Pos.NOUN and low.endswith("s") and not low.endswith("ss") and len(low) > 3


def resolve_pronouns(doc: Document, lexicon: Lexicon) -> Document:
    """Replace pronouns by their antecedents, nearest preceding subject first.

    Reflexives bind to their own sentence's subject; plurals prefer the most
    recent plural nominal; anything unresolvable becomes '*'.
    """
    words = lexicon.words
    last_subject: list[Token] | None = None
    last_plural: list[Token] | None = None
    out: list[Sentence] = []
    for s in doc.sentences:
        if s.header:
            out.append(s)
            continue
        toks = list(s.tokens)
        span = subject_span(s)
        repl: dict[int, list[Token]] = {}

        def bind(k: int, ante: list[Token] | None) -> None:
            repl[k] = _copies(ante, toks[k].span) if ante else [wildcard_token(toks[k].span)]

        def is_pronoun(tok: Token) -> bool:
            return tok.pos is Pos.PRON and tok.lower in words.pronouns

        # the subject binds backwards; reflexives then bind to the resolved subject
        subj_idx = range(span[0], span[1]) if span else range(0)
        for k in subj_idx:
            if is_pronoun(toks[k]):
                plural = toks[k].lower in words.plural_pronouns and last_plural
                bind(k, last_plural if plural else last_subject)
        own_subject = [t for k in subj_idx for t in repl.get(k, [toks[k]])] or None
        for k, tok in enumerate(toks):
            if k in subj_idx or not is_pronoun(tok):
                continue
            if tok.lower in words.reflexives:
                bind(k, own_subject or last_subject)
            elif tok.lower in words.plural_pronouns and last_plural:
                bind(k, last_plural)
            else:
                bind(k, last_subject)
        new: list[Token] = []
        for k, tok in enumerate(toks):
            new.extend(repl.get(k, [tok]))
        res = s.copy(tokens=new)
        out.append(res)
        rspan = subject_span(res)
        if rspan:
            last_subject = new[rspan[0]:rspan[1]]
        for k, tok in enumerate(new):
            if _is_plural(tok):
                run_start = k
                while run_start > 0 and new[run_start - 1].pos in (Pos.DET, Pos.ADJ, Pos.NOUN):
                    run_start -= 1
                last_plural = new[run_start:k + 1]
    return Document(doc.source, doc.raw, out)


# -- entity redundancy -----------------------------------------------------

def _collapse_auxiliaries(toks: list[Token], lexicon: Lexicon) -> list[Token]:
    """'tries to open' -> 'open'."""
    out: list[Token] = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if (t.pos is Pos.AUX and t.lemma in lexicon.words.infinitive_markers
                and i + 2 < len(toks) and toks[i + 1].lower == "to"
                and toks[i + 2].pos is Pos.VERB):
            i += 2
            continue
        out.append(t)
        i += 1
    return out


def _light_verb_len(toks: list[Token], i: int, lexicon: Lexicon) -> int:
    t = toks[i]
    if t.pos is not Pos.VERB:
        return 0
    if i + 1 < len(toks) and f"{t.source_lemma} {toks[i + 1].lower}" in lexicon.words.light_verbs:
        return 2
    return 1 if t.source_lemma in lexicon.words.light_verbs else 0


def _nominal_lemma(tok: Token, lexicon: Lexicon) -> str | None:
    low = tok.lower
    for cand in (low, low[:-1] if low.endswith("s") else None):
        if cand and cand in lexicon.nominals:
            return lexicon.nominals[cand]
    return None


def _collapse_nominalizations(toks: list[Token], lexicon: Lexicon) -> list[Token]:
    """'makes a modification to X' -> 'write to X' (via modify)."""
    out: list[Token] = []
    i = 0
    while i < len(toks):
        n = _light_verb_len(toks, i, lexicon)
        if n:
            j = i + n
            if j < len(toks) and toks[j].lower == "for":
                j += 1
            k = j
            hit = None
            while k < len(toks) and k - j < 5 and toks[k].pos in (Pos.DET, Pos.ADJ, Pos.NOUN, Pos.NUM):
                verb = _nominal_lemma(toks[k], lexicon) if toks[k].pos is Pos.NOUN else None
                if verb:
                    hit = (k, verb)
                    break
                k += 1
            if hit:
                k, verb = hit
                canon = lexicon.canonical_verb(verb) or verb
                out.append(Token(canon, canon, Pos.VERB, (toks[i].span[0], toks[k].span[1]),
                                 source_lemma=verb))
                i = k + 1
                if i < len(toks) and toks[i].lower == "of":
                    i += 1
                continue
        out.append(toks[i])
        i += 1
    return out


def _match_cue(toks: list[Token], i: int, cues) -> int:
    for cue in cues:
        n = len(cue)
        if i + n <= len(toks) and all(toks[i + k].lower == cue[k] for k in range(n)):
            return n
    return 0


_LIST_GLUE = frozenset({",", ";", "and", "or", "&"})


def _item_only(s: Sentence) -> bool:
    return bool(s.tokens) and any(t.pos is Pos.SYM for t in s.tokens) and all(
        t.pos is Pos.SYM or t.lower in _LIST_GLUE for t in s.tokens)


def _expand_anaphora(sentences: list[Sentence], lexicon: Lexicon) -> list[Sentence]:
    cues = lexicon.words.anaphora_cues
    out: list[Sentence] = []
    i = 0
    while i < len(sentences):
        s = sentences[i]
        toks = s.tokens
        found = None
        for k in range(len(toks)):
            if toks[k].pos in (Pos.VERB, Pos.PUNCT):
                continue
            n = _match_cue(toks, k, cues)
            if n:
                found = (k, n)
                break
        if not found:
            out.append(s)
            i += 1
            continue
        k, n = found
        end = k + n
        items: list[Token] = []
        rest_start = end
        if end < len(toks) and toks[end].surface == ":":
            j = end + 1
            while j < len(toks) and (toks[j].pos is Pos.SYM or toks[j].lower in _LIST_GLUE):
                if toks[j].pos is Pos.SYM:
                    items.append(toks[j])
                j += 1
            rest_start = j
        absorbed = 0
        ends_in_list = end < len(toks) and toks[end].surface == ":" and rest_start == len(toks)
        if ends_in_list:
            while i + 1 + absorbed < len(sentences) and _item_only(sentences[i + 1 + absorbed]):
                items.extend(t for t in sentences[i + 1 + absorbed].tokens if t.pos is Pos.SYM)
                absorbed += 1
        if not items:
            out.append(s)
            i += 1
            continue
        for item in items:
            out.append(s.copy(tokens=[replace(t) for t in toks[:k]] + [replace(item)]
                              + [replace(t) for t in toks[rest_start:]],
                              list_introducer=False))
        i += 1 + absorbed
    return out


def resolve_entities(doc: Document, lexicon: Lexicon) -> Document:
    """Anaphora expansion, nominalization and auxiliary collapse; re-indexes sentences."""
    collapsed = []
    for s in doc.sentences:
        toks = _collapse_auxiliaries(s.tokens, lexicon)
        toks = _collapse_nominalizations(toks, lexicon)
        collapsed.append(s.copy(tokens=toks) if toks != s.tokens else s)
    return doc.reindexed(_expand_anaphora(collapsed, lexicon))
