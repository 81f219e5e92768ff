"""Sentence splitting with promotion, dictionary homogenization, passive rewriting."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .lexicon import Lexicon
from .textmodel import (
    HEADS, IMPLICIT, NOMINAL, Document, Pos, Provenance, Sentence, Token,
    detect_passive, make_tokens, pos_tag, subject_span,
)

_BLANK = re.compile(r"\n[ \t]*\n\s*")
_BULLET = re.compile(r"[ \t]*(?:[•●▪◦‣∙·\-*–—]|\d{1,3}[.)]|[A-Za-z][.)]|\(\w{1,3}\))[ \t]+")
_ABBREV = frozenset({
    "e.g.", "i.e.", "etc.", "vs.", "inc.", "corp.", "ltd.", "co.", "fig.", "no.",
    "mr.", "mrs.", "ms.", "dr.", "jr.", "sr.", "st.", "approx.", "al.", "cf.", "u.s.",
    "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
    "nov.", "dec.", "ver.", "v.",
})
_SMALL_WORDS = frozenset({"of", "and", "the", "in", "for", "to", "a", "an", "on", "with", "by", "or", "vs"})


@dataclass
class _Unit:
    start: int
    end: int
    bulleted: bool
    hard_before: bool
    tokens: list[Token]


def _is_header(line: str) -> bool:
    text = line.strip()
    if not text or text[-1] in ".:;,!?" or _BULLET.match(line):
        return False
    words = text.split()
    if len(words) > 12 or not any(c.isalpha() for c in text):
        return False
    if text.upper() == text:
        return True
    return all(w[0].isupper() or w.lower() in _SMALL_WORDS or not w[0].isalpha() for w in words)


def _terminators(text: str, start: int, end: int):
    """Offsets of sentence-final '.', '!' or '?' inside ``text[start:end]``."""
    for m in re.finditer(r"[.!?]+[\"')\]]*(?=\s|$)", text[start:end]):
        p = start + m.start()
        if text[p] == ".":
            w0 = text.rfind(" ", start, p) + 1
            w0 = max(w0, text.rfind("\n", start, p) + 1, start)
            word = text[w0:p + 1].lower().lstrip("(\"'")
            if word in _ABBREV or re.fullmatch(r"[a-z]\.", word):
                continue
        yield p, start + m.end()


def _paragraphs(raw: str):
    pos = 0
    for m in _BLANK.finditer(raw):
        yield pos, m.start(), True
        pos = m.end()
    yield pos, len(raw), False


def _units(raw: str, ps: int, pe: int, lexicon: Lexicon) -> list[_Unit]:
    units: list[_Unit] = []
    hard = True
    for lm in re.finditer(r"[^\n]+", raw[ps:pe]):
        ls, le = ps + lm.start(), ps + lm.end()
        bm = _BULLET.match(raw, ls, le)
        bulleted = bm is not None and bm.end() < le
        cs = bm.end() if bulleted else ls
        for p, after in _terminators(raw, cs, le):
            if raw[cs:p].strip():
                units.append(_Unit(cs, p, bulleted, hard, make_tokens(raw[cs:p], lexicon, cs)))
                bulleted = False
            hard = True
            cs = after
        if raw[cs:le].strip():
            units.append(_Unit(cs, le, bulleted, hard, make_tokens(raw[cs:le], lexicon, cs)))
            hard = False
    return [u for u in units if u.tokens]


def _skip_infinitive(toks: list[Token]) -> int:
    if len(toks) > 2 and toks[0].pos is Pos.AUX and toks[1].lower == "to":
        return 2
    return 0


def promotion_case(toks: list[Token], lexicon: Lexicon) -> int:
    """1 or 2 when the word sequence can stand as its own sentence, else 0."""
    if not toks:
        return 0
    k = _skip_infinitive(toks)
    first = toks[k]
    if first.pos is Pos.VERB and lexicon.canonical_verb(first.lemma):
        if any(t.pos in HEADS for t in toks[k + 1:]):
            return 2
        return 0
    # Case 1: capitalized (or entity) start, then subject, verb and object;
    # a clause-initial "When executed," may precede the subject
    lead = toks[0]
    if lead.surface[:1].isupper() or lead.pos is Pos.SYM:
        span = subject_span(Sentence(toks))
        if span is None or toks[span[0]].pos not in NOMINAL:
            return 0
        verbs = [i for i in range(span[1], len(toks)) if toks[i].pos is Pos.VERB]
        if verbs and any(t.pos in HEADS for t in toks[verbs[0] + 1:]):
            return 1
        # a passive clause carries its object in subject position
        if verbs and detect_passive(Sentence(toks), lexicon.words.be_forms).is_passive:
            return 1
    return 0


def _group(units: list[_Unit], lexicon: Lexicon, promote: bool) -> list[Sentence]:
    """Turn one classic sentence (possibly several soft-split units) into sentences."""
    def build(members, prov):
        toks = [t for u in members for t in u.tokens]
        if len(members) > 1:
            toks = pos_tag(toks, lexicon)
        s = Sentence(toks, provenance=prov, bulleted=members[0].bulleted)
        s.list_introducer = toks[-1].surface == ":"
        return s

    if len(units) == 1 or not promote:
        return [build(units, Provenance.ORIGINAL)]
    groups: list[tuple[list[_Unit], int]] = []
    pending: list[_Unit] = []
    for u in units:
        case = promotion_case(u.tokens, lexicon)
        colon = u.tokens[-1].surface == ":"
        if case or colon:
            groups.append((pending + [u], case))
            pending = []
        elif groups:
            groups[-1][0].append(u)
        else:
            pending.append(u)
    if pending:
        if groups:
            groups[-1][0].extend(pending)
        else:
            return [build(pending, Provenance.UNBREAKABLE)]
    out = []
    for members, case in groups:
        if len(members) > 1:
            prov = Provenance.UNBREAKABLE
        elif case == 1:
            prov = Provenance.PROMOTED_CASE1
        elif case == 2:
            prov = Provenance.PROMOTED_CASE2
        else:
            prov = Provenance.ORIGINAL
        out.append(build(members, prov))
    return out


def tokenize(raw: str, lexicon: Lexicon, source: str = "", promote: bool = True) -> Document:
    """Split raw report text into sentences.

    Classic terminators and blank lines always split.  Newlines, bullets and
    enumerators are soft boundaries: the pieces they create are promoted to
    sentences when they can stand alone, and otherwise glued back onto the
    neighbouring piece.  With ``promote`` off only the classic splits apply.
    """
    sentences: list[Sentence] = []
    paras = list(_paragraphs(raw))
    for ps, pe, followed in paras:
        body = raw[ps:pe]
        if not body.strip():
            continue
        lines = [ln for ln in body.split("\n") if ln.strip()]
        if len(lines) == 1 and followed and _is_header(lines[0]):
            off = ps + body.index(lines[0].strip())
            toks = make_tokens(lines[0].strip(), lexicon, off)
            if toks:
                sentences.append(Sentence(toks, header=True))
            continue
        run: list[_Unit] = []
        for u in _units(raw, ps, pe, lexicon):
            if u.hard_before and run:
                sentences.extend(_group(run, lexicon, promote))
                run = []
            run.append(u)
        if run:
            sentences.extend(_group(run, lexicon, promote))
    for i, s in enumerate(sentences):
        s.index = i
    return Document(source, raw, sentences)


# -- homogenization --------------------------------------------------------

_ENV_PREFIX = re.compile(r"^(%[^%\\]+%|<[^>\\]+>)\\(.*)$")


def homogenize_sentence(s: Sentence, lexicon: Lexicon) -> Sentence:
    toks = s.tokens
    out: list[Token] = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.pos is Pos.VERB:
            nxt = toks[i + 1] if i + 1 < len(toks) else None
            if nxt is not None and lexicon.canonical_verb(f"{t.lemma} {nxt.lower}"):
                canon = lexicon.canonical_verb(f"{t.lemma} {nxt.lower}")
                out.append(replace(t, surface=canon, lemma=canon,
                                   span=(t.span[0], nxt.span[1])))
                i += 2
                continue
            canon = lexicon.canonical_verb(t.lemma)
            if canon:
                t = replace(t, surface=canon, lemma=canon)
            out.append(t)
            i += 1
            continue
        if t.pos is not Pos.PUNCT:
            hit = lexicon.noun_at([x.surface for x in toks], i)
            if hit and not any(x.pos in (Pos.VERB, Pos.PUNCT) for x in toks[i:hit[1]]):
                canon, end = hit
                out.append(Token(canon, canon, Pos.SYM, (t.span[0], toks[end - 1].span[1])))
                i = end
                continue
            m = _ENV_PREFIX.match(t.surface)
            if m:
                sub = lexicon.noun_at([m.group(1)], 0)
                if sub:
                    name = f"{sub[0]}\\{m.group(2)}"
                    t = replace(t, surface=name, lemma=name.lower(), pos=Pos.SYM)
        out.append(t)
        i += 1
    return s.copy(tokens=out)


def homogenize(doc: Document, lexicon: Lexicon) -> Document:
    """Map verb synonyms and noun-phrase variants onto their canonical forms."""
    return Document(doc.source, doc.raw, [homogenize_sentence(s, lexicon) for s in doc.sentences])


# -- passive to active -----------------------------------------------------

def active_sentence(s: Sentence, lexicon: Lexicon) -> Sentence:
    be = lexicon.words.be_forms
    toks = list(s.tokens)
    changed = False
    while True:
        pa = detect_passive(Sentence(toks), be)
        if not pa.is_passive:
            break
        changed = True
        a0, v = pa.aux[0], pa.verb
        p0 = pa.patient[0] if pa.patient else a0
        verb = replace(toks[v], surface=toks[v].lemma, participle=False)
        patient = toks[p0:a0]
        # the auxiliary goes, but a negator must stay in front of the verb
        negs = [t for t in toks[a0:v] if t.pos is Pos.NEG]
        if pa.agent:
            agent = toks[pa.agent[0]:pa.agent[1]]
            rest = toks[pa.agent[1]:]
        else:
            span = (toks[a0].span[0], toks[a0].span[1])
            agent = [Token(IMPLICIT, IMPLICIT, Pos.NOUN, span)]
            rest = toks[v + 1:]
        toks = toks[:p0] + agent + negs + [verb] + patient + rest
    if not changed:
        return s
    return s.copy(tokens=toks, passive=True)


def to_active(doc: Document, lexicon: Lexicon) -> Document:
    """Rewrite passives as agent + verb + patient; a missing agent becomes IMPLICIT."""
    return Document(doc.source, doc.raw, [active_sentence(s, lexicon) for s in doc.sentences])
