"""Tokens, sentences, documents and a small dictionary-driven POS tagger.

The tagger only has to get the structural calls right: closed-class words,
dictionary verbs, participles and system-entity names.  Everything it cannot
place is a NOUN.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .lexicon import Lexicon
from .see import WILDCARD, battery_for


class Pos(str, enum.Enum):
    VERB = "VERB"
    NOUN = "NOUN"
    PRON = "PRON"
    ADJ = "ADJ"
    ADV = "ADV"
    AUX = "AUX"
    PREP = "PREP"
    DET = "DET"
    NEG = "NEG"
    PUNCT = "PUNCT"
    NUM = "NUM"
    SYM = "SYM"
    OTHER = "OTHER"


class Provenance(str, enum.Enum):
    ORIGINAL = "Original"
    PROMOTED_CASE1 = "PromotedCase1"
    PROMOTED_CASE2 = "PromotedCase2"
    UNBREAKABLE = "Unbreakable"


IMPLICIT = "⟨IMPLICIT⟩"
NOMINAL = frozenset({Pos.NOUN, Pos.PRON, Pos.SYM, Pos.DET, Pos.ADJ, Pos.NUM})
HEADS = frozenset({Pos.NOUN, Pos.PRON, Pos.SYM, Pos.NUM})


@dataclass
class Token:
    surface: str
    lemma: str = ""
    pos: Pos = Pos.NOUN
    span: tuple[int, int] = (0, 0)
    participle: bool = False
    # lemma as written, before homogenization replaced it
    source_lemma: str = ""

    def __post_init__(self):
        if not self.lemma:
            self.lemma = self.surface.lower()
        if not self.source_lemma:
            self.source_lemma = self.lemma

    @property
    def lower(self) -> str:
        return self.surface.lower()


@dataclass
class Sentence:
    tokens: list[Token]
    index: int = 0
    provenance: Provenance = Provenance.ORIGINAL
    header: bool = False
    bulleted: bool = False
    list_introducer: bool = False
    passive: bool = False
    productive: bool | None = None

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def subject(self) -> tuple[int, int] | None:
        return subject_span(self)

    @property
    def has_explicit_subject(self) -> bool:
        span = subject_span(self)
        return span is not None and all(
            t.surface != IMPLICIT for t in self.tokens[span[0]:span[1]])

    def copy(self, **changes) -> "Sentence":
        changes.setdefault("tokens", [replace(t) for t in self.tokens])
        return replace(self, **changes)


@dataclass
class Document:
    source: str
    raw: str
    sentences: list[Sentence] = field(default_factory=list)

    def reindexed(self, sentences: Iterable[Sentence]) -> "Document":
        out = [s.copy(index=i) for i, s in enumerate(sentences)]
        return Document(self.source, self.raw, out)

    @property
    def text(self) -> str:
        return "\n".join(s.text for s in self.sentences)


# -- tokens ----------------------------------------------------------------

_CHUNK = re.compile(
    r"(?:%[A-Za-z](?:[\w ()\-]{0,38}[\w)])?%|<[A-Za-z][\w ]{0,40}>)(?:\\[^\s\\]+)*\\?"
    r"|\S+")
_LEAD_PUNCT = "\"'([{“‘"
_TRAIL_PUNCT = ".,;:!?\"')]}”’"
_CONTRACTION = re.compile(r"(?i)^(\w+)(n't)$")
_CONTRACTION_LEMMA = {"ca": "can", "wo": "will", "sha": "shall"}


def split_words(text: str, offset: int = 0) -> list[tuple[str, tuple[int, int]]]:
    """Word-level split keeping paths, env tokens and entity names whole."""
    out = []
    for m in _CHUNK.finditer(text):
        s, e = m.span()
        lead = []
        while s < e and text[s] in _LEAD_PUNCT:
            lead.append((text[s], (s, s + 1)))
            s += 1
        trail = []
        while e > s and text[e - 1] in _TRAIL_PUNCT:
            if text[e - 1] == ")" and "(" in text[s:e - 1]:
                break
            trail.append((text[e - 1], (e - 1, e)))
            e -= 1
        out.extend(lead)
        if e > s:
            word = text[s:e]
            cm = _CONTRACTION.match(word)
            if cm and len(cm.group(1)) > 1:
                k = s + len(cm.group(1))
                out.append((text[s:k], (s, k)))
                out.append((text[k:e], (k, e)))
            else:
                out.append((word, (s, e)))
        out.extend(reversed(trail))
    return [(w, (a + offset, b + offset)) for w, (a, b) in out]


def make_tokens(text: str, lexicon: Lexicon, offset: int = 0) -> list[Token]:
    toks = []
    for word, span in split_words(text, offset):
        lemma = _CONTRACTION_LEMMA.get(word.lower()) or lexicon.lemmatize(word)
        if word.lower() == "n't":
            lemma = "not"
        toks.append(Token(word, lemma, Pos.NOUN, span))
    return pos_tag(toks, lexicon)


# -- tagging ---------------------------------------------------------------

_NUM = re.compile(r"^[+-]?\d[\d,.]*%?$|^\d+(st|nd|rd|th)$", re.I)
_PUNCT = re.compile(r"^[^\w%<>*\\/]+$")
_DEMONSTRATIVES = frozenset({"this", "these", "that", "those", "its", "their", "his", "her"})
_BLOCKS_VERB = frozenset({Pos.DET, Pos.ADJ, Pos.NUM, Pos.VERB})


def is_verb_lemma(lexicon: Lexicon, lemma: str) -> bool:
    w = lexicon.words
    return (lexicon.canonical_verb(lemma) is not None or lemma in w.general_verbs
            or lemma in w.light_verbs or lemma in w.infinitive_markers)


def _inflected_verb(lexicon: Lexicon, tok: Token) -> bool:
    return tok.lemma != tok.lower and is_verb_lemma(lexicon, tok.lemma)


def _looks_nominal(lexicon: Lexicon, tok: Token | None) -> bool:
    if tok is None:
        return False
    w = lexicon.words
    low = tok.lower
    if _PUNCT.match(tok.surface) or not tok.surface:
        return False
    closed = (w.be_forms | w.auxiliaries | w.prepositions | w.conjunctions
              | w.negators | w.subordinators | w.discourse_markers | w.pronouns)
    if low in closed:
        return False
    return not _inflected_verb(lexicon, tok)


def pos_tag(tokens: Sequence[Token], lexicon: Lexicon) -> list[Token]:
    """Tag every token; returns new Token objects, one per input token."""
    battery = battery_for(lexicon)
    w = lexicon.words
    out: list[Token] = []
    n = len(tokens)
    for i, src in enumerate(tokens):
        tok = replace(src, participle=False)
        low = tok.lower
        nxt = tokens[i + 1] if i + 1 < n else None
        prev = out[-1] if out else None
        tok.pos = _tag_one(tok, low, prev, nxt, battery, lexicon, w)
        if tok.pos is Pos.VERB:
            tok.participle = _is_participle(tok, prev, lexicon)
        out.append(tok)
    return out


def _tag_one(tok, low, prev, nxt, battery, lexicon, w) -> Pos:
    if tok.surface in (WILDCARD,):
        return Pos.SYM
    if tok.surface == IMPLICIT:
        return Pos.NOUN
    if _PUNCT.match(tok.surface):
        return Pos.PUNCT
    if battery.is_entity_token(tok.surface):
        return Pos.SYM
    if low in w.negators and low != "no":
        return Pos.NEG
    if low in _DEMONSTRATIVES:
        if _looks_nominal(lexicon, nxt):
            return Pos.DET
        if low in w.pronouns:
            return Pos.PRON
        return Pos.OTHER
    if low in w.pronouns:
        return Pos.PRON
    if low in w.be_forms or low in w.auxiliaries:
        return Pos.AUX
    if tok.lemma in w.infinitive_markers and nxt is not None and nxt.lower == "to":
        return Pos.AUX
    if low in w.determiners or low == "no":
        return Pos.DET
    if low in w.prepositions:
        return Pos.PREP
    if low in w.discourse_markers:
        return Pos.ADV
    if low in w.conjunctions or low in w.subordinators:
        return Pos.OTHER
    if _NUM.match(tok.surface):
        return Pos.NUM
    if is_verb_lemma(lexicon, tok.lemma):
        blocked = prev is not None and (
            prev.pos in _BLOCKS_VERB
            or (prev.pos is Pos.PREP and prev.lower != "to"))
        if not blocked:
            return Pos.VERB
        return Pos.ADJ if _ed_en(low) and prev.pos is Pos.DET else Pos.NOUN
    if low.endswith("ly") and len(low) > 4:
        return Pos.ADV
    if _ed_en(low) and prev is not None:
        if prev.pos is Pos.AUX and prev.lower in w.be_forms and low.endswith("ed"):
            return Pos.VERB
        if prev.pos is Pos.DET:
            return Pos.ADJ
    return Pos.NOUN


def _ed_en(low: str) -> bool:
    return len(low) > 4 and (low.endswith("ed") or low.endswith("en"))


def _is_participle(tok: Token, prev: Token | None, lexicon: Lexicon) -> bool:
    low = tok.lower
    if low.endswith("ed") and len(low) > 3:
        return True
    irregular = lexicon.irregular.get(low)
    if irregular is not None and low != irregular and not low.endswith(("s", "ing")):
        return True
    if low.endswith("en") and len(low) > 4 and low != tok.lemma:
        return True
    # "is read by": irregular participle identical to its base form
    return (prev is not None and prev.pos is Pos.AUX and prev.lower in lexicon.words.be_forms
            and low in lexicon.irregular)


# -- structure -------------------------------------------------------------

@dataclass(frozen=True)
class PassiveAnalysis:
    is_passive: bool
    patient: tuple[int, int] | None = None
    agent: tuple[int, int] | None = None
    aux: tuple[int, int] | None = None
    verb: int | None = None

    @property
    def implicit_agent(self) -> bool:
        return self.is_passive and self.agent is None


def nominal_run_before(tokens: Sequence[Token], end: int) -> tuple[int, int] | None:
    i = end
    while i > 0 and (tokens[i - 1].pos in NOMINAL or (
            tokens[i - 1].lower == "of" and i - 1 > 0 and tokens[i - 2].pos in NOMINAL)):
        i -= 1
    return (i, end) if i < end else None


def nominal_run_after(tokens: Sequence[Token], start: int) -> tuple[int, int] | None:
    j = start
    while j < len(tokens) and (tokens[j].pos in NOMINAL or (
            tokens[j].lower == "of" and j > start and j + 1 < len(tokens)
            and tokens[j + 1].pos in NOMINAL)):
        j += 1
    return (start, j) if j > start else None


def detect_passive(sentence: Sentence, be_forms: Iterable[str] | None = None) -> PassiveAnalysis:
    """Find the first be-form + participle construction.

    Adverbs and negators may sit between the auxiliary and the participle.
    """
    toks = sentence.tokens
    be = frozenset(be_forms) if be_forms is not None else _DEFAULT_BE
    for i, tok in enumerate(toks):
        if tok.pos is not Pos.AUX or tok.lower not in be:
            continue
        j = i + 1
        while j < len(toks) and toks[j].pos in (Pos.ADV, Pos.NEG):
            j += 1
        if j >= len(toks) or toks[j].pos is not Pos.VERB or not toks[j].participle:
            continue
        a = i
        while a > 0 and toks[a - 1].pos in (Pos.AUX, Pos.ADV, Pos.NEG):
            a -= 1
        patient = nominal_run_before(toks, a)
        agent = None
        if j + 1 < len(toks) and toks[j + 1].lower == "by":
            agent = nominal_run_after(toks, j + 2)
        return PassiveAnalysis(True, patient, agent, (a, j), j)
    return PassiveAnalysis(False)


_DEFAULT_BE = frozenset({"is", "are", "was", "were", "been", "being", "be", "am"})
_SUBORDINATE_LEADS = frozenset({
    "when", "if", "unless", "once", "after", "before", "while", "upon",
    "whenever", "as", "during", "following", "in", "on", "to", "for", "with"})


def leading_clause(sentence: Sentence) -> tuple[int, int] | None:
    """Span of a clause-initial subordinate or prepositional phrase up to its comma."""
    toks = sentence.tokens
    i = 0
    while i < len(toks) and toks[i].pos in (Pos.ADV, Pos.PUNCT):
        i += 1
    if i >= len(toks) or toks[i].lower not in _SUBORDINATE_LEADS:
        return None
    for k in range(i + 1, len(toks)):
        if toks[k].surface == ",":
            return (i, k + 1)
        if toks[k].surface in (":", ";"):
            return None
    return None


_SUBJECT_STOP = frozenset({Pos.AUX, Pos.NEG, Pos.VERB, Pos.PUNCT, Pos.ADV, Pos.OTHER, Pos.PREP})


def subject_span(sentence: Sentence) -> tuple[int, int] | None:
    """Nominal before the main verb, after any leading clause and adverbs."""
    toks = sentence.tokens
    lead = leading_clause(sentence)
    i = lead[1] if lead else 0
    while i < len(toks) and toks[i].pos in (Pos.ADV, Pos.PUNCT):
        i += 1
    j = i
    while j < len(toks):
        t = toks[j]
        if t.pos in _SUBJECT_STOP and not (t.lower == "of" and j > i):
            break
        j += 1
    if j == i:
        return None
    # a trailing modifier ("the group from X uses ...") may separate subject and verb
    k = j
    while k < len(toks) and toks[k].pos not in (Pos.AUX, Pos.VERB, Pos.NEG):
        if toks[k].pos is Pos.PUNCT and toks[k].surface not in (",", "(", ")"):
            return None
        k += 1
    if k == len(toks):
        return None
    return (i, j)
