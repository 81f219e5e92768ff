"""Deterministic role frames: who did what to whom, where and when.

Works over normalized sentences (active voice, explicit subject).  Each verb
of the main clause yields a frame; prepositional phrases become typed extras.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .lexicon import Lexicon
from .see import WILDCARD
from .textmodel import HEADS, NOMINAL, Pos, Sentence, Token, leading_clause, subject_span

log = logging.getLogger(__name__)


class Role(str, enum.Enum):
    LOCATION = "LOCATION"
    TARGET = "TARGET"
    SOURCE = "SOURCE"
    TEMPORAL = "TEMPORAL"


PREPOSITION_ROLES = {
    "to": Role.TARGET, "towards": Role.TARGET, "toward": Role.TARGET, "onto": Role.TARGET,
    "as": Role.TARGET,
    "in": Role.LOCATION, "into": Role.LOCATION, "under": Role.LOCATION, "inside": Role.LOCATION,
    "within": Role.LOCATION, "at": Role.LOCATION, "on": Role.LOCATION,
    "from": Role.SOURCE,
    "after": Role.TEMPORAL, "before": Role.TEMPORAL, "during": Role.TEMPORAL,
}

Span = tuple[int, int]


@dataclass(frozen=True)
class Frame:
    agent: str
    action: str
    patient: str
    extras: tuple[tuple[Role, str], ...] = ()
    negated: bool = False
    conditional: bool = False
    sentence: int = 0
    # token positions inside the sentence, used for word trimming
    verb_at: int = field(default=-1, compare=False, repr=False)
    agent_span: Span | None = field(default=None, compare=False, repr=False)
    patient_span: Span | None = field(default=None, compare=False, repr=False)
    extra_spans: tuple[Span, ...] = field(default=(), compare=False, repr=False)
    neg_at: int | None = field(default=None, compare=False, repr=False)

    def extras_of(self, role: Role) -> list[str]:
        return [p for r, p in self.extras if r is role]


def _text(toks: Sequence[Token], span: Span) -> str:
    return " ".join(t.surface for t in toks[span[0]:span[1]])


def noun_phrase(toks: Sequence[Token], start: int, stop: int) -> Span | None:
    """Nominal phrase at ``start`` with 'of' continuations and ':' appositions."""
    j = start
    while j < stop and toks[j].pos in NOMINAL:
        j += 1
    if j == start or not any(t.pos in HEADS for t in toks[start:j]):
        return None
    while j + 1 < stop and toks[j].surface in ("of", ":") and toks[j + 1].pos in NOMINAL:
        k = j + 1
        while k < stop and toks[k].pos in NOMINAL:
            k += 1
        j = k
    return (start, j)


def _coordinated(toks: Sequence[Token], span: Span, stop: int) -> list[Span]:
    """'A, B and C' -> three spans, as long as no verb follows the conjunction."""
    spans = [span]
    j = span[1]
    while j < stop and toks[j].lower in (",", "and", "or", "&"):
        k = j
        while k < stop and toks[k].lower in (",", "and", "or", "&"):
            k += 1
        nxt = noun_phrase(toks, k, stop)
        if nxt is None:
            break
        spans.append(nxt)
        j = nxt[1]
    return spans


def _negated(toks: Sequence[Token], v: int) -> int | None:
    k = v - 1
    while k >= 0 and toks[k].pos in (Pos.AUX, Pos.ADV, Pos.NEG):
        if toks[k].pos is Pos.NEG:
            return k
        k -= 1
    return None


def candidate_frames(sentence: Sentence, lexicon: Lexicon) -> list[Frame]:
    """One frame per main-clause verb; actions are still the verbs' lemmas."""
    toks = sentence.tokens
    lead = leading_clause(sentence)
    body = lead[1] if lead else 0
    subj = subject_span(sentence)
    agent = _text(toks, subj) if subj else WILDCARD
    conditional = bool(lead) and toks[lead[0]].lower in lexicon.words.conditional_markers
    temporal: tuple[tuple[Role, str], ...] = ()
    if lead:
        temporal = ((Role.TEMPORAL, _text(toks, (lead[0], lead[1] - 1))),)
    cues = {" ".join(c) for c in lexicon.words.anaphora_cues}
    verbs = [i for i in range(body, len(toks)) if toks[i].pos is Pos.VERB]
    out: list[Frame] = []
    for n, v in enumerate(verbs):
        stop = verbs[n + 1] if n + 1 < len(verbs) else len(toks)
        # the next verb's auxiliaries and negation belong to it
        while stop - 1 > v and toks[stop - 1].pos in (Pos.AUX, Pos.NEG, Pos.ADV, Pos.OTHER):
            stop -= 1
        j = v + 1
        while j < stop and toks[j].pos in (Pos.ADV, Pos.NEG):
            j += 1
        obj = noun_phrase(toks, j, stop)
        patients = _coordinated(toks, obj, stop) if obj else []
        k = patients[-1][1] if patients else j
        extras: list[tuple[Role, str]] = []
        extra_spans: list[Span] = []
        while k < stop:
            role = PREPOSITION_ROLES.get(toks[k].lower) if toks[k].pos is Pos.PREP else None
            if role is not None:
                ph = noun_phrase(toks, k + 1, stop)
                if ph:
                    extras.append((role, _text(toks, ph)))
                    extra_spans.append((k, ph[1]))
                    k = ph[1]
                    continue
            k += 1
        if not patients:
            for want in (Role.TARGET, Role.SOURCE):
                hit = next((i for i, (r, _) in enumerate(extras) if r is want), None)
                if hit is not None:
                    sp = extra_spans.pop(hit)
                    extras.pop(hit)
                    patients = [(sp[0] + 1, sp[1])]
                    break
        if not subj and not patients:
            log.debug("sentence %d: verb %r has no nominal on either side", sentence.index, toks[v].surface)
            continue
        neg = _negated(toks, v)
        for ps in patients or [None]:
            patient = _text(toks, ps) if ps else WILDCARD
            if patient.lower() in cues:
                log.debug("sentence %d: unresolved list reference %r", sentence.index, patient)
                continue
            out.append(Frame(
                agent=agent, action=toks[v].lemma, patient=patient,
                extras=tuple(extras) + temporal, negated=neg is not None,
                conditional=conditional, sentence=sentence.index, verb_at=v,
                agent_span=subj, patient_span=ps, extra_spans=tuple(extra_spans), neg_at=neg))
    return out


def prune_non_syscall(frames: Iterable[Frame], lexicon: Lexicon) -> list[Frame]:
    """Second homogenization pass; frames whose verb maps to no system call are dropped."""
    out = []
    for f in frames:
        canon = lexicon.canonical_verb(f.action)
        if canon is None:
            log.debug("sentence %d: dropping non-syscall verb %r", f.sentence, f.action)
            continue
        out.append(f if canon == f.action else replace(f, action=canon))
    return out


def extract_frames(sentence: Sentence, lexicon: Lexicon) -> list[Frame]:
    return prune_non_syscall(candidate_frames(sentence, lexicon), lexicon)


def purge_negated(frames: Iterable[Frame]) -> list[Frame]:
    """Drop negated frames unless a conditional clause scopes them."""
    return [f for f in frames if not (f.negated and not f.conditional)]
