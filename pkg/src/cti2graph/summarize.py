"""Drop non-productive sentences and superfluous words.

The default sentence classifier is a rule: a sentence is productive when it
names a system-call verb and either a system entity or a wildcard subject.
Other classifiers can be registered by name, and a verdict file can
override individual sentences.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from .frames import Frame, extract_frames
from .lexicon import Lexicon
from .see import WILDCARD
from .textmodel import Document, Pos, Sentence, leading_clause, subject_span

DECISION_THRESHOLD = 0.5


class Label(str, enum.Enum):
    PRODUCTIVE = "Productive"
    NON_PRODUCTIVE = "NonProductive"


@dataclass(frozen=True)
class SentenceVerdict:
    label: Label
    score: float
    rationale: str = ""

    @classmethod
    def from_score(cls, score: float, rationale: str = "",
                   threshold: float = DECISION_THRESHOLD) -> "SentenceVerdict":
        label = Label.PRODUCTIVE if score >= threshold else Label.NON_PRODUCTIVE
        return cls(label, score, rationale)

    @property
    def productive(self) -> bool:
        return self.label is Label.PRODUCTIVE


Classifier = Callable[[Sentence, Lexicon], SentenceVerdict]
CLASSIFIERS: dict[str, Classifier] = {}


def register_classifier(name: str):
    def deco(fn: Classifier) -> Classifier:
        CLASSIFIERS[name] = fn
        return fn
    return deco


@register_classifier("rules")
def classify_sentence(sentence: Sentence, lexicon: Lexicon) -> SentenceVerdict:
    toks = sentence.tokens
    verbs = sorted({t.lemma for t in toks if t.pos is Pos.VERB and lexicon.canonical_verb(t.lemma)})
    entity = any(t.pos is Pos.SYM and t.surface != WILDCARD for t in toks)
    subj = subject_span(sentence)
    wild = subj is not None and [t.surface for t in toks[subj[0]:subj[1]]] == [WILDCARD]
    ok = bool(verbs) and (entity or wild)
    why = f"verbs={','.join(verbs) or '-'} entity={entity} wildcard_subject={wild}"
    return SentenceVerdict.from_score(1.0 if ok else 0.0, why)


def load_verdicts(path: str | Path) -> dict[int, bool]:
    """Read ``sentence-index<TAB>P|N`` lines."""
    out: dict[int, bool] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            idx, lab = line.split("\t")
            out[int(idx)] = {"P": True, "N": False}[lab.strip().upper()]
        except (ValueError, KeyError):
            raise ValueError(f"{path}:{lineno}: expected 'index<TAB>P|N'") from None
    return out


def trim_words(sentence: Sentence, frames: list[Frame], lexicon: Lexicon) -> Sentence:
    """Keep agent, verb, negation and patient; keep modifiers only if they hold an entity.

    Any token that is itself a system entity always survives.
    """
    if not frames:
        return sentence
    toks = sentence.tokens
    keep: set[int] = set()

    def add(span):
        if span:
            keep.update(range(span[0], span[1]))

    def has_entity(span):
        return any(toks[i].pos is Pos.SYM and toks[i].surface != WILDCARD
                   for i in range(span[0], span[1]))

    for f in frames:
        add(f.agent_span)
        add(f.patient_span)
        keep.add(f.verb_at)
        if f.neg_at is not None:
            keep.add(f.neg_at)
        for sp in f.extra_spans:
            if has_entity(sp):
                add(sp)
    lead = leading_clause(sentence)
    if lead and (has_entity(lead) or any(f.conditional and f.negated for f in frames)):
        add(lead)
    for i, t in enumerate(toks):
        if t.pos is Pos.SYM and t.surface != WILDCARD:
            keep.add(i)
    return sentence.copy(tokens=[t for i, t in enumerate(toks) if i in keep])


@dataclass
class SummaryResult:
    document: Document
    verdicts: list[SentenceVerdict]


def summarize_document(doc: Document, lexicon: Lexicon, classifier: Classifier | str = "rules",
                       overrides: Mapping[int, bool] | None = None,
                       trim: bool = True) -> Document:
    return summarize_with_verdicts(doc, lexicon, classifier, overrides, trim).document


def summarize_with_verdicts(doc: Document, lexicon: Lexicon, classifier: Classifier | str = "rules",
                            overrides: Mapping[int, bool] | None = None,
                            trim: bool = True) -> SummaryResult:
    clf = CLASSIFIERS[classifier] if isinstance(classifier, str) else classifier
    kept: list[Sentence] = []
    verdicts = []
    for s in doc.sentences:
        if s.header:
            verdict = SentenceVerdict(Label.NON_PRODUCTIVE, 0.0, "header")
        else:
            verdict = clf(s, lexicon)
        if overrides and s.index in overrides:
            verdict = SentenceVerdict.from_score(1.0 if overrides[s.index] else 0.0, "override")
        verdicts.append(verdict)
        if not verdict.productive:
            continue
        out = trim_words(s, extract_frames(s, lexicon), lexicon) if trim else s
        kept.append(out.copy(productive=True))
    return SummaryResult(Document(doc.source, doc.raw, kept), verdicts)
