"""End-to-end report-to-graph pipeline with per-stage ablation switches."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .frames import Frame, candidate_frames, prune_non_syscall, purge_negated
from .graph import ProvGraph, build_graph
from .lexicon import Lexicon, default_lexicon
from .normalize import homogenize, to_active, tokenize
from .resolve import DEFAULT_ESR_WINDOW, resolve_ellipsis, resolve_entities, resolve_pronouns
from .summarize import SentenceVerdict, summarize_with_verdicts
from .textmodel import Document

STAGES = ("tokenize-promotion", "homogenize", "to-active", "esr", "pr", "er", "summarize")


@dataclass(frozen=True)
class PipelineConfig:
    disabled: frozenset[str] = frozenset()
    esr_window: int = DEFAULT_ESR_WINDOW
    classifier: str = "rules"
    verdicts: Mapping[int, bool] | None = None

    def __post_init__(self):
        unknown = set(self.disabled) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown stage(s): {', '.join(sorted(unknown))}")
        if self.esr_window < 0:
            raise ValueError("esr window must be non-negative")

    def on(self, stage: str) -> bool:
        return stage not in self.disabled


@dataclass
class ExtractionResult:
    graph: ProvGraph
    tokenized: Document
    resolved: Document
    summary: Document
    frames: list[Frame]
    verdicts: list[SentenceVerdict] = field(default_factory=list)

    @property
    def stats(self) -> dict[str, int]:
        return {
            "sentences": len(self.tokenized.sentences),
            "summarized": len(self.summary.sentences),
            "nodes": len(self.graph.nodes),
            "edges": len(self.graph.edges),
        }


def normalize_and_resolve(raw: str, lexicon: Lexicon, config: PipelineConfig,
                          source: str = "") -> tuple[Document, Document]:
    doc = tokenize(raw, lexicon, source, promote=config.on("tokenize-promotion"))
    tokenized = doc
    if config.on("homogenize"):
        doc = homogenize(doc, lexicon)
    if config.on("to-active"):
        doc = to_active(doc, lexicon)
    if config.on("esr"):
        doc = resolve_ellipsis(doc, config.esr_window)
    if config.on("pr"):
        doc = resolve_pronouns(doc, lexicon)
    if config.on("er"):
        doc = resolve_entities(doc, lexicon)
    return tokenized, doc


def extract(raw: str, lexicon: Lexicon | None = None, config: PipelineConfig | None = None,
            source: str = "") -> ExtractionResult:
    """Compile report text into a provenance graph."""
    lexicon = lexicon or default_lexicon()
    config = config or PipelineConfig()
    tokenized, resolved = normalize_and_resolve(raw, lexicon, config, source)
    if config.on("summarize"):
        res = summarize_with_verdicts(resolved, lexicon, config.classifier, config.verdicts)
        summary, verdicts = res.document, res.verdicts
    else:
        summary, verdicts = resolved, []
    frames: list[Frame] = []
    for s in summary.sentences:
        frames.extend(purge_negated(prune_non_syscall(candidate_frames(s, lexicon), lexicon)))
    graph = build_graph(frames, lexicon, source)
    return ExtractionResult(graph, tokenized, resolved, summary, frames, verdicts)
