"""Command-line front end.

Exit codes: 0 success (``hunt``: detected), 1 a per-file extraction error,
2 usage or input-format error, 3 ``hunt`` ran but did not detect.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .graph import GraphFormatError, ProvGraph, invert_graph, parse, read_audit_csv, serialize
from .lexicon import Lexicon, LexiconError, default_lexicon, load_lexicon
from .match import DEFAULT_PATH_CAP, DEFAULT_THRESHOLD, hunt, mcs_score
from .pipeline import STAGES, PipelineConfig, extract
from .resolve import DEFAULT_ESR_WINDOW
from .summarize import load_verdicts

EXIT_OK, EXIT_FILE_ERROR, EXIT_USAGE, EXIT_NOT_DETECTED = 0, 1, 2, 3

log = logging.getLogger("cti2graph")

STATS_HEADER = "file\tsentences\tsummarized\tnodes\tedges"


def _lexicon(path: str | None) -> Lexicon:
    return load_lexicon(path) if path else default_lexicon()


# worker state for --workers > 1; the lexicon is loaded once per process
_WORKER: dict = {}


def _init_worker(lexicon_dir: str | None, config: PipelineConfig) -> None:
    _WORKER["lexicon"] = _lexicon(lexicon_dir)
    _WORKER["config"] = config


def _extract_one(path: str) -> tuple[str, dict | None, dict[str, str] | None, str | None]:
    lexicon, config = _WORKER["lexicon"], _WORKER["config"]
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        return path, None, None, f"cannot read {path}: {exc}"
    try:
        res = extract(raw, lexicon, config, source=Path(path).name)
    except Exception as exc:  # one bad report must not abort the batch
        return path, None, None, f"{path}: extraction failed: {exc!r}"
    outputs = {"json": serialize(res.graph, "json"), "dot": serialize(res.graph, "dot")}
    return path, res.stats, outputs, None


def cmd_extract(args) -> int:
    try:
        verdicts = load_verdicts(args.verdicts) if args.verdicts else None
        config = PipelineConfig(frozenset(args.disable or ()), args.esr_window,
                                verdicts=verdicts)
        _init_worker(args.lexicon_dir, config)
    except (LexiconError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = ("json", "dot") if args.format == "both" else (args.format,)
    if args.workers > 1 and len(args.inputs) > 1:
        with ProcessPoolExecutor(args.workers, initializer=_init_worker,
                                 initargs=(args.lexicon_dir, config)) as pool:
            results = list(pool.map(_extract_one, args.inputs, chunksize=8))
    else:
        results = [_extract_one(p) for p in args.inputs]
    status = EXIT_OK
    stats_lines = [STATS_HEADER]
    for path, stats, outputs, err in results:
        if err:
            print(f"error: {err}", file=sys.stderr)
            status = EXIT_FILE_ERROR
            continue
        stem = Path(path).stem
        for fmt in formats:
            (out_dir / f"{stem}.{fmt}").write_text(outputs[fmt], encoding="utf-8")
        if stats["sentences"] == 0:
            print(f"warning: {path}: empty report, wrote an empty graph", file=sys.stderr)
        line = "\t".join(str(v) for v in (Path(path).name, stats["sentences"], stats["summarized"],
                                          stats["nodes"], stats["edges"]))
        stats_lines.append(line)
        if not args.quiet:
            print(f"{path}: sentences {stats['sentences']} -> {stats['summarized']}, "
                  f"|V|={stats['nodes']} |E|={stats['edges']}")
    if args.stats:
        Path(args.stats).write_text("\n".join(stats_lines) + "\n", encoding="utf-8")
    return status


def load_graph(path: str, lexicon: Lexicon | None = None) -> ProvGraph:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".csv"):
        return read_audit_csv(text, lexicon or default_lexicon(), Path(path).name)
    return parse(text, "dot" if path.endswith(".dot") else "json")


def cmd_compare(args) -> int:
    try:
        lexicon = _lexicon(args.lexicon_dir)
        g1, g2 = load_graph(args.g1, lexicon), load_graph(args.g2, lexicon)
    except (OSError, GraphFormatError, LexiconError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.invert_second:
        g2 = invert_graph(g2, lexicon.antonyms)
    print(f"{mcs_score(g1, g2):.4f}")
    return EXIT_OK


def cmd_hunt(args) -> int:
    try:
        lexicon = _lexicon(args.lexicon_dir)
        query, target = load_graph(args.query, lexicon), load_graph(args.target, lexicon)
    except (OSError, GraphFormatError, LexiconError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not query.edges:
        print("error: query graph has no edges", file=sys.stderr)
        return EXIT_USAGE
    res = hunt(query, target, args.threshold, args.path_cap)
    print(f"score\t{res.score:.4f}")
    print(f"threshold\t{res.threshold}")
    print(f"detected\t{'yes' if res.detected else 'no'}")
    if not res.exact:
        print("search\tbudget exhausted; score is a lower bound")
    names = {n.id: n.name for n in target.nodes}
    qnames = {n.id: n.name for n in query.nodes}
    print("seq\tquery edge\ttarget path")
    for e in sorted(query.edges, key=lambda e: e.seq):
        path = res.alignments.get(e.seq)
        shown = " -> ".join(names[i] for i in path) if path else "unaligned"
        print(f"{e.seq}\t{qnames[e.src]} -{e.syscall}-> {qnames[e.dst]}\t{shown}")
    return EXIT_OK if res.detected else EXIT_NOT_DETECTED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cti2graph", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log pipeline diagnostics")
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extract", help="compile reports into provenance graphs")
    ex.add_argument("inputs", nargs="+")
    ex.add_argument("--lexicon-dir")
    ex.add_argument("--out-dir", default=".")
    ex.add_argument("--format", choices=("dot", "json", "both"), default="both")
    ex.add_argument("--disable", action="append", choices=STAGES, metavar="STAGE",
                    help=f"replace a stage with the identity ({', '.join(STAGES)})")
    ex.add_argument("--esr-window", type=int, default=DEFAULT_ESR_WINDOW)
    ex.add_argument("--verdicts", help="sentence-index<TAB>P|N overrides")
    ex.add_argument("--workers", type=int, default=1)
    ex.add_argument("--stats", metavar="TSV", help="write per-file statistics")
    ex.add_argument("-q", "--quiet", action="store_true")
    ex.set_defaults(func=cmd_extract)

    cmp_ = sub.add_parser("compare", help="MCS similarity of two graphs")
    cmp_.add_argument("g1")
    cmp_.add_argument("g2")
    cmp_.add_argument("--invert-second", action="store_true")
    cmp_.add_argument("--lexicon-dir")
    cmp_.set_defaults(func=cmd_compare)

    h = sub.add_parser("hunt", help="align a query graph against a target graph or audit CSV")
    h.add_argument("query")
    h.add_argument("target")
    h.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    h.add_argument("--path-cap", type=int, default=DEFAULT_PATH_CAP)
    h.add_argument("--lexicon-dir")
    h.set_defaults(func=cmd_hunt)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
