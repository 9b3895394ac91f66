"""Command-line driver.

Exit codes: 0 success, 1 user error (bad arguments or input files), 2
internal error. Every output file is staged and renamed into place only after
the whole command has succeeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .collocations import CollocationConfig, detect_phrases, format_phrase_list, parse_phrase_list
from .config import DEFAULT_ERROR_MIX, DEFAULT_ERROR_TOTAL, validate_config
from .corpus import TokenStream, analyze, load_corpus, normalize_text
from .entities import default_rules, entity_inventory, format_inventory, load_rules, parse_inventory
from .errors import ConfigError, CourtlexError
from .evaluation import compare_systems, format_metrics, render_report
from .io import write_all
from .lm import Smoothing, format_arpa, load_lm, train_lm
from .rescore import (
    ErrorModel,
    PhraseMatcher,
    RescoreWeights,
    format_asr_json,
    format_rescored,
    parse_asr_json,
    rescore,
)
from .vocab import (
    apply_pronunciation_overrides,
    build_vocabulary,
    load_overrides,
    parse_hint_table,
    pronunciations_from,
    render_hint_table,
)

logger = logging.getLogger("courtlex")
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
COMMANDS = ("ingest", "phrases", "entities", "vocab", "train-lm", "simulate", "rescore", "evaluate", "pipeline", "demo")


class UsageError(CourtlexError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _global_flags(top: bool) -> argparse.ArgumentParser:
    # On subparsers the defaults are suppressed so flags given before the
    # subcommand are not overwritten.
    p = argparse.ArgumentParser(add_help=False)
    default = None if top else argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=default, help="random seed for simulated steps")
    p.add_argument("--threads", type=int, default=default, help="worker cap (default: all cores)")
    p.add_argument("--out", type=Path, default=default, help="output file or directory")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="courtlex", description="Legal-domain ASR adaptation toolkit.", parents=[_global_flags(True)])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    common = [_global_flags(False)]

    p = sub.add_parser("ingest", parents=common, help="ingest a corpus manifest and summarize it")
    p.add_argument("--corpus", type=Path, required=True)

    p = sub.add_parser("phrases", parents=common, help="detect collocations")
    p.add_argument("--corpus", type=Path, required=True)
    d = CollocationConfig()
    p.add_argument("--delta", type=float, default=d.delta)
    p.add_argument("--threshold", type=float, default=d.threshold)
    p.add_argument("--min-count", type=int, default=d.min_count)
    p.add_argument("--passes", type=int, default=d.passes)

    p = sub.add_parser("entities", parents=common, help="extract a legal entity inventory")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--rules", type=Path)

    p = sub.add_parser("vocab", parents=common, help="build a custom vocabulary hint table")
    p.add_argument("--phrases", type=Path, help="phrase list from 'phrases'")
    p.add_argument("--entities", type=Path, help="inventory from 'entities'")
    p.add_argument("--overrides", type=Path, help="manual entries: phrase<TAB>sounds_like<TAB>display_as")
    p.add_argument("--collocation-cap", type=int, default=500)
    p.add_argument("--entity-cap", type=int, default=500)

    p = sub.add_parser("train-lm", parents=common, help="train an n-gram LM and write ARPA")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--smoothing", choices=("kneser_ney", "add_k"), default="kneser_ney")
    p.add_argument("--discount", type=float, default=0.75)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--unk-threshold", type=int, default=1)

    p = sub.add_parser("simulate", parents=common, help="simulate ASR n-best lists from reference text")
    p.add_argument("--corpus", type=Path, required=True, help="manifest of reference transcripts")
    p.add_argument("--confusions", type=Path, help="manifest whose words feed substitutions (default: --corpus)")
    p.add_argument("--nbest", type=int, default=5)
    for name, frac in DEFAULT_ERROR_MIX.items():
        p.add_argument("--" + name.replace("_", "-"), type=float, default=DEFAULT_ERROR_TOTAL * frac)

    p = sub.add_parser("rescore", parents=common, help="rescore n-best lists with an LM and vocabulary")
    p.add_argument("--nbest", type=Path, required=True, help="ASR JSON file")
    p.add_argument("--lm", type=Path, required=True, help="ARPA file")
    p.add_argument("--vocab", type=Path, help="hint table from 'vocab'")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--no-length-norm", action="store_true")

    p = sub.add_parser("evaluate", parents=common, help="WER and entity capture report")
    p.add_argument("--pairs", type=Path, required=True, help="reference<TAB>hypothesis[<TAB>hypothesis...] per line")
    p.add_argument("--rules", type=Path)
    p.add_argument("--systems", help="comma-separated system names, one per hypothesis column")

    p = sub.add_parser("pipeline", parents=common, help="run the full desk experiment from a config file")
    p.add_argument("--config", type=Path, required=True)

    p = sub.add_parser("demo", parents=common, help="write a synthetic corpus and pipeline config")
    return parser


# ---------------------------------------------------------------- helpers


def _emit(args, text: str) -> None:
    """Write to --out if given, else to standard output."""
    if args.out is None:
        sys.stdout.write(text)
    else:
        write_all({args.out: text})
        logger.info("wrote %s", args.out)


def _streams(manifest, threads):
    return [d.stream() for d in load_corpus(manifest, threads)]


def _read_hypothesis(path: Path, doc_id: str) -> TokenStream:
    """A plain transcript, rescored ``id<TAB>transcript`` lines, or ASR JSON (top-1)."""
    if path.suffix == ".json":
        lists = parse_asr_json(path)
        return TokenStream.from_sentences([nb.top.tokens for nb in lists], doc_id)
    lines = path.read_text(encoding="utf-8").splitlines()
    if lines and all("\t" in line for line in lines if line.strip()):
        sents = [normalize_text(line.split("\t", 1)[1]).split() for line in lines if line.strip()]
        return TokenStream.from_sentences(sents, doc_id)
    return analyze(path.read_text(encoding="utf-8"), doc_id)


def _read_pairs(path: Path):
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) < 2:
            raise UsageError(f"{path}: line {lineno}: expected 'reference<TAB>hypothesis'")
        rows.append([p if Path(p).is_absolute() else path.parent / p for p in map(Path, cols)])
    if not rows:
        raise UsageError(f"{path}: no pairs")
    if len({len(r) for r in rows}) != 1:
        raise UsageError(f"{path}: every line needs the same number of hypothesis columns")
    return rows


# ---------------------------------------------------------------- commands


def cmd_ingest(args):
    rows = ["id\tkind\tsentences\ttokens\n"]
    for doc in load_corpus(args.corpus, args.threads):
        s = doc.stream()
        rows.append(f"{doc.id}\t{doc.kind}\t{len(s.sentence_bounds)}\t{len(s)}\n")
    _emit(args, "".join(rows))


def cmd_phrases(args):
    config = CollocationConfig(args.delta, args.threshold, args.min_count, args.passes)
    phrases = detect_phrases(_streams(args.corpus, args.threads), config)
    _emit(args, format_phrase_list(phrases))


def cmd_entities(args):
    rules = load_rules(args.rules) if args.rules else default_rules()
    _emit(args, format_inventory(entity_inventory(_streams(args.corpus, args.threads), rules)))


def cmd_vocab(args):
    phrases = parse_phrase_list(args.phrases.read_text(encoding="utf-8")) if args.phrases else []
    inventory = parse_inventory(args.entities.read_text(encoding="utf-8")) if args.entities else None
    overrides = load_overrides(args.overrides) if args.overrides else []
    caps = {"collocation": args.collocation_cap, "entity": args.entity_cap}
    entries = build_vocabulary(phrases, inventory, overrides, caps)
    entries = apply_pronunciation_overrides(entries, pronunciations_from(overrides))
    _emit(args, render_hint_table(entries))


def cmd_train_lm(args):
    smoothing = Smoothing.add_k(args.k) if args.smoothing == "add_k" else Smoothing.kneser_ney(args.discount)
    lm = train_lm(_streams(args.corpus, args.threads), args.order, smoothing, args.unk_threshold)
    _emit(args, format_arpa(lm))


def cmd_simulate(args):
    from .pipeline import simulate_documents

    refs = _streams(args.corpus, args.threads)
    source = _streams(args.confusions, args.threads) if args.confusions else refs
    words = sorted({w for s in source for w in s.words})
    rates = [getattr(args, name) for name in DEFAULT_ERROR_MIX]
    model = ErrorModel(*rates, seed=args.seed or 0, vocabulary=words)
    lists = simulate_documents(refs, model, args.nbest)
    _emit(args, format_asr_json([nb for v in lists.values() for nb in v]))


def cmd_rescore(args):
    nbests = parse_asr_json(args.nbest)
    lm = load_lm(args.lm)
    vocab = parse_hint_table(args.vocab.read_text(encoding="utf-8")) if args.vocab else []
    weights = RescoreWeights(args.lam, args.beta, not args.no_length_norm)
    matcher = PhraseMatcher.from_vocabulary(vocab)
    _emit(args, format_rescored((nb.utterance_id, rescore(nb, lm, matcher, weights)) for nb in nbests))


def cmd_evaluate(args):
    import time

    rows = _read_pairs(args.pairs)
    n_sys = len(rows[0]) - 1
    names = args.systems.split(",") if args.systems else (["system"] if n_sys == 1 else [f"system{k + 1}" for k in range(n_sys)])
    if len(names) != n_sys:
        raise UsageError(f"--systems names {len(names)} systems but pairs have {n_sys} hypothesis columns")
    rules = load_rules(args.rules) if args.rules else default_rules()
    refs, systems = [], {name: [] for name in names}
    for row in rows:
        ref_path = row[0]
        doc_id = ref_path.stem
        refs.append(analyze(ref_path.read_text(encoding="utf-8"), doc_id))
        for name, hyp_path in zip(names, row[1:]):
            systems[name].append(_read_hypothesis(hyp_path, doc_id))
    t0 = time.perf_counter()
    reports = compare_systems(refs, systems, rules)
    logger.info("evaluated %d files in %.2f s", len(refs), time.perf_counter() - t0)
    report = render_report(reports)
    sys.stdout.write(report)
    if args.out is not None:
        from .plotting import report_figures

        outputs = {args.out / "report.txt": report, args.out / "metrics.tsv": format_metrics(reports)}
        outputs.update({args.out / name: data for name, data in report_figures(reports).items()})
        write_all(outputs)
        logger.info("wrote report, metrics and figures to %s", args.out)


def cmd_pipeline(args):
    from .pipeline import run_pipeline

    config = validate_config(args.config, seed=args.seed, threads=args.threads, out=args.out)
    outputs = run_pipeline(config)
    write_all({config.out / name: data for name, data in outputs.items()})
    sys.stdout.write(outputs["report.txt"])
    logger.info("wrote %d files to %s", len(outputs), config.out)


def cmd_demo(args):
    from .synthetic import write_demo

    if args.out is None:
        raise UsageError("demo needs --out DIRECTORY")
    path = write_demo(args.out, seed=args.seed or 0)
    print(f"wrote demo workspace; run: courtlex pipeline --config {path}")


HANDLERS = {
    "ingest": cmd_ingest,
    "phrases": cmd_phrases,
    "entities": cmd_entities,
    "vocab": cmd_vocab,
    "train-lm": cmd_train_lm,
    "simulate": cmd_simulate,
    "rescore": cmd_rescore,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
    "demo": cmd_demo,
}


def _configure_logging():
    level = LOG_LEVELS.get(os.environ.get("COURTLEX_LOG", "error").lower(), logging.ERROR)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.setLevel(level)


def run_command(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "courtlex: error: a command is required")
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be >= 1")
        HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"courtlex: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (CourtlexError, ValueError, OSError) as exc:
        # OSError covers missing and unreadable input files.
        print(f"courtlex: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        logger.debug("internal error", exc_info=True)
        print(f"courtlex: internal error: {exc!r}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
