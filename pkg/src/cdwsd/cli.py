"""Batch command line: stats, disambiguate, evaluate, sweep.

Exit codes: 0 on success with outputs fully written, 1 on input parse
failures, 2 on configuration problems.  All randomness flows through
--seed, so any command rerun with the same configuration and seed writes
byte-identical output.
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path
from typing import Sequence

from . import baselines as bl
from .corpus import (
    CorpusError,
    CorpusStats,
    ExtractedNouns,
    corpus_stats,
    extract_nouns,
    filter_in_vocabulary,
    parse_plain,
    parse_semcor,
)
from .density import DensityParams, NhypMode
from .disambiguator import (
    Assignment,
    apply_random_fallback,
    disambiguate_document,
    write_assignments,
)
from .evaluation import (
    Level,
    Population,
    format_pct,
    merge_reports,
    report_block,
    report_tsv,
    score,
)
from .taxonomy import RelationMode, Taxonomy, TaxonomyError, load_taxonomy

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CONFIG = 2

STATS_HEADER = "text\twords\tnouns\tnouns_in_lexicon\tmonosemous"


class ConfigError(Exception):
    pass


def _add_common(parser: argparse.ArgumentParser, system_flags: bool) -> None:
    parser.add_argument("--taxonomy", required=True, help="taxonomy file (TIF)")
    parser.add_argument("--input", required=True, nargs="+", help="input document(s)")
    parser.add_argument("--format", choices=["semcor", "plain"], default="semcor")
    parser.add_argument(
        "--relations",
        choices=[m.value for m in RelationMode],
        default=RelationMode.HYPERNYMY.value,
        help="edge sets used by traversals (default: hyper)",
    )
    parser.add_argument("--out", help="output file (default: stdout)")
    if system_flags:
        parser.add_argument(
            "--window",
            type=int,
            default=30,
            help="context size in nouns; even values are widened by one so "
            "the target sits in the middle (default: 30)",
        )
        parser.add_argument(
            "--nhyp", choices=[m.value for m in NhypMode], default=NhypMode.GLOBAL.value
        )
        parser.add_argument("--exponent", type=float, default=0.20)
        parser.add_argument("--fallback", choices=["none", "random"], default="none")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument(
            "--baseline",
            choices=["random", "mfs", "yarowsky", "sussna"],
            help="run a comparison system instead of density disambiguation",
        )
        parser.add_argument(
            "--train",
            nargs="+",
            help="gold-tagged training document(s) for --baseline mfs/yarowsky",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdwsd",
        description="Noun sense disambiguation by conceptual density, "
        "with baselines and evaluation against gold-tagged text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus statistics table")
    _add_common(p, system_flags=False)

    p = sub.add_parser("disambiguate", help="write one assignment line per noun")
    _add_common(p, system_flags=True)

    p = sub.add_parser("evaluate", help="score a system against the gold tags")
    _add_common(p, system_flags=True)
    p.add_argument("--level", choices=[m.value for m in Level], default="sense")
    p.add_argument(
        "--population", choices=[m.value for m in Population], default="all"
    )

    p = sub.add_parser("sweep", help="evaluate across a list of window sizes")
    _add_common(p, system_flags=True)
    p.add_argument("--level", choices=[m.value for m in Level], default="sense")
    p.add_argument(
        "--population", choices=[m.value for m in Population], default="all"
    )
    p.add_argument(
        "--windows",
        required=True,
        help="comma-separated window sizes, e.g. 5,10,15,20,25,30",
    )
    return parser


def _odd(window: int) -> int:
    if window < 1:
        raise ConfigError("--window must be >= 1")
    return window if window % 2 == 1 else window + 1


def _load_taxonomy(args) -> Taxonomy:
    mode = RelationMode(args.relations)
    with open(args.taxonomy, "r", encoding="utf-8") as fh:
        return load_taxonomy(fh, mode)


def _read_documents(args, t: Taxonomy) -> list[tuple[str, ExtractedNouns]]:
    """(doc id, extracted noun stream) per input, in command-line order."""
    docs = []
    for path in args.input:
        name = Path(path).stem
        with open(path, "r", encoding="utf-8") as fh:
            if args.format == "semcor":
                extracted = extract_nouns(parse_semcor(fh, doc_id=name), t)
            else:
                kept, dropped = filter_in_vocabulary(parse_plain(fh), t)
                extracted = ExtractedNouns(tuple(kept), (None,) * len(kept), dropped)
        docs.append((name, extracted))
    return docs


def _train_docs(args, t: Taxonomy) -> list[ExtractedNouns]:
    if not args.train:
        raise ConfigError(f"--baseline {args.baseline} requires --train")
    train = []
    for path in args.train:
        with open(path, "r", encoding="utf-8") as fh:
            train.append(extract_nouns(parse_semcor(fh, doc_id=Path(path).stem), t))
    return train


def _system_assignments(
    args, t: Taxonomy, docs: Sequence[tuple[str, ExtractedNouns]], window: int
) -> tuple[str, list[list[Assignment]]]:
    """Run the configured system over every document; one list per document.

    The random fallback consumes a single seeded generator across the whole
    run, in document order.
    """
    name = args.baseline or "density"
    per_doc: list[list[Assignment]] = []
    if args.baseline is None:
        params = DensityParams(
            smoothing_exponent=args.exponent,
            nhyp_mode=NhypMode(args.nhyp),
            relation_mode=t.relation_mode,
        )
        for _, doc in docs:
            per_doc.append(
                disambiguate_document(
                    t,
                    doc.occurrences,
                    params,
                    window_size=window,
                    fallback="none",
                )
            )
        if args.fallback == "random":
            flat = apply_random_fallback(
                t, [a for assignments in per_doc for a in assignments], args.seed
            )
            per_doc, i = [], 0
            for _, doc in docs:
                per_doc.append(flat[i : i + len(doc.occurrences)])
                i += len(doc.occurrences)
    elif args.baseline == "random":
        for _, doc in docs:
            per_doc.append(bl.random_baseline(doc.occurrences, t, seed=args.seed))
    elif args.baseline == "mfs":
        table = bl.build_frequency(t, _train_docs(args, t))
        for _, doc in docs:
            per_doc.append(bl.most_frequent_baseline(doc.occurrences, t, table))
    elif args.baseline == "yarowsky":
        table = bl.build_salience(_train_docs(args, t), t, window_size=window)
        for _, doc in docs:
            per_doc.append(
                bl.yarowsky_baseline(t, doc.occurrences, table, window_size=window)
            )
    elif args.baseline == "sussna":
        for _, doc in docs:
            per_doc.append(
                bl.sussna_baseline(
                    doc.occurrences, t, window_size=window, seed=args.seed
                )
            )
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown baseline {args.baseline!r}")
    return name, per_doc


def _open_out(args):
    if args.out:
        return open(args.out, "w", encoding="utf-8", newline="\n")
    return None


def _emit(args, text: str) -> None:
    out = _open_out(args)
    if out is None:
        sys.stdout.write(text)
    else:
        with out:
            out.write(text)


def cmd_stats(args) -> int:
    t = _load_taxonomy(args)
    rows = []
    totals = [0, 0, 0, 0]
    for path in args.input:
        name = Path(path).stem
        with open(path, "r", encoding="utf-8") as fh:
            if args.format == "semcor":
                stats = corpus_stats(parse_semcor(fh, doc_id=name), t)
            else:
                occurrences = parse_plain(fh)
                kept, _ = filter_in_vocabulary(occurrences, t)
                mono = sum(1 for o in kept if len(t.senses_of(o.lemma)) == 1)
                stats = CorpusStats(
                    len(occurrences), len(occurrences), len(kept), mono
                )
        rows.append(
            f"{name}\t{stats.words}\t{stats.nouns}\t{stats.nouns_in_taxonomy}"
            f"\t{stats.monosemous} ({stats.monosemous_pct()}%)"
        )
        for i, v in enumerate(
            (stats.words, stats.nouns, stats.nouns_in_taxonomy, stats.monosemous)
        ):
            totals[i] += v
    if len(args.input) > 1:
        pct = 0
        if totals[2]:
            q, r = divmod(100 * totals[3], totals[2])
            pct = q + (1 if 2 * r >= totals[2] else 0)
        rows.append(
            f"total\t{totals[0]}\t{totals[1]}\t{totals[2]}\t{totals[3]} ({pct}%)"
        )
    _emit(args, STATS_HEADER + "\n" + "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_disambiguate(args) -> int:
    t = _load_taxonomy(args)
    window = _odd(args.window)
    docs = _read_documents(args, t)
    _check_baseline_config(args, evaluating=False)
    _, per_doc = _system_assignments(args, t, docs, window)
    buf = io.StringIO()
    for (name, _), assignments in zip(docs, per_doc):
        if len(docs) > 1:
            buf.write(f"# document: {name}\n")
        write_assignments(t, assignments, buf)
    _emit(args, buf.getvalue())
    return EXIT_OK


def _check_baseline_config(args, evaluating: bool) -> None:
    if args.baseline in ("mfs", "yarowsky") and not args.train:
        raise ConfigError(f"--baseline {args.baseline} requires --train")
    if evaluating and args.baseline == "yarowsky" and args.level != "file":
        raise ConfigError("--baseline yarowsky answers at file level only")


def _require_gold(docs) -> None:
    total = sum(len(doc.occurrences) for _, doc in docs)
    tagged = sum(sum(k is not None for k in doc.gold) for _, doc in docs)
    if total and not tagged:
        raise ConfigError("input carries no gold sense tags")


def _evaluate_once(args, t: Taxonomy, docs, window: int):
    name, per_doc = _system_assignments(args, t, docs, window)
    level = Level(args.level)
    population = Population(args.population)
    reports = [
        score(t, assignments, doc.gold, level, population, system=name)
        for (_, doc), assignments in zip(docs, per_doc)
    ]
    return merge_reports(reports)


def cmd_evaluate(args) -> int:
    if args.format != "semcor":
        raise ConfigError("evaluate needs gold tags: --format semcor")
    t = _load_taxonomy(args)
    _check_baseline_config(args, evaluating=True)
    docs = _read_documents(args, t)
    _require_gold(docs)
    report = _evaluate_once(args, t, docs, _odd(args.window))
    _emit(args, report_block(report) + "\n" + report_tsv(report))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.format != "semcor":
        raise ConfigError("sweep needs gold tags: --format semcor")
    try:
        windows = [int(w) for w in args.windows.split(",") if w.strip()]
    except ValueError:
        raise ConfigError(f"bad --windows list {args.windows!r}") from None
    if not windows:
        raise ConfigError("--windows must list at least one size")
    t = _load_taxonomy(args)
    _check_baseline_config(args, evaluating=True)
    docs = _read_documents(args, t)
    _require_gold(docs)
    lines = ["window\tcoverage\tprecision\trecall"]
    for w in windows:
        report = _evaluate_once(args, t, docs, _odd(w))
        lines.append(
            f"{w}\t{format_pct(report.coverage)}\t{format_pct(report.precision)}"
            f"\t{format_pct(report.recall)}"
        )
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "stats": cmd_stats,
        "disambiguate": cmd_disambiguate,
        "evaluate": cmd_evaluate,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except (TaxonomyError, CorpusError) as exc:
        print(f"cdwsd: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"cdwsd: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:  # console script shim
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
