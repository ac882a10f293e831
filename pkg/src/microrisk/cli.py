"""Command-line entry point: ``microrisk compute|enumerate|histogram``."""
from __future__ import annotations

import argparse
import logging
import sys
import time

from .io import (
    ConfigFileError,
    fmt_float,
    load_config,
    load_dataset,
    read_histogram,
    write_report,
    write_scores,
)
from .known_sets import BRUTE_FORCE_LIMIT, brute_force_known_sets, enumerate_known_sets
from .model import DatasetError, validate_config, validate_settings
from .report import build_report
from .risk import default_jobs, score_dataset

log = logging.getLogger("microrisk")

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_config(args):
    try:
        config = load_config(args.config)
    except OSError as exc:
        return None, _fail(EXIT_IO, f"cannot read config: {exc}")
    except ConfigFileError as exc:
        for v in exc.violations:
            print(f"invalid config: {v}", file=sys.stderr)
        return None, EXIT_INVALID
    overrides = {}
    for flag, key in (("epsilon", "epsilon"), ("alpha", "alpha"), ("threshold", "high_risk_threshold")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    return (config.replace(**overrides) if overrides else config), None


def cmd_compute(args) -> int:
    config, code = _load_config(args)
    if code is not None:
        return code
    started = time.perf_counter()
    try:
        dataset = load_dataset(args.data)
    except (OSError, UnicodeDecodeError) as exc:
        return _fail(EXIT_IO, f"cannot read data: {exc}")
    except DatasetError as exc:
        return _fail(EXIT_IO, str(exc))
    log.info("loaded %d records x %d attributes in %.1fs", dataset.n_records, dataset.n_attributes,
             time.perf_counter() - started)

    result = validate_config(dataset, config)
    if not result.ok:
        for v in result.violations:
            print(f"invalid config: {v}", file=sys.stderr)
        return EXIT_INVALID

    if args.brute_force:
        if dataset.n_attributes > BRUTE_FORCE_LIMIT:
            return _fail(EXIT_INVALID, f"brute force limited to m ≤ {BRUTE_FORCE_LIMIT}")
        sets = brute_force_known_sets(config)
    else:
        sets = enumerate_known_sets(config)
    log.info("%d known sets retained", len(sets))

    scores = score_dataset(dataset, config, sets, jobs=args.jobs)
    report = build_report(scores.risks, config, retained_set_count=len(sets))
    try:
        write_report(args.out, report, dataset.schema, sets)
        if args.scores:
            write_scores(args.scores, scores.risks)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")

    print(f"retained known sets: {len(sets)}")
    print(
        f"high-risk records: {report.high_risk_count} of {report.n_records} "
        f"({report.high_risk_percent:.2f}%) with risk > {config.high_risk_threshold:g}"
    )
    log.info("done in %.1fs", time.perf_counter() - started)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    config, code = _load_config(args)
    if code is not None:
        return code
    problems = validate_settings(config)
    if problems:
        for v in problems:
            print(f"invalid config: {v}", file=sys.stderr)
        return EXIT_INVALID
    sets = enumerate_known_sets(config)
    for ks in sets:
        names = ", ".join(ks.names(config.names)) or "(empty)"
        print(f"{{{names}}}\t{fmt_float(ks.pk)}")
    print(f"total: {len(sets)}")
    return EXIT_OK


def cmd_histogram(args) -> int:
    try:
        bins = read_histogram(args.report)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_IO, str(exc))
    sep = "\t" if args.format == "tsv" else ","
    lines = [sep.join(("bin_lower", "bin_upper", "count"))]
    lines += [sep.join((repr(b.lower), repr(b.upper), str(b.count))) for b in bins]
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            return _fail(EXIT_IO, str(exc))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="microrisk", description="Per-record disclosure risk for microdata.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="score every record and write a JSON report")
    p.add_argument("--data", required=True, help="input CSV with a header row")
    p.add_argument("--config", required=True, help="config JSON")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--epsilon", type=float, help="override pruning threshold")
    p.add_argument("--alpha", type=float, help="override consequence coefficient")
    p.add_argument("--threshold", type=float, help="override high-risk threshold")
    p.add_argument("--scores", help="also write record_index,risk CSV here")
    p.add_argument("--brute-force", action="store_true", help="enumerate all 2^m known sets without pruning")
    p.add_argument("--jobs", type=int, default=default_jobs(), help="worker threads (default: all cores)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("enumerate", help="list retained known sets")
    p.add_argument("--config", required=True)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("histogram", help="export histogram rows from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--out", help="write here instead of stdout")
    p.set_defaults(func=cmd_histogram)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
