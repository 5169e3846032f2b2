"""Command-line entry point.

Exit codes: 0 success, 2 input or validation error, 3 numeric failure.
Results go to stdout or ``--out``; diagnostics go to stderr.
"""

import argparse
import csv
from datetime import datetime, timezone
import json
import logging
from pathlib import Path
import sys

from . import __version__
from .coverage import (
    DEFAULT_MAX_N, DEFAULT_WINDOW, TERMINAL_COVERAGE, build_series, classify_keyword,
    information_gain, stopping_points,
)
from .estimators import petersen_estimate, samples_from_capture_sets, schnabel_estimate
from .exceptions import DuplicateIds, InvalidParams, LitCaptureError, ParseError
from .graphsim import RECORD_COLUMNS, ChurnConfig, run_experiment
from .ranksim import TruncatedRanking, compare, overlap_curve
from .records import parse_export
from .suites import PAPER_N, PAPER_TRIALS, special_cases

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
NONCONVERGENCE_LIMIT = 0.01

log = logging.getLogger("litcapture")


class CommandFailed(Exception):
    def __init__(self, code, message, exit_code):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


def _json(obj):
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, indent=2, sort_keys=False)


def _manifest(args, input_files=(), seed=None):
    params = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k not in ("func",) and not callable(v)
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": args.command,
        "parameters": params,
        "input_files": [str(p) for p in input_files],
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
    }


def _emit(payload, out=None):
    text = _json(payload) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _out_dir(path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CommandFailed("FileError", f"{path}: {exc.strerror}", EXIT_INPUT) from None


# -- estimate --------------------------------------------------------------

def _read_capture_sets(path):
    text = _read_bytes(path).decode("utf-8-sig")
    sets = []
    for row in csv.reader(text.splitlines()):
        ids = [cell.strip() for cell in row if cell.strip()]
        if not ids and not row:
            continue
        sets.append(set(ids))
    return sets


def _read_counts(path):
    text = _read_bytes(path).decode("utf-8-sig")
    reader = csv.DictReader(text.splitlines())
    if not reader.fieldnames or {"n", "r", "m"} - {f.strip() for f in reader.fieldnames}:
        raise ParseError("counts CSV needs header n,r,m", line=1, source=path)
    samples = []
    for i, row in enumerate(reader, start=1):
        try:
            samples.append(tuple(int(row[k]) for k in ("n", "r", "m")))
        except (TypeError, ValueError):
            raise ParseError("non-integer count", record=i, line=reader.line_num, source=path) from None
    return samples


def cmd_estimate(args):
    if args.method == "petersen":
        est = petersen_estimate(args.n1, args.n2, args.r)
        inputs = {"n1": args.n1, "n2": args.n2, "r": args.r}
        files = []
    else:
        if bool(args.sets) == bool(args.counts):
            raise InvalidParams("schnabel needs exactly one of --sets or --counts")
        if args.sets:
            samples = samples_from_capture_sets(_read_capture_sets(args.sets))
            files = [args.sets]
        else:
            samples = _read_counts(args.counts)
            files = [args.counts]
        est = schnabel_estimate(samples)
        inputs = {"samples": [
            {"n": s.n, "r": s.r, "m": s.m} if hasattr(s, "n") else dict(zip("nrm", s)) for s in samples
        ]}
    _emit({**est.to_dict(), "inputs": inputs, "manifest": _manifest(args, files)})
    return EXIT_OK


# -- coverage --------------------------------------------------------------

def _load_list(path, fmt, label):
    try:
        return parse_export(_read_bytes(path), fmt, label=label)
    except ParseError as exc:
        raise ParseError(exc.detail, record=exc.record, line=exc.line, source=path) from None


def _guess_format(path, explicit):
    if explicit:
        return explicit
    suffix = Path(path).suffix.lower().lstrip(".")
    return {"bib": "bibtex", "ris": "ris", "csv": "csv"}.get(suffix, "csv")


def cmd_coverage(args):
    list1 = _load_list(args.file1, _guess_format(args.file1, args.format1 or args.format), Path(args.file1).stem)
    list2 = _load_list(args.file2, _guess_format(args.file2, args.format2 or args.format), Path(args.file2).stem)
    series = build_series(list1, list2, args.max_n)
    points = stopping_points(series, args.window, args.prominence) if args.window < series.max_n else []
    klass = classify_keyword(series, args.window, args.prominence, args.terminal_threshold)
    out = _out_dir(args.out)
    (out / "series.csv").write_text(series.to_csv(), encoding="utf-8")
    gain = information_gain(series).tolist() if series.max_n >= 2 else []
    (out / "stopping_points.json").write_text(
        _json({"stopping_points": [p.to_dict() for p in points], "information_gain": gain}) + "\n",
        encoding="utf-8",
    )
    (out / "class.json").write_text(_json(klass.to_dict()) + "\n", encoding="utf-8")
    (out / "manifest.json").write_text(
        _json(_manifest(args, [args.file1, args.file2])) + "\n", encoding="utf-8"
    )
    _emit({**klass.to_dict(), "max_n": series.max_n, "out": str(out)})
    return EXIT_OK


# -- similarity ------------------------------------------------------------

def _read_ranking(path):
    lines = _read_bytes(path).decode("utf-8-sig").splitlines()
    ids = [line.strip() for line in lines if line.strip()]
    try:
        return TruncatedRanking(tuple(ids))
    except DuplicateIds as exc:
        raise DuplicateIds(f"{path}: {exc}") from None
    except InvalidParams as exc:
        raise InvalidParams(f"{path}: {exc}") from None


def cmd_similarity(args):
    q1, q2 = _read_ranking(args.file1), _read_ranking(args.file2)
    result = compare(q1, q2)
    if args.curve:
        curve = overlap_curve(q1, q2)
        with open(args.curve, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["j", "R"])
            writer.writerows(enumerate(curve.tolist()))
    _emit({**result, "manifest": _manifest(args, [args.file1, args.file2])})
    return EXIT_OK


# -- special cases ---------------------------------------------------------

def cmd_special_cases(args):
    if args.paper_suite:
        args.n, args.trials = PAPER_N, PAPER_TRIALS
    report = special_cases(args.n, args.trials, args.seed, args.threads)
    _emit({**report, "manifest": _manifest(args, seed=args.seed)}, args.out)
    return EXIT_OK


# -- simulate --------------------------------------------------------------

def read_config_file(path):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    text = _read_bytes(path).decode("utf-8-sig")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", line=lineno, source=path)
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


_CONFIG_TYPES = {
    "initial_n": int, "attach_m": int, "churn_mean": float, "churn_std": float,
    "top_k": int, "iterations": int, "seed": int, "tol": float, "max_iter": int,
}


def _build_config(args):
    values = {}
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in _CONFIG_TYPES:
                raise InvalidParams(f"{args.config}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](raw)
            except ValueError:
                raise InvalidParams(f"{args.config}: bad value for {key}: {raw!r}") from None
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if "seed" not in values:
        raise InvalidParams("simulate needs --seed (or 'seed' in the config file)")
    return ChurnConfig.from_mapping(values)


def cmd_simulate(args):
    config = _build_config(args)
    out = _out_dir(args.out)

    def progress(step):
        if args.verbose and step % 10 == 0:
            log.info("step %d/%d", step, config.iterations)

    records, summary = run_experiment(config, progress)
    with open(out / "records.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([r.step, repr(r.s_value), repr(r.kendall), repr(r.overlap), r.graph_size])
    payload = {"config": config.to_dict(), "summary": summary}
    (out / "summary.json").write_text(_json(payload) + "\n", encoding="utf-8")
    (out / "manifest.json").write_text(
        _json(_manifest(args, [args.config] if args.config else [], config.seed)) + "\n", encoding="utf-8"
    )
    _emit({**payload, "out": str(out)})
    skipped = summary["steps_skipped_not_converged"]
    if skipped > NONCONVERGENCE_LIMIT * config.iterations:
        raise CommandFailed(
            "NotConverged",
            f"centrality failed to converge on {skipped} of {config.iterations} steps",
            EXIT_NUMERIC,
        )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="litcapture",
        description="Capture-recapture literature coverage and truncated-ranking similarity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="population size from capture-recapture counts")
    est_sub = est.add_subparsers(dest="method", required=True)
    pet = est_sub.add_parser("petersen", help="two-sample Petersen estimate")
    pet.add_argument("--n1", type=int, required=True)
    pet.add_argument("--n2", type=int, required=True)
    pet.add_argument("--r", type=int, required=True)
    sch = est_sub.add_parser("schnabel", help="multi-sample Schnabel index")
    sch.add_argument("--sets", type=Path, help="CSV, one capture (list of ids) per row")
    sch.add_argument("--counts", type=Path, help="CSV with header n,r,m, one sample per row")
    est.set_defaults(func=cmd_estimate)

    cov = sub.add_parser("coverage", help="coverage series and stopping points for two result lists")
    cov.add_argument("file1", type=Path)
    cov.add_argument("file2", type=Path)
    cov.add_argument("--format", choices=["csv", "ris", "bibtex"], help="format of both files")
    cov.add_argument("--format1", choices=["csv", "ris", "bibtex"])
    cov.add_argument("--format2", choices=["csv", "ris", "bibtex"])
    cov.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    cov.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    cov.add_argument("--prominence", type=float, default=None,
                     help="absolute prominence threshold (default: 5%% of the range of C)")
    cov.add_argument("--terminal-threshold", type=float, default=TERMINAL_COVERAGE)
    cov.add_argument("--out", type=Path, default=Path("coverage_out"))
    cov.set_defaults(func=cmd_coverage)

    sim = sub.add_parser("similarity", help="compare two ranking files (one id per line)")
    sim.add_argument("file1", type=Path)
    sim.add_argument("file2", type=Path)
    sim.add_argument("--curve", type=Path, help="write the overlap curve as CSV")
    sim.set_defaults(func=cmd_similarity)

    spc = sub.add_parser("special-cases", help="reverse / random / half-shared ranking scenarios")
    spc.add_argument("--n", type=int, default=PAPER_N)
    spc.add_argument("--trials", type=int, default=PAPER_TRIALS)
    spc.add_argument("--seed", type=int, default=0)
    spc.add_argument("--threads", type=int, default=1)
    spc.add_argument("--paper-suite", action="store_true", help="force n=1000 and 1000 trials")
    spc.add_argument("--out", type=Path)
    spc.set_defaults(func=cmd_special_cases)

    simu = sub.add_parser("simulate", help="vertex-churn experiment on a Barabasi-Albert network")
    simu.add_argument("--config", type=Path, help="flat key = value file")
    simu.add_argument("--initial-n", dest="initial_n", type=int)
    simu.add_argument("--attach-m", dest="attach_m", type=int)
    simu.add_argument("--churn-mean", dest="churn_mean", type=float)
    simu.add_argument("--churn-std", dest="churn_std", type=float)
    simu.add_argument("--top-k", dest="top_k", type=int)
    simu.add_argument("--iterations", type=int)
    simu.add_argument("--seed", type=int)
    simu.add_argument("--tol", type=float)
    simu.add_argument("--max-iter", dest="max_iter", type=int)
    simu.add_argument("--out", type=Path, default=Path("simulate_out"))
    simu.set_defaults(func=cmd_simulate)
    return parser


def _fail(code, message):
    sys.stderr.write(_json({"error": code, "message": message}) + "\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CommandFailed as exc:
        _fail(exc.code, str(exc))
        return exc.exit_code
    except LitCaptureError as exc:
        _fail(exc.code, str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
