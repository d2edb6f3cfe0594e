"""Command-line interface.

Every command echoes its resolved configuration: as a ``# config: {...}``
first line in CSV output, or under a ``config`` key in JSON. The worker count
(``--jobs``) is deliberately left out so outputs do not depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dataio
from .data import LabeledDataset
from .evalbench import (
    CVScheme,
    ExperimentTable,
    compute_metrics,
    grid_search,
    run_ar_direction_experiment,
    run_logistic_experiment,
    run_sensitivity_experiment,
    run_tuebingen,
    split_train_test,
)
from .evalbench.metrics import imbalance_ratio
from .lz import causality_report
from .symbolize import BinningSpec, equiwidth_bin
from .synthgen import ARConfig, LogisticConfig, gen_ar_classification, gen_coupled_ar, gen_coupled_logistic
from .tree import Criterion, causal_strength, fit

DATA_DIR_ENV = "LZCAUSAL_DATA_DIR"
# Default CV scheme per criterion when tuning.
CRITERION_CV = {"distance": "stratified", "causal": "timeseries", "gini": "timeseries"}


class CliError(Exception):
    """A user-facing error; ``flag`` names the offending option."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")


# -- helpers --------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _int_range(text: str) -> list[int]:
    """``"1-10"`` or ``"1,2,5"``."""
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return _int_list(text)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _config_line(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True) + "\n"


def _csv_text(columns, rows, config: dict) -> str:
    buf = io.StringIO()
    buf.write(_config_line(config))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _resolve_path(path: str, flag: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    base = os.environ.get(DATA_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    raise CliError(flag, f"no such file or directory: {path}")


def _load_dataset(spec: str, seed: int, target: str | None, flag: str = "dataset") -> LabeledDataset:
    if spec == "ar":
        return gen_ar_classification(seed)
    return dataio.load_csv(_resolve_path(spec, flag), target_column=target)


def _table_output(table: ExperimentTable, args) -> None:
    """Write a table as CSV (or JSON) plus a JSON summary when --out is a directory."""
    summary = {"config": table.config, "columns": table.columns, "rows": table.rows}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{table.name}.csv").write_text(
            _csv_text(table.columns, table.rows, table.config), encoding="utf-8")
        (out / f"{table.name}.json").write_text(_json_text(summary), encoding="utf-8")
        _note(f"wrote {out / (table.name + '.csv')} ({len(table.rows)} rows)")
    elif args.format == "json":
        sys.stdout.write(_json_text(summary))
    else:
        sys.stdout.write(_csv_text(table.columns, table.rows, table.config))


# -- gen ----------------------------------------------------------------------------

def cmd_gen(args) -> None:
    if args.kind == "ar-dataset":
        ds = gen_ar_classification(args.seed, noise=args.noise if args.noise is not None else 0.03)
        config = {"command": "gen", "kind": "ar-dataset", "seed": args.seed,
                  "noise": args.noise if args.noise is not None else 0.03}
        columns = ["feature", "target"]
        rows = [[float(f), int(t)] for f, t in zip(ds.features[:, 0], ds.targets)]
    elif args.kind == "ar":
        if args.eta is not None and not 0.0 <= args.eta <= 1.0:
            raise CliError("--eta", f"must be in [0, 1], got {args.eta}")
        try:
            cfg = ARConfig(p=args.p, a=args.a, b=args.b, eta=args.eta if args.eta is not None else 0.5,
                           noise=args.noise if args.noise is not None else 0.03,
                           total_steps=args.length + args.transient,
                           transient_steps=args.transient, seed=args.seed)
        except ValueError as exc:
            raise CliError("gen ar", str(exc))
        x, y = gen_coupled_ar(cfg)
        config = {"command": "gen", "kind": "ar", **cfg.to_dict()}
        columns = ["X", "Y"]
        rows = [[float(a), float(b)] for a, b in zip(x, y)]
    else:
        eta = args.eta if args.eta is not None else 0.1
        if not 0.0 <= eta <= 0.9:
            raise CliError("--eta", f"must be in [0, 0.9], got {eta}")
        try:
            cfg = LogisticConfig(A1=args.A1, A2=args.A2, eta=eta,
                                 total_steps=args.length + args.transient,
                                 transient_steps=args.transient, seed=args.seed,
                                 x0=args.x0, y0=args.y0)
        except ValueError as exc:
            raise CliError("gen logistic", str(exc))
        x, y = gen_coupled_logistic(cfg)
        config = {"command": "gen", "kind": "logistic", **cfg.to_dict()}
        columns = ["X", "Y"]
        rows = [[float(a), float(b)] for a, b in zip(x, y)]

    if args.format == "json":
        text = _json_text({"config": config, "columns": columns, "rows": rows})
    else:
        text = _csv_text(columns, rows, config)
    _emit(text, args.out)
    _note(f"gen {args.kind}: {len(rows)} rows, columns {','.join(columns)}")


# -- causality -------------------------------------------------------------------------

def _read_two_columns(source: str) -> tuple[list[str], list[list[str]]]:
    if source == "-":
        text = sys.stdin.read()
    else:
        text = _resolve_path(source, "input").read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    dialect_comma = any("," in ln for ln in lines)
    rows = [next(csv.reader([ln])) if dialect_comma else ln.split() for ln in lines]
    rows = [[c.strip() for c in r] for r in rows]
    if not rows:
        raise CliError("input", "no data")
    header = ["X", "Y"]
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header, rows = rows[0], rows[1:]
    if any(len(r) != 2 for r in rows) or len(header) != 2:
        raise CliError("input", "expected exactly two columns")
    return header, rows


def cmd_causality(args) -> None:
    header, rows = _read_two_columns(args.input)
    if args.symbolic:
        try:
            x = [int(r[0]) for r in rows]
            y = [int(r[1]) for r in rows]
        except ValueError:
            raise CliError("--symbolic", "columns must hold non-negative integer symbols")
        if min(x + y, default=0) < 0 or max(x + y, default=0) > 255:
            raise CliError("--symbolic", "symbols must lie in [0, 255]")
        sx, sy = bytes(x), bytes(y)
    else:
        try:
            xs = [float(r[0]) for r in rows]
            ys = [float(r[1]) for r in rows]
        except ValueError:
            raise CliError("input", "columns must be numeric")
        spec = BinningSpec(args.bins)
        sx, sy = equiwidth_bin(xs, spec), equiwidth_bin(ys, spec)
    report = causality_report(sx, sy, rng_seed=args.seed)
    config = {"command": "causality", "input": args.input, "columns": header,
              "bins": None if args.symbolic else args.bins, "symbolic": args.symbolic,
              "seed": args.seed, "n": len(rows)}
    d = report.to_dict()
    if args.format == "csv":
        text = _csv_text(list(d), [list(d.values())], config)
    else:
        text = _json_text({"config": config, "report": d})
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")


# -- tree ----------------------------------------------------------------------------------

def cmd_tree(args) -> None:
    data = _load_dataset(args.dataset, args.seed, args.target)
    ordered = (args.dataset == "ar") if args.split is None else (args.split == "ordered")
    try:
        train, test = split_train_test(data, args.ratio, ordered=ordered, seed=args.seed)
    except ValueError as exc:
        raise CliError("--ratio", str(exc))
    tree = fit(train, args.criterion, max_depth=args.max_depth, min_samples=args.min_samples,
               seed=args.seed)
    metrics = compute_metrics(test.targets, tree.predict(test.features))
    config = {"command": "tree", "dataset": args.dataset, "criterion": args.criterion,
              "max_depth": args.max_depth, "min_samples": args.min_samples,
              "split": "ordered" if ordered else "shuffled", "ratio": args.ratio,
              "seed": args.seed, "target": args.target,
              "n_train": train.n_rows, "n_test": test.n_rows,
              "train_class_counts": {str(k): v for k, v in train.class_counts().items()},
              "train_imbalance_ratio": imbalance_ratio(train.targets)}
    want_ranking = args.criterion == "causal" or args.ranking
    ranking = causal_strength(tree) if want_ranking else None
    rank_rows = [[name, score] for name, score in ranking.ranking()] if ranking else []

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(
            _json_text({"config": config, "metrics": metrics.to_dict()}), encoding="utf-8")
        dataio.save_results(tree, out / "tree.json")
        (out / "tree.dot").write_text(
            dataio.export_tree_dot(tree, class_names=data.class_names), encoding="utf-8")
        if ranking:
            (out / "ranking.csv").write_text(
                _csv_text(["feature", "causal_strength"], rank_rows, config), encoding="utf-8")
    if args.format == "csv":
        m = metrics.to_dict()
        cols = ["accuracy", "macro_f1", "macro_precision", "macro_recall"]
        sys.stdout.write(_csv_text(cols, [[m[c] for c in cols]], config))
    else:
        doc = {"config": config, "metrics": metrics.to_dict(), "depth": tree.depth,
               "n_leaves": len(tree.leaves())}
        if ranking:
            doc["ranking"] = rank_rows
        sys.stdout.write(_json_text(doc))


# -- bench -------------------------------------------------------------------------------------

def _bench_trees(args) -> ExperimentTable:
    if not args.dataset:
        raise CliError("--dataset", "bench trees needs at least one --dataset")
    criteria = args.criteria or ["causal", "distance", "gini"]
    rows = []
    for spec in args.dataset:
        data = _load_dataset(spec, args.seed, args.target, flag="--dataset")
        ordered = (spec == "ar") if args.split is None else (args.split == "ordered")
        train, test = split_train_test(data, args.ratio, ordered=ordered, seed=args.seed)
        for crit in criteria:
            kind = CRITERION_CV[crit] if args.cv == "per-criterion" else args.cv
            try:
                res = grid_search(train, crit, CVScheme(kind, args.folds, args.seed),
                                  min_samples_grid=args.grid_min_samples,
                                  max_depth_grid=args.grid_max_depth, jobs=args.jobs)
            except ValueError as exc:
                raise CliError("--folds", f"{spec}: {exc}")
            tree = fit(train, crit, max_depth=res.best_max_depth,
                       min_samples=res.best_min_samples, seed=args.seed)
            m = compute_metrics(test.targets, tree.predict(test.features))
            cell = res.cell(res.best_min_samples, res.best_max_depth)
            rows.append([data.name or spec, crit, kind, res.best_min_samples, res.best_max_depth,
                         cell["mean_f1"], cell["var_f1"], m.accuracy, m.macro_f1,
                         m.macro_precision, m.macro_recall])
    config = {"command": "bench", "experiment": "trees", "datasets": args.dataset,
              "criteria": criteria, "cv": args.cv, "folds": args.folds, "ratio": args.ratio,
              "split": args.split, "seed": args.seed,
              "grid_min_samples": list(args.grid_min_samples),
              "grid_max_depth": list(args.grid_max_depth)}
    columns = ["dataset", "criterion", "cv", "min_samples", "max_depth", "cv_mean_f1",
               "cv_var_f1", "accuracy", "macro_f1", "macro_precision", "macro_recall"]
    return ExperimentTable("trees", config, columns, rows)


def cmd_bench(args) -> None:
    exp = args.experiment
    if exp == "ar-direction":
        table = run_ar_direction_experiment(
            p=args.p, eta_grid=args.eta_grid, n_trials=args.trials, length=args.length,
            n_bins=args.bins, seed=args.seed, transient=args.transient, jobs=args.jobs)
    elif exp == "logistic":
        table = run_logistic_experiment(
            eta_grid=args.eta_grid, n_trials=args.trials, length=args.length, n_bins=args.bins,
            seed=args.seed, transient=args.transient, jobs=args.jobs)
    elif exp == "sensitivity":
        table = run_sensitivity_experiment(
            a_grid=args.a_grid, b_fixed=args.b, n_trials=args.trials, seed=args.seed,
            length=args.length, transient=args.transient, n_bins=args.bins, jobs=args.jobs)
    elif exp == "tuebingen":
        pairs_dir = args.pairs or os.environ.get(DATA_DIR_ENV)
        if not pairs_dir:
            raise CliError("--pairs", f"give a pairs directory (or set {DATA_DIR_ENV})")
        directory = _resolve_path(pairs_dir, "--pairs")
        loaded = dataio.load_tuebingen(directory, args.meta, args.exclude or (), args.pattern)
        if not loaded.pairs:
            raise CliError("--pairs", f"no usable pairs in {directory}")
        result = run_tuebingen(loaded.pairs, n_bins=args.bins, seed=args.seed)
        table = result.curve
        table.config.update(pairs=str(pairs_dir), exclusions=sorted(args.exclude or []),
                            skipped=[list(s) for s in loaded.skipped],
                            macro_f1=result.macro_f1, accuracy=result.accuracy)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "tuebingen-pairs.csv").write_text(
                _csv_text(result.pairs.columns, result.pairs.rows, table.config), encoding="utf-8")
        _note(f"tuebingen: {len(loaded.pairs)} pairs, accuracy {result.accuracy:.3f}, "
              f"macro F1 {result.macro_f1:.3f}, {len(loaded.skipped)} skipped")
    else:
        table = _bench_trees(args)
    _table_output(table, args)


# -- parser -------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", help="output file (gen, causality) or directory (tree, bench)")
    common.add_argument("--format", choices=["csv", "json"], default=None,
                        help="output format (default: csv for tables, json for reports)")
    common.add_argument("--jobs", type=_positive_int, default=1,
                        help="worker processes for trials and folds (output is identical)")

    parser = argparse.ArgumentParser(
        prog="lzcausal",
        description="Lempel-Ziv penalty causality, grammar distance and LZ decision trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate synthetic series or datasets")
    gen.add_argument("kind", choices=["ar", "logistic", "ar-dataset"])
    gen.add_argument("--p", type=_positive_int, default=1, help="AR coupling lag")
    gen.add_argument("--eta", type=float, default=None, help="coupling coefficient")
    gen.add_argument("--a", type=float, default=0.9)
    gen.add_argument("--b", type=float, default=0.9)
    gen.add_argument("--noise", type=float, default=None, help="noise intensity (default 0.03)")
    gen.add_argument("--A1", type=float, default=4.0)
    gen.add_argument("--A2", type=float, default=3.82)
    gen.add_argument("--x0", type=float, default=None)
    gen.add_argument("--y0", type=float, default=None)
    gen.add_argument("--length", type=_positive_int, default=2000, help="samples kept")
    gen.add_argument("--transient", type=int, default=500, help="initial samples dropped")
    gen.set_defaults(func=cmd_gen, default_format="csv")

    cau = sub.add_parser("causality", parents=[common],
                         help="penalties and direction for a two-column series file")
    cau.add_argument("input", help="CSV or whitespace-separated file with two columns, '-' for stdin")
    cau.add_argument("--bins", type=int, default=2, help="equi-width bins per column")
    cau.add_argument("--symbolic", action="store_true",
                     help="columns already hold integer symbols; skip binning")
    cau.set_defaults(func=cmd_causality, default_format="json")

    tre = sub.add_parser("tree", parents=[common], help="train and evaluate one decision tree")
    tre.add_argument("dataset", help="CSV path, or 'ar' for the synthetic AR dataset")
    tre.add_argument("--criterion", choices=[c.value for c in Criterion], default="causal")
    tre.add_argument("--max-depth", type=int, default=None)
    tre.add_argument("--min-samples", type=_positive_int, default=2)
    tre.add_argument("--split", choices=["ordered", "shuffled"], default=None,
                     help="default: ordered for 'ar', shuffled otherwise")
    tre.add_argument("--ratio", type=float, default=0.8, help="training fraction")
    tre.add_argument("--target", default=None, help="target column (default: last)")
    tre.add_argument("--ranking", action="store_true",
                     help="emit the causal strength ranking for any criterion")
    tre.set_defaults(func=cmd_tree, default_format="json")

    ben = sub.add_parser("bench", parents=[common], help="run an experiment and emit tables")
    ben.add_argument("experiment", choices=["ar-direction", "logistic", "tuebingen",
                                            "sensitivity", "trees"])
    ben.add_argument("--trials", type=_positive_int, default=100)
    ben.add_argument("--p", type=_positive_int, default=1)
    ben.add_argument("--eta-grid", type=_float_list, default=None)
    ben.add_argument("--a-grid", type=_float_list, default=None)
    ben.add_argument("--b", type=float, default=0.6, help="Y coefficient for sensitivity")
    ben.add_argument("--length", type=_positive_int, default=2000)
    ben.add_argument("--transient", type=int, default=500)
    ben.add_argument("--bins", type=int, default=2)
    ben.add_argument("--pairs", help="directory of cause-effect pair files")
    ben.add_argument("--meta", help="ground-truth metadata file (default: DIR/pairmeta.txt)")
    ben.add_argument("--exclude", type=_int_list, default=None, help="pair ids to skip")
    ben.add_argument("--pattern", default="pair*.txt", help="pair file glob")
    ben.add_argument("--dataset", action="append", help="CSV path or 'ar' (repeatable)")
    ben.add_argument("--target", default=None)
    ben.add_argument("--criteria", type=lambda s: [Criterion(c).value for c in s.split(",")],
                     default=None)
    ben.add_argument("--cv", choices=["per-criterion", "stratified", "timeseries"],
                     default="per-criterion",
                     help="per-criterion: stratified for distance, time-series for causal and gini")
    ben.add_argument("--folds", type=int, default=5)
    ben.add_argument("--ratio", type=float, default=0.8)
    ben.add_argument("--split", choices=["ordered", "shuffled"], default=None)
    ben.add_argument("--grid-min-samples", type=_int_range, default=list(range(1, 11)))
    ben.add_argument("--grid-max-depth", type=_int_range, default=list(range(1, 21)))
    ben.set_defaults(func=cmd_bench, default_format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        args.func(args)
    except BrokenPipeError:
        # Downstream reader closed early (e.g. piped into head).
        sys.stdout = open(os.devnull, "w")
        return 0
    except CliError as exc:
        print(f"lzcausal: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"lzcausal {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
