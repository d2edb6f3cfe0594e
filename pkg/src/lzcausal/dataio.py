"""Reading datasets and cause-effect pairs; writing trees and results."""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .data import LabeledDataset
from .evalbench.experiments import ExperimentTable, TuebingenResult
from .evalbench.metrics import MetricsReport
from .evalbench.search import GridSearchResult
from .lz import Direction, PenaltyReport
from .symbolize import encode_categorical
from .tree import CausalStrengthRanking, DecisionTree

__all__ = [
    "DataFormatError",
    "ResultsFormatError",
    "TuebingenPair",
    "TuebingenSet",
    "export_tree_dot",
    "load_csv",
    "load_results",
    "load_tuebingen",
    "save_results",
]

log = logging.getLogger(__name__)

MISSING = {"", "?", "na", "nan", "null", "none"}
SCHEMA_VERSION = 1


class DataFormatError(ValueError):
    pass


class ResultsFormatError(ValueError):
    pass


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in MISSING


def _as_float(cell: str):
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, target_column: str | int | None = None, name: str | None = None) -> LabeledDataset:
    """Load a headed CSV as a dataset, keeping file row order.

    Lines starting with ``#`` are ignored. The target is the last column
    unless ``target_column`` names (or indexes) another. Columns that are not
    entirely numeric are ordinal-encoded by first appearance. Rows with a
    missing cell (empty, ``?``, ``NA``...) are dropped and counted in
    ``n_dropped``. Integer-valued numeric targets keep their values as class
    ids; any other target is encoded.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DataFormatError(f"{path}: no data rows")
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataFormatError(
                f"{path}: row {lineno} has {len(row)} cells, header has {len(header)}"
            )
    if target_column is None:
        t = len(header) - 1
    elif isinstance(target_column, int):
        t = target_column
    elif target_column in header:
        t = header.index(target_column)
    else:
        raise DataFormatError(f"{path}: no target column {target_column!r}")

    kept = [[c.strip() for c in r] for r in body if not any(_is_missing(c) for c in r)]
    dropped = len(body) - len(kept)
    if dropped:
        log.info("%s: dropped %d rows with missing values", path, dropped)
    if not kept:
        raise DataFormatError(f"{path}: every row has a missing value")

    columns = list(zip(*kept))
    features, names, encodings = [], [], {}
    for j, col in enumerate(columns):
        if j == t:
            continue
        numeric = [_as_float(c) for c in col]
        if all(v is not None for v in numeric):
            features.append(numeric)
        else:
            codes, mapping = encode_categorical(col)
            features.append(codes)
            encodings[header[j]] = mapping
        names.append(header[j])

    target_raw = columns[t]
    numeric = [_as_float(c) for c in target_raw]
    if all(v is not None and float(v).is_integer() for v in numeric):
        targets = [int(v) for v in numeric]
        class_names = {}
    else:
        codes, mapping = encode_categorical(target_raw)
        targets = [int(c) for c in codes]
        class_names = {code: token for token, code in mapping.items()}

    X = np.array(features, dtype=float).T if features else np.zeros((len(kept), 0))
    return LabeledDataset(
        features=X,
        targets=targets,
        feature_names=names,
        class_labels=sorted(set(targets)),
        name=name or path.stem,
        class_names=class_names,
        encodings=encodings,
        n_dropped=dropped,
    )


# -- cause-effect pairs ---------------------------------------------------------

@dataclass
class TuebingenPair:
    id: int
    X: np.ndarray
    Y: np.ndarray
    ground_truth: Direction

    def __post_init__(self):
        if len(self.X) != len(self.Y) or len(self.X) < 2:
            raise DataFormatError(f"pair {self.id}: X and Y need equal length >= 2")


@dataclass
class TuebingenSet:
    """Loaded pairs plus ``(pair id or file, reason)`` for everything skipped."""

    pairs: list[TuebingenPair]
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _read_metadata(path: Path) -> dict[int, Direction | str]:
    """Map pair id to its direction, or to a skip reason.

    Accepts the benchmark's ``pairmeta.txt`` layout (id, cause first/last
    column, effect first/last column, weight) and a two-column
    ``id direction`` layout with ``XtoY``/``YtoX``/``->``/``<-``.
    """
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataFormatError(f"cannot read metadata {path}: {exc}") from exc
    meta: dict = {}
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            pid = int(parts[0])
            if len(parts) == 2:
                token = {"->": "XtoY", "<-": "YtoX"}.get(parts[1], parts[1])
                meta[pid] = Direction(token)
            elif len(parts) >= 5:
                c0, c1, e0, e1 = (int(v) for v in parts[1:5])
                if c0 != c1 or e0 != e1:
                    meta[pid] = "multivariate cause or effect"
                elif (c0, e0) == (1, 2):
                    meta[pid] = Direction.X_TO_Y
                elif (c0, e0) == (2, 1):
                    meta[pid] = Direction.Y_TO_X
                else:
                    meta[pid] = f"unsupported column layout {c0}->{e0}"
            else:
                raise ValueError("expected 2 or at least 5 fields")
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    return meta


def load_tuebingen(directory, metadata_path=None, exclusions: Iterable[int] = (),
                   pattern: str = "pair*.txt") -> TuebingenSet:
    """Load whitespace-separated two-column pair files matching ``pattern``.

    The pair id is the number in the file name. ``metadata_path`` defaults to
    ``pairmeta.txt`` in ``directory``. Pairs that are excluded, lack ground
    truth, are multivariate or fail to parse are skipped and reported.
    """
    directory = Path(directory)
    meta = _read_metadata(Path(metadata_path) if metadata_path else directory / "pairmeta.txt")
    excluded = {int(e) for e in exclusions}
    pairs, skipped = [], []
    for path in sorted(directory.glob(pattern)):
        m = re.search(r"(\d+)", path.stem)
        if m is None or path.name == "pairmeta.txt":
            continue
        pid = int(m.group(1))
        if pid in excluded:
            skipped.append((str(pid), "excluded"))
            continue
        truth = meta.get(pid)
        if truth is None:
            skipped.append((str(pid), "no ground truth"))
            continue
        if not isinstance(truth, Direction):
            skipped.append((str(pid), truth))
            continue
        try:
            data = np.loadtxt(path, ndmin=2)
        except (ValueError, OSError) as exc:
            skipped.append((str(pid), f"unreadable: {exc}"))
            continue
        if data.shape[1] != 2:
            skipped.append((str(pid), f"{data.shape[1]} columns"))
            continue
        try:
            pairs.append(TuebingenPair(pid, data[:, 0], data[:, 1], truth))
        except DataFormatError as exc:
            skipped.append((str(pid), str(exc)))
    for pid, reason in skipped:
        log.info("skipped pair %s: %s", pid, reason)
    return TuebingenSet(pairs, skipped)


# -- trees ----------------------------------------------------------------------

def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_tree_dot(tree: DecisionTree, feature_names: Sequence[str] | None = None,
                    class_names: dict | None = None) -> str:
    """Graphviz DOT text; node ids follow pre-order."""
    names = list(feature_names) if feature_names is not None else list(tree.feature_names)
    if len(names) != tree.n_features:
        raise ValueError(f"{len(names)} feature names for a tree over {tree.n_features} features")
    class_names = class_names or {}
    ids = {id(n): i for i, n in enumerate(tree.nodes())}
    lines = [f'digraph "{_dot_escape(tree.criterion.value)} tree" {{', "  node [shape=box];"]
    for node in tree.nodes():
        i = ids[id(node)]
        if node.is_leaf:
            cls = class_names.get(node.prediction, node.prediction)
            label = f"class = {cls}\\nsamples = {node.n_samples}"
            lines.append(f'  n{i} [label="{_dot_escape(label)}", shape=ellipse];')
        else:
            label = f"{names[node.feature]} < {node.threshold:g}"
            lines.append(f'  n{i} [label="{_dot_escape(label)}"];')
    for node in tree.nodes():
        if not node.is_leaf:
            i = ids[id(node)]
            lines.append(f'  n{i} -> n{ids[id(node.left)]} [label="yes"];')
            lines.append(f'  n{i} -> n{ids[id(node.right)]} [label="no"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- results ----------------------------------------------------------------------

RESULT_TYPES = {
    "metrics": MetricsReport,
    "grid_search": GridSearchResult,
    "experiment_table": ExperimentTable,
    "tuebingen": TuebingenResult,
    "penalty_report": PenaltyReport,
    "causal_strength": CausalStrengthRanking,
    "tree": DecisionTree,
}
_TYPE_NAMES = {cls: name for name, cls in RESULT_TYPES.items()}


def dumps_result(report) -> str:
    kind = _TYPE_NAMES.get(type(report))
    if kind is None:
        raise TypeError(f"cannot serialize {type(report).__name__}")
    doc = {"schema_version": SCHEMA_VERSION, "type": kind, "data": report.to_dict()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def loads_result(text: str, source: str = "<string>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResultsFormatError(f"{source}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ResultsFormatError(f"{source}: top level must be an object")
    for key in ("schema_version", "type", "data"):
        if key not in doc:
            raise ResultsFormatError(f"{source}: missing field '{key}'")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ResultsFormatError(
            f"{source}: field 'schema_version' is {doc['schema_version']!r}, expected {SCHEMA_VERSION}"
        )
    cls = RESULT_TYPES.get(doc["type"])
    if cls is None:
        raise ResultsFormatError(f"{source}: field 'type' has unknown value {doc['type']!r}")
    try:
        return cls.from_dict(doc["data"])
    except KeyError as exc:
        raise ResultsFormatError(f"{source}: missing field {exc.args[0]!r} in {doc['type']}") from exc
    except (TypeError, ValueError, AttributeError) as exc:
        raise ResultsFormatError(f"{source}: bad value in {doc['type']} data ({exc})") from exc


def save_results(report, path) -> None:
    path = Path(path)
    text = dumps_result(report)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def load_results(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    return loads_result(text, source=str(path))
