"""Ensembles as prediction matrices: data model, ingestion and serialization.

An ensemble of ``M`` hard classifiers evaluated on ``m`` labelled examples is
fully described by an ``M x m`` integer matrix of predictions, the label
vector, the number of classes ``K`` and a weight per classifier. Every
diagnostic in this package is a function of that object alone.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import LabelRangeError, ParseError, WeightError

ATOL = 1e-12
# weights summing to 1 within this band are renormalized on load
RENORMALIZE_BAND = 1e-3

__all__ = [
    "ATOL",
    "PredictionMatrix",
    "ClassMassProfile",
    "ErrorProfile",
    "class_mass",
    "error_profile",
    "load_predictions",
    "save_predictions",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PredictionMatrix:
    """Hard predictions of a weighted, finite ensemble.

    Parameters
    ----------
    preds : array of shape (M, m)
        ``preds[i, j]`` is the class predicted by classifier ``i`` on example ``j``.
    labels : array of shape (m,)
        True labels.
    num_classes : int
        Number of classes ``K >= 2``.
    weights : array of shape (M,), optional
        Non-negative classifier weights summing to one. Uniform if omitted.
    """

    preds: np.ndarray
    labels: np.ndarray
    num_classes: int
    weights: np.ndarray | None = None

    def __post_init__(self):
        preds = np.asarray(self.preds)
        labels = np.asarray(self.labels)
        if preds.ndim == 1:
            preds = preds[None, :]
        if preds.ndim != 2 or labels.ndim != 1:
            raise ValueError("preds must be 2-D (M, m) and labels 1-D (m,)")
        M, m = preds.shape
        if M < 1 or m < 1:
            raise ValueError("need at least one classifier and one example")
        if labels.shape[0] != m:
            raise ValueError(f"labels has length {labels.shape[0]}, expected {m}")
        K = int(self.num_classes)
        if K < 2:
            raise ValueError("num_classes must be at least 2")
        for name, arr in (("preds", preds), ("labels", labels)):
            if not np.issubdtype(arr.dtype, np.integer):
                if not np.all(np.equal(np.mod(arr, 1), 0)):
                    raise LabelRangeError(f"{name} must hold integer class indices")
            if arr.min() < 0 or arr.max() >= K:
                raise LabelRangeError(
                    f"{name} entries must lie in 0..{K - 1}, got range "
                    f"[{arr.min()}, {arr.max()}]"
                )
        if self.weights is None:
            weights = np.full(M, 1.0 / M)
        else:
            weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
            if weights.shape[0] != M:
                raise WeightError(f"got {weights.shape[0]} weights for {M} classifiers")
            if not np.all(np.isfinite(weights)) or np.any(weights < 0):
                raise WeightError("weights must be finite and non-negative")
            if abs(weights.sum() - 1.0) > ATOL:
                raise WeightError(f"weights sum to {weights.sum()!r}, not 1")
        object.__setattr__(self, "preds", _frozen(preds.astype(np.int64)))
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))
        object.__setattr__(self, "num_classes", K)
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def n_classifiers(self) -> int:
        return self.preds.shape[0]

    @property
    def n_examples(self) -> int:
        return self.preds.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PredictionMatrix):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.preds, other.preds)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"PredictionMatrix(M={self.n_classifiers}, m={self.n_examples}, "
            f"K={self.num_classes})"
        )

    def error_indicators(self) -> np.ndarray:
        """Boolean (M, m) matrix, True where a classifier errs."""
        return self.preds != self.labels[None, :]

    def classifier_errors(self) -> np.ndarray:
        """Per-classifier error rate on the m examples."""
        return self.error_indicators().mean(axis=1)

    def to_dict(self) -> dict:
        return {
            "num_classes": self.num_classes,
            "labels": self.labels.tolist(),
            "predictions": self.preds.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True, eq=False)
class ClassMassProfile:
    """Weighted vote mass per (example, class); each row is a distribution."""

    mass: np.ndarray


@dataclass(frozen=True, eq=False)
class ErrorProfile:
    """Per-example weighted fraction of erring classifiers and its moments."""

    w: np.ndarray
    mean_w: float
    mean_w_sq: float

    @classmethod
    def from_values(cls, w) -> "ErrorProfile":
        w = _frozen(np.asarray(w, dtype=np.float64).reshape(-1))
        if w.size == 0:
            raise ValueError("error profile needs at least one example")
        return cls(w=w, mean_w=float(w.mean()), mean_w_sq=float(np.mean(w * w)))


def class_mass(pm: PredictionMatrix) -> ClassMassProfile:
    """Return ``mass[j, k] = sum_i weights[i] * 1(preds[i, j] == k)``."""
    K = pm.num_classes
    mass = np.empty((pm.n_examples, K))
    for k in range(K):
        mass[:, k] = pm.weights @ (pm.preds == k)
    return ClassMassProfile(mass=_frozen(mass))


def error_profile(pm: PredictionMatrix) -> ErrorProfile:
    """Weighted error mass per example, ``w[j] = sum_i weights[i] * 1(h_i(x_j) != y_j)``."""
    w = pm.weights @ pm.error_indicators()
    # mass can exceed 1 by an ulp when weights sum to 1 + eps
    return ErrorProfile.from_values(np.clip(w, 0.0, 1.0))


# --------------------------------------------------------------------------
# file formats
# --------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^#\s*(.*)$")


def _parse_header(line: str) -> dict[str, int]:
    match = _HEADER_RE.match(line.strip())
    if not match:
        raise ParseError(f"expected '# K=<int> m=<int> M=<int>' header, got {line!r}")
    fields = {}
    for token in match.group(1).split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ParseError(f"malformed header token {token!r}")
        try:
            fields[key] = int(value)
        except ValueError:
            raise ParseError(f"header value {token!r} is not an integer") from None
    missing = {"K", "m", "M"} - fields.keys()
    if missing:
        raise ParseError(f"header is missing {sorted(missing)}")
    return fields


def _to_index(token, class_names: dict[str, int] | None, where: str) -> int:
    if isinstance(token, bool):
        raise ParseError(f"{where}: boolean is not a class index")
    if isinstance(token, (int, np.integer)):
        return int(token)
    if isinstance(token, float):
        if token.is_integer():
            return int(token)
        raise ParseError(f"{where}: {token!r} is not an integer class index")
    token = str(token).strip()
    try:
        return int(token)
    except ValueError:
        pass
    if class_names is not None and token in class_names:
        return class_names[token]
    raise ParseError(f"{where}: cannot interpret {token!r} as a class")


def _resolve_weights(raw, M: int) -> np.ndarray | None:
    if raw is None:
        return None
    try:
        w = np.asarray([float(x) for x in raw], dtype=np.float64)
    except (TypeError, ValueError):
        raise ParseError("weights must be numbers") from None
    if w.shape[0] != M:
        raise WeightError(f"got {w.shape[0]} weights for {M} classifiers")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise WeightError("weights must be finite and non-negative")
    total = w.sum()
    if abs(total - 1.0) <= ATOL:
        return w
    if abs(total - 1.0) <= RENORMALIZE_BAND:
        return w / total
    raise WeightError(f"weights sum to {total!r}; refusing to renormalize")


def _check_range(values: list[list[int]] | list[int], K: int, what: str):
    arr = np.asarray(values)
    if arr.size and (arr.min() < 0 or arr.max() >= K):
        raise LabelRangeError(f"{what} contain a value outside 0..{K - 1}")


def _read_csv(path: Path) -> PredictionMatrix:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = _parse_header(lines[0])
    K, m, M = header["K"], header["m"], header["M"]
    class_names = None
    labels = None
    preds: list[list[int]] = []
    weights = None
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        tag, values = row[0].strip(), row[1:]
        where = f"{path}:{lineno}"
        if tag == "classes":
            class_names = {name.strip(): k for k, name in enumerate(values)}
            continue
        if tag == "weights":
            weights = values
            continue
        if len(values) != m:
            raise ParseError(f"{where}: expected {m} values, got {len(values)}")
        parsed = [_to_index(v, class_names, where) for v in values]
        if tag == "labels":
            labels = parsed
        elif re.fullmatch(r"h\d+", tag):
            preds.append(parsed)
        else:
            raise ParseError(f"{where}: unknown row tag {tag!r}")
    if labels is None:
        raise ParseError(f"{path}: no 'labels' row")
    if len(preds) != M:
        raise ParseError(f"{path}: header declares M={M}, found {len(preds)} classifiers")
    _check_range(labels, K, "labels")
    _check_range(preds, K, "predictions")
    return PredictionMatrix(
        preds=np.asarray(preds, dtype=np.int64),
        labels=np.asarray(labels, dtype=np.int64),
        num_classes=K,
        weights=_resolve_weights(weights, M),
    )


def _read_json(path: Path) -> PredictionMatrix:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    for key in ("num_classes", "labels", "predictions"):
        if key not in obj:
            raise ParseError(f"{path}: missing key {key!r}")
    try:
        K = int(obj["num_classes"])
    except (TypeError, ValueError):
        raise ParseError(f"{path}: num_classes must be an integer") from None
    names = obj.get("class_names")
    class_names = {str(n): k for k, n in enumerate(names)} if names else None
    raw_labels, raw_preds = obj["labels"], obj["predictions"]
    if not isinstance(raw_labels, list) or not raw_labels:
        raise ParseError(f"{path}: labels must be a non-empty array")
    if not isinstance(raw_preds, list) or not raw_preds or not all(
        isinstance(r, list) for r in raw_preds
    ):
        raise ParseError(f"{path}: predictions must be a non-empty array of arrays")
    labels = [_to_index(v, class_names, f"{path}: labels") for v in raw_labels]
    preds = []
    for i, row in enumerate(raw_preds):
        if len(row) != len(labels):
            raise ParseError(
                f"{path}: classifier {i} has {len(row)} predictions, expected {len(labels)}"
            )
        preds.append([_to_index(v, class_names, f"{path}: predictions[{i}]") for v in row])
    _check_range(labels, K, "labels")
    _check_range(preds, K, "predictions")
    return PredictionMatrix(
        preds=np.asarray(preds, dtype=np.int64),
        labels=np.asarray(labels, dtype=np.int64),
        num_classes=K,
        weights=_resolve_weights(obj.get("weights"), len(preds)),
    )


def _infer_format(path: Path, format: str | None) -> str:
    if format is not None:
        if format not in ("csv", "json"):
            raise ValueError(f"unknown format {format!r}")
        return format
    suffix = path.suffix.lower().lstrip(".")
    if suffix in ("csv", "json"):
        return suffix
    raise ValueError(f"cannot infer format from {path.name!r}; pass format='csv' or 'json'")


def load_predictions(path, format: str | None = None) -> PredictionMatrix:
    """Read a prediction matrix from a CSV or JSON file.

    The format is inferred from the file suffix unless given. Weights that sum
    to one within 1e-3 are renormalized; anything further off raises
    :class:`WeightError`.
    """
    path = Path(path)
    fmt = _infer_format(path, format)
    if not path.exists():
        raise FileNotFoundError(f"{path}: no such file")
    return _read_csv(path) if fmt == "csv" else _read_json(path)


def save_predictions(pm: PredictionMatrix, path, format: str | None = None) -> Path:
    """Write ``pm`` in the CSV or JSON interchange format; weights always included."""
    path = Path(path)
    fmt = _infer_format(path, format)
    if fmt == "json":
        path.write_text(json.dumps(pm.to_dict()) + "\n")
        return path
    lines = [
        f"# K={pm.num_classes} m={pm.n_examples} M={pm.n_classifiers}",
        "labels," + ",".join(map(str, pm.labels.tolist())),
    ]
    for i, row in enumerate(pm.preds.tolist(), start=1):
        lines.append(f"h{i}," + ",".join(map(str, row)))
    lines.append("weights," + ",".join(repr(float(w)) for w in pm.weights))
    path.write_text("\n".join(lines) + "\n")
    return path
