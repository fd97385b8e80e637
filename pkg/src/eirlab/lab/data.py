"""Labelled datasets with a fixed train/test split."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ParameterError, ParseError

TRAIN_FRACTION = 0.75


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray
    test_idx: np.ndarray
    num_classes: int

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] < 1:
            raise ParameterError("features must be an (n, d) matrix with d >= 1")
        if y.shape != (X.shape[0],):
            raise ParameterError("labels must have one entry per row of features")
        if self.num_classes < 2:
            raise ParameterError("need at least two classes")
        if y.min() < 0 or y.max() >= self.num_classes:
            raise ParameterError(f"labels must lie in 0..{self.num_classes - 1}")
        if np.intersect1d(self.train_idx, self.test_idx).size:
            raise ParameterError("train and test indices overlap")
        for name, v in (("features", X), ("labels", y)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def X_train(self) -> np.ndarray:
        return self.features[self.train_idx]

    @property
    def y_train(self) -> np.ndarray:
        return self.labels[self.train_idx]

    @property
    def X_test(self) -> np.ndarray:
        return self.features[self.test_idx]

    @property
    def y_test(self) -> np.ndarray:
        return self.labels[self.test_idx]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.train_idx, other.train_idx)
            and np.array_equal(self.test_idx, other.test_idx)
        )

    __hash__ = None


def _split(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    perm = rng.permutation(n)
    n_train = int(round(TRAIN_FRACTION * n))
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def make_blobs(
    n: int = 400,
    d: int = 10,
    K: int = 2,
    class_sep: float = 2.0,
    label_noise: float = 0.0,
    seed: int = 0,
    cluster_std: float = 0.5,
) -> Dataset:
    """Isotropic Gaussian clusters, one per class, with noisy training labels.

    Class means sit at ``class_sep / sqrt(2)`` times distinct basis vectors,
    centred at the origin, so every pair of means is ``class_sep`` apart.
    Each cluster has standard deviation ``cluster_std`` in every coordinate.
    Classes are balanced. A ``label_noise`` fraction of the training labels
    is reassigned to a different class chosen uniformly; test labels stay clean.
    """
    if K < 2 or d < 1 or K > d:
        raise ParameterError("need 2 <= K <= d")
    if n < 10 * K:
        raise ParameterError(f"need n >= 10*K = {10 * K}")
    if class_sep < 0:
        raise ParameterError("class_sep must be non-negative")
    if not cluster_std > 0:
        raise ParameterError("cluster_std must be positive")
    if not 0.0 <= label_noise < 0.5:
        raise ParameterError("label_noise must lie in [0, 0.5)")
    rng = np.random.default_rng(seed)
    means = np.zeros((K, d))
    means[np.arange(K), np.arange(K)] = class_sep / np.sqrt(2.0)
    means -= means.mean(axis=0)
    labels = rng.permutation(np.arange(n) % K)
    X = means[labels] + cluster_std * rng.standard_normal((n, d))
    train_idx, test_idx = _split(n, rng)
    n_flip = int(round(label_noise * train_idx.size))
    if n_flip:
        flip = rng.choice(train_idx, size=n_flip, replace=False)
        shift = rng.integers(1, K, size=n_flip)
        labels[flip] = (labels[flip] + shift) % K
    return Dataset(X, labels, train_idx, test_idx, K)


def load_dataset_csv(path, num_classes: int | None = None, seed: int = 0) -> Dataset:
    """Read ``label,f_1,...,f_d`` rows; a non-numeric first row is taken as a header.

    The file carries no split, so a seeded 75/25 split is drawn.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0])
    if width < 2:
        raise ParseError(f"{path}: need a label and at least one feature per row")
    labels, feats = [], []
    for lineno, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ParseError(f"{path}: row {lineno} has {len(r)} fields, expected {width}")
        try:
            label = float(r[0])
            feats.append([float(v) for v in r[1:]])
        except ValueError:
            raise ParseError(f"{path}: row {lineno} is not numeric") from None
        if not label.is_integer():
            raise ParseError(f"{path}: row {lineno} label {r[0]!r} is not an integer")
        labels.append(int(label))
    y = np.asarray(labels, dtype=np.int64)
    K = int(num_classes) if num_classes is not None else int(y.max()) + 1
    train_idx, test_idx = _split(len(y), np.random.default_rng(seed))
    return Dataset(np.asarray(feats), y, train_idx, test_idx, max(K, 2))


def save_dataset_csv(ds: Dataset, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for label, row in zip(ds.labels.tolist(), ds.features.tolist()):
            writer.writerow([label, *map(repr, row)])
    return path
