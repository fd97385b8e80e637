"""Bagged ensembles, in-bag training error and capacity sweeps.

Every member gets its own random stream, spawned from the master seed by
member index. The same seed therefore gives each member the same bootstrap
sample (and the same random directions or split features) at every capacity
of a sweep. Curves across capacities compare like with like.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np

from ..core import PredictionMatrix
from ..metrics import diagnostics
from .cart import CartTree, fit_cart_tree
from .data import Dataset
from .features import relu_features, sphere_directions
from .logistic import LinearModel, fit_multinomial_logistic


@dataclass(frozen=True)
class RandomFeatures:
    """Random ReLU features followed by multinomial logistic regression."""

    n_features: int = 100
    l2_strength: float = 1e-6
    max_iters: int = 2000
    tol: float = 1e-6

    name = "random_features"

    @property
    def capacity(self) -> int:
        return self.n_features

    def with_capacity(self, capacity) -> "RandomFeatures":
        return replace(self, n_features=int(capacity))

    def fit(self, X, y, num_classes, rng) -> "RandomFeatureMember":
        U = sphere_directions(self.n_features, X.shape[1], rng)
        model = fit_multinomial_logistic(
            relu_features(X, U), y, self.l2_strength, self.max_iters, self.tol, num_classes
        )
        return RandomFeatureMember(U, model)


@dataclass(frozen=True)
class Cart:
    """A single CART tree; bagging these gives a random forest."""

    max_leaf_nodes: int = 32
    features_per_split: str = "sqrt"

    name = "cart"

    @property
    def capacity(self) -> int:
        return self.max_leaf_nodes

    def with_capacity(self, capacity) -> "Cart":
        return replace(self, max_leaf_nodes=int(capacity))

    def fit(self, X, y, num_classes, rng) -> CartTree:
        return fit_cart_tree(X, y, self.max_leaf_nodes, self.features_per_split, rng, num_classes)


FAMILIES = {"random_features": RandomFeatures, "cart": Cart}


def make_family(name: str, **params):
    try:
        return FAMILIES[name](**params)
    except KeyError:
        raise ValueError(f"unknown model family {name!r}; choose from {sorted(FAMILIES)}") from None


@dataclass(frozen=True, eq=False)
class RandomFeatureMember:
    directions: np.ndarray
    model: LinearModel

    def predict(self, X) -> np.ndarray:
        return self.model.predict(relu_features(X, self.directions))


@dataclass(frozen=True, eq=False)
class TrainedEnsemble:
    members: tuple
    bootstraps: tuple[np.ndarray, ...]
    in_bag_errors: np.ndarray
    test_predictions: PredictionMatrix
    capacity: Any
    seed: int

    @property
    def interpolating(self) -> bool:
        return bool(np.all(self.in_bag_errors == 0.0))


def member_streams(seed: int, M: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(M)]


def train_bagged_ensemble(dataset: Dataset, family, M: int, seed: int = 0) -> TrainedEnsemble:
    """Fit ``M`` members on independent bootstrap resamples of the training split.

    In-bag error for member ``i`` is measured on its own bootstrap sample,
    duplicates included. Test predictions use uniform weights.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    X, y = dataset.X_train, dataset.y_train
    n = y.size
    members, boots, in_bag, test_preds = [], [], [], []
    for rng in member_streams(seed, M):
        boot = rng.integers(0, n, size=n)
        member = family.fit(X[boot], y[boot], dataset.num_classes, rng)
        members.append(member)
        boots.append(boot)
        in_bag.append(float(np.mean(member.predict(X[boot]) != y[boot])))
        test_preds.append(member.predict(dataset.X_test))
    pm = PredictionMatrix(np.stack(test_preds), dataset.y_test, dataset.num_classes)
    return TrainedEnsemble(
        members=tuple(members),
        bootstraps=tuple(boots),
        in_bag_errors=np.asarray(in_bag),
        test_predictions=pm,
        capacity=family.capacity,
        seed=seed,
    )


SWEEP_COLUMNS = ("capacity", "avg_error", "mv_error", "eir", "der", "mean_in_bag_error", "interpolating")


@dataclass(frozen=True)
class SweepRow:
    capacity: float
    avg_error: float
    mv_error: float
    eir: float | None
    der: float | None
    mean_in_bag_error: float
    interpolating: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    interpolation_threshold: float | None
    family: str = ""
    M: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def threshold_index(self) -> int | None:
        if self.interpolation_threshold is None:
            return None
        caps = [r.capacity for r in self.rows]
        return caps.index(self.interpolation_threshold)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "family": self.family,
            "params": self.params,
            "M": self.M,
            "seed": self.seed,
            "interpolation_threshold": self.interpolation_threshold,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            writer.writerow([
                r.capacity if isinstance(r.capacity, int) else repr(r.capacity),
                repr(r.avg_error), repr(r.mv_error),
                "" if r.eir is None else repr(r.eir),
                "" if r.der is None else repr(r.der),
                repr(r.mean_in_bag_error), str(r.interpolating).lower(),
            ])
        return buf.getvalue()


def read_sweep_csv(text: str) -> list[dict]:
    """Parse a sweep CSV back into row dicts (``None`` for blank EIR/DER)."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if k == "interpolating":
                row[k] = v == "true"
            elif v == "":
                row[k] = None
            else:
                row[k] = float(v)
        out.append(row)
    return out


def capacity_sweep(dataset: Dataset, family, capacity_grid, M: int, seed: int = 0) -> SweepResult:
    """Train one bagged ensemble per capacity and locate the interpolation threshold.

    The threshold is the smallest capacity at which every member has exactly
    zero in-bag error.
    """
    grid = list(capacity_grid)
    if not grid:
        raise ValueError("capacity grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("capacity grid must be strictly increasing")
    rows = []
    for cap in grid:
        ens = train_bagged_ensemble(dataset, family.with_capacity(cap), M, seed)
        rep = diagnostics(ens.test_predictions)
        rows.append(SweepRow(
            capacity=cap,
            avg_error=rep.avg_error,
            mv_error=rep.mv_error,
            eir=rep.eir,
            der=rep.der,
            mean_in_bag_error=float(ens.in_bag_errors.mean()),
            interpolating=ens.interpolating,
        ))
    threshold = next((r.capacity for r in rows if r.interpolating), None)
    params = {k: v for k, v in asdict(family).items() if k not in ("n_features", "max_leaf_nodes")}
    return SweepResult(tuple(rows), threshold, family.name, M, seed, params)
