"""Two-classifier ensembles whose majority vote is twice as bad as the average member.

Both constructions are binary. A perfect classifier carries weight
``0.5 - eps`` and a faulty one carries ``0.5 + eps``, so the faulty one
always wins the vote:

* ``example1``: the faulty classifier is wrong everywhere.
* ``example2``: the faulty classifier is wrong only on the last ``2*delta*m``
  examples. The margin stays positive, yet the vote error is ``2*delta``
  against an average error of ``delta * (1 + 2*eps)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .competence import competence_check
from .core import PredictionMatrix, error_profile
from .errors import SpecError
from .metrics import diagnostics

__all__ = ["PathologySpec", "make_pathology", "closed_forms", "pathology_audit"]

KINDS = ("example1", "example2")


@dataclass(frozen=True)
class PathologySpec:
    kind: str
    epsilon: float
    m: int
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 < self.epsilon < 0.5:
            raise SpecError("epsilon must lie in (0, 1/2)")
        if int(self.m) != self.m or self.m < 1:
            raise SpecError("m must be a positive integer")
        if self.kind == "example2":
            if self.delta is None or not 0.0 < self.delta < 0.5:
                raise SpecError("example2 needs delta in (0, 1/2)")
            n_bad = 2.0 * self.delta * self.m
            if abs(n_bad - round(n_bad)) > 1e-9:
                raise SpecError(f"2*delta*m = {n_bad!r} must be an integer")

    @property
    def weights(self) -> tuple[float, float]:
        """Weights of the (perfect, faulty) classifier pair."""
        return 0.5 - self.epsilon, 0.5 + self.epsilon

    @property
    def n_bad(self) -> int:
        """Number of examples the faulty classifier gets wrong."""
        if self.kind == "example1":
            return self.m
        return int(round(2.0 * self.delta * self.m))


def make_pathology(spec: PathologySpec) -> PredictionMatrix:
    labels = np.arange(spec.m) % 2
    faulty = labels.copy()
    bad = slice(spec.m - spec.n_bad, spec.m)
    faulty[bad] = 1 - faulty[bad]
    return PredictionMatrix(
        preds=np.stack([labels, faulty]),
        labels=labels,
        num_classes=2,
        weights=np.array(spec.weights),
    )


def closed_forms(spec: PathologySpec) -> dict[str, float]:
    eps = spec.epsilon
    if spec.kind == "example1":
        avg, mv, margin = 0.5 + eps, 1.0, -2.0 * eps
    else:
        d = spec.n_bad / (2.0 * spec.m)
        avg, mv, margin = d * (1 + 2 * eps), 2 * d, 1 - 2 * d * (1 + 2 * eps)
    return {"avg_error": avg, "mv_error": mv, "margin_mean": margin, "eir": (avg - mv) / avg}


def pathology_audit(spec: PathologySpec, tol: float = 1e-12) -> dict:
    """Build the ensemble, recompute its diagnostics and compare to the closed forms."""
    pm = make_pathology(spec)
    report = diagnostics(pm)
    verdict = competence_check(error_profile(pm))
    expected = closed_forms(spec)
    measured = {k: getattr(report, k) for k in expected}
    checks = {k: math.isclose(measured[k], expected[k], rel_tol=0.0, abs_tol=tol) for k in expected}
    checks["incompetent"] = not verdict.competent
    return {
        "kind": spec.kind,
        "epsilon": spec.epsilon,
        "delta": spec.delta,
        "m": spec.m,
        "weights": list(spec.weights),
        "expected": expected,
        "measured": measured,
        "competent": verdict.competent,
        "max_violation": verdict.max_violation,
        "violation_t": verdict.violation_t,
        "checks": checks,
        "ok": all(checks.values()),
    }
