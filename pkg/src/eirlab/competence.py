"""Empirical competence test on the law of the per-example error mass.

An ensemble is competent when, for every ``t`` in ``[0, 1/2]``,

    P(W in [t, 1/2)) >= P(W in [1/2, 1 - t])

where ``W`` is the weighted fraction of erring classifiers on a random
example. Both sides are step functions of ``t`` that only change at values
of ``W`` or ``1 - W``, so evaluating on those breakpoints is exact.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import ATOL, ErrorProfile

__all__ = [
    "CompetenceVerdict",
    "competence_check",
    "competence_curve",
    "interval_probabilities",
    "curve_to_csv",
]


def _snap_half(w: np.ndarray) -> np.ndarray:
    # error masses equal to 1/2 up to rounding belong to the right interval
    w = np.asarray(w, dtype=np.float64)
    return np.where(np.abs(w - 0.5) <= ATOL, 0.5, w)


def interval_probabilities(w, t) -> tuple[np.ndarray, np.ndarray]:
    """Empirical ``P(W in [t, 1/2))`` and ``P(W in [1/2, 1-t])`` at each ``t``.

    Interval endpoints at ``t`` and ``1 - t`` are closed up to 1e-12 so that
    grid points built from ``1 - w`` recover ``w`` exactly.
    """
    w = _snap_half(w)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    below = w < 0.5
    lhs = np.mean(below[None, :] & (w[None, :] >= t[:, None] - ATOL), axis=1)
    rhs = np.mean(~below[None, :] & (w[None, :] <= 1.0 - t[:, None] + ATOL), axis=1)
    return lhs, rhs


@dataclass(frozen=True, eq=False)
class CompetenceVerdict:
    t_grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    competent: bool
    max_violation: float
    violation_t: float | None
    slack: float = 0.0

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.t_grid, self.lhs, self.rhs)]

    def to_dict(self) -> dict:
        return {
            "competent": self.competent,
            "max_violation": self.max_violation,
            "violation_t": self.violation_t,
            "slack": self.slack,
            "t": self.t_grid.tolist(),
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
        }


def auto_grid(w) -> np.ndarray:
    """Breakpoints of both interval probabilities inside ``[0, 1/2]``."""
    w = _snap_half(w)
    candidates = np.concatenate([w, 1.0 - w, [0.0, 0.5]])
    candidates = candidates[(candidates >= 0.0) & (candidates <= 0.5)]
    return np.unique(candidates)


def competence_check(
    profile: ErrorProfile | np.ndarray,
    grid: str | np.ndarray = "auto",
    slack: float = 0.0,
) -> CompetenceVerdict:
    """Test competence of the empirical distribution of ``profile.w``.

    ``grid="auto"`` evaluates at every breakpoint, which makes the verdict
    exact for the sample. ``slack`` tolerates ``rhs - lhs`` up to that size.
    """
    if slack < 0:
        raise ValueError("slack must be non-negative")
    w = profile.w if isinstance(profile, ErrorProfile) else np.asarray(profile, dtype=float)
    if w.size == 0:
        raise ValueError("competence check needs at least one example")
    if isinstance(grid, str):
        if grid != "auto":
            raise ValueError(f"unknown grid {grid!r}")
        t = auto_grid(w)
    else:
        t = np.sort(np.asarray(grid, dtype=np.float64).reshape(-1))
        if t.size == 0 or t[0] < 0 or t[-1] > 0.5:
            raise ValueError("explicit grid must be non-empty and lie in [0, 1/2]")
    lhs, rhs = interval_probabilities(w, t)
    gap = rhs - lhs
    worst = int(np.argmax(gap))
    max_violation = max(0.0, float(gap[worst]))
    return CompetenceVerdict(
        t_grid=t,
        lhs=lhs,
        rhs=rhs,
        competent=bool(gap[worst] <= slack),
        max_violation=max_violation,
        violation_t=float(t[worst]) if max_violation > 0 else None,
        slack=float(slack),
    )


def competence_curve(profile: ErrorProfile | np.ndarray, n_points: int = 51) -> np.ndarray:
    """Rows ``(t, lhs, rhs)`` on a uniform grid of ``n_points`` over ``[0, 1/2]``."""
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    w = profile.w if isinstance(profile, ErrorProfile) else np.asarray(profile, dtype=float)
    t = np.linspace(0.0, 0.5, n_points)
    lhs, rhs = interval_probabilities(w, t)
    return np.column_stack([t, lhs, rhs])


def curve_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "lhs", "rhs"])
    for t, lhs, rhs in rows:
        writer.writerow([repr(float(t)), repr(float(lhs)), repr(float(rhs))])
    return buf.getvalue()
