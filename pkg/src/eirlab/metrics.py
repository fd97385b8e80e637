"""Scalar diagnostics of a majority-vote ensemble.

All quantities are empirical averages over the examples of a
:class:`~eirlab.core.PredictionMatrix`, with classifiers weighted by the
ensemble weights. Disagreement and tandem loss treat the two classifiers as
independent draws from the weights, so ``h == h'`` pairs are included (they
contribute zero disagreement).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .core import ATOL, PredictionMatrix, class_mass, error_profile
from .errors import ZeroErrorWarning

TieRule = Literal["lowest-index", "pessimistic"]
TIE_RULES = ("lowest-index", "pessimistic")

# prediction emitted for a tied example under the pessimistic rule; never equals a label
ALWAYS_WRONG = -1


def _check_tie_rule(tie_rule: str) -> None:
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}, got {tie_rule!r}")


def majority_vote(
    pm: PredictionMatrix, tie_rule: TieRule = "lowest-index"
) -> tuple[np.ndarray, int]:
    """Weighted majority vote per example.

    Returns the vote and the number of examples whose top class mass is tied
    (within 1e-12). Ties resolve to the smallest tied class, or to
    ``ALWAYS_WRONG`` under the pessimistic rule.
    """
    _check_tie_rule(tie_rule)
    mass = class_mass(pm).mass
    top = mass.max(axis=1, keepdims=True)
    at_top = mass >= top - ATOL
    tied = at_top.sum(axis=1) > 1
    votes = np.argmax(at_top, axis=1)
    if tie_rule == "pessimistic":
        votes = np.where(tied, ALWAYS_WRONG, votes)
    return votes, int(tied.sum())


def average_error(pm: PredictionMatrix) -> float:
    """Weighted mean of the per-classifier error rates."""
    return float(pm.weights @ pm.classifier_errors())


def mv_error(pm: PredictionMatrix, tie_rule: TieRule = "lowest-index") -> float:
    votes, _ = majority_vote(pm, tie_rule)
    return float(np.mean(votes != pm.labels))


def disagreement(pm: PredictionMatrix) -> float:
    """Expected disagreement between two independent draws of the ensemble.

    Per example this is ``1 - sum_k mass_k**2 = sum_k mass_k * (1 - mass_k)``.
    The second form, with ``1 - mass_k`` summed directly over the members
    that do not vote ``k``, avoids cancellation when one class holds almost
    all the weight.
    """
    mass = class_mass(pm).mass
    per_example = np.zeros(pm.n_examples)
    for k in range(pm.num_classes):
        per_example += mass[:, k] * (pm.weights @ (pm.preds != k))
    return float(np.mean(np.clip(per_example, 0.0, 1.0)))


def tandem_loss(pm: PredictionMatrix) -> float:
    """Probability that two independent draws of the ensemble both err."""
    return error_profile(pm).mean_w_sq


def margins(pm: PredictionMatrix) -> np.ndarray:
    """Per-example margin: true-class mass minus the largest other-class mass."""
    mass = class_mass(pm).mass
    idx = np.arange(pm.n_examples)
    correct = mass[idx, pm.labels]
    others = mass.copy()
    others[idx, pm.labels] = -np.inf
    return correct - others.max(axis=1)


def margin_moments(pm: PredictionMatrix) -> tuple[float, float]:
    """First and second empirical moments of the margin."""
    mg = margins(pm)
    return float(mg.mean()), float(np.mean(mg * mg))


@dataclass(frozen=True)
class DiagnosticsReport:
    """Every scalar diagnostic of one ensemble on one labelled sample.

    ``eir`` and ``der`` are ``None`` when the average error is zero; the
    reason is recorded in ``warnings``. Disagreement includes ``h == h'``
    pairs, so it will read lower than a leave-one-out estimate.
    """

    avg_error: float
    mv_error: float
    disagreement: float
    tandem: float
    eir: float | None
    der: float | None
    margin_mean: float
    margin_sq_mean: float
    tie_count: int
    num_classes: int
    tie_rule: str = "lowest-index"
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def defined(self) -> bool:
        return self.eir is not None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d


def diagnostics(pm: PredictionMatrix, tie_rule: TieRule = "lowest-index") -> DiagnosticsReport:
    """Compute the full :class:`DiagnosticsReport` for ``pm``."""
    _check_tie_rule(tie_rule)
    avg = average_error(pm)
    votes, ties = majority_vote(pm, tie_rule)
    mv = float(np.mean(votes != pm.labels))
    dis = disagreement(pm)
    mean_m, sq_m = margin_moments(pm)
    notes: tuple[str, ...] = ()
    if avg > 0:
        eir, der = (avg - mv) / avg, dis / avg
    else:
        eir = der = None
        notes = (f"{ZeroErrorWarning.__name__}: average error is zero; EIR and DER are undefined",)
    return DiagnosticsReport(
        avg_error=avg,
        mv_error=mv,
        disagreement=dis,
        tandem=tandem_loss(pm),
        eir=eir,
        der=der,
        margin_mean=mean_m,
        margin_sq_mean=sq_m,
        tie_count=ties,
        num_classes=pm.num_classes,
        tie_rule=tie_rule,
        warnings=notes,
    )
