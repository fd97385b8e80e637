"""Upper and lower bounds on the majority-vote error and on EIR.

Bounds whose proof needs competence are still evaluated on incompetent
ensembles, but marked ``"conditional"``. A violated conditional bound is
therefore not a refutation.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field

from .competence import CompetenceVerdict, competence_check
from .core import ATOL, PredictionMatrix, error_profile
from .metrics import DiagnosticsReport, TieRule, diagnostics

APPLICABLE = "applicable"
CONDITIONAL = "conditional"
INAPPLICABLE = "inapplicable"

# (field, kind, needs competence); kind says which side of the target it bounds
_BOUND_SPECS = (
    ("first_order_ub", "upper", False),
    ("competent_ub", "upper", True),
    ("second_order_ub", "upper", True),
    ("prior_binary_ub", "upper", False),
    ("c_bound", "upper", False),
    ("mv_lower", "lower", False),
    ("eir_ub", "upper", False),
    ("eir_lb", "lower", True),
)
EIR_BOUNDS = ("eir_ub", "eir_lb")


@dataclass(frozen=True)
class BoundTable:
    """Raw bound values; ``None`` where a bound is undefined.

    ``eir_ub``/``eir_lb`` bound the EIR, every other field bounds the
    majority-vote error.
    """

    first_order_ub: float
    competent_ub: float
    second_order_ub: float
    prior_binary_ub: float | None
    c_bound: float | None
    mv_lower: float
    eir_ub: float | None
    eir_lb: float | None
    applicable: dict[str, str] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def value(self, name: str) -> float | None:
        return getattr(self, name)

    def display(self, name: str) -> float | None:
        """Value clipped to [0, 1] for the majority-vote bounds."""
        v = self.value(name)
        if v is None or name in EIR_BOUNDS:
            return v
        return min(max(v, 0.0), 1.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


def bound_table(report: DiagnosticsReport, verdict: CompetenceVerdict) -> BoundTable:
    """Evaluate every bound from the scalar diagnostics of one ensemble."""
    K = report.num_classes
    avg, dis = report.avg_error, report.disagreement
    second = 4.0 * (K - 1) / K * (avg - dis / 2.0)
    prior = 4.0 * avg - 2.0 * dis if K == 2 else None
    flags = []
    if report.margin_mean > 0:
        c_bound = 1.0 - report.margin_mean ** 2 / report.margin_sq_mean
    else:
        c_bound = None
        flags.append("CBoundInapplicable")
    if report.der is not None:
        eir_ub = report.der
        eir_lb = 2.0 * (K - 1) / K * report.der - (3.0 * K - 4.0) / K
    else:
        eir_ub = eir_lb = None
        flags.append("EIRUndefined")
    values = {
        "first_order_ub": min(2.0 * avg, 1.0),
        "competent_ub": avg,
        "second_order_ub": second,
        "prior_binary_ub": prior,
        "c_bound": c_bound,
        "mv_lower": avg - dis,
        "eir_ub": eir_ub,
        "eir_lb": eir_lb,
    }
    applicable = {}
    for name, _, needs_competence in _BOUND_SPECS:
        if values[name] is None:
            applicable[name] = INAPPLICABLE
        elif needs_competence and not verdict.competent:
            applicable[name] = CONDITIONAL
        else:
            applicable[name] = APPLICABLE
    if not verdict.competent:
        flags.append("Incompetent")
    return BoundTable(**values, applicable=applicable, flags=tuple(flags))


@dataclass(frozen=True)
class BoundCheck:
    name: str
    kind: str
    bound: float | None
    target: float | None
    status: str
    holds: bool | None
    slack: float | None

    @property
    def asserted(self) -> bool:
        return self.status == APPLICABLE


@dataclass(frozen=True, eq=False)
class VerificationRecord:
    report: DiagnosticsReport
    verdict: CompetenceVerdict
    table: BoundTable
    checks: tuple[BoundCheck, ...]

    @property
    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.asserted and c.holds is False]

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _check(name, kind, bound, target, status, tol) -> BoundCheck:
    if bound is None or target is None:
        return BoundCheck(name, kind, bound, target, status, None, None)
    slack = bound - target if kind == "upper" else target - bound
    return BoundCheck(name, kind, bound, target, status, bool(slack >= -tol), slack)


def verify_bounds(
    pm: PredictionMatrix,
    tie_rule: TieRule = "lowest-index",
    slack: float = 0.0,
    tol: float = ATOL,
) -> VerificationRecord:
    """Run diagnostics, competence and every bound; compare each bound to its target.

    Every bound is evaluated, but only ``"applicable"`` ones count towards
    :attr:`VerificationRecord.passed`. Outcomes of conditional bounds are
    still recorded in ``holds``.
    """
    report = diagnostics(pm, tie_rule)
    verdict = competence_check(error_profile(pm), slack=slack)
    table = bound_table(report, verdict)
    checks = []
    for name, kind, _ in _BOUND_SPECS:
        target = report.eir if name in EIR_BOUNDS else report.mv_error
        checks.append(_check(name, kind, table.value(name), target, table.applicable[name], tol))
    return VerificationRecord(report, verdict, table, tuple(checks))


@dataclass(frozen=True)
class ComparisonRow:
    ensemble_id: str
    ours: float
    c_bound: float | None
    tighter: str


def bound_comparison(pm_list, ids=None, tie_rule: TieRule = "lowest-index") -> list[ComparisonRow]:
    """Compare the second-order disagreement bound against the multi-class C-bound.

    Every ensemble must be competent; ``tighter`` is ``"ours"``, ``"c_bound"``
    or ``"tie"``.
    """
    pm_list = list(pm_list)
    ids = [str(i) for i in range(len(pm_list))] if ids is None else [str(i) for i in ids]
    rows = []
    for eid, pm in zip(ids, pm_list):
        report = diagnostics(pm, tie_rule)
        verdict = competence_check(error_profile(pm))
        if not verdict.competent:
            raise ValueError(f"ensemble {eid!r} is not competent; its second-order bound does not apply")
        table = bound_table(report, verdict)
        ours, cb = table.second_order_ub, table.c_bound
        if cb is None or ours < cb - ATOL:
            tighter = "ours"
        elif cb < ours - ATOL:
            tighter = "c_bound"
        else:
            tighter = "tie"
        rows.append(ComparisonRow(eid, ours, cb, tighter))
    return rows


def comparison_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ensemble_id", "ours", "c_bound", "tighter"])
    for r in rows:
        writer.writerow([r.ensemble_id, repr(r.ours), "" if r.c_bound is None else repr(r.c_bound), r.tighter])
    return buf.getvalue()


def checks_to_csv(record: VerificationRecord) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bound", "kind", "value", "display", "target", "status", "holds", "slack"])
    fmt = lambda v: "" if v is None else repr(v)  # noqa: E731
    for c in record.checks:
        holds = "" if c.holds is None else str(c.holds).lower()
        writer.writerow([
            c.name, c.kind, fmt(c.bound), fmt(record.table.display(c.name)),
            fmt(c.target), c.status, holds, fmt(c.slack),
        ])
    return buf.getvalue()
