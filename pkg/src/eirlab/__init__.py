"""Majority-vote ensemble diagnostics: improvement rate, disagreement-error
ratio, competence and error bounds, plus a small bagging lab."""
from .bounds import BoundTable, bound_comparison, bound_table, verify_bounds
from .competence import CompetenceVerdict, competence_check, competence_curve
from .core import (
    ClassMassProfile,
    ErrorProfile,
    PredictionMatrix,
    class_mass,
    error_profile,
    load_predictions,
    save_predictions,
)
from .errors import (
    LabelRangeError,
    NonFiniteError,
    ParameterError,
    ParseError,
    SpecError,
    WeightError,
    ZeroErrorWarning,
)
from .metrics import (
    DiagnosticsReport,
    average_error,
    diagnostics,
    disagreement,
    majority_vote,
    margin_moments,
    mv_error,
    tandem_loss,
)
from .pathology import PathologySpec, make_pathology, pathology_audit

__version__ = "0.1.0"

__all__ = [
    "BoundTable",
    "ClassMassProfile",
    "CompetenceVerdict",
    "DiagnosticsReport",
    "ErrorProfile",
    "LabelRangeError",
    "NonFiniteError",
    "ParameterError",
    "ParseError",
    "PathologySpec",
    "PredictionMatrix",
    "SpecError",
    "WeightError",
    "ZeroErrorWarning",
    "average_error",
    "bound_comparison",
    "bound_table",
    "class_mass",
    "competence_check",
    "competence_curve",
    "diagnostics",
    "disagreement",
    "error_profile",
    "load_predictions",
    "majority_vote",
    "make_pathology",
    "margin_moments",
    "mv_error",
    "pathology_audit",
    "save_predictions",
    "tandem_loss",
    "verify_bounds",
]
