"""Command-line interface: ``eirlab <subcommand> [options]``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid
configuration, 3 a bound check failed under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bounds import checks_to_csv, verify_bounds
from .competence import competence_check, competence_curve, curve_to_csv
from .core import error_profile, load_predictions, save_predictions
from .errors import LabelRangeError, ParameterError, ParseError, SpecError, WeightError
from .lab import capacity_sweep, load_dataset_csv, make_blobs, make_family
from .metrics import TIE_RULES
from .pathology import PathologySpec, make_pathology, pathology_audit
from .svg import line_chart

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_STRICT = 0, 1, 2, 3

GLOBAL_DEFAULTS = {
    "out": ".",
    "seed": None,
    "tie_rule": "lowest-index",
    "slack": 0.0,
    "strict": False,
    "format": "both",
    "svg": False,
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str]
    out: Path
    tie_rule: str = "lowest-index"
    slack: float = 0.0
    seed: int | None = None
    strict: bool = False
    format: str = "both"
    svg: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def want_json(self) -> bool:
        return self.format in ("json", "both")

    @property
    def want_csv(self) -> bool:
        return self.format in ("csv", "both")


def _add_global_flags(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--out", default=s, help="output directory (default: current directory)")
    p.add_argument("--seed", type=int, default=s, help="master random seed")
    p.add_argument("--tie-rule", choices=TIE_RULES, default=s, help="majority-vote tie handling")
    p.add_argument("--slack", type=float, default=s, help="tolerance for the competence check")
    p.add_argument("--strict", action="store_true", default=s, help="exit 3 when an applicable check fails")
    p.add_argument("--format", choices=("json", "csv", "both"), default=s, help="which output files to write")
    p.add_argument("--svg", action="store_true", default=s, help="also write SVG plots")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eirlab", description="Ensemble improvement diagnostics and bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_global_flags(parser)
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    p = sub.add_parser("analyze", help="diagnostics, competence and bounds for a prediction file")
    p.add_argument("predictions")
    _add_global_flags(p)

    p = sub.add_parser("competence", help="competence check and curve for a prediction file")
    p.add_argument("predictions")
    p.add_argument("--n-points", type=int, default=51, help="points on the uniform competence curve")
    _add_global_flags(p)

    p = sub.add_parser("bounds", help="bound table and checks for a prediction file")
    p.add_argument("predictions")
    _add_global_flags(p)

    p = sub.add_parser("pathological", help="write a pathological ensemble and audit it")
    p.add_argument("kind", choices=("example1", "example2"))
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--m", type=int, default=10, help="number of examples")
    p.add_argument("--output", default=None, help="matrix file (default: OUT/pathological_<kind>.csv)")
    _add_global_flags(p)

    p = sub.add_parser("train-sweep", help="train bagged ensembles over a capacity grid")
    p.add_argument("config", help="JSON sweep configuration")
    _add_global_flags(p)
    return parser


def _to_config(ns: argparse.Namespace) -> RunConfig:
    opts = {k: getattr(ns, k, v) for k, v in GLOBAL_DEFAULTS.items()}
    if opts["slack"] < 0:
        raise ConfigError("--slack must be non-negative")
    inputs = [getattr(ns, k) for k in ("predictions", "config") if hasattr(ns, k)]
    extra = {k: v for k, v in vars(ns).items() if k not in GLOBAL_DEFAULTS and k not in ("subcommand", "predictions", "config")}
    return RunConfig(subcommand=ns.subcommand, inputs=inputs, out=Path(opts.pop("out")), extra=extra, **opts)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _competence_svg(w, title: str) -> str:
    rows = competence_curve(w, 101)
    return line_chart(
        rows[:, 0],
        {"P(W in [t,1/2))": rows[:, 1].tolist(), "P(W in [1/2,1-t])": rows[:, 2].tolist()},
        title=title,
        xlabel="t",
        ylabel="probability",
    )


def cmd_analyze(cfg: RunConfig) -> int:
    pm = load_predictions(cfg.inputs[0])
    rec = verify_bounds(pm, cfg.tie_rule, slack=cfg.slack)
    report = {"schema_version": SCHEMA_VERSION, **rec.report.to_dict()}
    report.update(
        competent=rec.verdict.competent,
        max_violation=rec.verdict.max_violation,
        violation_t=rec.verdict.violation_t,
        slack=cfg.slack,
        n_classifiers=pm.n_classifiers,
        n_examples=pm.n_examples,
    )
    if cfg.want_json:
        _write(cfg.out / "report.json", _dump(report))
        _write(cfg.out / "bounds.json", _dump({"schema_version": SCHEMA_VERSION, **rec.table.to_dict()}))
    if cfg.want_csv:
        _write(cfg.out / "bounds.csv", checks_to_csv(rec))
        _write(cfg.out / "competence.csv", curve_to_csv(rec.verdict.rows()))
    if cfg.svg:
        _write(cfg.out / "competence.svg", _competence_svg(error_profile(pm).w, "Competence"))
    r = rec.report
    fmt = lambda v: "undefined" if v is None else f"{v:.6g}"  # noqa: E731
    print(f"M={pm.n_classifiers} m={pm.n_examples} K={pm.num_classes} tie_rule={cfg.tie_rule}")
    print(f"avg_error={r.avg_error:.6g} mv_error={r.mv_error:.6g} disagreement={r.disagreement:.6g}")
    print(f"EIR={fmt(r.eir)} DER={fmt(r.der)} competent={rec.verdict.competent}")
    for c in rec.failures:
        print(f"bound violated: {c.name} value={c.bound!r} target={c.target!r}")
    return EXIT_STRICT if cfg.strict and rec.failures else EXIT_OK


def cmd_competence(cfg: RunConfig) -> int:
    pm = load_predictions(cfg.inputs[0])
    profile = error_profile(pm)
    verdict = competence_check(profile, slack=cfg.slack)
    n_points = cfg.extra.get("n_points", 51)
    if n_points < 2:
        raise ConfigError("--n-points must be at least 2")
    if cfg.want_csv:
        _write(cfg.out / "competence.csv", curve_to_csv(verdict.rows()))
        _write(cfg.out / "competence_curve.csv", curve_to_csv(competence_curve(profile, n_points)))
    if cfg.want_json:
        _write(cfg.out / "competence.json", _dump({"schema_version": SCHEMA_VERSION, **verdict.to_dict()}))
    if cfg.svg:
        _write(cfg.out / "competence.svg", _competence_svg(profile.w, "Competence"))
    print(f"competent={verdict.competent} max_violation={verdict.max_violation:.6g} violation_t={verdict.violation_t}")
    return EXIT_STRICT if cfg.strict and not verdict.competent else EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    pm = load_predictions(cfg.inputs[0])
    rec = verify_bounds(pm, cfg.tie_rule, slack=cfg.slack)
    if cfg.want_json:
        _write(cfg.out / "bounds.json", _dump({"schema_version": SCHEMA_VERSION, **rec.table.to_dict()}))
    if cfg.want_csv:
        _write(cfg.out / "bounds.csv", checks_to_csv(rec))
    for c in rec.checks:
        state = "skipped" if c.holds is None else ("ok" if c.holds else "VIOLATED")
        print(f"{c.name:16s} {c.status:12s} {state}")
    return EXIT_STRICT if cfg.strict and rec.failures else EXIT_OK


def cmd_pathological(cfg: RunConfig) -> int:
    x = cfg.extra
    try:
        spec = PathologySpec(x["kind"], x["epsilon"], x["m"], x["delta"])
    except SpecError as exc:
        raise ConfigError(str(exc)) from None
    target = Path(x["output"]) if x.get("output") else cfg.out / f"pathological_{spec.kind}.csv"
    target.parent.mkdir(parents=True, exist_ok=True)
    save_predictions(make_pathology(spec), target)
    audit = pathology_audit(spec)
    audit["path"] = str(target)
    print(_dump(audit), end="")
    return EXIT_OK


def _load_sweep_config(path: Path) -> dict:
    if not path.exists():
        raise FileNotFoundError(f"{path}: no such file")
    try:
        conf = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(conf, dict):
        raise ConfigError("sweep config must be a JSON object")
    return conf


def _dataset_from_config(conf: dict, base: Path):
    spec = dict(conf.get("dataset") or {"generator": "blobs"})
    if "path" in spec:
        path = Path(spec["path"])
        if not path.is_absolute():
            path = base / path
        return load_dataset_csv(path, spec.get("num_classes"), seed=spec.get("split_seed", 0))
    generator = spec.pop("generator", "blobs")
    if generator != "blobs":
        raise ConfigError(f"unknown dataset generator {generator!r}")
    try:
        return make_blobs(**spec)
    except TypeError as exc:
        raise ConfigError(f"bad dataset parameters: {exc}") from None


def cmd_sweep(cfg: RunConfig) -> int:
    path = Path(cfg.inputs[0])
    conf = _load_sweep_config(path)
    grid = conf.get("grid")
    if not isinstance(grid, list) or not grid:
        raise ConfigError("'grid' must be a non-empty list of capacities")
    if not all(isinstance(g, int) and g >= 1 for g in grid):
        raise ConfigError("'grid' entries must be positive integers")
    if "family" not in conf:
        raise ConfigError("'family' is required")
    M = conf.get("M", 15)
    if not isinstance(M, int) or M < 1:
        raise ConfigError("'M' must be a positive integer")
    seed = cfg.seed if cfg.seed is not None else conf.get("seed", 0)
    try:
        family = make_family(conf["family"], **conf.get("family_params", {}))
    except TypeError as exc:
        raise ConfigError(f"bad family parameters: {exc}") from None
    dataset = _dataset_from_config(conf, path.parent)
    result = capacity_sweep(dataset, family, sorted(grid), M, seed)
    if cfg.want_csv:
        _write(cfg.out / "sweep.csv", result.to_csv())
    if cfg.want_json:
        _write(cfg.out / "sweep.json", result.to_json())
    if cfg.svg:
        svg = line_chart(
            [r.capacity for r in result.rows],
            {"EIR": [r.eir for r in result.rows], "DER": [r.der for r in result.rows]},
            title=f"Bagged {result.family}, M={M}",
            xlabel="capacity",
            log_x=True,
            vline=result.interpolation_threshold,
            vline_label="interpolation threshold",
        )
        _write(cfg.out / "sweep.svg", svg)
    for r in result.rows:
        print(
            f"capacity={r.capacity} avg={r.avg_error:.4f} mv={r.mv_error:.4f} "
            f"eir={r.eir if r.eir is None else round(r.eir, 4)} der={r.der if r.der is None else round(r.der, 4)} "
            f"in_bag={r.mean_in_bag_error:.4f}{' *' if r.interpolating else ''}"
        )
    print(f"interpolation_threshold={result.interpolation_threshold}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "competence": cmd_competence,
    "bounds": cmd_bounds,
    "pathological": cmd_pathological,
    "train-sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _to_config(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except (FileNotFoundError, IsADirectoryError, PermissionError, ParseError, LabelRangeError, WeightError) as exc:
        print(f"eirlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, ParameterError, SpecError, ValueError) as exc:
        print(f"eirlab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
