"""Experiment driver: error curves, reference comparisons and single runs
from JSON config files, with CSV output.

Subcommands: ``invert`` (single run, prints values), ``curve`` (error vs n
against the catalog oracle), ``refcurve`` (error vs n against the method's
own high-n reference), ``catalog`` (list entries). Exit codes: 0 success,
2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import errmodel, transforms, tuning
from .contour import build_nodes
from .quadrature import EvaluationError, InversionResult, invert_grid, perturb_evaluator, value_norm
from .transforms import CatalogEntry
from .tuning import AccuracyModel, ContourConfig

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ThetaMode",
    "Perturbation",
    "CurveRow",
    "load_config",
    "run_error_curve",
    "run_reference_comparison",
    "list_catalog",
    "write_csv",
    "main",
    "entry",
]

CSV_SCHEMA = "# sectlap-curve-v1 columns: n,theta,h,lambda,max_error,bound,skipped_terms"
_MACHINE_RHO = 10.0 * float(np.finfo(float).eps)


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class ThetaMode:
    mode: str                 # fixed | optimal | fallback
    theta: float | None = None
    rho: float | None = None
    kind: str | None = None   # accuracy-model kind for 'optimal'


@dataclass(frozen=True)
class Perturbation:
    mode: str                 # random | worst_case
    rho: float
    seed: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    transform: str
    n_range: tuple[int, ...]
    alpha: float = 0.7
    d: float = 0.6
    t0: float = 1.0
    Lambda: float = 5.0
    theta_mode: ThetaMode = ThetaMode("fallback")
    times: int = 9
    perturbation: Perturbation | None = None
    output: str | None = None
    s: float | None = None
    vector: str | None = None
    n_ref: int = 500


@dataclass(frozen=True)
class CurveRow:
    n: int
    theta: float
    h: float
    lam: float
    max_error: float
    bound: float | None
    skipped_terms: int


def _cfg_fail(fieldname: str, message: str):
    raise ConfigError(f"config field '{fieldname}': {message}")


def _parse_theta_mode(raw) -> ThetaMode:
    if not isinstance(raw, dict) or "mode" not in raw:
        _cfg_fail("theta_mode", "expected an object with a 'mode' key")
    mode = raw["mode"]
    if mode == "fixed":
        th = raw.get("theta")
        if not isinstance(th, (int, float)) or not 0.0 < th < 1.0:
            _cfg_fail("theta_mode.theta", f"fixed mode needs theta in (0, 1), got {th!r}")
        return ThetaMode("fixed", theta=float(th))
    if mode == "optimal":
        rho = raw.get("rho")
        kind = raw.get("kind", "relative")
        if not isinstance(rho, (int, float)) or rho <= 0.0:
            _cfg_fail("theta_mode.rho", f"optimal mode needs rho > 0, got {rho!r}")
        if kind not in ("absolute", "relative"):
            _cfg_fail("theta_mode.kind", f"expected 'absolute' or 'relative', got {kind!r}")
        return ThetaMode("optimal", rho=float(rho), kind=kind)
    if mode == "fallback":
        return ThetaMode("fallback")
    _cfg_fail("theta_mode.mode", f"expected fixed/optimal/fallback, got {mode!r}")


def _parse_n_range(raw) -> tuple[int, ...]:
    if isinstance(raw, list):
        ns = raw
    elif isinstance(raw, dict):
        try:
            ns = list(range(int(raw["start"]), int(raw["stop"]) + 1, int(raw.get("step", 1))))
        except KeyError as exc:
            _cfg_fail("n_range", f"range object needs start/stop, missing {exc}")
    else:
        _cfg_fail("n_range", f"expected a list or a start/stop/step object, got {type(raw).__name__}")
    if not ns:
        _cfg_fail("n_range", "must be nonempty")
    out = []
    for v in ns:
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            _cfg_fail("n_range", f"entries must be integers >= 1, got {v!r}")
        out.append(v)
    return tuple(out)


def _parse_perturbation(raw) -> Perturbation | None:
    if raw is None:
        return None
    if not isinstance(raw, dict) or "mode" not in raw:
        _cfg_fail("perturbation", "expected an object with a 'mode' key")
    mode = raw["mode"]
    rho = raw.get("rho")
    if mode not in ("random", "worst_case"):
        _cfg_fail("perturbation.mode", f"expected random/worst_case, got {mode!r}")
    if not isinstance(rho, (int, float)) or rho < 0.0:
        _cfg_fail("perturbation.rho", f"needs rho >= 0, got {rho!r}")
    seed = raw.get("seed")
    if mode == "random" and seed is None:
        _cfg_fail("perturbation.seed", "random mode needs a seed for reproducibility")
    return Perturbation(mode, float(rho), seed)


def _positive(raw, fieldname: str) -> float:
    if not isinstance(raw, (int, float)) or not raw > 0.0:
        _cfg_fail(fieldname, f"must be a number > 0, got {raw!r}")
    return float(raw)


def load_config(path: str) -> ExperimentConfig:
    """Read and validate one experiment config from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    known = {"transform", "alpha", "d", "t0", "Lambda", "theta_mode", "n_range",
             "times", "perturbation", "output", "s", "vector", "n_ref"}
    for key in raw:
        if key not in known:
            _cfg_fail(key, "unknown field")
    if "transform" not in raw:
        _cfg_fail("transform", "required")
    if "n_range" not in raw:
        _cfg_fail("n_range", "required")

    alpha = _positive(raw.get("alpha", 0.7), "alpha")
    d = _positive(raw.get("d", 0.6), "d")
    if not alpha - d > 0.0 or not alpha + d < math.pi / 2.0:
        _cfg_fail("alpha", f"need 0 < alpha-d and alpha+d < pi/2, got alpha={alpha}, d={d}")
    t0 = _positive(raw.get("t0", 1.0), "t0")
    Lambda = _positive(raw.get("Lambda", 5.0), "Lambda")
    if Lambda < 1.0:
        _cfg_fail("Lambda", f"must be >= 1, got {Lambda}")
    times = raw.get("times", 9)
    if not isinstance(times, int) or isinstance(times, bool) or times < 1:
        _cfg_fail("times", f"must be an integer >= 1, got {times!r}")
    s = raw.get("s")
    if s is not None and (not isinstance(s, (int, float)) or not 0.0 < s < 1.0):
        _cfg_fail("s", f"must lie in (0, 1), got {s!r}")
    n_ref = raw.get("n_ref", 500)
    if not isinstance(n_ref, int) or isinstance(n_ref, bool) or n_ref < 1:
        _cfg_fail("n_ref", f"must be an integer >= 1, got {n_ref!r}")
    vector = raw.get("vector")
    if vector is not None and not isinstance(vector, str):
        _cfg_fail("vector", "must be a path string")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        _cfg_fail("output", "must be a path string")
    transform = raw.get("transform")
    if not isinstance(transform, str):
        _cfg_fail("transform", "must be a catalog name or a matrix-file path")

    return ExperimentConfig(
        transform=transform,
        n_range=_parse_n_range(raw["n_range"]),
        alpha=alpha, d=d, t0=t0, Lambda=Lambda,
        theta_mode=_parse_theta_mode(raw.get("theta_mode", {"mode": "fallback"})),
        times=times,
        perturbation=_parse_perturbation(raw.get("perturbation")),
        output=output, s=s, vector=vector, n_ref=n_ref)


def load_matrix_file(matrix_path: str, vector_path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read the coordinate-triplet matrix format.

    First line ``dim n``; following lines ``row col value`` with 0-based
    indices. The companion vector file holds n values, one per line.
    """
    try:
        with open(matrix_path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {matrix_path}: {exc}") from exc
    if not lines or not lines[0].startswith("dim"):
        raise ConfigError(f"matrix file {matrix_path}: first line must be 'dim n'")
    try:
        m = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"matrix file {matrix_path}: bad dim line {lines[0]!r}") from exc
    A = np.zeros((m, m))
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ConfigError(f"matrix file {matrix_path}: bad triplet line {ln!r}")
        i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        if not (0 <= i < m and 0 <= j < m):
            raise ConfigError(f"matrix file {matrix_path}: index ({i},{j}) out of range")
        A[i, j] = v
    try:
        with open(vector_path, encoding="utf-8") as fh:
            vals = [float(ln.strip()) for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read vector file {vector_path}: {exc}") from exc
    if len(vals) != m:
        raise ConfigError(f"vector file {vector_path}: expected {m} values, got {len(vals)}")
    return A, np.asarray(vals)


def resolve_entry(cfg: ExperimentConfig) -> CatalogEntry:
    """Build the transform entry for a config, with delta tracking the
    configured angles. Unknown names are treated as matrix-file paths."""
    builders = {
        "exp_decay": transforms.exp_decay,
        "t_exp_decay": transforms.t_exp_decay,
        "inv_sqrt": transforms.inv_sqrt,
        "mittag_leffler": transforms.mittag_leffler,
    }
    try:
        if cfg.transform in builders:
            return builders[cfg.transform](alpha=cfg.alpha, d=cfg.d)
        if cfg.transform == "heat_fd":
            A, f = transforms.fd_laplacian(12, 12)
            return transforms.resolvent_transform(
                A, f, alpha=cfg.alpha, d=cfg.d, name="heat_fd",
                norm_scale=math.sqrt(1.0 / 144.0))
    except ValueError as exc:
        raise ConfigError(f"config field 'transform': {exc}") from exc
    if cfg.vector is None:
        raise ConfigError(
            f"config field 'transform': {cfg.transform!r} is not a catalog name; "
            "matrix-file transforms also need the 'vector' field")
    A, f = load_matrix_file(cfg.transform, cfg.vector)
    try:
        return transforms.resolvent_transform(A, f, alpha=cfg.alpha, d=cfg.d,
                                              name="matrix_file")
    except ValueError as exc:
        raise ConfigError(f"config field 'transform': {exc}") from exc


def _resolve_theta(cfg: ExperimentConfig, entry: CatalogEntry, n: int) -> float:
    tm = cfg.theta_mode
    if tm.mode == "fixed":
        return tm.theta
    if tm.mode == "fallback":
        return tuning.fallback_theta(n)
    model = AccuracyModel(kind=tm.kind, rho=tm.rho)
    eps = model.normalized_eps(entry.sect.M, cfg.t0)
    probe = ContourConfig(alpha=cfg.alpha, d=cfg.d, theta=0.5, n=n, t0=cfg.t0,
                          Lambda=cfg.Lambda, s=cfg.s)
    return tuning.optimal_theta(eps, probe, entry.sect.mu)


def _bound_model(cfg: ExperimentConfig) -> AccuracyModel:
    if cfg.perturbation is not None:
        return AccuracyModel(kind="absolute", rho=cfg.perturbation.rho)
    if cfg.theta_mode.mode == "optimal":
        return AccuracyModel(kind=cfg.theta_mode.kind, rho=cfg.theta_mode.rho)
    return AccuracyModel(kind="relative", rho=_MACHINE_RHO)


def time_grid(cfg: ExperimentConfig) -> np.ndarray:
    """Log-spaced samples of [t0, Lambda*t0], both endpoints included."""
    if cfg.times == 1:
        return np.asarray([cfg.t0])
    return np.exp(np.linspace(math.log(cfg.t0), math.log(cfg.Lambda * cfg.t0), cfg.times))


def _run_one(cfg: ExperimentConfig, entry: CatalogEntry, n: int,
             ts: np.ndarray) -> tuple[ContourConfig, InversionResult]:
    theta = _resolve_theta(cfg, entry, n)
    ccfg = ContourConfig(alpha=cfg.alpha, d=cfg.d, theta=theta, n=n,
                         t0=cfg.t0, Lambda=cfg.Lambda, s=cfg.s)
    derived = tuning.derive_params(ccfg, entry.sect.mu)
    nodes = build_nodes(cfg.alpha, derived, n)
    ev = entry.evaluator
    if cfg.perturbation is not None:
        ev = perturb_evaluator(ev, cfg.perturbation.mode, cfg.perturbation.rho,
                               nodes=nodes, seed=cfg.perturbation.seed,
                               t0=cfg.t0, derived=derived)
    return ccfg, invert_grid(ts, ev, nodes, derived)


def _row(cfg: ExperimentConfig, entry: CatalogEntry, ccfg: ContourConfig,
         result: InversionResult, err: float) -> CurveRow:
    try:
        bound = errmodel.propagated_bound(ccfg, entry.sect, result.derived,
                                          _bound_model(cfg)).value
        if math.isnan(bound):
            bound = None
    except ValueError:
        bound = None
    return CurveRow(n=ccfg.n, theta=ccfg.theta, h=result.derived.h,
                    lam=result.derived.lam, max_error=err, bound=bound,
                    skipped_terms=int(result.skipped.sum()))


def run_error_curve(cfg: ExperimentConfig) -> list[CurveRow]:
    """One row per n: inversion error against the entry's oracle, plus the
    matching theoretical bound."""
    entry = resolve_entry(cfg)
    ts = time_grid(cfg)
    rows = []
    for n in cfg.n_range:
        ccfg, result = _run_one(cfg, entry, n, ts)
        err = max(entry.norm_scale * value_norm(result.values[i] - entry.oracle(float(t)))
                  for i, t in enumerate(ts))
        rows.append(_row(cfg, entry, ccfg, result, err))
    return sorted(rows, key=lambda r: r.n)


def run_reference_comparison(cfg: ExperimentConfig, n_ref: int | None = None) -> list[CurveRow]:
    """Like run_error_curve but measured against the method's own n_ref-node
    result (for transforms without a closed-form original)."""
    entry = resolve_entry(cfg)
    n_ref = cfg.n_ref if n_ref is None else n_ref
    if n_ref < max(cfg.n_range):
        raise ConfigError(
            f"config field 'n_ref': reference {n_ref} must be >= max(n_range)="
            f"{max(cfg.n_range)}")
    ts = time_grid(cfg)
    _, ref = _run_one(cfg, entry, n_ref, ts)
    rows = []
    for n in cfg.n_range:
        ccfg, result = _run_one(cfg, entry, n, ts)
        err = max(entry.norm_scale * value_norm(result.values[i] - ref.values[i])
                  for i in range(len(ts)))
        rows.append(_row(cfg, entry, ccfg, result, err))
    return sorted(rows, key=lambda r: r.n)


def list_catalog() -> str:
    """Plain-text table of the default catalog entries."""
    lines = [f"{'name':<16} {'mu':>5} {'delta':>10} {'M':>12} {'dim':>5}"]
    for name, e in transforms.catalog().items():
        lines.append(f"{name:<16} {e.sect.mu:>5.3g} {e.sect.delta:>10.6g} "
                     f"{e.sect.M:>12.6g} {e.evaluator.dim:>5d}")
    return "\n".join(lines)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def rows_to_csv(rows: list[CurveRow]) -> str:
    out = [CSV_SCHEMA, "n,theta,h,lambda,max_error,bound,skipped_terms"]
    for r in rows:
        err = _fmt(r.max_error) if math.isfinite(r.max_error) else "overflow"
        bound = "" if r.bound is None else _fmt(r.bound)
        out.append(f"{r.n},{_fmt(r.theta)},{_fmt(r.h)},{_fmt(r.lam)},{err},{bound},{r.skipped_terms}")
    return "\n".join(out) + "\n"


def write_csv(rows: list[CurveRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(rows))


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.n is not None:
        if args.n < 1:
            raise ConfigError(f"config field 'n_range': override --n must be >= 1, got {args.n}")
        cfg = replace(cfg, n_range=(args.n,))
    if args.theta is not None:
        if not 0.0 < args.theta < 1.0:
            raise ConfigError(f"config field 'theta_mode': override --theta must lie in (0,1), got {args.theta}")
        cfg = replace(cfg, theta_mode=ThetaMode("fixed", theta=args.theta))
    if args.seed is not None:
        if cfg.perturbation is None:
            raise ConfigError("config field 'perturbation': --seed given but no perturbation configured")
        cfg = replace(cfg, perturbation=replace(cfg.perturbation, seed=args.seed))
    if args.out is not None:
        cfg = replace(cfg, output=args.out)
    return cfg


def _cmd_invert(cfg: ExperimentConfig) -> int:
    entry = resolve_entry(cfg)
    ts = time_grid(cfg)
    n = cfg.n_range[0]
    ccfg, result = _run_one(cfg, entry, n, ts)
    print(f"n={n} theta={_fmt(ccfg.theta)} h={_fmt(result.derived.h)} "
          f"lambda={_fmt(result.derived.lam)}")
    for i, t in enumerate(ts):
        comps = " ".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in result.values[i])
        print(f"t={_fmt(float(t))} {comps}")
    return 0


def _emit(rows: list[CurveRow], cfg: ExperimentConfig) -> None:
    if cfg.output:
        write_csv(rows, cfg.output)
    else:
        sys.stdout.write(rows_to_csv(rows))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sectlap",
        description="Invert sectorial Laplace transforms on hyperbolic contours.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("invert", "single inversion run, prints values"),
                           ("curve", "error-vs-n curve against the oracle"),
                           ("refcurve", "error-vs-n curve against an n_ref-node reference")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--n", type=int, default=None, help="override: single n")
        p.add_argument("--theta", type=float, default=None, help="override: fixed theta")
        p.add_argument("--seed", type=int, default=None, help="override: perturbation seed")
        p.add_argument("--out", default=None, help="override: output CSV path")
        if name == "refcurve":
            p.add_argument("--n-ref", type=int, default=None, help="override: reference n")
    sub.add_parser("catalog", help="list the transform catalog")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        print(list_catalog())
        return 0
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "invert":
            return _cmd_invert(cfg)
        if args.command == "curve":
            _emit(run_error_curve(cfg), cfg)
            return 0
        n_ref = getattr(args, "n_ref", None)
        _emit(run_reference_comparison(cfg, n_ref), cfg)
        return 0
    except (OverflowError, EvaluationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # ConfigError and parameter-domain errors from the tuning layer
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
