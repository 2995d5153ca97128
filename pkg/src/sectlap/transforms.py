"""Catalog of transform/original pairs with known sectoriality data.

Each entry packages a transform evaluator, its sectoriality constants
(delta, M, mu), an independent oracle for the original function, and an
optional norm scale (used for discrete-L2 errors of grid functions). The
matrix-resolvent entry covers operator-valued inversion at desk scale.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import mpmath as mp
import numpy as np

from .quadrature import TransformEvaluator
from .tuning import Sectoriality

__all__ = [
    "CatalogEntry",
    "exp_decay",
    "t_exp_decay",
    "inv_sqrt",
    "mittag_leffler",
    "mittag_leffler_series",
    "SeriesResult",
    "resolvent_transform",
    "fd_laplacian",
    "catalog",
    "sectoriality_margin",
]

_DEFAULT_ALPHA = 0.7
_DEFAULT_D = 0.6


@dataclass(frozen=True)
class CatalogEntry:
    """A named transform with sectoriality data and an exact/high-precision
    oracle for the original. ``norm_scale`` multiplies Euclidean norms when
    measuring errors (e.g. sqrt(cell area) for grid functions)."""

    name: str
    evaluator: TransformEvaluator
    sect: Sectoriality
    oracle: Callable[[float], np.ndarray]
    notes: str = ""
    norm_scale: float = 1.0


def _default_delta(alpha: float, d: float) -> float:
    """Largest sector half-angle compatible with the angle condition for
    (alpha, d), backed off by 1e-9 to keep the inequality strict."""
    room = math.pi / 2.0 - (alpha + d)
    if room <= 1e-9:
        raise ValueError(f"no admissible delta for alpha+d = {alpha + d}")
    return room - 1e-9


def _resolve_delta(alpha: float, d: float, delta: float | None) -> float:
    if delta is None:
        return _default_delta(alpha, d)
    if not alpha + d < math.pi / 2.0 - delta:
        raise ValueError(
            f"angle condition violated: alpha+d = {alpha + d:.6g} must be < "
            f"pi/2 - delta = {math.pi / 2.0 - delta:.6g}")
    return delta


def exp_decay(alpha: float = _DEFAULT_ALPHA, d: float = _DEFAULT_D,
              delta: float | None = None) -> CatalogEntry:
    """u(t) = e^-t with transform 1/(1+z); mu = 1, M = 1/sin(delta)."""
    delta = _resolve_delta(alpha, d, delta)
    ev = TransformEvaluator(fn=lambda z: 1.0 / (1.0 + z), dim=1,
                            conjugate_symmetric=True)
    sect = Sectoriality(delta=delta, M=1.0 / math.sin(delta), mu=1.0)
    return CatalogEntry("exp_decay", ev, sect,
                        oracle=lambda t: np.asarray([math.exp(-t)]),
                        notes="elementary decay")


def t_exp_decay(alpha: float = _DEFAULT_ALPHA, d: float = _DEFAULT_D,
                delta: float | None = None) -> CatalogEntry:
    """u(t) = t e^-t with transform 1/(1+z)^2; mu = 2, M = 1/sin^2(delta)."""
    delta = _resolve_delta(alpha, d, delta)

    def U(z):
        w = 1.0 / (1.0 + z)
        return w * w

    ev = TransformEvaluator(fn=U, dim=1, conjugate_symmetric=True)
    sect = Sectoriality(delta=delta, M=1.0 / math.sin(delta) ** 2, mu=2.0)
    return CatalogEntry("t_exp_decay", ev, sect,
                        oracle=lambda t: np.asarray([t * math.exp(-t)]),
                        notes="mu > 1 exercise")


def inv_sqrt(alpha: float = _DEFAULT_ALPHA, d: float = _DEFAULT_D,
             delta: float | None = None) -> CatalogEntry:
    """u(t) = 1/sqrt(pi t) with transform z^(-1/2) (principal branch);
    mu = 1/2, M = 1 for any delta."""
    delta = _resolve_delta(alpha, d, delta)
    ev = TransformEvaluator(fn=lambda z: 1.0 / cmath.sqrt(z), dim=1,
                            conjugate_symmetric=True)
    sect = Sectoriality(delta=delta, M=1.0, mu=0.5)
    return CatalogEntry("inv_sqrt", ev, sect,
                        oracle=lambda t: np.asarray([1.0 / math.sqrt(math.pi * t)]),
                        notes="mu < 1 exercise")


class SeriesResult(NamedTuple):
    value: float
    truncation: float  # magnitude of the first omitted term


def mittag_leffler_series(beta: float, x: float, terms: int = 200) -> SeriesResult:
    """Partial sum of E_beta(x) = sum_k x^k / Gamma(beta k + 1) in double
    precision with compensated summation.

    Restricted to x <= 0 with |x| <= 30: beyond that the alternating terms
    grow past the cancellation budget of doubles. Terms are generated from
    exp(k ln|x| - lgamma(beta k + 1)) so no intermediate overflows.
    """
    if not beta > 0.0:
        raise ValueError(f"beta must be > 0, got {beta}")
    if not x <= 0.0:
        raise ValueError(f"series oracle needs x <= 0, got {x}")
    if abs(x) > 30.0:
        raise ValueError(f"series oracle needs |x| <= 30, got {x}")
    if terms < 200:
        raise ValueError(f"need at least 200 terms, got {terms}")
    if x == 0.0:
        return SeriesResult(1.0, 0.0)
    lx = math.log(-x)

    def term(k: int) -> float:
        mag = math.exp(k * lx - math.lgamma(beta * k + 1.0))
        return -mag if k % 2 else mag

    total = 0.0
    comp = 0.0  # Neumaier compensation
    for k in range(terms):
        v = term(k)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return SeriesResult(total + comp, abs(term(terms)))


def _mittag_leffler_highprec(beta: float, x: float) -> float:
    """E_beta(x) for x <= 0 via the defining series in adaptive-precision
    arithmetic; serves as the catalog oracle beyond the double-precision
    series' |x| <= 30 domain."""
    if x == 0.0:
        return 1.0
    y = abs(x)
    if y > 400.0:
        raise ValueError(f"oracle domain |x| <= 400 exceeded: {x}")
    # cancellation reaches ~exp(y^(1/beta)) in magnitude; budget digits for it
    dps = 30 + int(0.66 * y ** (1.0 / beta))
    with mp.workdps(dps):
        xm = mp.mpf(x)
        total = mp.mpf(0)
        k = 0
        while True:
            t = xm ** k / mp.gamma(beta * k + 1)
            total += t
            if abs(t) < mp.mpf(10) ** (-dps + 5) and k > 10:
                break
            k += 1
            if k > 5000:
                raise RuntimeError("Mittag-Leffler series did not converge")
        return float(total)


def mittag_leffler(beta: float = 1.5, alpha: float = math.pi / 12,
                   d: float = 0.25, delta: float | None = None) -> CatalogEntry:
    """u(t) = E_beta(-t^beta) with transform z^(beta-1)/(z^beta + 1)
    (principal branch powers); mu = 1, M = 1/sin(beta(pi - delta))."""
    if not 1.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (1, 2), got {beta}")
    lo = math.pi * (1.0 - 1.0 / beta)
    delta = _resolve_delta(alpha, d, delta)
    if not lo < delta < math.pi / 2.0:
        raise ValueError(
            f"delta must lie in (pi(1-1/beta), pi/2) = ({lo:.6g}, {math.pi / 2:.6g}), "
            f"got {delta:.6g}")

    def U(z):
        return z ** (beta - 1.0) / (z ** beta + 1.0)

    ev = TransformEvaluator(fn=U, dim=1, conjugate_symmetric=True)
    sect = Sectoriality(delta=delta, M=1.0 / math.sin(beta * (math.pi - delta)), mu=1.0)
    return CatalogEntry(
        "mittag_leffler", ev, sect,
        oracle=lambda t: np.asarray([_mittag_leffler_highprec(beta, -(t ** beta))]),
        notes=f"beta={beta}")


def fd_laplacian(nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    """5-point finite-difference Laplacian on the unit square, cell-centered,
    with the convective boundary flux du/dnu = -u eliminated through ghost
    cells, plus the indicator forcing of the rectangle [0.6,0.8]x[0.2,0.8].

    The ghost elimination only modifies diagonal entries, so A stays
    symmetric; A is negative definite. Unknown ordering is x-major:
    index = ix*ny + iy.
    """
    if nx < 4 or ny < 4:
        raise ValueError(f"need nx, ny >= 4, got ({nx}, {ny})")
    hx, hy = 1.0 / nx, 1.0 / ny

    def lap1d(m: int, h: float) -> np.ndarray:
        A = np.diag(np.full(m, -2.0)) + np.diag(np.ones(m - 1), 1) + np.diag(np.ones(m - 1), -1)
        # ghost value u_g = gamma*u_boundary from (u_b - u_g)/h = (u_g + u_b)/2
        gamma = (1.0 - h / 2.0) / (1.0 + h / 2.0)
        A[0, 0] += gamma
        A[m - 1, m - 1] += gamma
        return A / (h * h)

    A = np.kron(lap1d(nx, hx), np.eye(ny)) + np.kron(np.eye(nx), lap1d(ny, hy))
    xs = (np.arange(nx) + 0.5) * hx
    ys = (np.arange(ny) + 0.5) * hy
    f = np.zeros(nx * ny)
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            if 0.6 <= xv <= 0.8 and 0.2 <= yv <= 0.8:
                f[i * ny + j] = 1.0
    return A, f


def resolvent_transform(A: np.ndarray, f: np.ndarray,
                        alpha: float = _DEFAULT_ALPHA, d: float = _DEFAULT_D,
                        delta: float | None = None, name: str = "resolvent",
                        norm_scale: float = 1.0) -> CatalogEntry:
    """Transform (1/z)(zI - A)^-1 f of the solution of u' = Au + f, u(0) = 0.

    A must be real symmetric negative definite (dimension <= 2500). Each
    evaluation performs one independent dense solve, so nodes may be
    evaluated concurrently; mu = 1, M = 1/(mu_h sin delta) with -mu_h the
    largest eigenvalue. M follows the operator-norm convention (no ||f||
    factor); it bounds the vector-valued evaluator whenever f's component
    along the slowest mode stays below 1, which holds for the shipped
    entries. The oracle is the exact semidiscrete solution
    A^-1 (e^(tA) - I) f via one eigendecomposition.
    """
    A = np.asarray(A, dtype=float)
    f = np.asarray(f, dtype=float)
    m = A.shape[0]
    if A.shape != (m, m) or f.shape != (m,):
        raise ValueError(f"shape mismatch: A {A.shape}, f {f.shape}")
    if m > 2500:
        raise ValueError(f"dimension {m} exceeds the desk-scale cap 2500")
    if not np.allclose(A, A.T, rtol=1e-13, atol=0.0):
        raise ValueError("A must be symmetric")
    evals, evecs = np.linalg.eigh(A)
    if evals.max() >= 0.0:
        raise ValueError(f"A must be negative definite (largest eigenvalue {evals.max():.6g})")
    mu_h = -float(evals.max())
    delta = _resolve_delta(alpha, d, delta)
    ident = np.eye(m)

    def U(z):
        return np.linalg.solve(z * ident - A, f) / z

    vtf = evecs.T @ f

    def oracle(t: float) -> np.ndarray:
        return evecs @ (np.expm1(t * evals) / evals * vtf)

    ev = TransformEvaluator(fn=U, dim=m, conjugate_symmetric=False,
                            concurrency="concurrent")
    sect = Sectoriality(delta=delta, M=1.0 / (mu_h * math.sin(delta)), mu=1.0)
    return CatalogEntry(name, ev, sect, oracle=oracle,
                        notes=f"dense resolvent, dim={m}", norm_scale=norm_scale)


def _heat_fd_entry() -> CatalogEntry:
    nx = ny = 12
    A, f = fd_laplacian(nx, ny)
    return resolvent_transform(A, f, name="heat_fd",
                               norm_scale=math.sqrt(1.0 / (nx * ny)))


def catalog() -> dict[str, CatalogEntry]:
    """Default entries, in stable insertion order."""
    entries = [exp_decay(), t_exp_decay(), inv_sqrt(), mittag_leffler(),
               _heat_fd_entry()]
    return {e.name: e for e in entries}


def sectoriality_margin(entry: CatalogEntry, points: int = 25) -> float:
    """max of ||U(z)|| |z|^mu / M over the spot-check rays
    arg z = +-(pi/2 - delta/2), |z| in [1e-3, 1e3] (should be <= 1)."""
    sect = entry.sect
    ang = math.pi / 2.0 - sect.delta / 2.0
    worst = 0.0
    for r in np.logspace(-3, 3, points):
        for sgn in (1.0, -1.0):
            z = r * cmath.exp(1j * sgn * ang)
            val = float(np.linalg.norm(entry.evaluator(z)))
            worst = max(worst, val * abs(z) ** sect.mu / sect.M)
    return worst
