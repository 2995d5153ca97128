"""Inversion engine: weights, quadrature sums, evaluation reuse, shifts and
perturbation wrappers.

The engine computes u(t) ~ sum_k w_k(t) U(z_k) over the contour nodes with
w_k(t) = -(lam*h / (2 pi i)) * exp(t*z_k) * T'(x_k). Transform evaluations
are cached per node so one set of evaluations serves a whole time grid;
accumulation order is fixed (outermost conjugate pair first, k = 0 last) so
results are reproducible no matter how evaluations are scheduled.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ._backend import kernels
from .contour import NodeSet
from .tuning import DerivedParams

__all__ = [
    "EvaluationError",
    "TransformEvaluator",
    "InversionResult",
    "weight",
    "invert_at",
    "invert_grid",
    "apply_shift",
    "perturb_evaluator",
    "value_norm",
]

_TWO_PI = 2.0 * math.pi
_LOG_MAX = math.log(1.7976931348623157e308)
_OVERFLOW_CAP = 0.9 * _LOG_MAX
# Cutoff for the underflow guard: term-magnitude bounds below
# ln(smallest normal) + 10 contribute nothing representable.
LOG_GUARD_CUTOFF = math.log(2.2250738585072014e-308) + 10.0


class EvaluationError(RuntimeError):
    """Transform evaluation failed; message carries the node index."""


def value_norm(v) -> float:
    """Euclidean norm of a transform value (modulus in the scalar case)."""
    return float(np.linalg.norm(np.asarray(v)))


@dataclass(frozen=True)
class TransformEvaluator:
    """A transform U packaged with its evaluation contract.

    ``fn`` maps a complex point to a value of fixed dimension ``dim``
    (a scalar for dim == 1 or any sequence of length dim). Declaring
    ``conjugate_symmetric`` lets the engine evaluate only k >= 0 nodes and
    mirror the rest; declaring ``concurrency='concurrent'`` permits
    threaded node evaluation.
    """

    fn: Callable[[complex], object]
    dim: int = 1
    conjugate_symmetric: bool = False
    concurrency: str = "serial"

    def __post_init__(self):
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise ValueError(f"dim must be an integer >= 1, got {self.dim}")
        if self.concurrency not in ("serial", "concurrent"):
            raise ValueError(f"concurrency must be 'serial' or 'concurrent', got {self.concurrency!r}")

    def __call__(self, z: complex) -> np.ndarray:
        out = np.atleast_1d(np.asarray(self.fn(z), dtype=np.complex128))
        if out.shape != (self.dim,):
            raise EvaluationError(
                f"evaluator returned shape {out.shape}, declared dimension {self.dim}")
        return out


@dataclass(frozen=True)
class InversionResult:
    """Values on a time grid plus run diagnostics.

    ``values`` has shape (len(times), dim); ``skipped`` counts the terms
    dropped by the underflow guard at each time; ``evaluations`` counts
    transform evaluations performed.
    """

    times: np.ndarray
    values: np.ndarray
    skipped: np.ndarray
    evaluations: int
    derived: DerivedParams
    bound: object | None = None


def _check_weight_overflow(t: float, nodes: NodeSet) -> None:
    if t * float(nodes.z[nodes.n].real) > _OVERFLOW_CAP:
        raise OverflowError(
            f"term magnitude not representable: t*Re z_0 = "
            f"{t * float(nodes.z[nodes.n].real):.6g} exceeds {_OVERFLOW_CAP:.6g}")


def weight(t: float, k: int, derived: DerivedParams, nodes: NodeSet) -> complex:
    """Quadrature weight -(lam*h / (2 pi i)) * exp(t*z_k) * T'(x_k).

    Matches the kernel's anchored evaluation of the exponential bit for bit.
    """
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    i = nodes.index(k)
    _check_weight_overflow(t, nodes)
    lam, h = nodes.lam, nodes.h
    sa, ca = math.sin(nodes.alpha), math.cos(nodes.alpha)
    c = lam * h / _TWO_PI
    x = float(nodes.x[i])
    sh = math.sinh(x / 2.0)
    q = 2.0 * (sh * sh)
    p = math.sinh(x)
    e0 = math.exp(t * lam * (1.0 - sa))
    er = e0 * math.exp(-(t * lam * sa) * q)
    ar = -(t * lam * ca) * p
    ewr = er * math.cos(ar)
    ewi = er * math.sin(ar)
    wr = -c * ewi
    wi = c * ewr
    tpr = float(nodes.tprime[i].real)
    tpi = float(nodes.tprime[i].imag)
    return complex(wr * tpr - wi * tpi, wr * tpi + wi * tpr)


def _evaluate_nodes(U: TransformEvaluator, nodes: NodeSet,
                    workers: int | None = None) -> tuple[np.ndarray, int]:
    """Evaluate U at the nodes, mirroring the k < 0 half for
    conjugate-symmetric evaluators. Returns (values, evaluation count)."""
    K = len(nodes)
    n = nodes.n
    values = np.empty((K, U.dim), dtype=np.complex128)
    idx = range(n, K) if U.conjugate_symmetric else range(K)

    def eval_one(i: int) -> np.ndarray:
        z = complex(nodes.z[i])
        try:
            return U(z)
        except EvaluationError:
            raise
        except Exception as exc:
            raise EvaluationError(f"evaluation failed at node k={i - n}, z={z}") from exc

    if U.concurrency == "concurrent" and workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, v in zip(idx, pool.map(eval_one, idx)):
                values[i] = v
    else:
        for i in idx:
            values[i] = eval_one(i)

    if U.conjugate_symmetric:
        values[:n] = np.conj(values[n + 1:])[::-1]
    return values, len(idx)


def _kernel_sum(times: np.ndarray, nodes: NodeSet, values: np.ndarray,
                guard: bool) -> tuple[np.ndarray, np.ndarray]:
    for t in times:
        if not t > 0.0:
            raise ValueError(f"times must be > 0, got {t}")
        _check_weight_overflow(float(t), nodes)
    T, D = len(times), values.shape[1]
    out = np.empty((T, D), dtype=np.complex128)
    skipped = np.zeros(T, dtype=np.int64)
    kernels.quad_sum(
        np.ascontiguousarray(times, dtype=np.float64),
        np.ascontiguousarray(nodes.x, dtype=np.float64),
        np.ascontiguousarray(nodes.tprime, dtype=np.complex128),
        np.ascontiguousarray(values, dtype=np.complex128),
        nodes.lam, nodes.h,
        math.sin(nodes.alpha), math.cos(nodes.alpha),
        bool(guard), LOG_GUARD_CUTOFF, out, skipped)
    return out, skipped


def invert_at(t: float, U: TransformEvaluator, nodes: NodeSet,
              derived: DerivedParams, *, guard: bool = True,
              workers: int | None = None) -> np.ndarray:
    """Approximate the original at a single time t.

    Returns the complex value array of shape (dim,). For conjugate-symmetric
    transforms the imaginary part is at cancellation level.
    """
    values, _ = _evaluate_nodes(U, nodes, workers)
    out, _ = _kernel_sum(np.asarray([float(t)]), nodes, values, guard)
    return out[0]


def invert_grid(ts, U: TransformEvaluator, nodes: NodeSet,
                derived: DerivedParams, reuse: bool = True, *,
                guard: bool = True, workers: int | None = None,
                bound=None) -> InversionResult:
    """Approximate the original on a whole time grid.

    With ``reuse`` (the default) U is evaluated once per node (2n+1 calls,
    n+1 for declared conjugate-symmetric evaluators) and every time point is
    formed from the cached values; results are identical to per-t
    ``invert_at`` calls either way.
    """
    times = np.asarray([float(t) for t in np.atleast_1d(ts)], dtype=np.float64)
    if times.size == 0:
        raise ValueError("time grid must be nonempty")
    if reuse:
        values, evals = _evaluate_nodes(U, nodes, workers)
        out, skipped = _kernel_sum(times, nodes, values, guard)
    else:
        rows, skips, evals = [], [], 0
        for t in times:
            values, ev = _evaluate_nodes(U, nodes, workers)
            evals += ev
            o, sk = _kernel_sum(np.asarray([t]), nodes, values, guard)
            rows.append(o[0])
            skips.append(sk[0])
        out, skipped = np.asarray(rows), np.asarray(skips, dtype=np.int64)
    return InversionResult(times=times, values=out, skipped=skipped,
                           evaluations=evals, derived=derived, bound=bound)


def apply_shift(omega: float, result: InversionResult) -> InversionResult:
    """Undo a sectoriality shift: multiply the value at each t by exp(omega*t).

    Diagnostics are preserved. Any attached error bound is dropped: it was
    uniform for the unshifted problem and does not rescale per time.
    """
    if omega == 0.0:
        return result
    worst = omega * float(np.max(result.times) if omega > 0.0 else np.min(result.times))
    if worst >= _LOG_MAX:
        raise OverflowError(f"shift exponent omega*t = {worst:.6g} overflows")
    factors = np.exp(omega * result.times)
    return replace(result, values=result.values * factors[:, None], bound=None)


def _worst_case_eta(rho: float, t0: float, derived: DerivedParams,
                    nodes: NodeSet) -> np.ndarray:
    # eta_k = rho * exp(-i arg w_k(t0)); built from the k >= 0 half and
    # mirrored so conjugate symmetry is exact (arg w_{-k} = -arg w_k).
    n = nodes.n
    eta = np.empty(2 * n + 1, dtype=np.complex128)
    for k in range(0, n + 1):
        w = weight(t0, k, derived, nodes)
        ang = -math.atan2(w.imag, w.real)
        eta[n + k] = rho * complex(math.cos(ang), math.sin(ang))
        eta[n - k] = eta[n + k].conjugate()
    return eta


def _random_eta(rho: float, dim: int, n: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    eta = np.empty((2 * n + 1, dim), dtype=np.complex128)
    for i in range(2 * n + 1):
        r = rng.uniform(0.0, rho)
        if dim == 1:
            ang = rng.uniform(0.0, _TWO_PI)
            eta[i, 0] = r * complex(math.cos(ang), math.sin(ang))
        else:
            g = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            eta[i] = r * g / np.linalg.norm(g)
    return eta


def perturb_evaluator(U: TransformEvaluator, mode: str, rho: float, *,
                      nodes: NodeSet, seed=None, t0: float | None = None,
                      derived: DerivedParams | None = None) -> TransformEvaluator:
    """Wrap U so evaluation at node z_k returns U(z_k) + eta_k.

    mode 'random': |eta_k| ~ Uniform[0, rho], arg eta_k ~ Uniform[0, 2 pi),
    drawn independently per node, reproducibly from ``seed``. mode
    'worst_case': eta_k = rho * exp(-i arg w_k(t0)), phasing all
    perturbation contributions constructively at t = t0 (scalar U only;
    needs ``t0`` and ``derived``). Points off the node set pass through
    unperturbed.
    """
    if not rho >= 0.0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    n = nodes.n
    if mode == "worst_case":
        if U.dim != 1:
            raise ValueError("worst_case perturbation requires a scalar-valued transform")
        if t0 is None or derived is None:
            raise ValueError("worst_case perturbation needs t0 and derived")
        eta = _worst_case_eta(rho, t0, derived, nodes)[:, None]
        symmetric = U.conjugate_symmetric
    elif mode == "random":
        eta = _random_eta(rho, U.dim, n, seed)
        symmetric = False  # independent draws break conjugate symmetry
    else:
        raise ValueError(f"mode must be 'random' or 'worst_case', got {mode!r}")

    lookup = {complex(nodes.z[i]): i for i in range(2 * n + 1)}
    base = U

    def fn(z: complex):
        v = base(z)
        i = lookup.get(complex(z))
        if i is None:
            return v
        return v + eta[i]

    return TransformEvaluator(fn=fn, dim=U.dim, conjugate_symmetric=symmetric,
                              concurrency=U.concurrency)
