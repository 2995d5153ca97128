"""Parameter selection for the hyperbolic-contour inversion.

Given the geometry (alpha, d), the target interval [t0, Lambda*t0] and a
free parameter theta in (0, 1), the step size h and contour scale lam are
fixed by the spectral-order recipe; ``optimal_theta`` balances the
discretization decay against the amplification of evaluation errors, and
``fallback_theta`` gives the precision-agnostic choice 1 - 1/n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Sectoriality",
    "ContourConfig",
    "DerivedParams",
    "AccuracyModel",
    "a_of_theta",
    "a_s_of_theta",
    "derive_params",
    "eps_n",
    "theta_objective",
    "optimal_theta",
    "fallback_theta",
    "validate_angles",
]

_TWO_PI = 2.0 * math.pi
_LOG_MAX = math.log(1.7976931348623157e308)
_THETA_EDGE = 1e-9


@dataclass(frozen=True)
class Sectoriality:
    """Analytic hypotheses on the transform: ||U(z)|| <= M / |z - omega|^mu
    outside the shifted acute sector of half-angle delta."""

    delta: float
    M: float
    mu: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.delta < math.pi / 2.0:
            raise ValueError(f"delta must lie in (0, pi/2), got {self.delta}")
        if not self.M > 0.0:
            raise ValueError(f"M must be > 0, got {self.M}")


@dataclass(frozen=True)
class ContourConfig:
    """Geometric and scale parameters of one inversion run.

    ``s`` is the extra split parameter in (0, 1), consulted only when the
    transform's decay exponent mu is < 1.
    """

    alpha: float
    d: float
    theta: float
    n: int
    t0: float
    Lambda: float
    s: float | None = None

    def __post_init__(self):
        if not self.alpha - self.d > 0.0:
            raise ValueError(f"need alpha - d > 0, got alpha={self.alpha}, d={self.d}")
        if not self.alpha + self.d < math.pi / 2.0:
            raise ValueError(f"need alpha + d < pi/2, got alpha={self.alpha}, d={self.d}")
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be an integer >= 1, got {self.n}")
        if not self.t0 > 0.0:
            raise ValueError(f"t0 must be > 0, got {self.t0}")
        if not self.Lambda >= 1.0:
            raise ValueError(f"Lambda must be >= 1, got {self.Lambda}")
        if self.s is not None and not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if not self.Lambda / ((1.0 - self.theta) * math.sin(self.alpha)) > 1.0:
            raise ValueError("degenerate contour: Lambda/((1-theta) sin alpha) <= 1")
        if self.s is not None:
            if not self.Lambda / (self.s * (1.0 - self.theta) * math.sin(self.alpha)) > 1.0:
                raise ValueError("degenerate contour: Lambda/(s (1-theta) sin alpha) <= 1")


def validate_angles(cfg: ContourConfig, delta: float) -> None:
    """Check the full angle condition 0 < alpha-d < alpha+d < pi/2 - delta."""
    if not cfg.alpha + cfg.d < math.pi / 2.0 - delta:
        raise ValueError(
            f"angle condition violated: alpha+d = {cfg.alpha + cfg.d:.6g} "
            f"must be < pi/2 - delta = {math.pi / 2.0 - delta:.6g}"
        )


@dataclass(frozen=True)
class DerivedParams:
    """Step size h, contour scale lam and the arccosh value a they derive from."""

    h: float
    lam: float
    a: float


@dataclass(frozen=True)
class AccuracyModel:
    """Evaluation-error model: 'absolute' (||U(z_k) - U_k|| <= rho, exact
    weights) or 'relative' (per-term relative error rho)."""

    kind: str
    rho: float

    def __post_init__(self):
        if self.kind not in ("absolute", "relative"):
            raise ValueError(f"kind must be 'absolute' or 'relative', got {self.kind!r}")
        if not self.rho >= 0.0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")

    def normalized_eps(self, M: float, t0: float) -> float:
        """The normalized precision entering the error bounds:
        rho/(M*t0) for the absolute model, rho for the relative one."""
        if self.kind == "absolute":
            return self.rho / (M * t0)
        return self.rho


def _acosh_stable(x: float) -> float:
    # ln(x + sqrt((x-1)(x+1))): the factored radicand avoids cancellation
    # for x near 1.
    if not x > 1.0:
        raise ValueError(f"arccosh argument must be > 1, got {x} (degenerate contour; "
                         "theta too small or alpha too large for this Lambda)")
    return math.log(x + math.sqrt((x - 1.0) * (x + 1.0)))


def a_of_theta(Lambda: float, alpha: float, theta: float) -> float:
    """arccosh(Lambda / ((1-theta) sin alpha)), the scaled node span."""
    return _acosh_stable(Lambda / ((1.0 - theta) * math.sin(alpha)))


def a_s_of_theta(Lambda: float, alpha: float, theta: float, s: float) -> float:
    """Variant with the mu < 1 split parameter: arccosh(Lambda / (s (1-theta) sin alpha))."""
    return _acosh_stable(Lambda / (s * (1.0 - theta) * math.sin(alpha)))


def _a_for(cfg: ContourConfig, mu: float, theta: float | None = None) -> float:
    th = cfg.theta if theta is None else theta
    if mu < 1.0:
        if cfg.s is None:
            raise ValueError("mu < 1 requires the split parameter s in the config")
        return a_s_of_theta(cfg.Lambda, cfg.alpha, th, cfg.s)
    return a_of_theta(cfg.Lambda, cfg.alpha, th)


def derive_params(cfg: ContourConfig, mu: float = 1.0) -> DerivedParams:
    """h = a/n and lam = 2 pi d n (1-theta) / (t0 Lambda a), with a the
    mu-appropriate arccosh value."""
    a = _a_for(cfg, mu)
    h = a / cfg.n
    num = (_TWO_PI * cfg.d) * cfg.n * (1.0 - cfg.theta)
    lam = num / (cfg.t0 * cfg.Lambda * a)
    return DerivedParams(h=h, lam=lam, a=a)


def eps_n(theta: float, cfg: ContourConfig, mu: float = 1.0) -> float:
    """exp(-2 pi d n / a(theta)), the quantity driving both the
    discretization decay and the perturbation amplification."""
    a = _a_for(cfg, mu, theta)
    return math.exp(-_TWO_PI * cfg.d * cfg.n / a)


def theta_objective(theta: float, eps: float, cfg: ContourConfig, mu: float = 1.0) -> float:
    """eps * eps_n(theta)^(theta-1) + eps_n(theta)^theta.

    Evaluated in log space; an overflowing amplification term saturates to
    +inf rather than raising.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if not eps >= 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    a = _a_for(cfg, mu, theta)
    g = _TWO_PI * cfg.d * cfg.n / a
    second = math.exp(-theta * g)
    if eps == 0.0:
        return second
    log_first = math.log(eps) + (1.0 - theta) * g
    first = math.inf if log_first > _LOG_MAX else math.exp(log_first)
    return first + second


def _theta_lower_edge(cfg: ContourConfig, mu: float) -> float:
    s = cfg.s if (mu < 1.0 and cfg.s is not None) else 1.0
    return max(0.0, 1.0 - cfg.Lambda / (s * math.sin(cfg.alpha)))


def optimal_theta(eps: float, cfg: ContourConfig, mu: float = 1.0, *,
                  tol: float = 1e-6, check_unimodal: bool = False) -> float:
    """Minimizer of ``theta_objective`` over (0, 1), to absolute tolerance
    ``tol`` in theta.

    Golden-section search on the open bracket; the objective is convex in
    theta with an interior minimum, so no restarts are needed. cfg.theta is
    ignored. With ``check_unimodal`` the first differences of the objective
    are scanned on a grid and must change sign at most once.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    lo = _theta_lower_edge(cfg, mu) + _THETA_EDGE
    hi = 1.0 - _THETA_EDGE

    def f(th: float) -> float:
        return theta_objective(th, eps, cfg, mu)

    probes = [lo + (hi - lo) * i / 32.0 for i in range(33)]
    if not any(math.isfinite(f(th)) for th in probes):
        raise RuntimeError("theta objective is non-finite across the whole bracket")

    if check_unimodal:
        m = 10_000
        grid = [f(lo + (hi - lo) * i / (m - 1)) for i in range(m)]
        flips = 0
        prev = 0
        for i in range(1, m):
            sign = (grid[i] > grid[i - 1]) - (grid[i] < grid[i - 1])
            if sign != 0:
                if prev != 0 and sign != prev:
                    flips += 1
                prev = sign
        if flips > 1:
            raise RuntimeError(f"theta objective not unimodal on grid ({flips} sign changes)")

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d_ = a + invphi * (b - a)
    fc, fd = f(c), f(d_)
    while b - a > tol:
        if fc < fd:
            b, d_, fd = d_, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + invphi * (b - a)
            fd = f(d_)
    return 0.5 * (a + b)


def fallback_theta(n: int) -> float:
    """The precision-agnostic choice 1 - 1/n (requires n >= 2)."""
    if not (isinstance(n, int) and n >= 2):
        raise ValueError(f"fallback theta needs integer n >= 2, got {n}")
    return 1.0 - 1.0 / n
