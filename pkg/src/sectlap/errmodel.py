"""A-priori and propagated error bounds for the contour quadrature.

Covers the helper functions (L, the phi variants, the Q factors), the raw
per-time bound, the uniform spectral bounds for exact evaluations, and the
propagated bounds under the absolute/relative accuracy models, with the
mu > 1 and mu < 1 variants. Bounds are assembled in log space and
exponentiated once; an overflowing bound saturates to +inf.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .tuning import AccuracyModel, ContourConfig, DerivedParams, Sectoriality

__all__ = [
    "BoundFactors",
    "ErrorBound",
    "L",
    "phi",
    "phi_mu",
    "phi_s",
    "q_factor",
    "apriori_bound_raw",
    "apriori_bound",
    "propagated_bound",
    "abs_propagation_term",
]

_TWO_PI = 2.0 * math.pi
_LOG_MAX = math.log(1.7976931348623157e308)
_E = math.e


def _exp_sat(logx: float) -> float:
    """exp() that saturates to +inf instead of raising OverflowError."""
    if logx > _LOG_MAX:
        return math.inf
    return math.exp(logx)


def L(x: float) -> float:
    """1 + |ln(1 - e^-x)| for x > 0; decreasing, -> 1 as x -> inf.

    1 - e^-x is computed via expm1 so the x -> 0+ regime (where
    L(x) ~ |ln x|) keeps full accuracy.
    """
    if not x > 0.0:
        raise ValueError(f"L needs x > 0, got {x}")
    return 1.0 + abs(math.log(-math.expm1(-x)))


def phi(alpha: float, d: float) -> float:
    """(2/pi) sqrt((1 + sin(alpha+d)) / (1 - sin(alpha+d)))."""
    if not 0.0 < alpha + d < math.pi / 2.0:
        raise ValueError(f"phi needs 0 < alpha+d < pi/2, got {alpha + d}")
    sad = math.sin(alpha + d)
    return (2.0 / math.pi) * math.sqrt((1.0 + sad) / (1.0 - sad))


def phi_mu(alpha: float, d: float, mu: float) -> float:
    """Variant for decay exponent mu > 1: the denominator carries 2*mu - 1."""
    if not mu >= 1.0:
        raise ValueError(f"phi_mu needs mu >= 1, got {mu}")
    if not 0.0 < alpha + d < math.pi / 2.0:
        raise ValueError(f"phi_mu needs 0 < alpha+d < pi/2, got {alpha + d}")
    sad = math.sin(alpha + d)
    return (2.0 / math.pi) * math.sqrt((1.0 + sad) / (1.0 - sad) ** (2.0 * mu - 1.0))


def phi_s(alpha: float, d: float, mu: float, s: float) -> float:
    """Variant for mu < 1 with split parameter s in (0, 1)."""
    if not mu < 1.0:
        raise ValueError(f"phi_s needs mu < 1, got {mu}")
    if not 0.0 < s < 1.0:
        raise ValueError(f"phi_s needs s in (0, 1), got {s}")
    extra = ((1.0 - mu) / ((1.0 - s) * _E * math.sin(alpha - d))) ** (1.0 - mu)
    return phi(alpha, d) * extra


def q_factor(case: str, lam: float, t0: float, alpha: float, d: float,
             h: float, n: int, s: float = 1.0) -> float:
    """Logarithmic factor Q of the propagated bound.

    'absolute': max{2 L(s lam t0 sin(alpha-d)),
                    ln n/(ln n - 1) [ln n/(2n) + L(lam t0 sin alpha / ln n)]},
    needs n >= 3. 'relative': max{2 L(s lam t0 sin(alpha-d)),
    (h + L(s lam t0 sin alpha))/2}. s = 1 unless on the mu < 1 branch.
    """
    first = 2.0 * L(s * lam * t0 * math.sin(alpha - d))
    if case == "absolute":
        if n <= 2:
            raise ValueError(f"absolute-case Q needs n >= 3 (ln n > 1), got {n}")
        ln_n = math.log(n)
        second = ln_n / (ln_n - 1.0) * (ln_n / (2.0 * n) + L(lam * t0 * math.sin(alpha) / ln_n))
    elif case == "relative":
        second = 0.5 * (h + L(s * lam * t0 * math.sin(alpha)))
    else:
        raise ValueError(f"case must be 'absolute' or 'relative', got {case!r}")
    return max(first, second)


@dataclass(frozen=True)
class BoundFactors:
    """Multiplicative pieces of an ErrorBound.

    ``mu_prefactor`` scales the discretization term (lam^(1-mu) for mu > 1,
    t0^(mu-1) for mu < 1); ``eps_prefactor`` scales the evaluation-error
    term (lam^(1-mu) on the relative branches with mu != 1). Both are 1 in
    the mu = 1 case.
    """

    M: float
    Phi: float
    Q: float
    eps_n: float
    eps: float
    mu_prefactor: float
    eps_prefactor: float = 1.0


@dataclass(frozen=True)
class ErrorBound:
    """A uniform bound on max over [t0, Lambda*t0] of the inversion error.

    ``kind`` is 'apriori' (exact evaluations) or 'propagated';
    ``case`` records the accuracy model ('absolute', 'relative',
    'exact-evaluations'). ``log_eps_n`` keeps the exact exponent so
    ``recompose`` can replay the log-space assembly.
    """

    value: float
    factors: BoundFactors
    kind: str
    case: str
    theta: float
    mu: float
    log_eps_n: float

    def recompose(self) -> float:
        """Re-assemble ``value`` from the stored factors (replays the same
        log-space arithmetic; equality holds to a few ulp)."""
        f = self.factors
        if self.kind == "apriori":
            disc = _exp_sat(math.log(2.0) + self.theta * self.log_eps_n
                            - math.log1p(-f.eps_n)) * f.mu_prefactor
            return f.M * f.Phi * f.Q * disc
        t_eps = 0.0
        if f.eps > 0.0:
            t_eps = _exp_sat(math.log(f.eps) + (self.theta - 1.0) * self.log_eps_n) \
                * f.eps_prefactor
        t_disc = _exp_sat(self.theta * self.log_eps_n - math.log1p(-f.eps_n)) \
            * f.mu_prefactor
        return f.M * f.Phi * f.Q * (t_eps + t_disc)


def apriori_bound_raw(t: float, lam: float, h: float, n: int, alpha: float,
                      d: float, M: float) -> float:
    """Per-time bound for exact evaluations (mu = 1):
    M phi L(lam t sin(alpha-d)) e^(lam t) [1/(e^(2 pi d/h)-1) + e^(-lam t sin(alpha) cosh(nh))].
    """
    front = M * phi(alpha, d) * L(lam * t * math.sin(alpha - d))
    x1 = _TWO_PI * d / h
    # e^(lam t)/(e^x1 - 1) = e^(lam t - x1)/(1 - e^-x1)
    term1 = _exp_sat(lam * t - x1) / (-math.expm1(-x1))
    term2 = _exp_sat(lam * t * (1.0 - math.sin(alpha) * math.cosh(n * h)))
    return front * (term1 + term2)


def _branch_pieces(cfg: ContourConfig, sect: Sectoriality, lam: float,
                   case: str) -> tuple[float, float, float, float]:
    """(Phi_core, mu_prefactor, eps_prefactor, s) for the mu branch.

    mu is compared to 1 exactly; the mu < 1 branch requires cfg.s.
    """
    mu = sect.mu
    if mu == 1.0:
        return phi(cfg.alpha, cfg.d), 1.0, 1.0, 1.0
    if mu > 1.0:
        pre = _exp_sat((1.0 - mu) * math.log(lam))
        eps_pre = 1.0 if case == "absolute" else pre
        return phi_mu(cfg.alpha, cfg.d, mu), pre, eps_pre, 1.0
    if cfg.s is None:
        raise ValueError("mu < 1 bounds require the split parameter s in the config")
    pre = _exp_sat((mu - 1.0) * math.log(cfg.t0))
    eps_pre = 1.0 if case == "absolute" else _exp_sat((1.0 - mu) * math.log(lam))
    return phi_s(cfg.alpha, cfg.d, mu, cfg.s), pre, eps_pre, cfg.s


def apriori_bound(cfg: ContourConfig, sect: Sectoriality,
                  derived: DerivedParams) -> ErrorBound:
    """Uniform bound for exact evaluations:
    M * Phi * L * prefactor * 2 eps_n^theta / (1 - eps_n), with the
    mu-appropriate Phi, L argument, prefactor and eps_n.
    """
    Phi, mu_pre, _, s = _branch_pieces(cfg, sect, derived.lam, "exact")
    log_eps_n = -_TWO_PI * cfg.d * cfg.n / derived.a
    e_n = math.exp(log_eps_n)
    Lval = L(s * derived.lam * cfg.t0 * math.sin(cfg.alpha - cfg.d))
    disc = _exp_sat(math.log(2.0) + cfg.theta * log_eps_n - math.log1p(-e_n)) * mu_pre
    value = sect.M * Phi * Lval * disc
    return ErrorBound(
        value=value,
        factors=BoundFactors(M=sect.M, Phi=Phi, Q=Lval, eps_n=e_n, eps=0.0,
                             mu_prefactor=mu_pre),
        kind="apriori", case="exact-evaluations", theta=cfg.theta,
        mu=sect.mu, log_eps_n=log_eps_n)


def propagated_bound(cfg: ContourConfig, sect: Sectoriality,
                     derived: DerivedParams, acc: AccuracyModel) -> ErrorBound:
    """Bound on the actual error under the given accuracy model:
    M * Phi * Q * (eps_prefactor * eps * eps_n^(theta-1)
                   + mu_prefactor * eps_n^theta / (1 - eps_n)).
    """
    Phi_core, mu_pre, eps_pre, s = _branch_pieces(cfg, sect, derived.lam, acc.kind)
    if acc.kind == "absolute":
        Phi = max(Phi_core, 1.0 / (math.pi * _E * math.sin(cfg.alpha)))
    else:
        Phi = Phi_core
    Q = q_factor(acc.kind, derived.lam, cfg.t0, cfg.alpha, cfg.d, derived.h,
                 cfg.n, s=s)
    eps = acc.normalized_eps(sect.M, cfg.t0)
    log_eps_n = -_TWO_PI * cfg.d * cfg.n / derived.a
    e_n = math.exp(log_eps_n)
    t_eps = 0.0
    if eps > 0.0:
        t_eps = _exp_sat(math.log(eps) + (cfg.theta - 1.0) * log_eps_n) * eps_pre
    t_disc = _exp_sat(cfg.theta * log_eps_n - math.log1p(-e_n)) * mu_pre
    value = sect.M * Phi * Q * (t_eps + t_disc)
    return ErrorBound(
        value=value,
        factors=BoundFactors(M=sect.M, Phi=Phi, Q=Q, eps_n=e_n, eps=eps,
                             mu_prefactor=mu_pre, eps_prefactor=eps_pre),
        kind="propagated", case=acc.kind, theta=cfg.theta, mu=sect.mu,
        log_eps_n=log_eps_n)


def abs_propagation_term(rho: float, t: float, lam: float, alpha: float,
                         n: int) -> float:
    """Per-time propagation estimate for the absolute model:
    rho ln n / (2 pi e (ln n - 1) sin alpha) * (e^(lam t)/t)
      * [ln n / n + 2 L(lam t sin alpha / ln n)].

    Exposed for diagnostics; the uniform Q factor of the propagated bound
    subsumes it.
    """
    if n <= 2:
        raise ValueError(f"absolute propagation estimate needs n >= 3, got {n}")
    if rho == 0.0:
        return 0.0
    ln_n = math.log(n)
    front = rho * ln_n / (_TWO_PI * _E * (ln_n - 1.0) * math.sin(alpha))
    bracket = ln_n / n + 2.0 * L(lam * t * math.sin(alpha) / ln_n)
    return front * (_exp_sat(lam * t) / t) * bracket
