"""Hyperbolic contour map, its derivative, and quadrature node generation.

The base contour is the left branch of a hyperbola with center (1, 0) and
foci (0, 0), (2, 0), traced by ``1 - sin(alpha + i*w)`` for real w. Scaling
by ``lam > 0`` gives the integration path used by the inversion engine.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["NodeSet", "build_nodes", "contour_point", "contour_derivative"]


def contour_point(alpha: float, w) -> complex:
    """Evaluate the contour map 1 - sin(alpha + i*w).

    For real w the hyperbolic expansion
    ``1 - sin(alpha)*cosh(w) - i*cos(alpha)*sinh(w)`` is used so that
    conjugate symmetry ``T(-w) == conj(T(w))`` is exact in floating point.
    """
    if isinstance(w, complex):
        return 1.0 - cmath.sin(alpha + 1j * w)
    x = float(w)
    return complex(1.0 - math.sin(alpha) * math.cosh(x),
                   -math.cos(alpha) * math.sinh(x))


def contour_derivative(alpha: float, w) -> complex:
    """w-derivative of ``contour_point``: -i*cos(alpha + i*w).

    The factor -i comes from differentiating through alpha + i*w; it is
    what makes the quadrature weights conjugate-symmetric.
    """
    if isinstance(w, complex):
        return -1j * cmath.cos(alpha + 1j * w)
    x = float(w)
    return complex(-math.sin(alpha) * math.sinh(x),
                   -math.cos(alpha) * math.cosh(x))


@dataclass(frozen=True)
class NodeSet:
    """Quadrature nodes on the scaled contour.

    Flat arrays ordered k = -n..n (array index k + n): ``x`` holds the
    abscissae k*h, ``z`` the contour points lam*T(x_k) and ``tprime`` the
    contour derivatives T'(x_k) (without the lam factor). Negative-k
    entries are exact mirrors: z[-k] = conj(z[k]), tprime[-k] = -conj(tprime[k]).
    """

    n: int
    h: float
    lam: float
    alpha: float
    x: np.ndarray
    z: np.ndarray
    tprime: np.ndarray

    def index(self, k: int) -> int:
        if not -self.n <= k <= self.n:
            raise IndexError(f"node index {k} outside [-{self.n}, {self.n}]")
        return k + self.n

    def point(self, k: int) -> complex:
        return complex(self.z[self.index(k)])

    def derivative(self, k: int) -> complex:
        return complex(self.tprime[self.index(k)])

    def __len__(self) -> int:
        return 2 * self.n + 1


def build_nodes(alpha: float, derived, n: int) -> NodeSet:
    """Generate the 2n+1 nodes for step ``derived.h`` and scale ``derived.lam``.

    The k >= 0 half is computed from the hyperbolic expansion and the
    negative half is mirrored, so conjugate symmetry holds bitwise.
    """
    h = float(derived.h)
    lam = float(derived.lam)
    n = int(n)
    if n < 1:
        raise ValueError(f"node half-count must be >= 1, got {n}")
    if not (math.isfinite(h) and h > 0.0):
        raise ValueError(f"step size must be finite and > 0, got {h}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"contour scale must be finite and > 0, got {lam}")

    sa, ca = math.sin(alpha), math.cos(alpha)
    k = np.arange(-n, n + 1)
    x = k * h
    xu = x[n:]
    zu = lam * (1.0 - sa * np.cosh(xu)) - 1j * (lam * (ca * np.sinh(xu)))
    tu = -sa * np.sinh(xu) - 1j * (ca * np.cosh(xu))

    z = np.empty(2 * n + 1, dtype=np.complex128)
    tprime = np.empty(2 * n + 1, dtype=np.complex128)
    z[n:] = zu
    z[:n] = np.conj(zu[1:])[::-1]
    tprime[n:] = tu
    tprime[:n] = -np.conj(tu[1:])[::-1]
    return NodeSet(n=n, h=h, lam=lam, alpha=float(alpha),
                   x=x, z=z, tprime=tprime)
