"""Primitives of the correspondence z -> (z^p)^(1/q) + c.

A nonzero point has exactly q forward images; the critical point 0 has the
single image c. Branch indexing is fixed by the principal argument
convention arg(z) in (-pi, pi].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CorrDynError

TWO_PI = 2.0 * math.pi

MAX_EXPONENT = 64

_EXACT_ROOTS = {
    1: (1 + 0j,),
    2: (1 + 0j, -1 + 0j),
    4: (1 + 0j, 1j, -1 + 0j, -1j),
}


def unit_roots(q: int) -> tuple[complex, ...]:
    """q-th roots of unity in branch order k = 0..q-1 (exact for q in 1, 2, 4)."""
    if q in _EXACT_ROOTS:
        return _EXACT_ROOTS[q]
    return tuple(cmath.exp(2j * math.pi * k / q) for k in range(q))


def branch_table(exp: "Exponent") -> tuple[int, int, np.ndarray]:
    """(m, mode, roots) kernel arguments selecting the image formula."""
    if exp.p % exp.q == 0:
        roots = np.asarray(unit_roots(exp.q), dtype=np.complex128)
        return exp.p // exp.q, _kernels.MODE_POWER, roots
    return 0, _kernels.MODE_POLAR, np.zeros(1, dtype=np.complex128)


@dataclass(frozen=True)
class Exponent:
    """Exponent pair (p, q) with p > q >= 1; the map has degree r = p/q > 1.

    (p, q) is taken literally and never reduced: (4, 2) is the two-branch
    correspondence {z^2 + c, -z^2 + c}, not the quadratic map (2, 1).
    """

    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)):
            raise ValueError("p and q must be integers")
        if not (self.p > self.q >= 1):
            raise ValueError(f"need p > q >= 1, got ({self.p}, {self.q})")
        if self.p > MAX_EXPONENT:
            raise ValueError(f"p must be <= {MAX_EXPONENT}")

    @property
    def r(self) -> float:
        return self.p / self.q


@dataclass(frozen=True)
class EscapeConfig:
    """Escape-pruning parameters for the set-valued iteration.

    radius must strictly exceed the larger root x0 of
    x^(p/q) - lambda_esc*x - |c| = 0 for every parameter c in force;
    build instances through for_parameter() to get that guarantee.
    """

    lambda_esc: float
    radius: float
    max_iter: int
    merge_eps: float
    branch_cap: int

    def __post_init__(self):
        if not self.lambda_esc > 1.0:
            raise ValueError("lambda_esc must exceed 1")
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.merge_eps < 0.0 or self.merge_eps >= self.radius / 1e4:
            raise ValueError("merge_eps must lie in [0, radius/10^4)")
        if self.branch_cap < 1:
            raise ValueError("branch_cap must be positive")

    @classmethod
    def for_parameter(cls, exp: Exponent, c_bound: float, *, lambda_esc: float = 2.0,
                      margin: float = 0.05, max_iter: int = 500,
                      merge_eps: float | None = None, branch_cap: int = 4096) -> "EscapeConfig":
        """Config whose radius is valid for every |c| <= c_bound."""
        radius = escape_radius(exp, c_bound, lambda_esc, margin)
        if merge_eps is None:
            merge_eps = radius * 1e-9
        return cls(lambda_esc=lambda_esc, radius=radius, max_iter=max_iter,
                   merge_eps=merge_eps, branch_cap=branch_cap)


def forward_images(z: complex, c: complex, exp: Exponent) -> list[complex]:
    """The forward images of z, in ascending branch order k = 0..q-1.

    w_k = c + |z|^(p/q) * exp(i*(p*arg(z) + 2*pi*k)/q). For z = 0 the single
    image [c] is returned (no spurious branch multiplicity at the critical
    point). When q divides p this reduces to c + root_k * z^(p/q), computed
    algebraically so that rational orbits stay exactly on their cycles.
    """
    z = complex(z)
    c = complex(c)
    if z == 0:
        return [c]
    if exp.p % exp.q == 0:
        zm = z ** (exp.p // exp.q)
        return [c + w * zm for w in unit_roots(exp.q)]
    theta = math.atan2(z.imag, z.real)
    if theta == -math.pi:
        theta = math.pi
    rad = abs(z) ** exp.r
    base = (exp.p * theta) / exp.q
    return [c + rad * cmath.exp(1j * (base + TWO_PI * k / exp.q)) for k in range(exp.q)]


def branch_derivative(z: complex, w: complex, c: complex, exp: Exponent) -> complex:
    """Derivative p*z^(p-1) / (q*(w-c)^(q-1)) of the branch sending z to w.

    Implicit differentiation of (w - c)^q = z^p; w must be one of the forward
    images of z. The critical point has no univalent branch.
    """
    if z == 0:
        raise CorrDynError("branch derivative undefined at the critical point z = 0")
    return (exp.p * z ** (exp.p - 1)) / (exp.q * (w - c) ** (exp.q - 1))


def escape_radius(exp: Exponent, c_bound: float, lambda_esc: float, margin: float = 0.05) -> float:
    """Escape radius x0*(1+margin), x0 the larger positive root of
    x^(p/q) - lambda_esc*x - c_bound = 0.

    Any point of modulus above x0 has all forward images of strictly larger
    modulus, so the exterior is forward invariant.
    """
    if c_bound < 0.0:
        raise ValueError("c_bound must be nonnegative")
    if lambda_esc <= 1.0:
        raise ValueError("lambda_esc must exceed 1")
    if margin < 0.0:
        raise ValueError("margin must be nonnegative")
    x0 = _kernels.escape_x0(exp.p, exp.q, float(c_bound), float(lambda_esc))
    if x0 < 0.0:
        raise CorrDynError("no sign change while bracketing the escape-radius root")
    return x0 * (1.0 + margin)


def branch_nearest(z: complex, c: complex, exp: Exponent, target: complex) -> tuple[complex, int]:
    """Forward image of z closest to target, with its branch index.

    Ties resolve to the smallest branch index.
    """
    if z == 0:
        raise CorrDynError("branch tracking undefined at the critical point z = 0")
    images = forward_images(z, c, exp)
    best_k = 0
    best_d = abs(images[0] - target)
    for k in range(1, len(images)):
        d = abs(images[k] - target)
        if d < best_d:
            best_d = d
            best_k = k
    return images[best_k], best_k
