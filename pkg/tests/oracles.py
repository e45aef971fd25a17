"""Independent reference implementations used to check the package.

Everything here is deliberately written against the defining formulas, not
against the package internals: plain numpy escape iteration for the single
branch case, all-pairs Hausdorff with the same elementary arithmetic as the
production kernel, and a sympy route to the sign-sequence polynomials.
"""

import numpy as np


def classical_escape_parameter_plane(centers, radii, max_iter):
    """Plain z^2 + c escape iteration from 0; returns (inside, steps)."""
    C = np.asarray(centers, dtype=np.complex128)
    R = np.asarray(radii, dtype=np.float64)
    Z = np.zeros_like(C)
    steps = np.zeros(C.shape, np.int32)
    alive = np.ones(C.shape, bool)
    for it in range(1, max_iter + 1):
        Z[alive] = Z[alive] ** 2 + C[alive]
        esc = alive & (np.abs(Z) > R)
        steps[esc] = it
        alive &= ~esc
    return alive, steps


def classical_escape_dynamical_plane(z0, c, radius, max_iter):
    """Plain z^2 + c escape iteration from z0; returns (inside, steps)."""
    Z = np.asarray(z0, dtype=np.complex128).copy()
    steps = np.zeros(Z.shape, np.int32)
    alive = np.abs(Z) <= radius
    for it in range(1, max_iter + 1):
        Z[alive] = Z[alive] ** 2 + c
        esc = alive & (np.abs(Z) > radius)
        steps[esc] = it
        alive &= ~esc
    return alive, steps


def brute_force_hausdorff(a, b):
    """All-pairs Hausdorff distance.

    Distances are sqrt(dx^2 + dy^2) compared in squared form, matching the
    grid kernel's arithmetic operation for operation so agreement can be
    asserted exactly.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    dre = a.real[:, None] - b.real[None, :]
    dim = a.imag[:, None] - b.imag[None, :]
    d2 = dre * dre + dim * dim
    return float(np.sqrt(max(d2.min(axis=1).max(), d2.min(axis=0).max())))


def sympy_sign_polynomial(signs, j):
    """F_j(c) as a sympy polynomial built by the recursion, plus derivative."""
    import sympy

    c = sympy.symbols("c")
    f = c
    for t in range(1, j):
        f = sympy.expand(signs[t - 1] * f ** 2 + c)
    return f, sympy.diff(f, c), c


def tracked_branch_fd(z, c, exp, target, h=1e-6):
    """Central finite difference of the branch picked by nearest-image
    continuation toward a target."""
    from corrdyn.core import branch_nearest

    wp, _ = branch_nearest(z + h, c, exp, target)
    wm, _ = branch_nearest(z - h, c, exp, target)
    return (wp - wm) / (2.0 * h)
