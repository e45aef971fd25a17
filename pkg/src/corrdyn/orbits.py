"""Set-valued forward iteration with escape pruning.

The live set after n steps is the n-th image set intersected with the closed
escape disk, deduplicated at merge_eps and capped at branch_cap points. A
point is a member of the filled Julia set (to depth max_iter) when its live
set is still nonempty after max_iter steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import EscapeConfig, Exponent, branch_table
from .errors import NoClosure

INSIDE = "inside"
ESCAPED = "escaped"

RECURRENCE_TOL = 1e-9


@dataclass(frozen=True)
class OrbitSet:
    """Live points at one iteration depth, canonically sorted by (re, im)."""

    points: tuple[complex, ...]
    depth: int = 0
    truncated: bool = False


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of the escape test.

    status == INSIDE is a certificate only up to max_iter steps; truncated
    verdicts are heuristic because the branch cap was hit at least once.
    """

    status: str
    steps: int
    truncated: bool

    @property
    def inside(self) -> bool:
        return self.status == INSIDE


@dataclass(frozen=True)
class BoundedOrbit:
    """The unique bounded forward orbit z_0 .. z_(preperiod+period).

    unique=True certifies that exactly one image survived the escape test at
    every step, to the membership depth of the config used.
    """

    points: tuple[complex, ...]
    preperiod: int
    period: int
    unique: bool
    strictly_preperiodic: bool
    truncated: bool = False


class _Workspace:
    """Reusable kernel buffers for one (exponent, config) pair."""

    def __init__(self, exp: Exponent, cfg: EscapeConfig, min_points: int = 0):
        self.q = exp.q
        n = max(cfg.branch_cap, min_points) * exp.q
        self.wa = np.empty(n, np.complex128)
        self.wb = np.empty(n, np.complex128)
        self.buf = np.empty(n, np.complex128)
        self.m, self.mode, self.roots = branch_table(exp)

    def ensure(self, n_points: int) -> None:
        n = n_points * self.q
        if n > len(self.wa):
            self.wa = np.empty(n, np.complex128)
            self.wb = np.empty(n, np.complex128)
            self.buf = np.empty(n, np.complex128)


def make_orbit_set(points, depth: int = 0, truncated: bool = False) -> OrbitSet:
    """Canonicalize a collection of points into an OrbitSet (sorted, as given)."""
    pts = sorted((complex(p) for p in points), key=lambda z: (z.real, z.imag))
    return OrbitSet(points=tuple(pts), depth=depth, truncated=truncated)


def iterate_set(s: OrbitSet, c: complex, exp: Exponent, cfg: EscapeConfig,
                _ws: _Workspace | None = None) -> OrbitSet:
    """One forward step: images of every live point, pruned at the escape
    radius, sorted, deduplicated at merge_eps (lexicographically first point
    of each cluster wins) and capped at branch_cap smallest-modulus points.
    """
    ws = _ws if _ws is not None else _Workspace(exp, cfg)
    ncur = len(s.points)
    ws.ensure(ncur)
    ws.wa[:ncur] = s.points
    n2, trunc = _kernels.set_step(ws.wa, ncur, ws.wb, ws.buf, exp.p, exp.q,
                                  ws.m, ws.mode, ws.roots, complex(c),
                                  cfg.radius, cfg.merge_eps, cfg.branch_cap)
    return OrbitSet(points=tuple(ws.wb[:n2].tolist()), depth=s.depth + 1,
                    truncated=bool(trunc) or s.truncated)


def in_filled_julia(z: complex, c: complex, exp: Exponent, cfg: EscapeConfig,
                    _ws: _Workspace | None = None) -> MembershipVerdict:
    """Escape verdict for z under the correspondence with parameter c."""
    ws = _ws if _ws is not None else _Workspace(exp, cfg)
    ins, steps, trunc = _kernels.membership(complex(z), complex(c), exp.p, exp.q,
                                            ws.m, ws.mode, ws.roots,
                                            cfg.radius, cfg.max_iter, cfg.merge_eps,
                                            cfg.branch_cap, ws.wa, ws.wb, ws.buf)
    return MembershipVerdict(status=INSIDE if ins else ESCAPED, steps=int(steps),
                             truncated=bool(trunc))


def unique_bounded_orbit(z: complex, c: complex, exp: Exponent, cfg: EscapeConfig,
                         horizon: int = 64) -> BoundedOrbit | None:
    """Track the bounded forward orbit of z, requiring it to be unique.

    At each step the forward images are split into survivors (escape test
    says inside) and escapers; None is returned as soon as the survivor count
    differs from one. On the first recurrence |z_j - z_i| <= 1e-9 the orbit
    is closed with preperiod i and period j - i. Raises NoClosure when no
    recurrence shows up within horizon steps.
    """
    from .core import forward_images

    ws = _Workspace(exp, cfg)
    z = complex(z)
    c = complex(c)
    if abs(z) > cfg.radius:
        return None
    points = [z]
    truncated = False
    for _ in range(horizon):
        images = forward_images(points[-1], c, exp)
        survivors = []
        for w in images:
            verdict = in_filled_julia(w, c, exp, cfg, _ws=ws)
            truncated = truncated or verdict.truncated
            if verdict.inside:
                survivors.append(w)
        if len(survivors) != 1:
            return None
        points.append(survivors[0])
        j = len(points) - 1
        for i in range(j):
            if abs(points[j] - points[i]) <= RECURRENCE_TOL:
                return BoundedOrbit(points=tuple(points), preperiod=i, period=j - i,
                                    unique=True, strictly_preperiodic=i >= 1,
                                    truncated=truncated)
    raise NoClosure(f"no orbit recurrence within horizon={horizon}")
