"""Linearization, truncated-set normalization and similarity curves.

The return map h along a repelling cycle is linearized by the normalized
conjugacy phi with phi(h(z)) = multiplier * phi(z), phi(fixed) = 0,
phi'(fixed) = 1. Since the fixed point is repelling, phi is evaluated
through inverse iterates: phi(z) = lim multiplier^m * (h^(-m)(z) - fixed).

Set comparisons follow the truncation convention
A_r = (A intersect closed disk r) union circle r, and similarity curves
report Hausdorff distances between consecutive magnifications of one cloud
(self-similarity) or matched magnifications of two clouds (parameter plane
against dynamical plane, the latter scaled additionally by mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .core import EscapeConfig, Exponent, branch_derivative, branch_nearest, forward_images
from .errors import DivergedFromDomain, EmptyCloud, ResolutionTooCoarse
from .misiurewicz import MisiurewiczReport
from .raster import PointCloud

SELF_SIMILARITY = "self_similarity"
JULIA_VS_MULTIBROT = "julia_vs_multibrot"

PHI_TOL = 1e-12
INVERSE_TOL = 1e-14


class KoenigsMap:
    """Normalized linearizer of a repelling return map.

    The return map is handled in offset coordinates around the fixed point:
    offset_pair(d) must return (h(fixed + d) - fixed, h'(fixed + d)).
    Working with offsets is what lets the inverse iterates, which collapse
    onto the fixed point geometrically, keep full relative precision; an
    absolute formulation loses the linearizer in round-off after ~15 steps.

    phi is evaluable on |z - fixed_point| <= |multiplier| * domain_radius,
    which covers the h-image of the base disk (the functional equation
    extends phi there).
    """

    def __init__(self, fixed_point: complex, multiplier: complex,
                 offset_pair: Callable[[complex], tuple[complex, complex]],
                 domain_radius: float, n_limit: int = 64, noise_floor: float = 0.0):
        if abs(multiplier) <= 1.0:
            raise ValueError("multiplier must be repelling")
        if domain_radius <= 0.0:
            raise ValueError("domain_radius must be positive")
        self.fixed_point = complex(fixed_point)
        self.multiplier = complex(multiplier)
        self.offset_pair = offset_pair
        self.domain_radius = float(domain_radius)
        self.n_limit = int(n_limit)
        self.noise_floor = float(noise_floor)

    def h_offset(self, d: complex) -> complex:
        return self.offset_pair(d)[0]

    def h(self, z: complex) -> complex:
        return self.fixed_point + self.h_offset(z - self.fixed_point)

    def _inverse_offset(self, w: complex) -> complex:
        """Solve h_offset(d) = w for the branch with d ~ w / multiplier."""
        d = w / self.multiplier
        tol = max(INVERSE_TOL * abs(w), self.noise_floor)
        for _ in range(60):
            hd, hpd = self.offset_pair(d)
            if abs(hd - w) <= tol:
                return d
            if hpd == 0:
                break
            d -= (hd - w) / hpd
            if abs(d) > 2.0 * abs(self.multiplier) * self.domain_radius:
                break
        raise DivergedFromDomain(f"inverse branch of the return map lost at offset {w}")

    def phi_offset(self, d: complex) -> complex:
        """Linearizing coordinate of fixed_point + d."""
        d = complex(d)
        lam = self.multiplier
        if abs(d) > abs(lam) * self.domain_radius * (1.0 + 1e-9):
            raise DivergedFromDomain(f"offset {d} outside the evaluation disk")
        if d == 0:
            return 0j
        est_prev = None
        diff_prev = None
        lam_pow = 1.0 + 0j
        for m in range(1, self.n_limit + 1):
            d = self._inverse_offset(d)
            if m == 1 and abs(d) > self.domain_radius * (1.0 + 1e-9):
                raise DivergedFromDomain("first inverse image leaves the base disk")
            lam_pow *= lam
            est = lam_pow * d
            if est_prev is not None:
                diff = abs(est - est_prev)
                if diff < PHI_TOL * max(1.0, abs(est)):
                    return est
                # round-off floor: successive estimates stop improving
                if diff_prev is not None and diff >= diff_prev and diff < 1e-6 * max(1.0, abs(est)):
                    return est_prev
                diff_prev = diff
            est_prev = est
        return est_prev

    def phi(self, z: complex) -> complex:
        return self.phi_offset(complex(z) - self.fixed_point)

    def phi_many(self, points: np.ndarray) -> np.ndarray:
        return np.array([self.phi(z) for z in points], dtype=np.complex128)


def _snap_root(value: complex, q: int) -> complex:
    from .core import unit_roots

    roots = unit_roots(q)
    return min(roots, key=lambda r: abs(r - value))


def _report_offset_pair(report: MisiurewiczReport) -> Callable[[complex], tuple[complex, complex]]:
    lc, n = report.preperiod, report.period
    cycle = report.orbit[lc:lc + n + 1]
    a = report.a
    exp = report.exponent

    if exp.p % exp.q == 0:
        # power branches c + root * z^m: the offset recursion
        #   e_out = root * ((w + e)^m - w^m) + rho,  rho = a + root*w^m - w_next
        # is exact in e, so offsets keep full relative precision
        m = exp.p // exp.q
        steps = []
        for j in range(n):
            w, w_next = cycle[j], cycle[j + 1]
            root = _snap_root((w_next - a) / w ** m, exp.q)
            rho = (a + root * w ** m) - w_next
            binom = []
            coeff = 1
            for t in range(1, m + 1):
                coeff = coeff * (m - t + 1) // t
                binom.append((coeff, m - t))
            steps.append((w, root, rho, binom))

        def offset_pair(e: complex) -> tuple[complex, complex]:
            deriv = 1 + 0j
            for w, root, rho, binom in steps:
                grow = 0j
                e_pow = 1 + 0j
                for coeff, w_pow in binom:
                    e_pow *= e
                    grow += coeff * w ** w_pow * e_pow
                deriv *= root * m * (w + e) ** (m - 1)
                e = root * grow + rho
            return e, deriv

        return offset_pair

    def offset_pair(e: complex) -> tuple[complex, complex]:
        # general exponents: absolute-coordinate tracking against the cycle
        # (accuracy near the fixed point is round-off limited)
        deriv = 1 + 0j
        z = cycle[0] + e
        for j in range(n):
            images = forward_images(z, a, exp)
            dists = sorted(abs(im - cycle[j + 1]) for im in images)
            if len(dists) > 1 and dists[1] < 2.0 * dists[0]:
                raise DivergedFromDomain(f"cycle branch ambiguous at step {j}")
            nxt, _ = branch_nearest(z, a, exp, cycle[j + 1])
            deriv *= branch_derivative(z, nxt, a, exp)
            z = nxt
        return z - cycle[0], deriv

    return offset_pair


def koenigs_build(report: MisiurewiczReport, domain_radius: float) -> KoenigsMap:
    """Linearizer of the cycle return map of a Misiurewicz report.

    The return map is the branch composition along the cycle, tracked
    against the cycle points of the report.
    """
    lc = report.preperiod
    exp = report.exponent
    floor = 0.0 if exp.p % exp.q == 0 else 1e-15 * max(1.0, abs(report.orbit[lc]))
    return KoenigsMap(fixed_point=report.orbit[lc], multiplier=report.multiplier,
                      offset_pair=_report_offset_pair(report), domain_radius=domain_radius,
                      noise_floor=floor)


def truncate_normalize(cloud: PointCloud, center: complex, factor: complex, r: float,
                       circle_samples: int = 256) -> PointCloud:
    """factor * (cloud - center), truncated to the closed disk of radius r and
    compactified with circle_samples equispaced boundary points."""
    if r <= 0.0:
        raise ValueError("truncation radius must be positive")
    if circle_samples < 64:
        raise ValueError("need at least 64 circle samples")
    w = (cloud.points - complex(center)) * complex(factor)
    w = w[np.abs(w) <= r]
    angles = 2.0 * np.pi * np.arange(circle_samples) / circle_samples
    circle = r * np.exp(1j * angles)
    return PointCloud(points=np.concatenate([w, circle]))


def _grid_index(points: np.ndarray):
    n = len(points)
    xs, ys = points.real, points.imag
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    ncell = int(np.clip(math.ceil(math.sqrt(n)), 1, 1024))
    pad_x = max(x1 - x0, 1.0) * 1e-12
    pad_y = max(y1 - y0, 1.0) * 1e-12
    cw = (x1 - x0 + pad_x) / ncell
    ch = (y1 - y0 + pad_y) / ncell
    cx = np.floor((xs - x0) / cw).astype(np.int64)
    cy = np.floor((ys - y0) / ch).astype(np.int64)
    cid = cy * ncell + cx
    order = np.argsort(cid, kind="stable").astype(np.int64)
    counts = np.bincount(cid, minlength=ncell * ncell)
    cell_start = np.zeros(ncell * ncell + 1, np.int64)
    np.cumsum(counts, out=cell_start[1:])
    return order, cell_start, ncell, x0, y0, cw, ch


def _directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    order, cell_start, ncell, x0, y0, cw, ch = _grid_index(b)
    return float(_kernels.directed_hausdorff_grid(a, b, order, cell_start,
                                                  ncell, ncell, x0, y0, cw, ch))


def hausdorff_distance(a: PointCloud, b: PointCloud) -> float:
    """Exact Hausdorff distance between two finite clouds (grid-indexed)."""
    if len(a) == 0 or len(b) == 0:
        raise EmptyCloud("hausdorff distance needs two nonempty clouds")
    pa = np.ascontiguousarray(a.points, dtype=np.complex128)
    pb = np.ascontiguousarray(b.points, dtype=np.complex128)
    return max(_directed_hausdorff(pa, pb), _directed_hausdorff(pb, pa))


@dataclass(frozen=True)
class SimilarityCurve:
    """Hausdorff distances along a ladder of magnifications."""

    scales: tuple[int, ...]
    distances: tuple[float, ...]
    r: float
    mode: str
    scale_abs: tuple[float, ...]

    def to_csv(self) -> str:
        lines = ["k,scale_abs,d_hausdorff"]
        for k, s, d in zip(self.scales, self.scale_abs, self.distances):
            lines.append(f"{k},{s:.17g},{d:.17g}")
        return "\n".join(lines) + "\n"


def _circle_samples_for(r: float, eff_pixel: float) -> int:
    return max(256, int(math.ceil(2.0 * math.pi * r / eff_pixel)))


def self_similarity_curve(cloud: PointCloud, report: MisiurewiczReport, about: complex,
                          r: float, k_max: int, pixel_size: float) -> SimilarityCurve:
    """Consecutive-scale distances d(k) = d_H((lam^k A)_r, (lam^(k+1) A)_r)
    about a point of one cloud; a Cauchy-style proxy for convergence to the
    limit model."""
    lam = report.multiplier
    if pixel_size > r * abs(lam) ** (-k_max) / 50.0:
        raise ResolutionTooCoarse(
            f"pixel {pixel_size:.3e} too coarse for magnification |lam|^{k_max}")
    about = complex(about)
    distances = []
    for k in range(k_max):
        # both sides of one comparison share the circle discretization
        samples = _circle_samples_for(r, pixel_size * abs(lam) ** k)
        ta = truncate_normalize(cloud, about, lam ** k, r, samples)
        tb = truncate_normalize(cloud, about, lam ** (k + 1), r, samples)
        distances.append(hausdorff_distance(ta, tb))
    return SimilarityCurve(scales=tuple(range(k_max)), distances=tuple(distances),
                           r=r, mode=SELF_SIMILARITY,
                           scale_abs=tuple(abs(lam) ** k for k in range(k_max)))


def julia_vs_multibrot_curve(m_cloud: PointCloud, k_cloud: PointCloud,
                             report: MisiurewiczReport, r: float, k_max: int,
                             m_pixel: float, k_pixel: float,
                             mu: complex | None = None) -> SimilarityCurve:
    """Matched-scale distances between the parameter-plane cloud about a and
    the dynamical-plane cloud about a, the latter scaled by mu so the limit
    models coincide."""
    lam = report.multiplier
    if mu is None:
        mu = report.mu
    top = k_max - 1
    if m_pixel > r * abs(lam) ** (-top) / 50.0:
        raise ResolutionTooCoarse(f"parameter-plane pixel {m_pixel:.3e} too coarse")
    if k_pixel > r * abs(mu * lam ** top) ** (-1) / 50.0:
        raise ResolutionTooCoarse(f"dynamical-plane pixel {k_pixel:.3e} too coarse")
    a = report.a
    distances = []
    for k in range(k_max):
        samples = _circle_samples_for(r, max(m_pixel, k_pixel * abs(mu)) * abs(lam) ** k)
        tm = truncate_normalize(m_cloud, a, lam ** k, r, samples)
        tk = truncate_normalize(k_cloud, a, mu * lam ** k, r, samples)
        distances.append(hausdorff_distance(tm, tk))
    return SimilarityCurve(scales=tuple(range(k_max)), distances=tuple(distances),
                           r=r, mode=JULIA_VS_MULTIBROT,
                           scale_abs=tuple(abs(lam) ** k for k in range(k_max)))


def limit_model(k_cloud: PointCloud, koenigs: KoenigsMap,
                pushforward_derivs: list[complex]) -> list[PointCloud]:
    """Images of a cloud under the linearizer, transported along the orbit
    by branch-derivative scalings."""
    base = PointCloud(points=koenigs.phi_many(k_cloud.points))
    models = [base]
    factor = 1 + 0j
    for d in pushforward_derivs:
        factor *= complex(d)
        models.append(PointCloud(points=base.points * factor))
    return models


def default_truncation_radius(report: MisiurewiczReport, about: complex | None = None) -> float:
    """Half the distance from the anchor to the nearest other orbit point,
    shrunk by the multiplier modulus."""
    about = complex(report.a if about is None else about)
    others = [z for z in report.orbit[1:] if abs(z - about) > 1e-9]
    if not others:
        raise ValueError("report orbit has no other points")
    gap = min(abs(z - about) for z in others)
    return 0.5 * gap / abs(report.multiplier)


def _scale_windows(about: complex, r: float, k_max: int, lam_abs: float,
                   pixels: int, extra: float = 1.0, pad: float = 1.05):
    from .raster import Window

    wins = []
    for k in range(k_max + 1):
        width = 2.0 * r * pad * extra / lam_abs ** k
        wins.append(Window(center=about, width=width, pixels_x=pixels, pixels_y=pixels))
    return wins


def rendered_self_curve(c: complex, exp: Exponent, report: MisiurewiczReport,
                        about: complex, r: float, k_max: int, pixels: int,
                        cfg: EscapeConfig, *, threads: int = 1,
                        band_pixels: float = 1.0,
                        collect=None) -> SimilarityCurve:
    """Self-similarity curve of the filled set of parameter c about a point,
    re-rendered at every magnification.

    Clouds come from the distance-estimate band dist <= band_pixels * pixel:
    escape-step thresholds cannot give uniformly pixel-thick approximants of
    a thin set (the band width varies with the local expansion rate), and a
    lopsided approximant stalls the Hausdorff curve.
    """
    from .raster import distance_band_cloud, render_julia_distance

    lam = report.multiplier
    wins = _scale_windows(about, r, k_max, abs(lam), pixels)
    clouds = []
    for k, win in enumerate(wins):
        dist = render_julia_distance(c, exp, win, cfg, threads=threads)
        cloud = distance_band_cloud(dist, win, band_pixels * win.pixel_size)
        if win.pixel_size > r * abs(lam) ** (-k) / 50.0:
            raise ResolutionTooCoarse(f"scale {k}: pixel {win.pixel_size:.3e} too coarse")
        clouds.append(cloud)
        if collect is not None:
            collect(k, win, dist, cloud)
    distances = []
    for k in range(k_max):
        samples = _circle_samples_for(r, wins[0].pixel_size)  # scaled pixel is scale-free
        ta = truncate_normalize(clouds[k], about, lam ** k, r, samples)
        tb = truncate_normalize(clouds[k + 1], about, lam ** (k + 1), r, samples)
        distances.append(hausdorff_distance(ta, tb))
    return SimilarityCurve(scales=tuple(range(k_max)), distances=tuple(distances),
                           r=r, mode=SELF_SIMILARITY,
                           scale_abs=tuple(abs(lam) ** k for k in range(k_max)))


def rendered_cross_curve(report: MisiurewiczReport, r: float, k_max: int, pixels: int,
                         cfg: EscapeConfig, *, threads: int = 1, mu: complex | None = None,
                         band_pixels: float = 1.0, margin: float = 0.05,
                         collect=None) -> SimilarityCurve:
    """Parameter-plane versus dynamical-plane curve about a Misiurewicz
    parameter, both planes re-rendered per magnification with matched
    distance-band clouds.
    """
    from .raster import distance_band_cloud, render_julia_distance, render_multibrot_distance

    exp = report.exponent
    a = report.a
    lam = report.multiplier
    if mu is None:
        mu = report.mu
    m_wins = _scale_windows(a, r, k_max - 1, abs(lam), pixels)
    k_wins = _scale_windows(a, r, k_max - 1, abs(lam), pixels, extra=1.0 / abs(mu))
    distances = []
    for k in range(k_max):
        m_dist = render_multibrot_distance(exp, m_wins[k], cfg, margin=margin, threads=threads)
        m_cloud = distance_band_cloud(m_dist, m_wins[k], band_pixels * m_wins[k].pixel_size)
        k_dist = render_julia_distance(a, exp, k_wins[k], cfg, threads=threads)
        k_cloud = distance_band_cloud(k_dist, k_wins[k], band_pixels * k_wins[k].pixel_size)
        m_px, k_px = m_wins[k].pixel_size, k_wins[k].pixel_size
        if m_px > r * abs(lam) ** (-k) / 50.0 or k_px > r / (abs(mu) * abs(lam) ** k) / 50.0:
            raise ResolutionTooCoarse(f"scale {k}: pixels too coarse")
        samples = _circle_samples_for(r, max(m_px, k_px * abs(mu)) * abs(lam) ** k)
        tm = truncate_normalize(m_cloud, a, lam ** k, r, samples)
        tk = truncate_normalize(k_cloud, a, mu * lam ** k, r, samples)
        distances.append(hausdorff_distance(tm, tk))
        if collect is not None:
            collect(k, m_wins[k], m_dist, k_wins[k], k_dist)
    return SimilarityCurve(scales=tuple(range(k_max)), distances=tuple(distances),
                           r=r, mode=JULIA_VS_MULTIBROT,
                           scale_abs=tuple(abs(lam) ** k for k in range(k_max)))
