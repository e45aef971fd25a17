"""Tiled rasterization of filled Julia and Multibrot sets.

Bitmaps store 0 for inside pixels and escape step + 1 (saturating at 65535)
otherwise, sampled at pixel centers. Rendering splits the window into row
bands; every pixel is computed independently, so the result is bit-identical
for any band count or thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import EscapeConfig, Exponent, branch_table
from .errors import EmptyCloud

MAX_PIXELS = 1 << 26


@dataclass(frozen=True)
class Window:
    """Axis-aligned view rectangle with square pixels."""

    center: complex
    width: float
    pixels_x: int
    pixels_y: int

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError("width must be positive")
        if self.pixels_x < 1 or self.pixels_y < 1:
            raise ValueError("pixel counts must be positive")
        if self.pixels_x * self.pixels_y > MAX_PIXELS:
            raise ValueError(f"pixel count exceeds {MAX_PIXELS}")

    @property
    def height(self) -> float:
        return self.width * self.pixels_y / self.pixels_x

    @property
    def pixel_size(self) -> float:
        return self.width / self.pixels_x

    def grid_params(self) -> tuple[float, float, float, float]:
        """(xleft, ytop, pixel_w, pixel_h) for center sampling."""
        pw = self.width / self.pixels_x
        ph = self.height / self.pixels_y
        xleft = self.center.real - 0.5 * self.width
        ytop = self.center.imag + 0.5 * self.height
        return xleft, ytop, pw, ph

    def pixel_center(self, i: int, j: int) -> complex:
        xleft, ytop, pw, ph = self.grid_params()
        return complex(xleft + (i + 0.5) * pw, ytop - (j + 0.5) * ph)


@dataclass(frozen=True)
class Bitmap:
    """Row-major 16-bit escape map (0 = inside)."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.height, self.width) or self.data.dtype != np.uint16:
            raise ValueError("data must be a uint16 array of shape (height, width)")


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # complex128, 1-d

    def __post_init__(self):
        if self.points.ndim != 1:
            raise ValueError("points must be one-dimensional")

    def __len__(self) -> int:
        return len(self.points)


def _band_edges(pixels_y: int, tiles: int) -> list[tuple[int, int]]:
    tiles = max(1, min(tiles, pixels_y))
    edges = np.linspace(0, pixels_y, tiles + 1, dtype=np.int64)
    return [(int(edges[t]), int(edges[t + 1])) for t in range(tiles) if edges[t] < edges[t + 1]]


def _run_bands(fn, bands, threads: int):
    if threads <= 1:
        for band in bands:
            fn(band)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fn, bands))


def render_julia(c: complex, exp: Exponent, win: Window, cfg: EscapeConfig, *,
                 threads: int = 1, tiles: int | None = None,
                 supersample: bool = False) -> Bitmap:
    """Escape map of the dynamical plane for parameter c."""
    data = np.zeros((win.pixels_y, win.pixels_x), np.uint16)
    xleft, ytop, pw, ph = win.grid_params()
    c = complex(c)
    m, mode, roots = branch_table(exp)

    def band(rng):
        j0, j1 = rng
        _kernels.render_julia_band(data, j0, j1, win.pixels_x, xleft, ytop, pw, ph,
                                   c, exp.p, exp.q, m, mode, roots,
                                   cfg.radius, cfg.max_iter,
                                   cfg.merge_eps, cfg.branch_cap, supersample)

    _run_bands(band, _band_edges(win.pixels_y, tiles if tiles else max(threads * 4, 1)), threads)
    return Bitmap(width=win.pixels_x, height=win.pixels_y, data=data)


def render_multibrot(exp: Exponent, win: Window, cfg_proto: EscapeConfig, *,
                     margin: float = 0.05, threads: int = 1, tiles: int | None = None,
                     supersample: bool = False) -> Bitmap:
    """Escape map of the parameter plane (critical orbit of each pixel).

    The escape radius is recomputed per pixel from |c|; the remaining fields
    come from cfg_proto.
    """
    data = np.zeros((win.pixels_y, win.pixels_x), np.uint16)
    xleft, ytop, pw, ph = win.grid_params()
    m, mode, roots = branch_table(exp)

    def band(rng):
        j0, j1 = rng
        _kernels.render_multibrot_band(data, j0, j1, win.pixels_x, xleft, ytop, pw, ph,
                                       exp.p, exp.q, m, mode, roots,
                                       cfg_proto.lambda_esc, margin,
                                       cfg_proto.max_iter, cfg_proto.merge_eps,
                                       cfg_proto.branch_cap, supersample)

    _run_bands(band, _band_edges(win.pixels_y, tiles if tiles else max(threads * 4, 1)), threads)
    return Bitmap(width=win.pixels_x, height=win.pixels_y, data=data)


def render_julia_distance(c: complex, exp: Exponent, win: Window, cfg: EscapeConfig, *,
                          threads: int = 1, tiles: int | None = None) -> np.ndarray:
    """Per-pixel distance estimate to the filled Julia set.

    0 marks pixels still alive at max_iter; escaped pixels carry
    |w| log|w| / |w'| along the longest-surviving branch, the standard
    escape-orbit distance bound carried over branch by branch.
    """
    dist = np.zeros((win.pixels_y, win.pixels_x), np.float64)
    xleft, ytop, pw, ph = win.grid_params()
    c = complex(c)
    m, mode, roots = branch_table(exp)

    def band(rng):
        j0, j1 = rng
        _kernels.render_distance_band(dist, j0, j1, win.pixels_x, xleft, ytop, pw, ph,
                                      c, exp.p, exp.q, m, mode, roots, cfg.radius,
                                      cfg.lambda_esc, 0.0, cfg.max_iter, cfg.merge_eps,
                                      cfg.branch_cap, False)

    _run_bands(band, _band_edges(win.pixels_y, tiles if tiles else max(threads * 4, 1)), threads)
    return dist


def render_multibrot_distance(exp: Exponent, win: Window, cfg_proto: EscapeConfig, *,
                              margin: float = 0.05, threads: int = 1,
                              tiles: int | None = None) -> np.ndarray:
    """Per-pixel distance estimate to the parameter-plane set (critical orbit
    derivative with respect to the parameter)."""
    dist = np.zeros((win.pixels_y, win.pixels_x), np.float64)
    xleft, ytop, pw, ph = win.grid_params()
    m, mode, roots = branch_table(exp)

    def band(rng):
        j0, j1 = rng
        _kernels.render_distance_band(dist, j0, j1, win.pixels_x, xleft, ytop, pw, ph,
                                      0j, exp.p, exp.q, m, mode, roots, cfg_proto.radius,
                                      cfg_proto.lambda_esc, margin, cfg_proto.max_iter,
                                      cfg_proto.merge_eps, cfg_proto.branch_cap, True)

    _run_bands(band, _band_edges(win.pixels_y, tiles if tiles else max(threads * 4, 1)), threads)
    return dist


def distance_band_cloud(dist: np.ndarray, win: Window, band: float) -> PointCloud:
    """Pixel centers whose distance estimate is below band (inside included)."""
    mask = dist <= band
    jj, ii = np.nonzero(mask)
    if len(ii) == 0:
        raise EmptyCloud("no pixel within the requested distance band")
    xleft, ytop, pw, ph = win.grid_params()
    pts = (xleft + (ii + 0.5) * pw) + 1j * (ytop - (jj + 0.5) * ph)
    return PointCloud(points=pts.astype(np.complex128))


def extract_point_cloud(bmp: Bitmap, win: Window, mode: str = "boundary",
                        threshold: int | None = None) -> PointCloud:
    """Pixel centers of the inside set, or of its exposed boundary.

    boundary mode keeps inside pixels with at least one escaped 4-neighbour
    (pixels outside the bitmap do not count as escaped). With a threshold T,
    pixels surviving more than T steps count as inside: the bitmap rendered
    at depth N then yields the inside set of any depth T < N.
    """
    if mode not in ("inside", "boundary"):
        raise ValueError(f"unknown mode {mode!r}")
    inside = bmp.data == 0
    if threshold is not None:
        inside |= bmp.data > threshold + 1
    if mode == "boundary":
        esc = ~inside
        neigh = np.zeros_like(inside)
        neigh[:-1, :] |= esc[1:, :]
        neigh[1:, :] |= esc[:-1, :]
        neigh[:, :-1] |= esc[:, 1:]
        neigh[:, 1:] |= esc[:, :-1]
        mask = inside & neigh
    else:
        mask = inside
    jj, ii = np.nonzero(mask)
    if len(ii) == 0:
        raise EmptyCloud(f"no {mode} pixel in bitmap")
    xleft, ytop, pw, ph = win.grid_params()
    pts = (xleft + (ii + 0.5) * pw) + 1j * (ytop - (jj + 0.5) * ph)
    return PointCloud(points=pts.astype(np.complex128))


def write_pgm(bmp: Bitmap, path: str) -> None:
    """Binary 16-bit PGM (P5, maxval 65535, big-endian samples); bit-exact."""
    header = f"P5\n{bmp.width} {bmp.height}\n65535\n".encode("ascii")
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(bmp.data.astype(">u2").tobytes())
    os.replace(tmp, path)


def read_pgm(path: str) -> Bitmap:
    with open(path, "rb") as fh:
        raw = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        fields.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    if fields[0] != b"P5" or fields[3] != b"65535":
        raise ValueError("expected a 16-bit P5 PGM")
    width, height = int(fields[1]), int(fields[2])
    data = np.frombuffer(raw[pos:pos + 2 * width * height], dtype=">u2")
    return Bitmap(width=width, height=height,
                  data=data.reshape(height, width).astype(np.uint16))


def write_png(bmp: Bitmap, path: str) -> None:
    """8-bit view (values clipped at 255); for inspection, not round-trips."""
    from PIL import Image

    arr = np.minimum(bmp.data, 255).astype(np.uint8)
    tmp = f"{path}.tmp{os.getpid()}"
    Image.fromarray(arr, mode="L").save(tmp, format="PNG")
    os.replace(tmp, path)
