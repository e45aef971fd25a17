"""Render filled sets of the root correspondence for a few exponents.

Writes PGM escape maps (and PNG views) for:
  - the classical quadratic set (p, q) = (2, 1) at c = -1,
  - the two-branch square family (4, 2) at the preperiodic parameter -2,
  - the (5, 2) family at a parameter on its boundary structure.
"""

import pathlib

from corrdyn import EscapeConfig, Exponent, Window, render_julia, write_pgm, write_png

OUT = pathlib.Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)


def render(tag, exp, c, center, width, px=512, max_iter=200):
    win = Window(center=center, width=width, pixels_x=px, pixels_y=px)
    cfg = EscapeConfig.for_parameter(exp, abs(c) + 0.1, max_iter=max_iter)
    bmp = render_julia(c, exp, win, cfg, threads=2)
    write_pgm(bmp, str(OUT / f"{tag}.pgm"))
    write_png(bmp, str(OUT / f"{tag}.png"))
    inside = int((bmp.data == 0).sum())
    print(f"{tag}: {inside} bounded pixels of {px * px}, escape steps up to "
          f"{int(bmp.data.max())}, escape radius {cfg.radius:.3f}")


if __name__ == "__main__":
    render("julia_2_1_basilica", Exponent(2, 1), -1 + 0j, 0j, 3.6)
    render("julia_4_2_minus_two", Exponent(4, 2), -2 + 0j, 0j, 5.8, max_iter=40)
    render("julia_5_2_boundary", Exponent(5, 2), -1.0272318 + 1.1408565j, 0j, 4.4,
           max_iter=40)
    print(f"wrote images to {OUT}")
