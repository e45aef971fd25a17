"""Zoom ladder into the (5, 2) parameter plane.

Reproduces the qualitative picture of the parameter-plane set and two
magnifications about a boundary parameter where small copies accumulate:
each level shrinks the window by the cycle multiplier modulus.
"""

import pathlib

from corrdyn import (
    EscapeConfig,
    Exponent,
    Window,
    refine_misiurewicz_numeric,
    render_multibrot,
    write_pgm,
    write_png,
)

OUT = pathlib.Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

if __name__ == "__main__":
    exp = Exponent(5, 2)
    report = refine_misiurewicz_numeric(exp, -1.027 + 1.141j)
    a = report.a
    lam = abs(report.multiplier)
    print(f"zoom anchor a = {a:.12f}, cycle multiplier modulus {lam:.4f}")

    # wide view: parameters deep inside the set carry large live branch
    # trees, so the overview uses a modest depth and branch cap; the zoomed
    # windows sit on the thin boundary where most pixels escape quickly
    overview_cfg = EscapeConfig.for_parameter(exp, 2.4, max_iter=80, branch_cap=64)
    zoom_cfg = EscapeConfig.for_parameter(exp, 2.4, max_iter=300)
    ladders = [(3.0, 256, overview_cfg), (3.0 * lam ** -6, 512, zoom_cfg),
               (3.0 * lam ** -9, 512, zoom_cfg)]
    for level, (width, px, cfg) in enumerate(ladders):
        win = Window(center=a, width=width, pixels_x=px, pixels_y=px)
        bmp = render_multibrot(exp, win, cfg, threads=2)
        tag = f"multibrot_5_2_zoom{level}"
        write_pgm(bmp, str(OUT / f"{tag}.pgm"))
        write_png(bmp, str(OUT / f"{tag}.png"))
        print(f"{tag}: width {width:.3e}, bounded pixels {(bmp.data == 0).sum()}")
    print(f"wrote images to {OUT}")
