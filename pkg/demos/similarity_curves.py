"""Hausdorff similarity curves about the preperiodic parameter -2.

Builds the magnification ladders that verify, numerically, the two limit
statements about the (4, 2) family at a = -2:

  - consecutive magnifications of the filled set about -2 converge
    (asymptotic self-similarity with the cycle multiplier 4),
  - magnifications of the parameter plane about -2 match magnifications of
    the dynamical plane once the latter is rescaled by mu = 1.5.

Each scale is re-rendered, so the distances keep shrinking until they hit
the pixel floor. A deliberately wrong mu shows what failure looks like.
"""

import time

from corrdyn import (
    EscapeConfig,
    Exponent,
    SignSequence,
    default_truncation_radius,
    rendered_cross_curve,
    rendered_self_curve,
    solve_misiurewicz_42,
)

if __name__ == "__main__":
    exp = Exponent(4, 2)
    report = solve_misiurewicz_42(SignSequence(signs=(1, 1), preperiod=2, period=1), -2.1)
    r = default_truncation_radius(report)
    cfg = EscapeConfig.for_parameter(exp, 2.2, max_iter=100)
    px = 512
    pixel = 2 * r * 1.05 / px
    print(f"a = {report.a.real:g}, multiplier = {report.multiplier.real:g}, "
          f"mu = {report.mu.real:g}, truncation radius = {r:g}\n")

    t0 = time.time()
    self_curve = rendered_self_curve(report.a, exp, report, report.a, r, 4, px,
                                     cfg, threads=2)
    print(f"self-similarity distances (pixel = {pixel:.2e}, {time.time()-t0:.1f}s):")
    for k, d in zip(self_curve.scales, self_curve.distances):
        print(f"  scale 4^{k} vs 4^{k+1}: d_H = {d:.6f}  ({d/pixel:.1f} px)")

    t0 = time.time()
    cross = rendered_cross_curve(report, r, 4, px, cfg, threads=2)
    print(f"\nparameter vs dynamical plane, mu = 1.5 ({time.time()-t0:.1f}s):")
    for k, d in zip(cross.scales, cross.distances):
        print(f"  scale 4^{k}: d_H = {d:.6f}  ({d/pixel:.1f} px)")

    bad = rendered_cross_curve(report, r, 4, 256, cfg, threads=2, mu=10 + 0j)
    print("\nsame comparison with mu forced to 10 (negative control):")
    print("  " + ", ".join(f"{d:.4f}" for d in bad.distances) + "  (no convergence)")
