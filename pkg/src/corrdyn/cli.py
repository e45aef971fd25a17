"""Command-line surface: rendering, Misiurewicz solving, similarity curves.

Every command resolves its full configuration up front, echoes it into a
.meta sidecar (key=value lines), and writes outputs through a temporary file
so partial results never land under the final name. Exit codes: 0 success,
1 math/runtime failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

from .core import EscapeConfig, Exponent
from .errors import CorrDynError

# lets argparse accept complex values like -2,0 after a flag
_NEGATIVE_TOKEN = re.compile(r"^-\d+(\.\d+)?([eE][-+]?\d+)?(,-?\d+(\.\d+)?([eE][-+]?\d+)?)?$")
from .misiurewicz import (
    MisiurewiczReport,
    SignSequence,
    refine_misiurewicz_numeric,
    solve_misiurewicz_42,
)
from .raster import Bitmap, Window, render_julia, render_multibrot, write_pgm, write_png
from .similarity import (
    SimilarityCurve,
    default_truncation_radius,
    rendered_cross_curve,
    rendered_self_curve,
)


def _complex_flag(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None


def _auto_int(text: str):
    if text == "auto":
        return None
    return int(text)


def _complex_or_real_flag(text: str) -> complex:
    if "," in text:
        return _complex_flag(text)
    try:
        return complex(float(text), 0.0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 're,im', got {text!r}") from None


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, complex):
        return f"{value.real:.17g},{value.imag:.17g}"
    return str(value)


def _write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_meta(path: str, config: dict) -> None:
    lines = [f"{k}={_fmt(v)}" for k, v in sorted(config.items())]
    _write_text(path, "\n".join(lines) + "\n")


def report_to_kv(report: MisiurewiczReport) -> str:
    """Line-oriented key=value record of a Misiurewicz report."""
    lines = [
        f"p={report.exponent.p}",
        f"q={report.exponent.q}",
        f"a={_fmt(report.a)}",
        f"preperiod={report.preperiod}",
        f"period={report.period}",
        f"multiplier={_fmt(report.multiplier)}",
        f"w_prime={_fmt(report.w_prime)}",
        f"u_prime={_fmt(report.u_prime)}",
        f"g_prime={_fmt(report.g_prime)}",
        f"mu={_fmt(report.mu)}",
        f"residual={_fmt(report.residual)}",
    ]
    if report.signs is not None:
        lines.append(f"signs={report.signs}")
    for j, z in enumerate(report.orbit):
        lines.append(f"orbit_{j}={_fmt(z)}")
    return "\n".join(lines) + "\n"


def report_from_kv(text: str) -> MisiurewiczReport:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        kv[key] = value
    cx = lambda s: complex(*(float(t) for t in s.split(",")))  # noqa: E731
    preperiod = int(kv["preperiod"])
    period = int(kv["period"])
    signs = None
    if "signs" in kv:
        signs = SignSequence.parse(kv["signs"], preperiod, period)
    orbit = []
    j = 0
    while f"orbit_{j}" in kv:
        orbit.append(cx(kv[f"orbit_{j}"]))
        j += 1
    return MisiurewiczReport(a=cx(kv["a"]), exponent=Exponent(int(kv["p"]), int(kv["q"])),
                             preperiod=preperiod, period=period, signs=signs,
                             orbit=tuple(orbit), multiplier=cx(kv["multiplier"]),
                             w_prime=cx(kv["w_prime"]), u_prime=cx(kv["u_prime"]),
                             g_prime=cx(kv["g_prime"]), mu=cx(kv["mu"]),
                             residual=float(kv["residual"]))


def reports_to_csv(reports: list[MisiurewiczReport]) -> str:
    lines = ["a_re,a_im,preperiod,period,signs,multiplier_re,multiplier_im,"
             "w_prime_re,w_prime_im,mu_re,mu_im,residual"]
    for r in reports:
        signs = str(r.signs) if r.signs is not None else ""
        lines.append(
            f"{r.a.real:.17g},{r.a.imag:.17g},{r.preperiod},{r.period},{signs},"
            f"{r.multiplier.real:.17g},{r.multiplier.imag:.17g},"
            f"{r.w_prime.real:.17g},{r.w_prime.imag:.17g},"
            f"{r.mu.real:.17g},{r.mu.imag:.17g},{r.residual:.17g}")
    return "\n".join(lines) + "\n"


def load_report(path: str) -> MisiurewiczReport:
    with open(path, "r", encoding="ascii") as fh:
        return report_from_kv(fh.read())


def trend_verdict(curve: SimilarityCurve, pixel: float) -> bool:
    """Decreasing-trend criterion: every step may rise at most one pixel, the
    last distance must not exceed the first, and the curve must genuinely
    shrink (halve, or bottom out at the pixel floor). The last clause is what
    separates a converging curve from a mismatched flat one."""
    d = curve.distances
    steps_ok = all(d[k + 1] <= d[k] + pixel for k in range(len(d) - 1))
    shrunk = d[-1] <= max(0.5 * d[0], 2.0 * pixel)
    return steps_ok and d[-1] <= d[0] and shrunk


def _add_exponent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int, required=True, help="numerator exponent p")
    p.add_argument("--q", type=int, required=True, help="root order q (p > q >= 1)")


def _add_render_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--center", type=_complex_flag, required=True, metavar="RE,IM")
    p.add_argument("--width", type=float, required=True)
    p.add_argument("--px", type=int, required=True, help="pixels along the real axis")
    p.add_argument("--py", type=int, default=None, help="pixels along the imaginary axis")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--lambda-esc", type=float, default=2.0)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--merge-eps", type=float, default=None)
    p.add_argument("--branch-cap", type=int, default=4096)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--tiles", type=int, default=None)
    p.add_argument("--supersample", action="store_true")
    p.add_argument("--png", action="store_true", help="also write an 8-bit PNG view")
    p.add_argument("--out", required=True, help="output name (without extension)")


def _window(parser, args) -> Window:
    py = args.py if args.py is not None else args.px
    try:
        return Window(center=args.center, width=args.width, pixels_x=args.px, pixels_y=py)
    except ValueError as e:
        parser.error(str(e))


def _config_dict(args, extra: dict) -> dict:
    out = dict(extra)
    for key, value in vars(args).items():
        if key in ("func", "parser"):
            continue
        out[key.replace("_", "-")] = "" if value is None else value
    return out


def _emit_bitmap(bmp: Bitmap, args, config: dict) -> None:
    write_pgm(bmp, f"{args.out}.pgm")
    if args.png:
        write_png(bmp, f"{args.out}.png")
    _write_meta(f"{args.out}.meta", config)


def cmd_render_julia(parser, args) -> int:
    exp = Exponent(args.p, args.q)
    win = _window(parser, args)
    c_bound = abs(args.c)
    cfg = EscapeConfig.for_parameter(exp, c_bound, lambda_esc=args.lambda_esc,
                                     margin=args.margin, max_iter=args.max_iter,
                                     merge_eps=args.merge_eps, branch_cap=args.branch_cap)
    bmp = render_julia(args.c, exp, win, cfg, threads=args.threads, tiles=args.tiles,
                       supersample=args.supersample)
    _emit_bitmap(bmp, args, _config_dict(args, {
        "command": "render-julia", "radius": cfg.radius,
        "resolved-merge-eps": cfg.merge_eps, "pixels-y": win.pixels_y,
    }))
    return 0


def cmd_render_multibrot(parser, args) -> int:
    exp = Exponent(args.p, args.q)
    width = args.width
    magnify_factor = 1.0
    if args.magnify:
        if not args.report:
            parser.error("--magnify needs --report for the multiplier")
        report = load_report(args.report)
        magnify_factor = abs(report.multiplier) ** (-args.magnify)
        width = width * magnify_factor
    args.width = width
    win = _window(parser, args)
    cfg = EscapeConfig.for_parameter(exp, abs(args.center) + 0.75 * width,
                                     lambda_esc=args.lambda_esc, margin=args.margin,
                                     max_iter=args.max_iter, merge_eps=args.merge_eps,
                                     branch_cap=args.branch_cap)
    bmp = render_multibrot(exp, win, cfg, margin=args.margin, threads=args.threads,
                           tiles=args.tiles, supersample=args.supersample)
    _emit_bitmap(bmp, args, _config_dict(args, {
        "command": "render-multibrot", "magnify-factor": magnify_factor,
        "resolved-merge-eps": cfg.merge_eps, "pixels-y": win.pixels_y,
    }))
    return 0


def cmd_find_misiurewicz(parser, args) -> int:
    exp = Exponent(args.p, args.q)
    if args.signs is not None:
        if (exp.p, exp.q) != (4, 2):
            parser.error("--signs drives the exact recursion, which is specific to p=4 q=2")
        if args.preperiod is None or args.period is None:
            parser.error("--signs needs explicit --preperiod and --period")
        if any(ch not in "+-" for ch in args.signs):
            parser.error(f"invalid sign string {args.signs!r} (use '+' and '-')")
        try:
            seq = SignSequence.parse(args.signs, args.preperiod, args.period)
        except ValueError as e:
            parser.error(str(e))
        report = solve_misiurewicz_42(seq, args.guess)
    else:
        report = refine_misiurewicz_numeric(exp, args.guess, args.preperiod, args.period)
    text = report_to_kv(report)
    _write_text(args.out, text)
    _write_meta(f"{args.out}.meta", _config_dict(args, {"command": "find-misiurewicz"}))
    print(f"a = {_fmt(report.a)}")
    print(f"preperiod = {report.preperiod}  period = {report.period}")
    print(f"multiplier = {_fmt(report.multiplier)}  |multiplier| = {abs(report.multiplier):.17g}")
    print(f"w_prime = {_fmt(report.w_prime)}")
    print(f"mu = {_fmt(report.mu)}")
    print(f"residual = {report.residual:.3e}")
    return 0


def cmd_similarity(parser, args) -> int:
    if not os.path.exists(args.report):
        parser.error(f"report file {args.report!r} not found")
    report = load_report(args.report)
    exp = report.exponent
    r = args.r if args.r is not None else default_truncation_radius(report)
    k_max = args.k_max + 1  # CLI flag is the largest scale index
    cfg = EscapeConfig.for_parameter(exp, abs(report.a) * 1.05 + 0.1,
                                     max_iter=args.max_iter, branch_cap=args.branch_cap)
    pixel = 2.0 * r * 1.05 / args.px
    mu = args.mu_override if args.mu_override is not None else None

    summary = []
    config = _config_dict(args, {"command": "similarity", "resolved-r": r,
                                 "scaled-pixel": pixel, "curve-k-count": k_max})
    if args.mode in ("self", "both"):
        curve = rendered_self_curve(report.a, exp, report, args.about or report.a,
                                    r, k_max, args.px, cfg, threads=args.threads,
                                    band_pixels=args.band_pixels)
        _write_text(f"{args.out}.self.csv", curve.to_csv())
        verdict = "PASS" if trend_verdict(curve, pixel) else "FAIL"
        summary.append(f"self_similarity: {verdict}")
    if args.mode in ("cross", "both"):
        curve = rendered_cross_curve(report, r, k_max, args.px, cfg,
                                     threads=args.threads, mu=mu,
                                     band_pixels=args.band_pixels)
        _write_text(f"{args.out}.cross.csv", curve.to_csv())
        verdict = "PASS" if trend_verdict(curve, pixel) else "FAIL"
        summary.append(f"julia_vs_multibrot: {verdict}")
    _write_meta(f"{args.out}.meta", config)
    for line in summary:
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrdyn",
        description="escape-time dynamics and similarity curves for the "
                    "correspondence z -> (z^p)^(1/q) + c")
    sub = parser.add_subparsers(dest="command", required=True)

    pj = sub.add_parser("render-julia", help="raster the dynamical plane of one parameter")
    _add_exponent_flags(pj)
    pj.add_argument("--c", type=_complex_flag, required=True, metavar="RE,IM")
    _add_render_flags(pj)
    pj.set_defaults(func=cmd_render_julia)

    pm = sub.add_parser("render-multibrot", help="raster the parameter plane")
    _add_exponent_flags(pm)
    _add_render_flags(pm)
    pm.add_argument("--magnify", type=int, default=0,
                    help="shrink width by |multiplier|^k of the report")
    pm.add_argument("--report", default=None, help="report file for --magnify")
    pm.set_defaults(func=cmd_render_multibrot)

    pf = sub.add_parser("find-misiurewicz", help="locate a Misiurewicz parameter")
    _add_exponent_flags(pf)
    pf.add_argument("--guess", type=_complex_flag, required=True, metavar="RE,IM")
    pf.add_argument("--signs", default=None, help="sign pattern like ++- (p=4 q=2 only)")
    pf.add_argument("--preperiod", type=_auto_int, default=None, metavar="N|auto")
    pf.add_argument("--period", type=_auto_int, default=None, metavar="N|auto")
    pf.add_argument("--out", required=True, help="report file to write")
    pf.set_defaults(func=cmd_find_misiurewicz)

    ps = sub.add_parser("similarity", help="similarity curves about a Misiurewicz parameter")
    ps.add_argument("--report", required=True, help="report file from find-misiurewicz")
    ps.add_argument("--mode", choices=("self", "cross", "both"), default="both")
    ps.add_argument("--r", type=float, default=None, help="truncation radius (default: derived)")
    ps.add_argument("--k-max", type=int, default=3, help="largest magnification exponent")
    ps.add_argument("--px", type=int, default=1024, help="pixels per re-rendered scale")
    ps.add_argument("--about", type=_complex_flag, default=None, metavar="RE,IM")
    ps.add_argument("--mu-override", type=_complex_or_real_flag, default=None, metavar="MU")
    ps.add_argument("--max-iter", type=int, default=100)
    ps.add_argument("--branch-cap", type=int, default=4096)
    ps.add_argument("--band-pixels", type=float, default=1.0)
    ps.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ps.add_argument("--out", required=True, help="output name prefix")
    ps.set_defaults(func=cmd_similarity)

    for sp in (parser, pj, pm, pf, ps):
        sp._negative_number_matcher = _NEGATIVE_TOKEN
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except CorrDynError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
