"""Acceptance criteria, one test each, with a printed PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`. The heavy criteria re-render
the similarity ladders at 1024 x 1024 per scale, so the whole module takes a
few minutes on two cores.
"""

import time

import numpy as np
import pytest

from corrdyn.cli import main as cli_main
from corrdyn.core import EscapeConfig, Exponent, escape_radius
from corrdyn.misiurewicz import (
    SignSequence,
    refine_misiurewicz_numeric,
    solve_misiurewicz_42,
    sweep_misiurewicz_42,
)
from corrdyn.orbits import in_filled_julia
from corrdyn.raster import (
    PointCloud,
    Window,
    render_julia,
    render_julia_distance,
    render_multibrot,
    render_multibrot_distance,
)
from corrdyn.similarity import hausdorff_distance, koenigs_build

from oracles import (
    brute_force_hausdorff,
    classical_escape_dynamical_plane,
    classical_escape_parameter_plane,
)

E21 = Exponent(2, 1)
E42 = Exponent(4, 2)
E52 = Exponent(5, 2)

QUOTED_52 = -1.027124 + 1.141048j


def _verdict(num, ok, detail):
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile every jit kernel once so the timed criteria measure the
    algorithms, not the compiler."""
    cfg = EscapeConfig.for_parameter(E42, 2.2, max_iter=8)
    escape_radius(E42, 1.0, 2.0)
    in_filled_julia(0.1, -2, E42, cfg)
    win = Window(center=-2 + 0j, width=0.5, pixels_x=4, pixels_y=4)
    render_julia(-2, E42, win, cfg)
    render_multibrot(E42, win, cfg)
    render_julia_distance(-2, E42, win, cfg)
    render_multibrot_distance(E42, win, cfg)
    hausdorff_distance(PointCloud(points=np.array([0j])),
                       PointCloud(points=np.array([1j])))


@pytest.fixture(scope="module")
def report_path(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("acc") / "m2.report")
    code = cli_main(["find-misiurewicz", "--p", "4", "--q", "2", "--signs", "++",
                     "--preperiod", "2", "--period", "1", "--guess", "-2.1,0",
                     "--out", path])
    assert code == 0
    return path


@pytest.fixture(scope="module")
def self_curve_run(report_path, tmp_path_factory):
    """Criterion 6 artifact: the 1024^2-per-scale self-similarity CSV."""
    out = str(tmp_path_factory.mktemp("acc6") / "sim")
    t0 = time.perf_counter()
    code = cli_main(["similarity", "--report", report_path, "--mode", "self",
                     "--px", "1024", "--k-max", "3", "--threads", "2",
                     "--out", out])
    elapsed = time.perf_counter() - t0
    assert code == 0
    return out, elapsed


def _read_curve(path):
    lines = open(path).read().strip().split("\n")
    assert lines[0] == "k,scale_abs,d_hausdorff"
    return [float(line.split(",")[2]) for line in lines[1:]]


def test_criterion_1_exact_benchmark():
    t0 = time.perf_counter()
    report = solve_misiurewicz_42(SignSequence(signs=(1, 1), preperiod=2, period=1), -2.1)
    elapsed = time.perf_counter() - t0
    checks = {
        "a": abs(report.a - (-2)) <= 1e-12,
        "multiplier": abs(report.multiplier - 4) <= 1e-10,
        "w_prime": abs(report.w_prime - (-8)) <= 1e-8,
        "mu": abs(report.mu - 1.5) <= 1e-8,
        "runtime": elapsed < 1.0,
    }
    _verdict(1, all(checks.values()),
             f"|a+2|={abs(report.a + 2):.2e}, w'={report.w_prime}, mu={report.mu}, t={elapsed:.3f}s")
    assert checks["a"], f"|a + 2| = {abs(report.a + 2):.3e} > 1e-12"
    assert checks["multiplier"]
    assert checks["w_prime"]
    assert checks["mu"]
    assert checks["runtime"], f"took {elapsed:.2f}s"


def test_criterion_2_quoted_coordinate_recovery():
    t0 = time.perf_counter()
    report = refine_misiurewicz_numeric(E52, -1.027 + 1.141j)
    elapsed = time.perf_counter() - t0
    dist = abs(report.a - QUOTED_52)
    checks = {
        "residual": report.residual <= 1e-10,
        "distance": dist <= 1e-6,
        "repelling": abs(report.multiplier) > 1,
        "runtime": elapsed < 10.0,
    }
    _verdict(2, all(checks.values()),
             f"a={report.a:.9f}, residual={report.residual:.2e}, "
             f"|a-quoted|={dist:.3e}, |lam|={abs(report.multiplier):.3f}, t={elapsed:.2f}s")
    assert checks["residual"]
    assert checks["repelling"]
    assert checks["runtime"]
    # The quoted coordinate carries roughly four correct decimals: the
    # nearest genuinely preperiodic parameter of this family, per exhaustive
    # branch-pattern search through orbit depth 12, lies ~5e-6 away, and the
    # solver's root (the dominant local structure) lies 2.2e-4 away, so a
    # 1e-6 match against the quoted digits is not achievable.
    assert checks["distance"], (
        f"|a - quoted| = {dist:.3e} > 1e-6: no preperiodic parameter of the "
        f"family lies within 1e-6 of the quoted coordinate")


def test_criterion_3_transversality_sweep():
    t0 = time.perf_counter()
    reports = sweep_misiurewicz_42(5, 3, limit=24)
    elapsed = time.perf_counter() - t0
    floor = min(abs(r.w_prime) for r in reports)
    distinct = {(round(r.a.real, 9), round(r.a.imag, 9)) for r in reports}
    ok = len(distinct) >= 20 and floor >= 1e-8
    _verdict(3, ok, f"{len(distinct)} validated points, min |w'| = {floor:.3e}, t={elapsed:.0f}s")
    assert len(distinct) >= 20
    for r in reports:
        assert abs(r.w_prime) >= 1e-8, f"transversality floor violated at a={r.a}"


def test_criterion_4_single_branch_oracle():
    t0 = time.perf_counter()
    n, max_iter = 256, 500

    win = Window(center=-0.6 + 0j, width=3.2, pixels_x=n, pixels_y=n)
    cfg = EscapeConfig.for_parameter(E21, 2.3, max_iter=max_iter)
    bmp = render_multibrot(E21, win, cfg, threads=2)
    xl, yt, pw, ph = win.grid_params()
    ii, jj = np.meshgrid(np.arange(n), np.arange(n))
    centers = (xl + (ii + 0.5) * pw) + 1j * (yt - (jj + 0.5) * ph)
    radii = np.empty(centers.shape)
    for j in range(n):
        for i in range(n):
            radii[j, i] = escape_radius(E21, abs(centers[j, i]), 2.0, 0.05)
    inside_oracle, _ = classical_escape_parameter_plane(centers, radii, max_iter)
    param_rate = float((inside_oracle != (bmp.data == 0)).mean())

    win2 = Window(center=0j, width=3.6, pixels_x=n, pixels_y=n)
    cfg2 = EscapeConfig.for_parameter(E21, 1.0, max_iter=max_iter)
    bmp2 = render_julia(-1, E21, win2, cfg2, threads=2)
    xl, yt, pw, ph = win2.grid_params()
    z0 = (xl + (ii + 0.5) * pw) + 1j * (yt - (jj + 0.5) * ph)
    inside2, _ = classical_escape_dynamical_plane(z0, -1, cfg2.radius, max_iter)
    dyn_rate = float((inside2 != (bmp2.data == 0)).mean())

    elapsed = time.perf_counter() - t0
    ok = param_rate <= 0.005 and dyn_rate <= 0.005 and elapsed < 30
    _verdict(4, ok, f"disagreement parameter={param_rate:.5f}, "
                    f"dynamical={dyn_rate:.5f}, t={elapsed:.1f}s")
    assert param_rate <= 0.005
    assert dyn_rate <= 0.005
    assert elapsed < 30


def test_criterion_5_koenigs_functional_equation(report_m2):
    km = koenigs_build(report_m2, 0.5)
    lam = report_m2.multiplier
    rng = np.random.default_rng(2027)
    offsets = 0.25 * np.sqrt(rng.uniform(0, 1, 100)) * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    worst = 0.0
    for d in offsets:
        phi_d = km.phi_offset(d)
        res = abs(km.phi_offset(km.h_offset(d)) - lam * phi_d) / max(1.0, abs(phi_d))
        worst = max(worst, res)
    at_fixed = abs(km.phi(2.0))
    h = 1e-6
    slope = abs((km.phi(2.0 + h) - km.phi(2.0 - h)) / (2 * h) - 1)
    ok = worst <= 1e-8 and at_fixed <= 1e-12 and slope <= 1e-5
    _verdict(5, ok, f"worst residual={worst:.2e}, |phi(2)|={at_fixed:.2e}, "
                    f"|phi'(2)-1|={slope:.2e}")
    assert worst <= 1e-8
    assert at_fixed <= 1e-12
    assert slope <= 1e-5


def test_criterion_6_self_similarity_curve(self_curve_run):
    out, elapsed = self_curve_run
    distances = _read_curve(out + ".self.csv")
    meta = dict(line.split("=", 1) for line in open(out + ".meta").read().strip().split("\n"))
    pixel = float(meta["scaled-pixel"])
    steps_ok = all(distances[k + 1] <= distances[k] + pixel for k in range(3))
    net_ok = distances[3] <= distances[0]
    ok = steps_ok and net_ok and elapsed < 600
    _verdict(6, ok, f"d={['%.5f' % d for d in distances]}, pixel={pixel:.5f}, t={elapsed:.0f}s")
    assert steps_ok, f"curve rises by more than one pixel: {distances}"
    assert net_ok, f"no net decrease: {distances}"
    assert elapsed < 600


def test_criterion_7_multibrot_julia_similarity(report_path, tmp_path_factory):
    t0 = time.perf_counter()
    base = tmp_path_factory.mktemp("acc7")
    out = str(base / "cross")
    code = cli_main(["similarity", "--report", report_path, "--mode", "cross",
                     "--px", "1024", "--k-max", "3", "--threads", "2",
                     "--out", out])
    assert code == 0
    distances = _read_curve(out + ".cross.csv")
    meta = dict(line.split("=", 1) for line in open(out + ".meta").read().strip().split("\n"))
    pixel = float(meta["scaled-pixel"])
    steps_ok = all(distances[k + 1] <= distances[k] + pixel for k in range(3))
    net_ok = distances[3] <= distances[0]

    out_bad = str(base / "control")
    code = cli_main(["similarity", "--report", report_path, "--mode", "cross",
                     "--px", "1024", "--k-max", "3", "--threads", "2",
                     "--mu-override", "10", "--out", out_bad])
    assert code == 0
    bad = _read_curve(out_bad + ".cross.csv")
    control_fails = not (bad[3] <= max(0.5 * bad[0], 2 * pixel))

    elapsed = time.perf_counter() - t0
    ok = steps_ok and net_ok and control_fails and elapsed < 900
    _verdict(7, ok, f"d={['%.5f' % d for d in distances]}, "
                    f"control d={['%.5f' % d for d in bad]}, t={elapsed:.0f}s")
    assert steps_ok, f"curve rises by more than one pixel: {distances}"
    assert net_ok, f"no net decrease: {distances}"
    assert control_fails, f"mu-override control unexpectedly converged: {bad}"
    assert elapsed < 900


def test_criterion_8_hausdorff_against_brute_force():
    rng = np.random.default_rng(31337)
    t0 = time.perf_counter()
    for trial in range(500):
        na, nb = rng.integers(1, 201, 2)
        scale = rng.uniform(0.5, 3.0)
        pa = scale * (rng.normal(size=na) + 1j * rng.normal(size=na))
        pb = rng.normal(size=nb) + 1j * rng.normal(size=nb) + rng.normal() * (1 + 1j)
        a, b = PointCloud(points=pa), PointCloud(points=pb)
        got = hausdorff_distance(a, b)
        want = brute_force_hausdorff(pa, pb)
        assert got == want, f"trial {trial}: {got!r} != {want!r}"
        assert hausdorff_distance(b, a) == got
        assert hausdorff_distance(a, a) == 0.0
    elapsed = time.perf_counter() - t0
    _verdict(8, True, f"500 random pairs agree exactly, t={elapsed:.0f}s")


def test_criterion_9_thread_determinism(report_path, self_curve_run, tmp_path_factory):
    base = tmp_path_factory.mktemp("acc9")
    t0 = time.perf_counter()

    # criterion 4 artifacts: 256^2 renders, 1 vs 8 threads
    pgms = {}
    for threads in ("1", "8"):
        out = str(base / f"m21_t{threads}")
        cli_main(["render-multibrot", "--p", "2", "--q", "1", "--center", "-0.6,0",
                  "--width", "3.2", "--px", "256", "--max-iter", "500",
                  "--threads", threads, "--out", out])
        out2 = str(base / f"j21_t{threads}")
        cli_main(["render-julia", "--p", "2", "--q", "1", "--c", "-1,0",
                  "--center", "0,0", "--width", "3.6", "--px", "256",
                  "--max-iter", "500", "--threads", threads, "--out", out2])
        pgms[threads] = (open(out + ".pgm", "rb").read(), open(out2 + ".pgm", "rb").read())
    pgm_ok = pgms["1"] == pgms["8"]

    # criterion 6 artifact: the similarity CSV, 1 vs 8 threads (and the
    # 2-thread module run)
    csvs = {}
    for threads in ("1", "8"):
        out = str(base / f"self_t{threads}")
        cli_main(["similarity", "--report", report_path, "--mode", "self",
                  "--px", "1024", "--k-max", "3", "--threads", threads,
                  "--out", out])
        csvs[threads] = open(out + ".self.csv", "rb").read()
    reference = open(self_curve_run[0] + ".self.csv", "rb").read()
    csv_ok = csvs["1"] == csvs["8"] == reference

    elapsed = time.perf_counter() - t0
    _verdict(9, pgm_ok and csv_ok, f"PGM identical: {pgm_ok}, CSV identical: {csv_ok}, "
                                   f"t={elapsed:.0f}s")
    assert pgm_ok
    assert csv_ok
