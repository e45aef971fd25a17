"""Misiurewicz parameter solvers.

For the exponent pair (4, 2) the correspondence is the two-branch semigroup
{z^2 + c, -z^2 + c}; a sign sequence sigma_1..sigma_(L+n-1) drives the exact
polynomial recursion

    F_1(c) = c,   F_(j+1)(c) = sigma_j * F_j(c)^2 + c,

and a Misiurewicz parameter of type (preperiod L, period n) is a root of
w(c) = F_(L+n)(c) - F_L(c). The derivative recursion F'_(j+1) = 2 sigma_j
F_j F'_j + 1 feeds Newton, the cycle multiplier, the transversality
derivative w'(a) and the model-matching constant mu = g'(a) / u'(a) with
u'(a) = w'(a) / (multiplier - 1).

For general exponents the same quantities are computed numerically: the
orbit is tracked by nearest-image continuation against a reference orbit
detected by the escape engine, and derivatives come from central
differences and branch-derivative products.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .core import EscapeConfig, Exponent, branch_derivative, branch_nearest, forward_images
from .errors import (
    BranchJump,
    NoConvergence,
    NotMinimal,
    NotRepelling,
    NotStrictlyPreperiodic,
    PatternMismatch,
    ResidualTooLarge,
    UniquenessFailed,
)
from .orbits import BoundedOrbit, unique_bounded_orbit

NEWTON_TOL = 1e-13
NEWTON_STEP_TOL = 1e-14
NEWTON_MAX_ITER = 64
MINIMALITY_TOL = 1e-9
RESIDUAL_TOL = 1e-10
SIGN_MATCH_TOL = 1e-6

# membership depths tried when certifying an orbit against the escape engine;
# deep certification only works once the parameter error is small, so the
# largest depth that succeeds wins
DETECT_LADDER = (8, 11, 14, 18, 24, 32, 44, 60, 80, 110, 150)


@dataclass(frozen=True)
class SignSequence:
    """Branch signs sigma_1..sigma_(preperiod+period-1) for the (4,2) recursion."""

    signs: tuple[int, ...]
    preperiod: int
    period: int

    def __post_init__(self):
        if self.preperiod < 2:
            raise ValueError("preperiod must be >= 2 (the critical value is never periodic)")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if len(self.signs) != self.preperiod + self.period - 1:
            raise ValueError("need preperiod + period - 1 signs")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +-1")

    @classmethod
    def parse(cls, text: str, preperiod: int, period: int) -> "SignSequence":
        table = {"+": 1, "-": -1}
        try:
            signs = tuple(table[ch] for ch in text)
        except KeyError:
            raise ValueError(f"invalid sign string {text!r} (use '+' and '-')") from None
        return cls(signs=signs, preperiod=preperiod, period=period)

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


@dataclass(frozen=True)
class MisiurewiczReport:
    """A validated Misiurewicz parameter with its derived constants."""

    a: complex
    exponent: Exponent
    preperiod: int
    period: int
    signs: SignSequence | None
    orbit: tuple[complex, ...]
    multiplier: complex
    w_prime: complex
    u_prime: complex
    g_prime: complex
    mu: complex
    residual: float


def f_poly_eval(c: complex, s: SignSequence, j: int) -> tuple[complex, complex]:
    """(F_j(c), F_j'(c)) by the sign-driven recursion."""
    if not 1 <= j <= s.preperiod + s.period:
        raise ValueError(f"j must lie in [1, {s.preperiod + s.period}]")
    f, fp = complex(c), 1 + 0j
    for t in range(1, j):
        sigma = s.signs[t - 1]
        f, fp = sigma * f * f + c, 2.0 * sigma * f * fp + 1.0
    return f, fp


def _w_eval(c: complex, s: SignSequence) -> tuple[complex, complex]:
    """(w(c), w'(c)) with w = F_(L+n) - F_L; one pass of the recursion."""
    lc, n = s.preperiod, s.period
    f, fp = complex(c), 1 + 0j
    fl = flp = None
    for t in range(1, lc + n):
        if t == lc:
            fl, flp = f, fp
        sigma = s.signs[t - 1]
        f, fp = sigma * f * f + c, 2.0 * sigma * f * fp + 1.0
    return f - fl, fp - flp


def w_poly_coeffs(s: SignSequence) -> list[int]:
    """Exact integer coefficients (ascending) of w(c) = F_(L+n)(c) - F_L(c)."""
    lc, n = s.preperiod, s.period
    poly = [0, 1]
    target = None
    for t in range(1, lc + n):
        if t == lc:
            target = list(poly)
        sigma = s.signs[t - 1]
        sq = [0] * (2 * len(poly) - 1)
        for i, a in enumerate(poly):
            if a == 0:
                continue
            for j2, b in enumerate(poly):
                sq[i + j2] += sigma * a * b
        sq[1] += 1
        poly = sq
    out = list(poly)
    for i, v in enumerate(target):
        out[i] -= v
    return out


def multiplier_42(a: complex, s: SignSequence) -> complex:
    """Cycle multiplier prod_(j=L..L+n-1) 2 sigma_j F_j(a)."""
    _check_residual(a, s)
    lam = 1 + 0j
    for j in range(s.preperiod, s.preperiod + s.period):
        fj, _ = f_poly_eval(a, s, j)
        lam *= 2.0 * s.signs[j - 1] * fj
    if abs(lam) <= 1.0:
        raise NotRepelling(f"cycle multiplier {lam} has modulus <= 1")
    return lam


def transversality_42(a: complex, s: SignSequence) -> complex:
    """w'(a) = F'_(L+n)(a) - F'_L(a); nonvanishing is the transversality condition."""
    _check_residual(a, s)
    _, w_prime = _w_eval(a, s)
    return w_prime


def mu_constant_42(a: complex, s: SignSequence) -> tuple[complex, complex, complex]:
    """(g'(a), u'(a), mu) with g' the branch derivative product over the
    preperiodic leg, u' = w'(a)/(multiplier - 1) and mu = g'/u'."""
    lam = multiplier_42(a, s)
    w_prime = transversality_42(a, s)
    g_prime = 1 + 0j
    for j in range(1, s.preperiod):
        fj, _ = f_poly_eval(a, s, j)
        g_prime *= 2.0 * s.signs[j - 1] * fj
    u_prime = w_prime / (lam - 1.0)
    return g_prime, u_prime, g_prime / u_prime


def _check_residual(a: complex, s: SignSequence, tol: float = RESIDUAL_TOL) -> None:
    w, _ = _w_eval(a, s)
    if abs(w) > tol:
        raise ResidualTooLarge(f"|w(a)| = {abs(w):.3e} exceeds {tol:.0e}")


def recover_signs(orbit: BoundedOrbit, c: complex) -> SignSequence:
    """Read the sign pattern off an engine-detected (4,2) orbit.

    sigma_j = +1 iff z_(j+1) - c matches z_j^2 within 1e-6 * max(1, |z_j|^2).
    """
    pts = orbit.points
    signs = []
    for j in range(1, orbit.preperiod + orbit.period):
        zj, znext = pts[j], pts[j + 1]
        scale = max(1.0, abs(zj) ** 2)
        if abs(znext - c - zj * zj) <= SIGN_MATCH_TOL * scale:
            signs.append(1)
        elif abs(znext - c + zj * zj) <= SIGN_MATCH_TOL * scale:
            signs.append(-1)
        else:
            raise PatternMismatch(f"orbit step {j} matches neither branch of +-z^2 + c")
    return SignSequence(signs=tuple(signs), preperiod=orbit.preperiod, period=orbit.period)


def detect_orbit(exp: Exponent, c0: complex, cfg: EscapeConfig,
                 horizon: int = 64) -> BoundedOrbit:
    """Engine detection of the bounded critical orbit at c0.

    Runs the uniqueness test at increasing membership depths and keeps the
    deepest success: shallow depths cannot tell survivors apart, while depths
    beyond the parameter accuracy kill the orbit shadow entirely.
    """
    best = None
    for depth in DETECT_LADDER:
        if depth > cfg.max_iter:
            break
        probe = replace(cfg, max_iter=depth)
        try:
            orbit = unique_bounded_orbit(0, c0, exp, probe, horizon=horizon)
        except Exception:
            orbit = None
        if orbit is not None and orbit.preperiod >= 2:
            best = orbit
    if best is None:
        raise UniquenessFailed(f"no unique strictly preperiodic critical orbit detected at {c0}")
    return best


def _propose_types(exp: Exponent, c0: complex, cfg: EscapeConfig,
                   horizon: int) -> list[tuple[int, int, tuple[complex, ...]]]:
    """Orbit types guessed from near-recurrences of the greedy orbit shadow.

    Used when the guess is close to, but not on, a Misiurewicz parameter, so
    that no true closure exists to detect. Earliest closures come first: a
    chaotic shadow revisits itself ever more closely at long horizons, so the
    global minimum is meaningless. Every proposal is verified strictly after
    Newton has converged.
    """
    from .orbits import _Workspace, in_filled_julia

    ws = _Workspace(exp, cfg)
    pts = [0j, complex(c0)]
    for _ in range(min(horizon, 32)):
        images = forward_images(pts[-1], c0, exp)
        best = None
        for w in images:
            verdict = in_filled_julia(w, c0, exp, cfg, _ws=ws)
            score = cfg.max_iter + 1 if verdict.inside else verdict.steps
            if best is None or score > best[0]:
                best = (score, w)
        if abs(best[1]) > cfg.radius:
            break
        pts.append(best[1])
    pairs = []
    for j in range(3, len(pts)):
        for i in range(2, j):
            d = abs(pts[j] - pts[i])
            if d <= 0.05 * max(1.0, abs(pts[i])):
                pairs.append((j, d, i))
    pairs.sort()
    if not pairs:
        raise UniquenessFailed(f"no near-recurrence in the critical orbit shadow at {c0}")
    return [(i, j - i, tuple(pts[:j + 1])) for j, _, i in pairs[:6]]


def _default_cfg(exp: Exponent, c0: complex) -> EscapeConfig:
    return EscapeConfig.for_parameter(exp, abs(c0) * 1.05 + 0.1, max_iter=200)


def _validate_report_42(a: complex, s: SignSequence, cfg: EscapeConfig | None,
                        engine_check: bool = True,
                        detect_cache: dict | None = None) -> MisiurewiczReport:
    lc, n = s.preperiod, s.period
    w, w_prime = _w_eval(a, s)
    if abs(w) > RESIDUAL_TOL:
        raise ResidualTooLarge(f"|w(a)| = {abs(w):.3e}")
    values = [f_poly_eval(a, s, j)[0] for j in range(1, lc + n + 1)]
    orbit = (0j, *values)

    for lc2 in range(2, lc):
        if abs(values[lc2 + n - 1] - values[lc2 - 1]) <= MINIMALITY_TOL:
            raise NotMinimal(f"preperiod {lc} is not minimal (closes already at {lc2})")
    for n2 in range(1, n):
        if n % n2 == 0 and abs(values[lc + n2 - 1] - values[lc - 1]) <= MINIMALITY_TOL:
            raise NotMinimal(f"period {n} is not minimal (divisor {n2} closes)")
    # the difference factor F_(L+n-1) - F_(L-1) must not vanish, and the cycle
    # must avoid the critical point (a critical cycle is super-attracting)
    if abs(values[lc + n - 2] - values[lc - 2]) <= MINIMALITY_TOL:
        raise NotStrictlyPreperiodic("critical orbit is periodic, not strictly preperiodic")
    for j in range(lc, lc + n):
        if abs(values[j - 1]) <= MINIMALITY_TOL:
            raise NotStrictlyPreperiodic("cycle passes through the critical point")

    if engine_check:
        check_cfg = cfg if cfg is not None else _default_cfg(Exponent(4, 2), a)
        cache_key = (round(a.real, 12), round(a.imag, 12))
        detected = detect_cache.get(cache_key) if detect_cache is not None else None
        if detected is None:
            try:
                detected = detect_orbit(Exponent(4, 2), a, check_cfg)
            except UniquenessFailed as e:
                detected = e
            if detect_cache is not None:
                detect_cache[cache_key] = detected
        if isinstance(detected, Exception):
            raise detected
        if (detected.preperiod, detected.period) != (lc, n):
            raise PatternMismatch(
                f"engine detected type ({detected.preperiod}, {detected.period}), expected ({lc}, {n})")
        if recover_signs(detected, a).signs != s.signs:
            raise PatternMismatch("engine-detected sign pattern differs from the requested one")

    lam = 1 + 0j
    for j in range(lc, lc + n):
        lam *= 2.0 * s.signs[j - 1] * values[j - 1]
    if abs(lam) <= 1.0:
        raise NotRepelling(f"multiplier {lam} not repelling")
    g_prime = 1 + 0j
    for j in range(1, lc):
        g_prime *= 2.0 * s.signs[j - 1] * values[j - 1]
    u_prime = w_prime / (lam - 1.0)
    return MisiurewiczReport(a=a, exponent=Exponent(4, 2), preperiod=lc, period=n,
                             signs=s, orbit=orbit, multiplier=lam, w_prime=w_prime,
                             u_prime=u_prime, g_prime=g_prime, mu=g_prime / u_prime,
                             residual=abs(w))


def _newton_42(s: SignSequence, c0: complex) -> complex:
    c = complex(c0)
    for _ in range(NEWTON_MAX_ITER):
        w, wp = _w_eval(c, s)
        if abs(w) <= NEWTON_TOL:
            return c
        if wp == 0:
            break
        step = w / wp
        c -= step
        if abs(step) <= NEWTON_STEP_TOL:
            w, _ = _w_eval(c, s)
            if abs(w) <= NEWTON_TOL:
                return c
            break
    raise NoConvergence(f"Newton did not reach |w| <= {NEWTON_TOL:.0e} from {c0}")


def solve_misiurewicz_42(s: SignSequence, c0: complex, *, cfg: EscapeConfig | None = None,
                         search_on_failure: bool = True) -> MisiurewiczReport:
    """Newton solve of the (4,2) Misiurewicz condition for sign sequence s.

    If the converged root fails validation (wrong sign pattern, period not
    minimal, critical cycle, ...) and search_on_failure is set, every sign
    sequence of the same length is tried from the same guess and the
    validated root closest to c0 is returned.
    """
    try:
        a = _newton_42(s, c0)
        return _validate_report_42(a, s, cfg)
    except Exception as primary:
        if not search_on_failure:
            raise
        candidates = []
        for signs in itertools.product((1, -1), repeat=len(s.signs)):
            trial = SignSequence(signs=signs, preperiod=s.preperiod, period=s.period)
            try:
                a = _newton_42(trial, c0)
                report = _validate_report_42(a, trial, cfg)
            except Exception:
                continue
            candidates.append((abs(report.a - c0), str(trial), report))
        if not candidates:
            raise NoConvergence(
                f"no validated root for any length-{len(s.signs)} sign pattern from {c0}"
            ) from primary
        candidates.sort(key=lambda t: (t[0], t[1]))
        return candidates[0][2]


def sweep_misiurewicz_42(max_preperiod: int = 5, max_period: int = 3, *,
                         cfg: EscapeConfig | None = None,
                         limit: int | None = None) -> list[MisiurewiczReport]:
    """Validated (4,2) Misiurewicz points with preperiod <= max_preperiod and
    period <= max_period, deduplicated, visited in order of growing orbit
    length (stop after `limit` accepted points when given).

    Seeds are the roots of the exact difference polynomials, polished by
    Newton on the recursion.
    """
    accepted: dict = {}
    rejected: set = set()
    detect_cache: dict = {}
    for total in range(3, max_preperiod + max_period + 1):
        for lc in range(2, max_preperiod + 1):
            n = total - lc
            if not 1 <= n <= max_period:
                continue
            for signs in itertools.product((1, -1), repeat=lc + n - 1):
                s = SignSequence(signs=signs, preperiod=lc, period=n)
                coeffs = np.array(w_poly_coeffs(s), dtype=float)
                roots = np.polynomial.polynomial.Polynomial(coeffs).roots()
                for seed in sorted(roots, key=lambda z: (z.real, z.imag)):
                    if abs(seed) > 3.0:
                        continue
                    try:
                        a = _newton_42(s, complex(seed))
                    except NoConvergence:
                        continue
                    key = (round(a.real, 9), round(a.imag, 9))
                    if key in accepted or (key, signs, lc, n) in rejected:
                        continue
                    try:
                        report = _validate_report_42(a, s, cfg, detect_cache=detect_cache)
                    except Exception:
                        rejected.add((key, signs, lc, n))
                        continue
                    accepted[key] = report
                    if limit is not None and len(accepted) >= limit:
                        return sorted(accepted.values(), key=lambda r: (r.a.real, r.a.imag))
    return sorted(accepted.values(), key=lambda r: (r.a.real, r.a.imag))


def _greedy_orbit(c: complex, length: int, exp: Exponent, cfg: EscapeConfig) -> tuple[complex, ...]:
    """Reference orbit picked by deepest escape step at every branch choice.

    Fallback for guesses whose orbit shadow never recurs to closure tolerance
    (detection needs an actually preperiodic parameter nearby); with the orbit
    type supplied by the caller this still pins down Newton's target."""
    from .orbits import _Workspace, in_filled_julia

    ws = _Workspace(exp, cfg)
    pts = [0j, complex(c)]
    for _ in range(1, length):
        images = forward_images(pts[-1], c, exp)
        best = None
        for w in images:
            verdict = in_filled_julia(w, c, exp, cfg, _ws=ws)
            score = cfg.max_iter + 1 if verdict.inside else verdict.steps
            if best is None or score > best[0]:
                best = (score, w)
        pts.append(best[1])
    return tuple(pts)


def _track_orbit(c: complex, ref: tuple[complex, ...], exp: Exponent,
                 merge_eps: float) -> list[complex]:
    """Critical orbit at c continued branch-wise against the reference orbit."""
    pts = [0j, complex(c)]
    guard = 10.0 * merge_eps
    for j in range(1, len(ref) - 1):
        images = forward_images(pts[j], c, exp)
        near = sum(1 for w in images if abs(w - ref[j + 1]) <= guard)
        if near >= 2:
            raise BranchJump(f"two images within {guard:.2e} of the reference at step {j}")
        w, _ = branch_nearest(pts[j], c, exp, ref[j + 1])
        pts.append(w)
    return pts


def refine_misiurewicz_numeric(exp: Exponent, c0: complex, preperiod: int | None = None,
                               period: int | None = None, cfg: EscapeConfig | None = None, *,
                               horizon: int = 64, fd_step: float = 1e-7) -> MisiurewiczReport:
    """Newton refinement of a Misiurewicz parameter for a general exponent.

    The bounded critical orbit is detected by the escape engine at c0 and
    then tracked by nearest-image continuation; Newton drives
    W(c) = z_(L+n)(c) - z_L(c) to zero with central-difference derivatives.
    The multiplier and the constant mu come from branch-derivative products
    along the refined orbit.
    """
    if cfg is None:
        cfg = _default_cfg(exp, c0)
    detected = None
    try:
        detected = detect_orbit(exp, c0, cfg, horizon=horizon)
    except UniquenessFailed:
        pass
    if detected is not None:
        if preperiod is not None and detected.preperiod != preperiod:
            raise UniquenessFailed(
                f"detected preperiod {detected.preperiod}, expected {preperiod}")
        if period is not None and detected.period != period:
            raise UniquenessFailed(f"detected period {detected.period}, expected {period}")
        candidates = [(detected.preperiod, detected.period, detected.points)]
    elif preperiod is not None and period is not None:
        candidates = [(preperiod, period, _greedy_orbit(c0, preperiod + period, exp, cfg))]
    else:
        candidates = [(lc, n, ref) for lc, n, ref in _propose_types(exp, c0, cfg, horizon)
                      if (preperiod is None or lc == preperiod)
                      and (period is None or n == period)]
        if not candidates:
            raise UniquenessFailed(f"no orbit proposal matches the requested type at {c0}")
    err: Exception | None = None
    for lc, n, ref in candidates:
        try:
            return _refine_candidate(exp, c0, lc, n, ref, cfg, horizon, fd_step)
        except Exception as e:
            err = e
    raise err


def _refine_candidate(exp: Exponent, c0: complex, lc: int, n: int,
                      ref: tuple[complex, ...], cfg: EscapeConfig,
                      horizon: int, fd_step: float) -> MisiurewiczReport:
    if lc < 2:
        raise NotStrictlyPreperiodic("critical value lies on the cycle at c0")

    def w_of(c: complex) -> complex:
        pts = _track_orbit(c, ref, exp, cfg.merge_eps)
        return pts[lc + n] - pts[lc]

    c = complex(c0)
    converged = False
    for _ in range(NEWTON_MAX_ITER):
        w = w_of(c)
        if abs(w) <= 1e-12:
            converged = True
            break
        wp = (w_of(c + fd_step) - w_of(c - fd_step)) / (2.0 * fd_step)
        if wp == 0:
            break
        step = w / wp
        c -= step
        if abs(step) <= NEWTON_STEP_TOL:
            converged = abs(w_of(c)) <= 1e-12
            break
    if not converged:
        raise NoConvergence(f"orbit-closure Newton stalled at |W| = {abs(w_of(c)):.3e}")
    a = c

    check = detect_orbit(exp, a, cfg, horizon=horizon)
    if (check.preperiod, check.period) != (lc, n):
        raise UniquenessFailed(
            f"type changed during refinement: ({check.preperiod}, {check.period}) at the root")

    pts = _track_orbit(a, ref, exp, cfg.merge_eps)
    lam = 1 + 0j
    for j in range(lc, lc + n):
        lam *= branch_derivative(pts[j], pts[j + 1], a, exp)
    if abs(lam) <= 1.0:
        raise NotRepelling(f"multiplier {lam} not repelling")
    w_prime = (w_of(a + fd_step) - w_of(a - fd_step)) / (2.0 * fd_step)
    g_prime = 1 + 0j
    for j in range(1, lc):
        g_prime *= branch_derivative(pts[j], pts[j + 1], a, exp)
    u_prime = w_prime / (lam - 1.0)

    signs = None
    if exp.p == 4 and exp.q == 2:
        try:
            signs = recover_signs(check, a)
        except PatternMismatch:
            signs = None
    return MisiurewiczReport(a=a, exponent=exp, preperiod=lc, period=n, signs=signs,
                             orbit=tuple(pts), multiplier=lam, w_prime=w_prime,
                             u_prime=u_prime, g_prime=g_prime, mu=g_prime / u_prime,
                             residual=abs(w_of(a)))
