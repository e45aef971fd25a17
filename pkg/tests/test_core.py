import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrdyn.core import (
    EscapeConfig,
    Exponent,
    branch_derivative,
    branch_nearest,
    escape_radius,
    forward_images,
)
from corrdyn.errors import CorrDynError

from oracles import tracked_branch_fd

E21 = Exponent(2, 1)
E42 = Exponent(4, 2)
E52 = Exponent(5, 2)


class TestExponent:
    def test_degree(self):
        assert E52.r == 2.5

    @pytest.mark.parametrize("p,q", [(2, 2), (1, 2), (0, 1), (65, 1)])
    def test_rejects_bad_pairs(self, p, q):
        with pytest.raises(ValueError):
            Exponent(p, q)

    def test_not_reduced(self):
        # (4,2) stays a two-branch correspondence, never collapses to (2,1)
        assert len(forward_images(1.0, 0.0, E42)) == 2
        assert len(forward_images(1.0, 0.0, E21)) == 1


class TestForwardImages:
    def test_critical_point_single_image(self):
        assert forward_images(0, 0.3 + 0.1j, E52) == [0.3 + 0.1j]

    def test_square_roots_of_one(self):
        assert forward_images(1, 0, E42) == [1 + 0j, -1 + 0j]

    def test_hand_example(self):
        assert forward_images(2, -2, E42) == [2 + 0j, -6 + 0j]

    def test_branch_count(self):
        for exp in (E21, E42, E52, Exponent(7, 3)):
            assert len(forward_images(0.7 - 0.2j, 0.1j, exp)) == exp.q
            assert len(forward_images(0, 0.1j, exp)) == 1

    @given(st.complex_numbers(max_magnitude=2.0, min_magnitude=1e-3,
                              allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
           st.sampled_from([(2, 1), (4, 2), (5, 2), (3, 2), (7, 3), (9, 4)]))
    @settings(max_examples=150, deadline=None)
    def test_defining_equation_residual(self, z, c, pq):
        exp = Exponent(*pq)
        zp = z ** exp.p
        for w in forward_images(z, c, exp):
            assert abs((w - c) ** exp.q - zp) <= 1e-10 * max(1.0, abs(zp))

    def test_principal_argument_on_negative_axis(self):
        # arg in (-pi, pi]: both signed zeros of the imaginary part act alike
        assert forward_images(complex(-1.0, 0.0), 0, E52) == \
            forward_images(complex(-1.0, -0.0), 0, E52)


class TestBranchDerivative:
    def test_plus_branch(self):
        assert branch_derivative(2, 2, -2, E42) == 4

    def test_classical_square(self):
        assert branch_derivative(3, 9 + 0.5j, 0.5j, E21) == 6

    def test_minus_branch(self):
        assert branch_derivative(2, -6, -2, E42) == -4

    def test_rejects_critical_point(self):
        with pytest.raises(CorrDynError):
            branch_derivative(0, 1, 1, E42)

    @pytest.mark.parametrize("exp,z,c", [
        (E42, 1.3 - 0.4j, -1.1 + 0.2j),
        (E52, 0.8 + 0.9j, -1.0 + 1.1j),
        (Exponent(7, 3), 1.1 + 0.1j, 0.3 - 0.2j),
    ])
    def test_matches_tracked_finite_difference(self, exp, z, c):
        for w in forward_images(z, c, exp):
            fd = tracked_branch_fd(z, c, exp, w)
            an = branch_derivative(z, w, c, exp)
            assert abs(fd - an) <= 1e-5 * abs(an)


class TestEscapeRadius:
    def test_pure_square(self):
        assert escape_radius(E21, 0.0, 2.0, 0.0) == pytest.approx(2.0, rel=1e-11)

    def test_quadratic_root(self):
        assert escape_radius(E42, 2.0, 2.0, 0.0) == pytest.approx(1 + math.sqrt(3), rel=1e-11)

    def test_same_equation_for_equal_degree(self):
        assert escape_radius(E21, 2.0, 2.0, 0.0) == pytest.approx(1 + math.sqrt(3), rel=1e-11)

    def test_margin(self):
        assert escape_radius(E21, 0.0, 2.0, 0.05) == pytest.approx(2.1, rel=1e-11)

    def test_monotone_in_c_bound_and_lambda(self):
        for exp in (E21, E42, E52):
            radii = [escape_radius(exp, cb, 2.0, 0.0) for cb in np.linspace(0, 4, 9)]
            assert all(r2 >= r1 for r1, r2 in zip(radii, radii[1:]))
            radii = [escape_radius(exp, 1.0, lam, 0.0) for lam in np.linspace(1.1, 4, 9)]
            assert all(r2 >= r1 for r1, r2 in zip(radii, radii[1:]))

    def test_large_c_bound_bracket(self):
        # bound beyond the root: g(max(1, c_bound)) > 0, root still found
        r = escape_radius(E21, 4.0, 2.0, 0.0)
        assert r == pytest.approx(1 + math.sqrt(5), rel=1e-11)

    def test_exterior_forward_invariance(self):
        rng = np.random.default_rng(2024)
        for exp in (E21, E42, E52):
            c_bound = 2.0
            R = escape_radius(exp, c_bound, 2.0, 0.05)
            for _ in range(1000):
                z = (R + rng.uniform(1e-6, 2 * R)) * np.exp(2j * np.pi * rng.uniform())
                c = c_bound * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                for w in forward_images(complex(z), complex(c), exp):
                    assert abs(w) > abs(z)


class TestBranchNearest:
    def test_prefers_plus_branch(self):
        w, k = branch_nearest(2, -2, E42, 2.1)
        assert w == 2 and k == 0

    def test_prefers_minus_branch(self):
        w, k = branch_nearest(1, 0, E42, -0.9)
        assert w == -1 and k == 1

    def test_single_branch(self):
        assert branch_nearest(1, 1, E21, 0) == (2 + 0j, 0)

    def test_tie_breaks_to_smallest_index(self):
        # target c is equidistant from both images c +- z^2
        _, k = branch_nearest(1.0 + 0.5j, 0.3, E42, 0.3)
        assert k == 0

    def test_rejects_critical_point(self):
        with pytest.raises(CorrDynError):
            branch_nearest(0, 1, E42, 1)


class TestEscapeConfig:
    def test_factory_radius_valid(self):
        cfg = EscapeConfig.for_parameter(E42, 2.0)
        assert cfg.radius > 1 + math.sqrt(3)
        assert cfg.merge_eps == pytest.approx(cfg.radius * 1e-9)

    def test_merge_eps_bound(self):
        with pytest.raises(ValueError):
            EscapeConfig(lambda_esc=2.0, radius=2.0, max_iter=10,
                         merge_eps=0.001, branch_cap=16)

    def test_rejects_non_expanding_lambda(self):
        with pytest.raises(ValueError):
            EscapeConfig(lambda_esc=1.0, radius=2.0, max_iter=10,
                         merge_eps=1e-9, branch_cap=16)
