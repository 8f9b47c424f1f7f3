import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings

from helpers import TABLE_1, ratios_le_one
from pi_collisions import (
    MassRatio,
    PhasePoint,
    VelocityPair,
    collide_blocks,
    reflect_wall,
    to_phase,
    matrix_Mprime,
    predict_count,
    rotation_angle,
    run,
    verify_rotation_equivalence,
)
from pi_collisions import analytic
from pi_collisions.analytic import BoundaryFlag
from pi_collisions.errors import AmbiguousBoundaryError


def brute_force_count(ratio, turns_dps=60):
    """Count half-angle steps that fit strictly below pi, stepping one at a time."""
    with mpmath.workdps(turns_dps):
        half = mpmath.atan(mpmath.sqrt(mpmath.mpf(ratio.p) / ratio.q))
        n = 0
        while (n + 1) * half < mpmath.pi - mpmath.mpf(10) ** (10 - turns_dps):
            n += 1
        return n


class TestRotationAngle:
    def test_equal_masses(self):
        assert rotation_angle(MassRatio(1, 1)).theta == pytest.approx(math.pi / 2, abs=4 * math.ulp(1.0))

    def test_hundredth(self):
        with mpmath.workdps(40):
            ref = float(mpmath.acos(mpmath.mpf(99) / 101))
        model = rotation_angle(MassRatio(1, 100))
        assert model.theta == pytest.approx(0.199337, abs=1e-6)
        assert model.theta == pytest.approx(ref, rel=1e-15)
        assert model.half_theta_tan == pytest.approx(0.1)
        assert model.turns_to_pi == pytest.approx(2 * math.pi / model.theta)

    def test_cosine_forms_agree(self):
        rng = random.Random(314)
        for _ in range(1000):
            q = rng.randint(1, 10**rng.randint(1, 12))
            ratio = MassRatio(rng.randint(1, q), q)
            model = rotation_angle(ratio)
            expected = float(Fraction(ratio.q - ratio.p, ratio.q + ratio.p))
            assert abs(math.cos(model.theta) - expected) <= 4 * math.ulp(1.0)
            assert 0 < model.theta <= math.pi / 2

    def test_rejects_alpha_above_one(self):
        with pytest.raises(ValueError):
            rotation_angle(MassRatio(2, 1))

    def test_matches_Mprime_angle(self):
        ratio = MassRatio(7, 1234)
        Mp = matrix_Mprime(ratio)
        assert math.atan2(Mp.a21, Mp.a11) == pytest.approx(rotation_angle(ratio).theta, rel=1e-15)


class TestPredictCount:
    def test_equal_masses_boundary(self):
        pred = predict_count(MassRatio(1, 1))
        assert pred.n_exact_formula == 3
        assert pred.n_paper_floor == 4
        assert pred.n_sqrt_approx == 3
        assert pred.boundary_flag is BoundaryFlag.NEAR_INTEGER

    def test_one_third_boundary(self):
        # pi/atan(1/sqrt 3) = 6 exactly
        pred = predict_count(MassRatio(1, 3))
        assert (pred.n_exact_formula, pred.n_paper_floor) == (5, 6)
        assert run(MassRatio(1, 3), "exact").count == 5

    @pytest.mark.parametrize("ratio,expected", TABLE_1)
    def test_table(self, ratio, expected):
        pred = predict_count(ratio)
        assert pred.n_exact_formula == expected
        assert pred.n_sqrt_approx == expected
        expected_flag = BoundaryFlag.NEAR_INTEGER if ratio.alpha == 1 else BoundaryFlag.INTERIOR
        assert pred.boundary_flag is expected_flag

    def test_sqrt_approx_hundredth(self):
        assert predict_count(MassRatio(1, 100)).n_sqrt_approx == math.floor(10 * math.pi) == 31

    @settings(max_examples=200, deadline=None)
    @given(ratios_le_one(max_q=10**5))
    def test_exact_formula_vs_floor(self, ratio):
        pred = predict_count(ratio)
        assert pred.n_exact_formula in (pred.n_paper_floor, pred.n_paper_floor - 1)
        if pred.n_exact_formula != pred.n_paper_floor:
            assert ratio.alpha in (1, Fraction(1, 3))

    @settings(max_examples=150, deadline=None)
    @given(ratios_le_one(max_q=2 * 10**4))
    def test_agrees_with_exact_simulation(self, ratio):
        assert predict_count(ratio).n_exact_formula == run(ratio, "exact").count

    @pytest.mark.parametrize("ratio", [MassRatio(1, 1), MassRatio(1, 3), MassRatio(2, 7), MassRatio(1, 50)])
    def test_brute_force_oracle(self, ratio):
        assert predict_count(ratio).n_exact_formula == brute_force_count(ratio)

    def test_monotone_in_alpha(self):
        grid = [MassRatio(1, q) for q in range(1, 400)]
        counts = [predict_count(r).n_exact_formula for r in grid]
        assert all(a <= b for a, b in zip(counts, counts[1:]))

    def test_rejects_alpha_above_one(self):
        with pytest.raises(ValueError):
            predict_count(MassRatio(3, 2))

    def test_ambiguous_boundary_raises(self, monkeypatch):
        monkeypatch.setattr(analytic, "_RATIONAL_BOUNDARIES", {})
        with pytest.raises(AmbiguousBoundaryError) as info:
            predict_count(MassRatio(1, 1))
        lo, hi = info.value.interval
        with mpmath.workdps(250):
            assert mpmath.mpf(lo) < 4 < mpmath.mpf(hi)

    def test_sqrt_approx_disagreement_is_reported(self):
        # floor(pi*sqrt(M/m)) is not the true count everywhere
        misses = [
            r for r in (MassRatio(p, 1000) for p in range(1, 1001))
            if not predict_count(r).approximation_agrees
        ]
        assert misses
        r = misses[0]
        assert predict_count(r).n_exact_formula == run(r, "exact").count


class TestRotationEquivalence:
    def test_zero_steps(self):
        assert verify_rotation_equivalence(MassRatio(1, 7), 0)

    def test_hundred_steps(self):
        assert verify_rotation_equivalence(MassRatio(1, 10**4), 100, tol=1e-9)

    def test_two_quarter_turns(self):
        ratio = MassRatio(1, 1)
        state = VelocityPair(0.0, -1.0)
        for _ in range(2):
            state = reflect_wall(collide_blocks(state, ratio))
        assert to_phase(state, ratio) == PhasePoint(0.0, 1.0)
        # sin(pi) is 1.2e-16 in float
        assert verify_rotation_equivalence(ratio, 2, tol=4 * math.ulp(1.0))

    def test_detects_wrong_angle(self, monkeypatch):
        import pi_collisions.analytic as mod

        real_atan = math.atan
        monkeypatch.setattr(mod.math, "atan", lambda x: real_atan(x) * (1 + 1e-6))
        assert not verify_rotation_equivalence(MassRatio(1, 10**4), 500, tol=1e-9)
