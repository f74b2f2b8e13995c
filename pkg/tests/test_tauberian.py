"""Perron integrals, residues, the descent bracket, count-vs-prediction."""

import math

import numpy as np
import pytest

from manin_toric.latticefan import builtin_fan
from manin_toric.counting import count_points
from manin_toric.tauberian import (
    EULER_GAMMA,
    PoleData,
    TauberianError,
    builtin_oracle,
    compare,
    contour_independence,
    descend_k,
    perron_phi_k,
    predict,
    residue_circle,
    residue_consistency,
    residue_shape,
)

ONE = builtin_oracle("one")
ZETA = builtin_oracle("zeta")
ZETA2 = builtin_oracle("zeta2")
P1O = builtin_oracle("p1")


class TestPoleData:
    def test_accepts_valid(self):
        p = PoleData(1.0, 2, 3.5, 0.25, kappa=1.0)
        assert p.order == 2

    @pytest.mark.parametrize(
        "args",
        [
            (-1.0, 1, 1.0, 0.5),
            (1.0, 0, 1.0, 0.5),
            (1.0, 1, 0.0, 0.5),
            (1.0, 1, 1.0, 1.5),   # delta0 must stay below the abscissa
            (1.0, 1, 1.0, 0.0),
        ],
    )
    def test_rejects_bad_fields(self, args):
        with pytest.raises(TauberianError):
            PoleData(*args)

    def test_rejects_negative_growth(self):
        with pytest.raises(TauberianError):
            PoleData(1.0, 1, 1.0, 0.5, kappa=-0.1)


class TestOracles:
    def test_unknown_name(self):
        with pytest.raises(TauberianError):
            builtin_oracle("zeta3")

    def test_divisor_sums(self):
        assert ZETA2.phi_direct(100.0, 0) == 482.0
        assert ZETA2.phi_direct(1e5, 0) == 1166750.0

    def test_floor_count(self):
        assert ZETA.phi_direct(1000.0, 0) == 1000.0
        assert ZETA.phi_direct(999.5, 0) == 999.0

    def test_constant_series_gives_log_powers(self):
        for X, k in ((50.0, 2), (123.4, 3), (7.0, 0)):
            assert ONE.phi_direct(X, k) == pytest.approx(
                math.log(X) ** k, rel=1e-14
            )

    def test_p1_counts_match_counting_module(self):
        fan = builtin_fan("p1")
        for B in (1, 4, 9, 100, 1000):
            assert P1O.phi_direct(float(B), 0) == count_points(fan, (1, 1), B)

    def test_vectorized_evaluator_matches_scalar(self):
        pts = np.array([1.5 + 3j, 2.0 - 10j, 1.2 + 0.5j])
        for orc in (ZETA, ZETA2, P1O):
            fast = orc.evaluate_line(pts)
            for s, v in zip(pts, fast):
                assert abs(v - complex(orc.evaluate(complex(s)))) < 1e-10 * (
                    abs(v) + 1
                )


class TestPerron:
    def test_zeta_k2(self):
        X = 100.5
        direct = ZETA.phi_direct(X, 2)
        got = perron_phi_k(ZETA, None, X, 2)
        assert abs(got - direct) < 1e-3 * direct
        assert abs(got - direct) < 1e-6 * direct  # typically ~1e-8

    def test_zeta2_k3(self):
        X = 1000.0
        direct = ZETA2.phi_direct(X, 3)
        got = perron_phi_k(ZETA2, None, X, 3)
        assert abs(got - direct) < 1e-3 * direct

    def test_constant_oracle(self):
        got = perron_phi_k(ONE, PoleData(1.0, 1, 1.0, 0.5), 50.0, 2,
                           a_prime=1.5)
        assert abs(got - math.log(50.0) ** 2) < 1e-6 * math.log(50.0) ** 2

    def test_p1_oracle(self):
        X = 500.0
        direct = P1O.phi_direct(X, 2)
        got = perron_phi_k(P1O, None, X, 2)
        assert abs(got - direct) < 1e-6 * direct

    def test_contour_must_clear_pole(self):
        with pytest.raises(TauberianError):
            perron_phi_k(ZETA, None, 100.0, 2, a_prime=0.9)

    def test_tail_bound_raises_when_truncation_too_short(self):
        with pytest.raises(TauberianError):
            perron_phi_k(P1O, None, 5000.0, 2, T=300.0)
        got = perron_phi_k(P1O, None, 5000.0, 2, T=1000.0)
        direct = P1O.phi_direct(5000.0, 2)
        assert abs(got - direct) < 1e-6 * direct

    def test_k_must_exceed_growth_exponent(self):
        # zeta2 declares kappa = 1, so phi_1 is out of reach on a line
        with pytest.raises(TauberianError):
            perron_phi_k(ZETA2, None, 100.0, 1)


class TestResidue:
    def test_circle_matches_analytic_double_pole(self):
        # residue of zeta(s)^2 X^s / s^4 at s = 1 is X(log X - 4 + 2 gamma),
        # and phi_3 carries the prefactor 3!
        X = 1000.0
        want = 6.0 * X * (math.log(X) - 4.0 + 2.0 * EULER_GAMMA)
        got = residue_circle(ZETA2, ZETA2.pole, X, 3)
        assert abs(got - want) < 1e-12 * abs(want)

    def test_circle_simple_pole(self):
        got = residue_circle(ZETA, ZETA.pole, 100.0, 1)
        assert abs(got - 100.0) < 1e-10 * 100.0

    def test_shape_drops_gamma_terms(self):
        X = 1000.0
        assert residue_shape(ZETA2.pole, X, 3) == pytest.approx(
            6.0 * X * (math.log(X) - 4.0), rel=1e-13
        )
        # k = 0 reproduces the X log X - X main part of the divisor sum
        assert residue_shape(ZETA2.pole, X, 0) == pytest.approx(
            X * (math.log(X) - 1.0), rel=1e-13
        )

    def test_shape_reduces_to_predict_for_simple_pole(self):
        for X in (10.0, 1234.5):
            assert residue_shape(ZETA.pole, X, 0) == pytest.approx(
                predict(ZETA.pole, X), rel=1e-14
            )

    def test_consistency_report(self):
        rep = residue_consistency(ZETA2, None, 1000.0, 3)
        assert rep.rel_error < 1e-3
        assert abs(rep.difference - rep.circle) < 1e-3 * abs(rep.circle)

    def test_consistency_p1(self):
        rep = residue_consistency(P1O, None, 500.0, 2)
        assert rep.rel_error < 1e-3

    def test_needs_pole(self):
        with pytest.raises(TauberianError):
            residue_consistency(ONE, None, 100.0, 2)


class TestContour:
    def test_zeta2_independent_of_line(self):
        rep = contour_independence(ZETA2, None, 1000.0, 3)
        assert rep.a_low == pytest.approx(1.5)
        assert rep.a_high == pytest.approx(2.5)
        assert rep.consistent(1e-3)

    def test_p1_independent_of_line(self):
        assert contour_independence(P1O, None, 2000.0, 2).consistent(1e-3)

    def test_custom_lines(self):
        rep = contour_independence(ZETA, None, 500.0, 2, a1=1.6, a2=2.2)
        assert rep.consistent(1e-3)


class TestDescend:
    def test_log_powers_descend_exactly(self):
        # phi_k = (log X)^k makes both difference quotients equal to
        # (log X)^(k-1) up to O(eta), and for k = 1 exactly 1
        lo, hi = descend_k(lambda Y: ONE.phi_direct(Y, 1), 1, 1000.0)
        assert lo == pytest.approx(1.0, abs=1e-12)
        assert hi == pytest.approx(1.0, abs=1e-12)

    def test_zeta2_brackets_divisor_sum(self):
        truth = 1166750.0
        lo, hi = descend_k(lambda Y: ZETA2.phi_direct(Y, 1), 1, 1e5)
        assert lo <= truth <= hi
        assert abs(lo - truth) < 0.02 * truth
        assert abs(hi - truth) < 0.02 * truth

    def test_zeta_two_level_chain(self):
        X = 1e4
        lo, hi = descend_k(lambda Y: ZETA.phi_direct(Y, 2), 2, X)
        mid = ZETA.phi_direct(X, 1)
        assert lo <= mid <= hi
        lo0, hi0 = descend_k(lambda Y: ZETA.phi_direct(Y, 1), 1, X)
        assert lo0 <= 10000.0 <= hi0
        assert abs(lo0 - X) < 0.02 * X and abs(hi0 - X) < 0.02 * X

    def test_rejects_bad_k(self):
        with pytest.raises(TauberianError):
            descend_k(lambda Y: Y, 0, 100.0)

    def test_rejects_bad_eta(self):
        with pytest.raises(TauberianError):
            descend_k(lambda Y: Y, 1, 100.0, eta=1.5)

    def test_detects_inverted_bracket(self):
        # a decreasing sampler violates the monotonicity premise
        with pytest.raises(TauberianError):
            descend_k(lambda Y: -Y, 1, 100.0, eta=0.1)


class TestPredictCompare:
    def test_predict_formulas(self):
        X = 777.0
        assert predict(ZETA.pole, X) == X
        assert predict(ZETA2.pole, X) == pytest.approx(X * math.log(X))
        assert predict(P1O.pole, X) == pytest.approx(12 / math.pi**2 * X)

    def test_zeta_fractional_part_residual(self):
        # half-integer grid pins every residual at exactly -1/2
        rep = compare(ZETA, [100.5, 1000.5, 10000.5])
        assert all(r == pytest.approx(-0.5, abs=1e-9) for r in rep.residuals)
        assert abs(rep.error_exponent) < 1e-6
        assert rep.error_exponent < ZETA.pole.abscissa - ZETA.pole.delta0

    def test_zeta2_recovers_second_constant(self):
        rep = compare(ZETA2, [10**3.5, 1e4, 10**4.5, 1e5])
        want = 2 * EULER_GAMMA - 1
        assert abs(rep.residual_coefficient - want) < 0.02 * want

    def test_p1_counts_and_ratio(self):
        rep = compare(P1O, [100.0, 1000.0, 10000.0])
        fan = builtin_fan("p1")
        for X, N in zip(rep.Xs, rep.counts):
            assert N == count_points(fan, (1, 1), int(X))
        assert rep.counts[-1] / rep.predictions[-1] == pytest.approx(
            1.0, abs=0.05
        )

    def test_rows_roundtrip(self):
        rep = compare(ZETA, [10.0, 100.0])
        rows = list(rep.rows())
        assert rows[0]["X"] == 10.0 and "residual" in rows[1]

    def test_needs_two_points(self):
        with pytest.raises(TauberianError):
            compare(ZETA, [100.0])

    def test_needs_pole(self):
        with pytest.raises(TauberianError):
            compare(ONE, [10.0, 100.0])
