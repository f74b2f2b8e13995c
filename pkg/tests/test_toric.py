"""Picard data, alpha, local densities, Tamagawa products."""

import math
from fractions import Fraction

import pytest

from manin_toric.cones import char_function
from manin_toric.latticefan import Fan, builtin_fan, make_fan
from manin_toric.toric import (EulerProductSpec, PicardError,
                               alpha_constant, archimedean_volume,
                               archimedean_volume_mc, count_points_mod_p,
                               euler_product_spec, leading_constant,
                               local_factor_coefficients, picard_data,
                               tamagawa_number)

ZETA2 = math.pi ** 2 / 6
ZETA3 = 1.2020569031595942854


def test_picard_p1():
    pic = picard_data(builtin_fan("p1"))
    assert pic.rank == 1
    assert pic.anticanonical == (2,)
    assert set(pic.divisor_classes) == {(1,)}
    assert [tuple(g) for g in pic.effective_cone.generators] == [(1,)]


def test_picard_p2():
    pic = picard_data(builtin_fan("p2"))
    assert pic.rank == 1
    assert pic.anticanonical == (3,)
    assert set(pic.divisor_classes) == {(1,)}


def test_picard_p1xp1():
    pic = picard_data(builtin_fan("p1xp1"))
    assert pic.rank == 2
    assert sorted(pic.anticanonical) == [2, 2]
    assert len(set(pic.divisor_classes)) == 2


def test_projection_section_identity():
    for name in ("p1", "p2", "p1xp1", "hirzebruch-1", "hirzebruch-2"):
        pic = picard_data(builtin_fan(name))
        r = pic.rank
        J = len(pic.fan.rays)
        for i in range(r):
            col = [pic.section[j][i] for j in range(J)]
            image = pic.project(col)
            assert image == tuple(int(k == i) for k in range(r))


def test_picard_torsion_rejected():
    fan = Fan(dim=1, rays=((2,), (-2,)), max_cones=((0,), (1,)))
    with pytest.raises(PicardError):
        picard_data(fan)


def test_alpha_exact_values():
    assert alpha_constant(builtin_fan("p1")) == Fraction(1, 2)
    assert alpha_constant(builtin_fan("p2")) == Fraction(1, 3)
    assert alpha_constant(builtin_fan("p1xp1")) == Fraction(1, 4)
    assert alpha_constant(builtin_fan("hirzebruch-1")) == Fraction(1, 6)
    assert alpha_constant(builtin_fan("hirzebruch-2")) == Fraction(1, 8)


def test_alpha_two_routes_agree():
    # quotient-pushforward route vs characteristic function of the
    # effective cone in the chosen Picard basis
    for name in ("p1", "p2", "p1xp1", "hirzebruch-1", "hirzebruch-2"):
        fan = builtin_fan(name)
        pic = picard_data(fan)
        form = char_function(pic.effective_cone)
        direct = form(pic.anticanonical)
        assert direct == alpha_constant(fan)


def test_alpha_ray_relabeling_invariance():
    fan = builtin_fan("p2")
    perm = [2, 0, 1]
    rays = [fan.rays[i] for i in perm]
    inv = {old: new for new, old in enumerate(perm)}
    cones = [tuple(sorted(inv[i] for i in c)) for c in fan.max_cones]
    shuffled = make_fan(2, rays, cones)
    assert alpha_constant(shuffled) == alpha_constant(fan)

    fan = builtin_fan("hirzebruch-2")
    perm = [3, 1, 0, 2]
    rays = [fan.rays[i] for i in perm]
    inv = {old: new for new, old in enumerate(perm)}
    cones = [tuple(sorted(inv[i] for i in c)) for c in fan.max_cones]
    shuffled = make_fan(2, rays, cones)
    assert alpha_constant(shuffled) == alpha_constant(fan)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 101])
def test_count_points_formulas(p):
    assert count_points_mod_p(builtin_fan("p1"), p) == p + 1
    assert count_points_mod_p(builtin_fan("p2"), p) == p * p + p + 1
    for n in (0, 1, 2):
        fan = builtin_fan(f"hirzebruch-{n}")
        assert count_points_mod_p(fan, p) == (p + 1) ** 2


def test_local_factor_coefficients():
    assert local_factor_coefficients(builtin_fan("p1")) == (1, 0, -1)
    assert local_factor_coefficients(builtin_fan("p2")) == (1, 0, 0, -1)
    # (1 - x^2)^2 for any Hirzebruch surface
    assert local_factor_coefficients(builtin_fan("p1xp1")) == (1, 0, -2, 0, 1)
    assert local_factor_coefficients(
        builtin_fan("hirzebruch-2")) == (1, 0, -2, 0, 1)


def test_euler_spec_local_factor_bound():
    for name in ("p1", "p2", "p1xp1"):
        spec = euler_product_spec(builtin_fan(name))
        C = spec.tail_constant
        for p in (2, 3, 5, 7, 11, 13, 97, 199):
            f = spec.local_factor(p)
            assert abs(f - 1) * p * p <= C
            # factor equals the density definition
            r = spec.rank
            assert f == Fraction(p - 1, p) ** r * spec.local_density(p)


def test_archimedean_volume_exact():
    assert archimedean_volume(builtin_fan("p1")) == 4.0
    assert archimedean_volume(builtin_fan("p2")) == 12.0
    assert archimedean_volume(builtin_fan("p1xp1")) == 16.0
    assert archimedean_volume(builtin_fan("hirzebruch-2")) == 16.0


@pytest.mark.parametrize("name", ["p1", "p2", "p1xp1"])
def test_archimedean_volume_monte_carlo(name):
    fan = builtin_fan(name)
    exact = archimedean_volume(fan)
    est, se = archimedean_volume_mc(fan, samples=6000, seed=11)
    assert abs(est - exact) <= 3 * se
    assert abs(est - exact) / exact < 0.1


def test_tamagawa_targets_quick():
    # small pmax here; the full pmax = 10^6 run is an acceptance check
    t1 = tamagawa_number(builtin_fan("p1"), pmax=20000)
    assert t1.contains(4 / ZETA2)
    t2 = tamagawa_number(builtin_fan("p2"), pmax=20000)
    assert t2.contains(12 / ZETA3)
    t3 = tamagawa_number(builtin_fan("p1xp1"), pmax=20000)
    assert t3.contains(16 / ZETA2 ** 2)
    for t in (t1, t2, t3):
        assert (t.upper - t.lower) / t.value < 1e-2
        assert t.lower < t.value < t.upper


def test_tamagawa_pmax_guard():
    with pytest.raises(ValueError):
        tamagawa_number(builtin_fan("p1"), pmax=1)


def test_leading_constant_anchors():
    lc = leading_constant(builtin_fan("p1"), pmax=50000)
    assert lc.alpha == Fraction(1, 2)
    assert lc.b == 1
    assert lc.lower <= 12 / math.pi ** 2 <= lc.upper
    assert abs(lc.theta - 12 / math.pi ** 2) < 1e-4

    lc2 = leading_constant(builtin_fan("p1xp1"), pmax=50000)
    assert lc2.b == 2
    assert abs(lc2.theta - 144 / math.pi ** 4) < 1e-4

    lcp2 = leading_constant(builtin_fan("p2"), pmax=50000)
    assert abs(lcp2.theta - 4 / ZETA3) < 1e-4


def test_predict_main_term():
    lc = leading_constant(builtin_fan("p1xp1"), pmax=5000)
    B = 1e4
    expected = lc.theta * B * math.log(B)
    assert abs(lc.predict(B) - expected) < 1e-9 * expected
    assert lc.predict(1.0) == 0.0
