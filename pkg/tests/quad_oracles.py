"""Numeric oracles shared by the test suite.

char_quadrature integrates exp(-<z, v>) over the dual cone directly
from its inequality description {v : g.v >= 0 for the primal
generators g}, never touching the simplicial formula under test.  The
innermost coordinate is integrated in closed form over its exact
feasible interval; the outer coordinates go through adaptive
quadrature with breakpoints on the cone's edge projections.
"""

import math

import numpy as np
from scipy.integrate import quad

from manin_toric.cones import dual_cone, make_cone


def _decay_rate(gens, z):
    """min over dual extreme rays r of <z, r>/|r|_inf (positive if z interior)."""
    dual = dual_cone(make_cone(gens))
    rate = math.inf
    for r in dual.generators:
        num = sum(float(a) * float(b) for a, b in zip(z, r))
        rate = min(rate, num / max(abs(float(x)) for x in r))
    if rate <= 0:
        raise ValueError("z is not interior to the primal cone")
    return rate, dual


def char_quadrature(gens, z, rel_tol=1e-9):
    """Numeric integral of exp(-<z,v>) over {v : g.v >= 0}, n = 1, 2 or 3."""
    n = len(z)
    zf = [float(x) for x in z]
    gf = [[float(x) for x in g] for g in gens]
    rate, dual = _decay_rate(gens, zf)
    big = 45.0 / rate  # exp(-45) ~ 3e-20 of the peak

    if n == 1:
        lo, hi = 0.0, math.inf
        # {v : g*v >= 0}
        if all(g[0] > 0 for g in gf):
            return 1.0 / zf[0]
        raise ValueError("1-d fixture expects the positive ray")

    def v_last_interval(prefix):
        """Feasible interval of the last coordinate given the others."""
        lo, hi = -math.inf, math.inf
        for g in gf:
            rest = sum(a * b for a, b in zip(g[:-1], prefix))
            c = g[-1]
            if c > 0:
                lo = max(lo, -rest / c)
            elif c < 0:
                hi = min(hi, -rest / c)
            elif rest < 0:
                return None
        if hi <= lo:
            return None
        return lo, hi

    def inner_closed(prefix):
        iv = v_last_interval(prefix)
        if iv is None:
            return 0.0
        lo, hi = iv
        zl = zf[-1]
        base = sum(a * b for a, b in zip(zf[:-1], prefix))
        # combined exponents stay >= 0 on the dual cone: no overflow
        if math.isinf(hi):
            return math.exp(-(base + zl * lo)) / zl
        return (math.exp(-(base + zl * lo)) - math.exp(-(base + zl * hi))) / zl

    if n == 2:
        up, _ = quad(lambda v1: inner_closed((v1,)), 0, big,
                     epsabs=1e-14, epsrel=1e-12, limit=300)
        dn, _ = quad(lambda v1: inner_closed((v1,)), -big, 0,
                     epsabs=1e-14, epsrel=1e-12, limit=300)
        return up + dn

    if n == 3:
        slopes = sorted(set(
            float(r[1]) / float(r[0]) for r in dual.generators
            if float(r[0]) != 0))

        def middle(v1):
            pts = sorted({s * v1 for s in slopes} | {0.0})
            pts = [p for p in pts if -big < p < big]

            def f(v2):
                return inner_closed((v1, v2))

            val, _ = quad(f, -big, big, points=pts or None,
                          epsabs=1e-13, epsrel=1e-11, limit=400)
            return val

        up, _ = quad(middle, 0, big, epsabs=1e-12, epsrel=1e-9, limit=200)
        dn, _ = quad(middle, -big, 0, epsabs=1e-12, epsrel=1e-9, limit=200)
        return up + dn

    raise ValueError("char_quadrature supports n <= 3")
