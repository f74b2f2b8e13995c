"""Canonical local and global heights for torus points over Q.

A point of the split torus (Q*)^d is carried as a valuation profile:
its prime-by-prime order vectors plus a sign vector.  Local heights at
finite places exponentiate the piecewise-linear function at the order
vector; the archimedean place uses minus the log-modulus vector, the
unique choice for which linear functions obey the product formula and
the adelic character pairing is trivial on rational points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .latticefan import Fan, PLFunction, pl_evaluate
from .primes import factorize
from .ratlinalg import solve_fraction

INF = float("inf")


@dataclass(frozen=True)
class ValuationProfile:
    """Finite-place order vectors and signs of a point of (Q*)^d."""

    dim: int
    support: tuple    # ((p, order vector), ...) by ascending prime
    signs: tuple      # componentwise signs, each +1 or -1

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.support)

    def order_vector(self, p: int) -> tuple:
        for q, vec in self.support:
            if q == p:
                return vec
        return (0,) * self.dim

    @property
    def arch_log(self) -> tuple:
        """Componentwise log|x| = sum_p n_p log p."""
        out = [0.0] * self.dim
        for p, vec in self.support:
            lp = math.log(p)
            for i, n in enumerate(vec):
                out[i] += n * lp
        return tuple(out)

    def point(self) -> tuple:
        """Reconstruct the rational coordinates exactly."""
        coords = [Fraction(s) for s in self.signs]
        for p, vec in self.support:
            for i, n in enumerate(vec):
                coords[i] *= Fraction(p) ** n
        return tuple(coords)

    def combine(self, other: "ValuationProfile") -> "ValuationProfile":
        """Profile of the componentwise product of the two points."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        merged = {}
        for p, vec in self.support + other.support:
            cur = merged.setdefault(p, [0] * self.dim)
            for i, n in enumerate(vec):
                cur[i] += n
        support = tuple(
            (p, tuple(vec)) for p, vec in sorted(merged.items())
            if any(vec))
        signs = tuple(a * b for a, b in zip(self.signs, other.signs))
        return ValuationProfile(dim=self.dim, support=support, signs=signs)


def valuation_profile(x) -> ValuationProfile:
    """Exact factorization of a vector of nonzero rationals."""
    coords = [Fraction(c) for c in x]
    d = len(coords)
    if d == 0:
        raise ValueError("empty point")
    orders = {}
    signs = []
    for i, c in enumerate(coords):
        if c == 0:
            raise ValueError(f"coordinate {i} is zero")
        signs.append(1 if c > 0 else -1)
        for p, k in factorize(abs(c.numerator)):
            orders.setdefault(p, [0] * d)[i] += k
        for p, k in factorize(c.denominator):
            orders.setdefault(p, [0] * d)[i] -= k
    support = tuple((p, tuple(vec)) for p, vec in sorted(orders.items())
                    if any(vec))
    return ValuationProfile(dim=d, support=support, signs=tuple(signs))


@dataclass(frozen=True)
class AdelicOffset:
    """Shift of the valuation data, finitely supported; the adelic
    argument of a height becomes (n_v + g_v) at each place."""

    dim: int
    finite: tuple = ()   # ((p, integer vector), ...) by ascending prime
    arch: tuple = ()     # real vector, empty means zero

    @classmethod
    def zero(cls, dim: int) -> "AdelicOffset":
        return cls(dim=dim)

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.finite)

    def finite_vector(self, p: int) -> tuple:
        for q, vec in self.finite:
            if q == p:
                return vec
        return (0,) * self.dim

    @property
    def arch_vector(self) -> tuple:
        return self.arch if self.arch else (0.0,) * self.dim


def make_offset(dim: int, finite=None, arch=None) -> AdelicOffset:
    fin = tuple(sorted((int(p), tuple(int(c) for c in vec))
                       for p, vec in (finite or {}).items()))
    return AdelicOffset(dim=dim, finite=fin,
                        arch=tuple(float(a) for a in arch) if arch else ())


def _lambda_values(fan: Fan, lam) -> tuple:
    if isinstance(lam, PLFunction):
        return lam.values
    vals = tuple(lam)
    if len(vals) != len(fan.rays):
        raise ValueError("one lambda value per ray required")
    return vals


def _as_profile(x) -> ValuationProfile:
    return x if isinstance(x, ValuationProfile) else valuation_profile(x)


def local_height(fan: Fan, lam, place, profile, offset=None):
    """exp(phi_lambda(n_v + g_v) * log q_v); log q_oo = 1."""
    values = _lambda_values(fan, lam)
    profile = _as_profile(profile)
    if offset is None:
        offset = AdelicOffset.zero(fan.dim)
    if place == INF or place == "inf":
        base = profile.arch_log
        arg = tuple(-b + g for b, g in zip(base, offset.arch_vector))
        logq = 1.0
    else:
        p = int(place)
        if p < 2:
            raise ValueError("place must be a prime or the symbol inf")
        arg = tuple(a + b for a, b in
                    zip(profile.order_vector(p), offset.finite_vector(p)))
        logq = math.log(p)
    phi = pl_evaluate(fan, values, arg)
    val = complex(phi) * logq
    if val.imag == 0:
        return math.exp(val.real)
    return cmath.exp(val)


def global_height(fan: Fan, lam, x, offset=None):
    """Product of the local heights over inf and all supporting primes."""
    profile = _as_profile(x)
    if offset is None:
        offset = AdelicOffset.zero(fan.dim)
    places = sorted(set(profile.primes) | set(offset.primes))
    out = local_height(fan, lam, INF, profile, offset)
    for p in places:
        out *= local_height(fan, lam, p, profile, offset)
    return out


def cone_monomials(fan: Fan, lam) -> tuple:
    """Dual monomial m_sigma of each maximal cone: <m_sigma, e_j> = lam_j.

    Requires integral lambda; regularity of the fan makes every
    exponent an integer."""
    values = _lambda_values(fan, lam)
    ints = []
    for v in values:
        f = Fraction(v)
        if f.denominator != 1:
            raise ValueError("integral lambda required")
        ints.append(int(f))
    out = []
    for cone in fan.max_cones:
        cols = [[fan.rays[j][i] for j in cone] for i in range(fan.dim)]
        sol = solve_fraction(cols, [ints[j] for j in cone])
        assert all(c.denominator == 1 for c in sol)
        out.append(tuple(int(c) for c in sol))
    return tuple(out)


def exact_height(fan: Fan, lam, x) -> Fraction:
    """Global height as an exact Fraction, integral lambda only.

    H = prod_v max_sigma |x^{m_sigma}|_v^{-1}: the archimedean factor
    is 1/min|y_sigma| and each finite factor is p^(max_sigma ord_p)."""
    if isinstance(x, ValuationProfile):
        coords = x.point()
    else:
        coords = tuple(Fraction(c) for c in x)
    if any(c == 0 for c in coords):
        raise ValueError("height needs a torus point, no zero coordinates")
    ys = []
    for mono in cone_monomials(fan, lam):
        y = Fraction(1)
        for c, e in zip(coords, mono):
            y *= c ** e
        ys.append(abs(y))
    h = max(Fraction(1) / y for y in ys)
    primes = set()
    for y in ys:
        primes.update(p for p, _ in factorize(y.numerator))
        primes.update(p for p, _ in factorize(y.denominator))
    for p in sorted(primes):
        best = None
        for y in ys:
            num, den, e = y.numerator, y.denominator, 0
            while num % p == 0:
                num //= p
                e += 1
            while den % p == 0:
                den //= p
                e -= 1
            best = e if best is None else max(best, e)
        if best > 0:
            h *= Fraction(p) ** best
        elif best < 0:
            h *= Fraction(1, p ** -best)
    return h


def character_pairing(fan: Fan, m, x, offset=None) -> complex:
    """exp(-i <m, n_v + g_v> log q_v) aggregated over all places.

    Trivial on rational points with zero offset: the finite-place sum
    of n_p log p cancels the archimedean -log|x| exactly.
    """
    profile = _as_profile(x)
    if len(m) != fan.dim:
        raise ValueError("spectral parameter has wrong dimension")
    if offset is None:
        offset = AdelicOffset.zero(fan.dim)
    total = 0.0
    arch = [-a + g for a, g in zip(profile.arch_log, offset.arch_vector)]
    total += sum(mi * ai for mi, ai in zip(m, arch))
    for p in sorted(set(profile.primes) | set(offset.primes)):
        vec = [a + b for a, b in
               zip(profile.order_vector(p), offset.finite_vector(p))]
        total += sum(mi * vi for mi, vi in zip(m, vec)) * math.log(p)
    return cmath.exp(-1j * total)
