"""G_m-torsors O(n) over P^1 and their height machinery.

A Hirzebruch surface F_n is the P^1-fibration hiding inside the torsor
O(n) -> P^1: over a base point b the fiber heights get twisted by an
adelic offset g_b recording the transition cocycle of O(n).  This
module builds the offsets, Arakelov L-sums over the base, fibration
zeta partial sums with exact per-point heights, the quotient Picard
data of the total space, and the product-rule leading constant.  Every
route is cross-checked against the direct toric pipeline on the F_n
fan, which pins all sign conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .cones import PolyhedralCone, QuotientChar, make_cone, quotient_char
from .heights import (AdelicOffset, exact_height, global_height,
                      make_offset, valuation_profile, character_pairing)
from .latticefan import Fan, builtin_fan
from .primes import factorize
from .ratlinalg import solve_fraction
from .toric import PicardData, picard_data, tamagawa_number, TamagawaResult

__all__ = [
    "FibrationError",
    "TorsorSpec",
    "torsor_class",
    "twisted_fiber_height",
    "arakelov_L_partial",
    "FibrationZeta",
    "fibration_zeta_partial",
    "direct_zeta_partial",
    "FibrationPicard",
    "fibration_picard",
    "hirzebruch_match",
    "FibrationConstant",
    "fibration_predicted_constant",
    "hirzebruch_fan",
    "enumerate_base",
]


class FibrationError(ValueError):
    pass


@dataclass(frozen=True)
class TorsorSpec:
    """O(twist) over P^1 with max-norm metric, P^1 fibers.

    section chooses the trivializing chart: "x0" trivializes where
    b0 != 0, "x1" where b1 != 0.  Switching sections shifts the offset
    at b by the principal profile of c = (b1/b0)^twist, so pointwise
    heights satisfy H(x; x0) = H(c x; x1): fiberwise sums, height
    multisets, and character pairings are all unchanged."""

    twist: int
    section: str = "x0"

    def __post_init__(self):
        if self.twist != int(self.twist):
            raise FibrationError("twist degree must be an integer")
        if self.section not in ("x0", "x1"):
            raise FibrationError('section must be "x0" or "x1"')

    @property
    def fiber_fan(self) -> Fan:
        return builtin_fan("p1")

    @property
    def base_fan(self) -> Fan:
        return builtin_fan("p1")


def hirzebruch_fan(n: int) -> Fan:
    """The fan the torsor construction must reproduce."""
    if n < 0:
        raise FibrationError("hirzebruch_fan wants n >= 0")
    return builtin_fan(f"hirzebruch-{n}")


def _validate_base_point(b):
    b0, b1 = int(b[0]), int(b[1])
    if (b0, b1) != (b[0], b[1]):
        raise FibrationError("base point needs integer coordinates")
    if b0 == 0 and b1 == 0:
        raise FibrationError("base point (0, 0) is not a point of P^1")
    if gcd(b0, b1) != 1:
        raise FibrationError("base coordinates must be coprime")
    return b0, b1


def torsor_class(spec: TorsorSpec, b) -> AdelicOffset:
    """Adelic offset representing the class of the fiber torsor at b.

    Components shift the valuation argument of the fiber height: at a
    finite place the order of b's trivializing coordinate enters with
    weight -twist, and the archimedean part is -twist * log of the
    max-norm divided by that coordinate.  A base point outside the
    chosen section's chart falls back to the other chart."""
    b0, b1 = _validate_base_point(b)
    branch = spec.section
    if b0 == 0 and branch == "x0":
        branch = "x1"
    if b1 == 0 and branch == "x1":
        branch = "x0"
    anchor = abs(b0) if branch == "x0" else abs(b1)
    n = spec.twist
    finite = {p: (-n * e,) for p, e in factorize(anchor) if n * e != 0}
    mx = max(abs(b0), abs(b1))
    arch = (-n * (math.log(mx) - math.log(anchor)),)
    return make_offset(1, finite=finite, arch=arch)


def twisted_fiber_height(spec: TorsorSpec, lam, b, x) -> float:
    """Height of the fiber point x over b, twisted by the torsor class."""
    return global_height(spec.fiber_fan, lam, (x,),
                         offset=torsor_class(spec, b))


def _exact_twisted_height(mu1: int, mu2: int, u: int, w: int,
                          S: Fraction) -> Fraction:
    """Fiber height of z = u/w after substituting x = anchor^n z.

    The substitution absorbs the whole finite twist, leaving the plain
    finite part u^mu1 w^mu2 and an archimedean modulus scaled by S."""
    A = S * Fraction(u, w)
    if A <= 1:
        arch = A ** -mu1
    else:
        arch = A ** mu2
    return Fraction(u) ** mu1 * Fraction(w) ** mu2 * arch


def enumerate_base(Hmax: int):
    """Coprime (b0, b1), b0 >= 1, b1 != 0, max|.| <= Hmax, ordered by
    height then lexicographically: the Farey-style deterministic walk."""
    for m in range(1, int(Hmax) + 1):
        batch = []
        if m == 1:
            batch = [(1, -1), (1, 1)]
        else:
            for b1 in range(1, m):
                if gcd(m, b1) == 1:
                    batch.append((m, -b1))
                    batch.append((m, b1))
            for b0 in range(1, m):
                if gcd(b0, m) == 1:
                    batch.append((b0, -m))
                    batch.append((b0, m))
        yield from sorted(batch)


def _fiber_lambda(lam) -> tuple:
    if isinstance(lam, str):
        if lam != "rho":
            raise FibrationError(f"unknown fiber class name {lam!r}")
        return (1, 1)
    vals = tuple(lam)
    if len(vals) != 2:
        raise FibrationError("fiber class needs one value per P^1 ray")
    if any(float(v) <= 0 for v in vals):
        raise FibrationError("fiber exponents must be positive")
    return vals


@dataclass(frozen=True)
class FibrationZeta:
    """Truncated height zeta of the torsor total space.

    heights is the sorted multiset of anticanonical height values, one
    per point, kept exact so two pipelines can be compared literally.
    tail_estimate extrapolates the last octave geometrically; infinity
    when the octave sums do not decay."""

    twist: int
    section: str
    lam_fiber: tuple
    alpha_base: float
    B: float
    value: float
    n_points: int
    base_count: int
    heights: tuple
    base_rows: tuple
    tail_estimate: float

    def height_counter(self):
        out = {}
        for h in self.heights:
            out[h] = out.get(h, 0) + 1
        return out


def fibration_zeta_partial(spec: TorsorSpec, lam_fiber, alpha_base,
                           B) -> FibrationZeta:
    """Sum of H_base(b)^-alpha * H_fiber(lam, g_b x)^-1 over all torus
    points with anticanonical height at most B.

    The cutoff is the anticanonical height of the total space, the
    product of the squared base max-norm and the rho-twisted fiber
    height; partial sums converge to the zeta value only for fiber
    exponents > 1 and alpha_base > 2."""
    mu = _fiber_lambda(lam_fiber)
    a = float(alpha_base)
    if a <= 0:
        raise FibrationError("alpha_base must be positive")
    exact_mu = all(float(m_).is_integer() for m_ in mu)
    mu1i, mu2i = (int(mu[0]), int(mu[1])) if exact_mu else (0, 0)
    n = spec.twist
    Bq = Fraction(B)
    base_rows = []
    heights = []
    terms = []
    octave_hi = 0.0
    octave_lo = 0.0
    n_points = 0
    if Bq >= 1:
        for b0, b1 in enumerate_base(isqrt(int(Bq))):
            H1 = max(abs(b0), abs(b1))
            H1q = Fraction(H1)
            Bf = Bq / H1q ** 2
            if Bf < 1:
                continue
            S = H1q ** n
            base_factor = float(H1) ** -a
            u_max = isqrt(int(Bf / S)) if Bf >= S else 0
            w_max = isqrt(int(Bf * S))
            fiber_terms = []
            for u in range(1, u_max + 1):
                Su2 = S * u * u
                for w in range(1, w_max + 1):
                    if gcd(u, w) != 1:
                        continue
                    cut = max(Su2, Fraction(w * w) / S)
                    if cut > Bf:
                        continue
                    total_height = H1q ** 2 * cut
                    if exact_mu:
                        hf = _exact_twisted_height(mu1i, mu2i, u, w, S)
                        summand = base_factor / float(hf)
                    else:
                        A = float(S) * u / w
                        la = math.log(A)
                        arch = math.exp(-float(mu[0]) * la if la <= 0
                                        else float(mu[1]) * la)
                        summand = base_factor / (
                            u ** float(mu[0]) * w ** float(mu[1]) * arch)
                    # both signs of the fiber coordinate, same heights
                    heights.append(total_height)
                    heights.append(total_height)
                    fiber_terms.append(2.0 * summand)
                    n_points += 2
                    hflt = float(total_height)
                    if hflt > float(Bq) / 2:
                        octave_hi += 2.0 * summand
                    elif hflt > float(Bq) / 4:
                        octave_lo += 2.0 * summand
            if fiber_terms:
                fsum = math.fsum(fiber_terms)
                terms.append(fsum)
                base_rows.append((b0, b1, H1, len(fiber_terms) * 2, fsum))
    value = math.fsum(terms)
    if octave_lo > 0 and octave_hi < octave_lo:
        r = octave_hi / octave_lo
        tail = octave_hi * r / (1.0 - r)
    elif octave_hi == 0.0:
        tail = 0.0
    else:
        tail = math.inf
    heights.sort()
    return FibrationZeta(
        twist=spec.twist, section=spec.section, lam_fiber=mu,
        alpha_base=a, B=float(B), value=value, n_points=n_points,
        base_count=len(base_rows), heights=tuple(heights),
        base_rows=tuple(base_rows), tail_estimate=tail,
    )


def direct_zeta_partial(fan: Fan, lam, B):
    """Exact enumeration reference: sorted anticanonical height multiset
    and the corresponding sum of H_lam^-1 over the torus of the fan."""
    from .counting import enumerate_bounded

    rho = (1,) * len(fan.rays)
    heights = []
    terms = []
    n = 0
    for prof in enumerate_bounded(fan, rho, B):
        pt = prof.point()
        hcut = exact_height(fan, rho, pt)
        hsum = hcut if tuple(lam) == rho else exact_height(fan, lam, pt)
        heights.append(hcut)
        terms.append(1.0 / float(hsum))
        n += 1
    heights.sort()
    return tuple(heights), math.fsum(sorted(terms)), n


def arakelov_L_partial(spec: TorsorSpec, a, m, H) -> complex:
    """Truncated Arakelov L-sum over the base:
    sum over b in P^1(Q), max-norm height <= H, of the inverse character
    of the torsor class times the base height to the power -a.

    Needs a > 2: the base count grows quadratically in the max-norm."""
    a = float(a)
    if a <= 2:
        raise FibrationError("arakelov_L_partial needs a > 2")
    H = float(H)
    if H < 1:
        return 0j
    unit = valuation_profile((1,))
    fan = spec.fiber_fan
    mm = (float(m),)
    total = []
    # the two boundary points of the base, height 1, live on one chart
    for b in ((1, 0), (0, 1)):
        chi = character_pairing(fan, mm, unit, offset=torsor_class(spec, b))
        total.append(chi.conjugate())
    for b in enumerate_base(int(H)):
        h1 = max(abs(b[0]), abs(b[1]))
        chi = character_pairing(fan, mm, unit, offset=torsor_class(spec, b))
        total.append(chi.conjugate() * h1 ** -a)
    real = math.fsum(t.real for t in total)
    imag = math.fsum(t.imag for t in total)
    return complex(real, imag)


@dataclass(frozen=True)
class FibrationPicard:
    """Picard data of the total space as a quotient V/M.

    V = PL(fiber fan) x Pic(P^1) with coordinates (fiber ray +1,
    fiber ray -1, base O(1)); M is spanned by (1, -1, twist), the
    divisor of the fiber coordinate including its twist across the
    base.  The effective cone is the image of the product orthant."""

    twist: int
    rank: int
    m_basis: tuple
    quotient: QuotientChar
    fiber_plus_class: tuple
    fiber_minus_class: tuple
    base_class: tuple
    anticanonical_class: tuple
    effective_cone: PolyhedralCone
    alpha: Fraction


def fibration_picard(spec: TorsorSpec) -> FibrationPicard:
    n = spec.twist
    orthant = make_cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)
    # div of the fiber coordinate: plus ray minus minus ray, twisted
    # n times across the base
    m_basis = ((1, -1, n),)
    q = quotient_char(orthant, m_basis)

    # classes in a unimodular basis of Z^3 / M; the quotient object's
    # own projection is only a Q-basis once |n| > 1, so we project by
    # hand: (x1, x2, x3) -> (x1 + x2, x3 - n x1) kills (1, -1, n) and
    # is onto Z^2.
    def cls(x):
        return (x[0] + x[1], x[2] - n * x[0])

    f_plus = cls((1, 0, 0))
    f_minus = cls((0, 1, 0))
    base = cls((0, 0, 1))
    antican = cls((1, 1, 2))
    eff = make_cone([f_plus, f_minus, base], 2)
    alpha = q.evaluate((1, 1, 2))
    return FibrationPicard(
        twist=n, rank=2, m_basis=m_basis, quotient=q,
        fiber_plus_class=f_plus, fiber_minus_class=f_minus,
        base_class=base, anticanonical_class=antican,
        effective_cone=eff, alpha=Fraction(alpha),
    )


def hirzebruch_match(spec: TorsorSpec) -> tuple:
    """Lattice isomorphism onto the Picard data of the F_n fan.

    Sends the base class to the fiber-divisor class of the fan and the
    fiber ray -1 class to the section class, then checks that the
    remaining ray class and the anticanonical class follow suit.
    Returns the 2x2 integer matrix; raises when no match exists."""
    if spec.twist < 0:
        raise FibrationError("hirzebruch_match wants twist >= 0")
    fp = fibration_picard(spec)
    pic: PicardData = picard_data(hirzebruch_fan(spec.twist))
    cls = pic.divisor_classes
    if tuple(cls[0]) != tuple(cls[2]):
        raise FibrationError("fan base divisors disagree; not a fibration")
    # columns of the unknown matrix from two prescribed images
    cols = [[Fraction(fp.base_class[i]), Fraction(fp.fiber_minus_class[i])]
            for i in range(2)]
    rows = []
    for i in range(2):
        sol = solve_fraction(cols, [Fraction(cls[0][i]),
                                    Fraction(cls[3][i])])
        rows.append(tuple(sol))
    if any(c.denominator != 1 for row in rows for c in row):
        raise FibrationError("no integral matching of Picard lattices")
    P = tuple(tuple(int(c) for c in row) for row in rows)
    det = P[0][0] * P[1][1] - P[0][1] * P[1][0]
    if abs(det) != 1:
        raise FibrationError("matched map is not a lattice isomorphism")

    def apply(v):
        return tuple(P[i][0] * v[0] + P[i][1] * v[1] for i in range(2))

    if apply(fp.fiber_plus_class) != tuple(cls[1]):
        raise FibrationError("twisted fiber ray class does not match")
    if apply(fp.anticanonical_class) != tuple(pic.anticanonical):
        raise FibrationError("anticanonical classes do not match")
    return P


@dataclass(frozen=True)
class FibrationConstant:
    """Theta of the total space by the product rule: the quotient-cone
    characteristic value at the anticanonical class times the Tamagawa
    numbers of fiber and base."""

    twist: int
    alpha: Fraction
    tau_fiber: TamagawaResult
    tau_base: TamagawaResult
    theta: float
    lower: float
    upper: float
    a: int
    b: int
    picard: FibrationPicard

    def predict(self, B: float) -> float:
        if B <= 1:
            return 0.0
        return (self.theta * B * math.log(B) ** (self.b - 1)
                / math.factorial(self.b - 1))


def fibration_predicted_constant(spec: TorsorSpec,
                                 pmax: int = 1000000) -> FibrationConstant:
    fp = fibration_picard(spec)
    tau = tamagawa_number(builtin_fan("p1"), pmax=pmax)
    af = float(fp.alpha)
    return FibrationConstant(
        twist=spec.twist, alpha=fp.alpha, tau_fiber=tau, tau_base=tau,
        theta=af * tau.value * tau.value,
        lower=af * tau.lower * tau.lower,
        upper=af * tau.upper * tau.upper,
        a=1, b=fp.rank, picard=fp,
    )
