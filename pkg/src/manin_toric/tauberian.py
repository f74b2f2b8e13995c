"""Perron-type contour integrals and the descending Tauberian bracket.

For a Dirichlet series f(s) = sum c_n n^-s with rightmost pole at s = a of
order b and leading constant Theta, the smoothed counting functions

    phi_k(X) = sum_{n <= X} c_n (log X/n)^k = (k!/2*pi*i) int f(s) X^s s^-(k+1) ds

are absolutely convergent line integrals once k exceeds the growth
exponent of f on vertical lines.  phi_k determines phi_(k-1) through a
two-sided difference bracket, which descends all the way to the raw count
phi_0.  This module computes the integrals numerically, checks them
against direct summation, verifies contour independence and the residue
across the pole, and compares phi_0 with the predicted main term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath as mp
import numpy as np

from .fourier import zeta_line
from .primes import divisor_count_table, totient_table

__all__ = [
    "TauberianError",
    "PoleData",
    "DirichletOracle",
    "builtin_oracle",
    "perron_phi_k",
    "residue_circle",
    "residue_shape",
    "contour_independence",
    "residue_consistency",
    "descend_k",
    "predict",
    "compare",
]

EULER_GAMMA = 0.5772156649015328606


class TauberianError(ValueError):
    pass


@dataclass(frozen=True)
class PoleData:
    """Rightmost pole: location, order, leading constant, analytic strip."""

    abscissa: float
    order: int
    theta: float
    delta0: float
    kappa: float = 0.0

    def __post_init__(self):
        if not self.abscissa > 0:
            raise TauberianError("pole abscissa must be positive")
        if self.order < 1:
            raise TauberianError("pole order must be at least 1")
        if not self.theta > 0:
            raise TauberianError("leading constant must be positive")
        if not 0 < self.delta0 < self.abscissa:
            raise TauberianError("strip width must satisfy 0 < delta0 < a")
        if self.kappa < 0:
            raise TauberianError("growth exponent must be nonnegative")


@dataclass(frozen=True)
class DirichletOracle:
    """Evaluator plus coefficient access for one Dirichlet series.

    The evaluator is a closed form valid for Re s > a - delta0 (so on both
    sides of the pole line); coefficients feed brute-force cross-checks.
    """

    name: str
    pole: PoleData | None
    _evaluate: Callable[[complex], complex]
    _coefficients: Callable[[int], np.ndarray]
    _evaluate_vec: Callable[[np.ndarray], np.ndarray] | None = None

    def evaluate(self, s) -> complex:
        return complex(self._evaluate(complex(s)))

    def evaluate_line(self, s: np.ndarray) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(s, dtype=complex))
        if self._evaluate_vec is not None:
            return self._evaluate_vec(arr)
        return np.array([self._evaluate(complex(v)) for v in arr])

    def coefficients(self, N: int) -> np.ndarray:
        """c_1..c_N as arr[1..N]; arr[0] is unused padding."""
        return self._coefficients(int(N))

    def phi_direct(self, X: float, k: int) -> float:
        """Exact phi_k(X) by direct summation of the coefficients."""
        N = int(math.floor(X))
        if N < 1:
            return 0.0
        c = self.coefficients(N).astype(float)
        n = np.arange(0, N + 1, dtype=float)
        n[0] = 1.0
        weights = np.log(X / n) ** k if k else np.ones_like(n)
        weights[0] = 0.0
        return float(np.dot(c, weights))


def _coeff_one(N):
    arr = np.zeros(N + 1)
    if N >= 1:
        arr[1] = 1.0
    return arr


def _coeff_zeta(N):
    arr = np.ones(N + 1)
    arr[0] = 0.0
    return arr


def _coeff_zeta2(N):
    arr = np.zeros(N + 1)
    arr[1:] = divisor_count_table(N)[1:]
    return arr


def _coeff_p1(N):
    # height values on the torus of P^1 are squares h^2, with 2 points of
    # height 1 and 4*phi(h) of height h^2 for h >= 2
    arr = np.zeros(N + 1)
    T = math.isqrt(N)
    if T >= 1:
        phi = totient_table(T)
        for h in range(1, T + 1):
            arr[h * h] = 4.0 * float(phi[h])
        arr[1] = 2.0
    return arr


def _eval_p1(s):
    return 4 * mp.zeta(2 * s - 1) / mp.zeta(2 * s) - 2


_BUILTIN_ORACLES = {
    "one": (None, lambda s: 1.0 + 0j, _coeff_one,
            lambda s: np.ones_like(s)),
    "zeta": (PoleData(1.0, 1, 1.0, 0.5, kappa=0.5),
             lambda s: mp.zeta(s), _coeff_zeta, zeta_line),
    "zeta2": (PoleData(1.0, 2, 1.0, 0.5, kappa=1.0),
              lambda s: mp.zeta(s) ** 2, _coeff_zeta2,
              lambda s: zeta_line(s) ** 2),
    # 4*zeta(2s-1)/zeta(2s) - 2 stays bounded on Re s >= 1.2 and grows
    # slower than t^(1/4) on the left contour Re s = 7/8, so kappa = 1/4
    "p1": (PoleData(1.0, 1, 12 / math.pi**2, 0.25, kappa=0.25),
           _eval_p1, _coeff_p1,
           lambda s: 4 * zeta_line(2 * s - 1) / zeta_line(2 * s) - 2),
}


def builtin_oracle(name: str) -> DirichletOracle:
    try:
        pole, ev, co, vec = _BUILTIN_ORACLES[name]
    except KeyError:
        raise TauberianError(
            f"unknown oracle {name!r}; have {sorted(_BUILTIN_ORACLES)}"
        ) from None
    return DirichletOracle(name=name, pole=pole, _evaluate=ev,
                           _coefficients=co, _evaluate_vec=vec)


def _line_nodes(T: float, X: float, order: int = 12):
    # at least three panels per oscillation period 2*pi/log X
    width = min(0.5, 2 * math.pi / max(math.log(X), 1.0) / 3)
    nodes, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, T, max(2, int(math.ceil(T / width)) + 1))
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * wts[None, :]).ravel()
    return t, w


def _line_integral(oracle: DirichletOracle, X: float, k: int,
                   a_prime: float, T: float) -> float:
    t, w = _line_nodes(T, X)
    s = a_prime + 1j * t
    f = oracle.evaluate_line(s)
    vals = f * np.exp(s * math.log(X)) / s ** (k + 1)
    # real coefficients give conjugate symmetry across the real axis
    return math.factorial(k) / math.pi * float(np.dot(w, vals.real))


def _tail_bound(oracle: DirichletOracle, X: float, k: int,
                a_prime: float, T: float, kappa: float) -> float:
    if k <= kappa:
        raise TauberianError("need k > kappa for an absolutely convergent tail")
    samples = [abs(oracle.evaluate(a_prime + 1j * (T * c))) * c**-kappa
               for c in (1.0, 1.37, 1.9, 2.6)]
    cf = 1.5 * max(samples)
    return (math.factorial(k) * X**a_prime * cf
            * T ** (kappa - k) / (math.pi * (k - kappa)))


def perron_phi_k(oracle: DirichletOracle, pole: PoleData | None, X: float,
                 k: int, a_prime: float | None = None, T: float = 300.0,
                 tol: float = 1e-3) -> float:
    """phi_k(X) by truncated vertical-line integral at Re s = a_prime."""
    if pole is None:
        pole = oracle.pole
    kappa = pole.kappa if pole else 0.0
    if a_prime is None:
        a_prime = (pole.abscissa if pole else 1.0) + 0.5
    if pole and a_prime <= pole.abscissa:
        raise TauberianError("contour must pass right of the pole")
    value = _line_integral(oracle, X, k, a_prime, T)
    bound = _tail_bound(oracle, X, k, a_prime, T, kappa)
    if bound > tol * (abs(value) + 1):
        raise TauberianError(
            f"tail bound {bound:.3g} exceeds tolerance at T={T}; raise T"
        )
    return value


def residue_circle(oracle: DirichletOracle, pole: PoleData, X: float, k: int,
                   radius: float | None = None, nodes: int = 256) -> float:
    """k! times the residue of f(s) X^s / s^(k+1) at the pole, by a circle.

    Trapezoid quadrature on a circle inside the analytic annulus is
    spectrally accurate; the imaginary part is a numerical residual.
    """
    r = radius if radius is not None else pole.delta0 / 2
    theta = 2 * math.pi * np.arange(nodes) / nodes
    s = pole.abscissa + r * np.exp(1j * theta)
    f = oracle.evaluate_line(s)
    vals = f * np.exp(s * math.log(X)) / s ** (k + 1) * (s - pole.abscissa)
    total = complex(np.mean(vals)) * math.factorial(k)
    if abs(total.imag) > 1e-8 * (1 + abs(total.real)):
        raise TauberianError("residue has a non-real part; check the pole data")
    return total.real


def residue_shape(pole: PoleData, X: float, k: int) -> float:
    """Leading residue shape Theta/(b-1)! d^(b-1)/ds^(b-1)[X^s s^-(k+1)] at a.

    Only the top coefficient of the pole's principal part enters; for
    higher-order poles the oracle may carry lower principal-part terms
    that this shape deliberately omits.
    """
    a, b = pole.abscissa, pole.order
    logX = math.log(X)
    # d^j/ds^j [X^s s^-(k+1)] = X^s sum_i C(j,i) logX^(j-i) (-1)^i (k+1)_i s^-(k+1+i)
    j = b - 1
    total = 0.0
    for i in range(j + 1):
        poch = 1.0
        for q in range(i):
            poch *= k + 1 + q
        total += (math.comb(j, i) * logX ** (j - i) * (-1) ** i * poch
                  * a ** -(k + 1 + i))
    return math.factorial(k) * pole.theta / math.factorial(j) * X**a * total


@dataclass(frozen=True)
class ContourReport:
    value_low: float
    value_high: float
    a_low: float
    a_high: float
    tail_low: float
    tail_high: float

    @property
    def difference(self) -> float:
        return abs(self.value_low - self.value_high)

    def consistent(self, tol: float = 1e-3) -> bool:
        scale = abs(self.value_low) + abs(self.value_high) + 1
        return self.difference <= self.tail_low + self.tail_high + tol * scale


def contour_independence(oracle: DirichletOracle, pole: PoleData | None,
                         X: float, k: int, a1: float | None = None,
                         a2: float | None = None,
                         T: float = 300.0) -> ContourReport:
    """Integrate on two lines right of the pole; values must agree."""
    if pole is None:
        pole = oracle.pole
    base = (pole.abscissa if pole else 1.0) + 0.5
    a1 = base if a1 is None else a1
    a2 = base + 1.0 if a2 is None else a2
    kappa = pole.kappa if pole else 0.0
    return ContourReport(
        value_low=_line_integral(oracle, X, k, a1, T),
        value_high=_line_integral(oracle, X, k, a2, T),
        a_low=a1,
        a_high=a2,
        tail_low=_tail_bound(oracle, X, k, a1, T, kappa),
        tail_high=_tail_bound(oracle, X, k, a2, T, kappa),
    )


@dataclass(frozen=True)
class ResidueReport:
    right: float
    left: float
    circle: float
    shape: float

    @property
    def difference(self) -> float:
        return self.right - self.left

    @property
    def rel_error(self) -> float:
        return abs(self.difference - self.circle) / abs(self.circle)


def residue_consistency(oracle: DirichletOracle, pole: PoleData | None,
                        X: float, k: int, T: float = 300.0) -> ResidueReport:
    """Right-line minus left-line integral must equal the pole residue."""
    if pole is None:
        pole = oracle.pole
    if pole is None:
        raise TauberianError("residue consistency needs pole data")
    right = _line_integral(oracle, X, k, pole.abscissa + pole.delta0, T)
    left = _line_integral(oracle, X, k, pole.abscissa - pole.delta0 / 2, T)
    return ResidueReport(
        right=right,
        left=left,
        circle=residue_circle(oracle, pole, X, k),
        shape=residue_shape(pole, X, k),
    )


def descend_k(sampler: Callable[[float], float], k: int, X: float,
              eta: float | None = None, eps: float = 0.5):
    """Bracket phi_(k-1)(X) from phi_k samples at X(1 -/+ eta).

    Since d(phi_k)/d(log X) = k phi_(k-1) and phi_(k-1) is nondecreasing,
    one-sided difference quotients of exact phi_k values enclose the
    target.  eta defaults to the X^-eps schedule, floored so the window
    spans several coefficient jumps.
    """
    if k < 1:
        raise TauberianError("descend needs k >= 1")
    if eta is None:
        eta = max(X**-eps, 20.0 / X)
    if not 0 < eta < 1:
        raise TauberianError("eta must lie in (0, 1)")
    f_lo = float(sampler(X * (1 - eta)))
    f_mid = float(sampler(X))
    f_hi = float(sampler(X * (1 + eta)))
    lower = (f_mid - f_lo) / (-math.log1p(-eta)) / k
    upper = (f_hi - f_mid) / math.log1p(eta) / k
    if lower > upper:
        raise TauberianError(
            "inverted bracket: sampler noise exceeds the bracket width"
        )
    return lower, upper


def predict(pole: PoleData, X: float) -> float:
    """Leading term Theta/(a (b-1)!) X^a (log X)^(b-1)."""
    a, b = pole.abscissa, pole.order
    return (pole.theta / (a * math.factorial(b - 1))
            * X**a * math.log(X) ** (b - 1))


@dataclass(frozen=True)
class CompareReport:
    oracle_name: str
    Xs: tuple
    counts: tuple
    predictions: tuple
    residuals: tuple
    error_exponent: float
    residual_coefficient: float | None

    def rows(self):
        for X, N, P, R in zip(self.Xs, self.counts, self.predictions,
                              self.residuals):
            yield {"X": X, "N": N, "predict": P, "residual": R}


def compare(oracle: DirichletOracle, X_grid, pole: PoleData | None = None) -> CompareReport:
    """Count vs prediction over a grid, with the empirical error exponent.

    The residual N - predict is regressed two ways: log|residual| against
    log X for the error exponent, and (for double poles) against the
    next-lower term X^a (log X)^(b-2) for its coefficient.
    """
    if pole is None:
        pole = oracle.pole
    if pole is None:
        raise TauberianError("compare needs pole data")
    Xs = sorted(float(X) for X in X_grid)
    if len(Xs) < 2:
        raise TauberianError("need at least two grid points")
    counts = [oracle.phi_direct(X, 0) for X in Xs]
    preds = [predict(pole, X) for X in Xs]
    resid = [N - P for N, P in zip(counts, preds)]
    nonzero = [(X, abs(r)) for X, r in zip(Xs, resid) if r != 0]
    if len(nonzero) >= 2:
        lx = np.log([x for x, _ in nonzero])
        lr = np.log([r for _, r in nonzero])
        exponent = float(np.polyfit(lx, lr, 1)[0])
    else:
        exponent = float("-inf")
    coeff = None
    if pole.order >= 2:
        basis = np.array(
            [X**pole.abscissa * math.log(X) ** (pole.order - 2) for X in Xs]
        )
        coeff = float(np.dot(basis, resid) / np.dot(basis, basis))
    return CompareReport(
        oracle_name=oracle.name,
        Xs=tuple(Xs),
        counts=tuple(counts),
        predictions=tuple(preds),
        residuals=tuple(resid),
        error_exponent=exponent,
        residual_coefficient=coeff,
    )
