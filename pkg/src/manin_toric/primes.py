"""Prime sieves and small multiplicative-function tables."""

from __future__ import annotations

import numpy as np


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (empty for n < 2)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p:: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as a sorted list of (p, exponent)."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: list[tuple[int, int]] = []
    m = n
    for p in primes_up_to(int(n ** 0.5) + 1):
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            out.append((p, k))
    if m > 1:
        out.append((m, 1))
    return out


def totient_summatory(n: int) -> int:
    """Sum of Euler's phi(k) for 1 <= k <= n, by sieve."""
    if n < 1:
        return 0
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # p prime: phi still untouched
            phi[p::p] -= phi[p::p] // p
    return int(phi[1:].sum())


def totient_table(n: int) -> np.ndarray:
    """phi(k) for 0 <= k <= n (phi[0] = 0)."""
    phi = np.arange(n + 1, dtype=np.int64)
    if n >= 1:
        phi[0] = 0
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def divisor_count_table(n: int) -> np.ndarray:
    """d(k) = number of divisors, for 0 <= k <= n (d[0] = 0)."""
    d = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        d[k::k] += 1
    return d
