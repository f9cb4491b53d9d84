"""Exact integer arithmetic: factorization, multiplicative basics, Jacobi
symbols, modular inverses, and a segmented squarefree sieve.

All functions are pure; the shared prime table is immutable after first use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SEGMENT = 1 << 20  # numbers per sieve segment, sized to stay cache-friendly

_prime_table = None  # primes up to _prime_table_limit, grown lazily
_prime_table_limit = 0


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (cached, grow-only)."""
    global _prime_table, _prime_table_limit
    if n > _prime_table_limit:
        limit = max(n, 1 << 16)
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        _prime_table = np.flatnonzero(sieve).astype(np.int64)
        _prime_table_limit = limit
    return _prime_table[: np.searchsorted(_prime_table, n, side="right")]


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition: factors sorted by prime, exponents >= 1."""

    n: int
    factors: tuple  # of (prime, exponent)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("factors must be sorted by prime with exponents >= 1")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError("factor product does not equal n")

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.factors)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10**24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        y, c, m = seed, seed, 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


_TRIAL_LIMIT = 10**6


def factorize(n: int) -> Factorization:
    """Canonical factorization of 1 <= n <= 2**63.

    Trial division by primes up to 10**6, then deterministic primality
    testing plus rho-style splitting for any remaining cofactor.
    """
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    if n > 1 << 63:
        raise ValueError("factorize supports n <= 2**63")
    orig = n
    out = {}
    for p in primes_up_to(min(_TRIAL_LIMIT, math.isqrt(n))):
        p = int(p)
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_prime(v):
            out[v] = out.get(v, 0) + 1
            continue
        g = _pollard_rho(v)
        stack.extend((g, v // g))
    return Factorization(orig, tuple(sorted(out.items())))


@dataclass(frozen=True)
class MultiplicativeProfile:
    mu: int
    phi: int
    d: int
    omega: int
    sigma_core: int
    squarefree_kernel: int


def multiplicative_profile(f: Factorization) -> MultiplicativeProfile:
    """Mobius, totient, divisor count, omega, and the two square/squarefree
    cores: sigma_core = prod of p with p^2 | n, squarefree_kernel = prod of
    p with p exactly dividing n."""
    mu = 1 if not f.factors else (0 if any(e > 1 for _, e in f.factors)
                                  else (-1) ** len(f.factors))
    phi = 1
    d = 1
    sigma_core = 1
    kernel = 1
    for p, e in f.factors:
        phi *= (p - 1) * p ** (e - 1)
        d *= e + 1
        if e >= 2:
            sigma_core *= p
        else:
            kernel *= p
    return MultiplicativeProfile(mu, phi, d, len(f.factors), sigma_core, kernel)


def mu_of(n: int) -> int:
    return multiplicative_profile(factorize(n)).mu


def phi_of(n: int) -> int:
    return multiplicative_profile(factorize(n)).phi


def tau_of(n: int) -> int:
    return multiplicative_profile(factorize(n)).d


def prime_factors(n: int) -> tuple:
    """Sorted distinct primes dividing n (empty for n=1)."""
    return factorize(n).primes


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n; Legendre symbol for prime n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi_symbol requires odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def mod_inverse(x: int, q: int) -> int:
    """Multiplicative inverse of x modulo q, in [1, q-1] (0 when q = 1)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(x, q) != 1:
        raise ValueError(f"{x} is not invertible modulo {q}")
    return pow(x, -1, q)


@dataclass(frozen=True)
class SieveWindow:
    """Squarefree indicator over [lo, hi): flags[i] means lo+i is squarefree.

    The integer 0 is treated as not squarefree.
    """

    lo: int
    hi: int
    flags: np.ndarray

    def count(self) -> int:
        return int(np.count_nonzero(self.flags))

    def squarefree_values(self) -> np.ndarray:
        return self.lo + np.flatnonzero(self.flags)


def squarefree_window(lo: int, hi: int) -> SieveWindow:
    """Sieve the window [lo, hi) by clearing multiples of p^2, p <= sqrt(hi)."""
    if hi <= lo or lo < 0:
        raise ValueError("require 0 <= lo < hi")
    flags = np.ones(hi - lo, dtype=bool)
    if lo == 0:
        flags[0] = False
    for p in primes_up_to(math.isqrt(max(hi - 1, 0))):
        p2 = int(p) * int(p)
        start = (-lo) % p2
        flags[start::p2] = False
    return SieveWindow(lo, hi, flags)


def squarefree_count(X: int) -> int:
    """Q(X) = number of squarefree integers in [1, X], segmented."""
    if X < 1:
        return 0
    total = 0
    lo = 1
    while lo <= X:
        hi = min(lo + _SEGMENT, X + 1)
        total += squarefree_window(lo, hi).count()
        lo = hi
    return total


def squarefree_counts_by_residue(X: int, q: int) -> np.ndarray:
    """Entry a counts squarefree n <= X with n = a (mod q), 0 <= a < q."""
    if q < 1 or q > X:
        raise ValueError("require 1 <= q <= X")
    counts = np.zeros(q, dtype=np.int64)
    lo = 1
    while lo <= X:
        hi = min(lo + _SEGMENT, X + 1)
        vals = squarefree_window(lo, hi).squarefree_values()
        counts += np.bincount(vals % q, minlength=q)
        lo = hi
    return counts
