"""Exact enumerative quantities: per-residue error terms, the variance and
correlation sums, the double sum S[m], interval geometry, local counts
u_p / N_d, lattice counts, and the divisor triple sum.

Everything here is either an exact integer count or a float built from exact
counts plus one Euler-product constant; the dispersion identity ties the two
paths together and is checked to 1e-8 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import (mod_inverse, phi_of, prime_factors,
                    squarefree_counts_by_residue, squarefree_window)
from .multiplicative import euler_constant
from .records import ApproxReal, VerificationRecord


# ---------------------------------------------------------------------------
# error vector and variance
# ---------------------------------------------------------------------------

@dataclass
class ResidueErrorVector:
    """Squarefree counts per residue class mod q on [1, X], split as
    count(a) = C(q) X/q + E(X,q,a) on the coprime classes."""

    X: int
    q: int
    counts: np.ndarray
    main_term: ApproxReal
    _errors: dict = field(default_factory=dict, repr=False)

    @property
    def coprime_residues(self) -> np.ndarray:
        return np.nonzero(np.gcd(np.arange(self.q, dtype=np.int64), self.q) == 1)[0]

    def error(self, a: int) -> ApproxReal:
        if math.gcd(a, self.q) != 1:
            raise ValueError("E(X,q,a) is defined for gcd(a,q)=1 only")
        a %= self.q
        if a not in self._errors:
            self._errors[a] = ApproxReal(
                float(self.counts[a]) - self.main_term.value,
                self.main_term.abs_err)
        return self._errors[a]

    def errors_array(self) -> np.ndarray:
        """E over the coprime residues, float64, in residue order."""
        return self.counts[self.coprime_residues].astype(np.float64) \
            - self.main_term.value


def error_vector(X: int, q: int, eps: float = 1e-12) -> ResidueErrorVector:
    """Counts from the segmented sieve plus the main term C(q) X/q."""
    if not (1 <= q <= X):
        raise ValueError("require 1 <= q <= X")
    counts = squarefree_counts_by_residue(X, q)
    cq = euler_constant("C_of_q", eps, arg=q)
    main = ApproxReal(cq.value * X / q, cq.abs_err * X / q)
    return ResidueErrorVector(X, q, counts, main)


@dataclass(frozen=True)
class CorrelationResult:
    X: int
    q: int
    m: int
    S_exact: int
    M2_exact: ApproxReal
    decomposition_residual: float


def _require_coprime(m: int, q: int) -> None:
    if m == 0:
        raise ValueError("m must be nonzero")
    if math.gcd(abs(m), q) != 1:
        raise ValueError("require gcd(m, q) = 1")


def double_sum_S(X: int, q: int, m: int, eps: float = 1e-12) -> int:
    """S[m](X,q) = #{(n1,n2) <= X squarefree, coprime to q, m n1 = n2 (q)},
    via the residue-count reindexing sum_a* cnt(a) cnt(ma mod q)."""
    _require_coprime(m, q)
    vec = error_vector(X, q, eps)
    return _double_sum_from_counts(vec.counts, q, m)


def _double_sum_from_counts(counts: np.ndarray, q: int, m: int) -> int:
    a = np.nonzero(np.gcd(np.arange(q, dtype=np.int64), q) == 1)[0]
    partner = (m * a) % q
    return int(np.sum(counts[a] * counts[partner]))


def _dispersion_parts(X: int, q: int, m: int, eps: float):
    """(direct M2 as ApproxReal, reassembled M2, exact S) for one cell."""
    vec = error_vector(X, q, eps)
    a = vec.coprime_residues
    partner = (m * a) % q
    M = vec.main_term.value
    E = vec.counts.astype(np.float64) - M
    terms = E[a] * E[partner]
    direct = math.fsum(terms.tolist())

    err_m = vec.main_term.abs_err
    err = err_m * float(np.sum(np.abs(E[a]) + np.abs(E[partner]))) \
        + len(a) * err_m * err_m + abs(direct) * 1e-15 \
        + float(np.sum(np.abs(terms))) * 2e-16
    m2 = ApproxReal(direct, err)

    S = _double_sum_from_counts(vec.counts, q, m)
    reassembled = _reassemble_m2(S, int(np.sum(vec.counts[a])), phi_of(q), M)
    return m2, reassembled, S


def variance_M2(X: int, q: int, m: int, eps: float = 1e-12) -> CorrelationResult:
    """M2[m](X,q) = sum over coprime a of E(X,q,a) E(X,q,ma), together with
    the exact double sum and the dispersion-identity residual."""
    _require_coprime(m, q)
    m2, reassembled, S = _dispersion_parts(X, q, m, eps)
    scale = max(1.0, abs(m2.value), abs(reassembled))
    residual = abs(m2.value - reassembled) / scale
    return CorrelationResult(X, q, m, S, m2, residual)


def _reassemble_m2(S: int, coprime_count: int, phi: int, M: float) -> float:
    """S - 2 M sum_{(n,q)=1} mu^2(n) + phi(q) M^2, in exact rational
    arithmetic over the float main term M."""
    from fractions import Fraction
    fm = Fraction(M)
    return float(S - 2 * fm * coprime_count + phi * fm * fm)


def dispersion_check(X: int, q: int, m: int, eps: float = 1e-12) -> VerificationRecord:
    """The dispersion identity: direct M2 against S - 2 C(q)(X/q) Q + phi M^2."""
    _require_coprime(m, q)
    m2, reassembled, S = _dispersion_parts(X, q, m, eps)
    scale = max(1.0, abs(m2.value), abs(reassembled))
    return VerificationRecord.checked(
        "counters.dispersion", {"X": X, "q": q, "m": m, "S": S},
        m2.value, reassembled, 1e-8 * scale)


def pair_enumeration_S(X: int, q: int, m: int) -> int:
    """Literal O(X^2)-pair oracle for double_sum_S (test use; X <= a few 10^3)."""
    _require_coprime(m, q)
    win = squarefree_window(1, X + 1)
    vals = win.squarefree_values()
    vals = vals[np.gcd(vals, q) == 1]
    lhs = (m * vals) % q
    rhs = vals % q
    return int(np.sum(lhs[:, None] == rhs[None, :]))


# ---------------------------------------------------------------------------
# Croft's all-classes variance and the Hooley envelope report
# ---------------------------------------------------------------------------

def croft_variance(X: int, q: int, eps: float = 1e-12) -> ApproxReal:
    """Sum over all residues a mod q of (count(a) - expected(a))^2 with the
    class-dependent expected value
    mu^2(d) (q0/phi(q0)) (6/pi^2) prod_{p|q} (1+1/p)^(-1) X/q,
    d = gcd(a,q), q0 = q/d."""
    if not (1 <= q <= X):
        raise ValueError("require 1 <= q <= X")
    counts = squarefree_counts_by_residue(X, q).astype(np.float64)
    six_over_pi2 = euler_constant("C_of_q", eps, arg=1)
    hq = 1.0
    for p in prime_factors(q):
        hq *= p / (p + 1.0)
    base = six_over_pi2.value * hq * X / q
    base_err = six_over_pi2.abs_err * hq * X / q

    from .arith import mu_of
    g = np.gcd(np.arange(q, dtype=np.int64), q)
    expected = np.zeros(q)
    for d in (int(x) for x in np.unique(g)):
        q0 = q // d
        if mu_of(d) != 0:
            expected[g == d] = base * q0 / phi_of(q0)
    diff = counts - expected
    value = math.fsum((diff * diff).tolist())
    err_e = np.abs(expected) * (base_err / base if base > 0 else 0.0) \
        + np.abs(expected) * 3e-16
    err = float(np.sum(2 * np.abs(diff) * err_e + err_e * err_e)) \
        + abs(value) * 1e-15
    return ApproxReal(value, err)


def hooley_report(X: int, q: int, eps: float = 1e-12) -> float:
    """max_a |E(X,q,a)| / ((X/q)^(1/2) + q^(1/2)); the bound's constant is
    unspecified, so this is a report quantity, never asserted."""
    vec = error_vector(X, q, eps)
    emax = float(np.max(np.abs(vec.errors_array())))
    return emax / (math.sqrt(X / q) + math.sqrt(q))


# ---------------------------------------------------------------------------
# interval geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalIL:
    """I(l) = {n : n in (0,X) and mn + lq in (0,X)} as an open interval."""

    l: int
    m: int
    q: int
    X: float
    lo: float
    hi: float

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float) -> bool:
        return self.lo < t < self.hi

    def member(self, n: int) -> bool:
        """Exact integer membership per the defining set."""
        return 0 < n < self.X and 0 < self.m * n + self.l * self.q < self.X


def interval_I(l: int, m: int, q: int, X: float) -> IntervalIL:
    if m == 0:
        raise ValueError("m must be nonzero")
    if q < 1 or X <= 0:
        raise ValueError("require q >= 1 and X > 0")
    if m > 0:
        lo = max(0.0, (-l * q) / m)
        hi = min(float(X), (X - l * q) / m)
    else:
        lo = max(0.0, (X - l * q) / m)
        hi = min(float(X), (-l * q) / m)
    if hi < lo:
        hi = lo
    return IntervalIL(l, m, q, float(X), lo, hi)


# ---------------------------------------------------------------------------
# local counts u_p and N_d
# ---------------------------------------------------------------------------

def u_p_local(p: int, l: int, m: int, q: int) -> int:
    """#{v mod p^2 : p^2 | v or p^2 | mv + lq} by the five-case table
    (p coprime to q, m squarefree)."""
    if q % p == 0:
        raise ValueError("u_p requires p coprime to q")
    from .arith import mu_of
    if m == 0 or mu_of(abs(m)) == 0:
        raise ValueError("u_p requires squarefree m")
    p2 = p * p
    if m % p == 0:
        if l % p2 == 0:
            return p
        if l % p == 0:
            return p + 1
        return 1
    if l % p2 == 0:
        return 1
    return 2


def u_p_brute(p: int, l: int, m: int, q: int) -> int:
    """Direct count over all p^2 residues; oracle for u_p_local."""
    p2 = p * p
    return sum(1 for v in range(p2) if v % p2 == 0 or (m * v + l * q) % p2 == 0)


def U_d_of(d: int, l: int, m: int, q: int) -> int:
    """U_d(l) = prod_{p | d} u_p(l) for squarefree d coprime to q."""
    out = 1
    for p in prime_factors(d):
        out *= u_p_local(p, l, m, q)
    return out


def N_d_count(d: int, l: int, m: int, q: int, X) -> int:
    """#{n in I(l): gcd(n,q)=1 and d | sigma(n) sigma(mn+lq)} by direct
    enumeration; for squarefree d the condition at p | d is
    p^2 | n or p^2 | mn + lq."""
    if math.gcd(d, q) != 1:
        raise ValueError("require gcd(d, q) = 1")
    from .arith import mu_of
    if mu_of(d) == 0:
        raise ValueError("N_d is used for squarefree d")
    ps = [p * p for p in prime_factors(d)]
    total = 0
    n = 1
    while n < X:
        w = m * n + l * q
        if 0 < w < X and math.gcd(n, q) == 1:
            if all(n % p2 == 0 or w % p2 == 0 for p2 in ps):
                total += 1
        n += 1
    return total


def N_d_main_term(d: int, l: int, m: int, q: int, X) -> float:
    """(phi(q)/q) U_d(l) |I(l)| / d^2, the main-term prediction for N_d."""
    iv = interval_I(l, m, q, X)
    return phi_of(q) / q * U_d_of(d, l, m, q) * iv.length / (d * d)


def N_d_report(d: int, l: int, m: int, q: int, X) -> VerificationRecord:
    exact = N_d_count(d, l, m, q, X)
    main = N_d_main_term(d, l, m, q, X)
    return VerificationRecord.report(
        "counters.N_d", {"d": d, "l": l, "m": m, "q": q, "X": X},
        float(exact), main)


# ---------------------------------------------------------------------------
# lattice counts and the divisor triple sum
# ---------------------------------------------------------------------------

def lattice_count_N(J: int, K: int, m1: int, m2: int, X: int, q: int) -> int:
    """#{(j,k,u,v): J<j<=2J, K<k<=2K, gcd(jk,q)=1, 0<j^2 u<X, 0<k^2 v<X,
    m1 j^2 u = m2 k^2 v (mod q)}; per-class counting, O(JK + K*X/K^2)."""
    if J < 1 or K < 1 or X < 1 or q < 1:
        raise ValueError("require J, K, X, q >= 1")
    if math.gcd(abs(m1) * abs(m2), q) != 1:
        raise ValueError("require gcd(m1 m2, q) = 1")
    total = 0
    for j in range(J + 1, 2 * J + 1):
        if math.gcd(j, q) != 1:
            continue
        uj = (X - 1) // (j * j)
        if uj < 1:
            continue
        for k in range(K + 1, 2 * K + 1):
            if math.gcd(k, q) != 1:
                continue
            vk = (X - 1) // (k * k)
            if vk < 1:
                continue
            if q == 1:
                total += uj * vk
                continue
            c = (m2 * k * k * mod_inverse(m1 * j * j, q)) % q
            v = np.arange(1, vk + 1, dtype=np.int64)
            r = (c * v) % q
            hits = np.where((r >= 1) & (r <= uj), (uj - r) // q + 1, 0)
            hits = hits + np.where(r == 0, uj // q, 0)
            total += int(hits.sum())
    return total


def lattice_count_brute(J: int, K: int, m1: int, m2: int, X: int, q: int) -> int:
    """Four nested loops; oracle for lattice_count_N at small X."""
    total = 0
    for j in range(J + 1, 2 * J + 1):
        for k in range(K + 1, 2 * K + 1):
            if math.gcd(j * k, q) != 1:
                continue
            u = 1
            while j * j * u < X:
                v = 1
                while k * k * v < X:
                    if (m1 * j * j * u - m2 * k * k * v) % q == 0:
                        total += 1
                    v += 1
                u += 1
    return total


def lattice_reference(J: int, K: int, X: int, q: int) -> float:
    """(X/q)(X/(JK) + X K / J^2); the comparison bound has an unspecified
    constant, so it is reported, never asserted."""
    return X / q * (X / (J * K) + X * K / (J * J))


def divisor_triple_sum(K: int, S: int, X: int, q: int) -> int:
    """sum over K<k<=2K, 1<=l<=X/q, 1<=v<=S with k^2 v - l q >= 1 of
    d(k^2 v - l q), exact via a divisor-count table."""
    if min(K, S, X, q) < 1:
        raise ValueError("require K, S, X, q >= 1")
    if S * K * K > X:
        raise ValueError("require S <= X / K^2")
    lmax = X // q
    if lmax < 1:
        return 0
    nmax = (2 * K) ** 2 * S
    dtab = _divisor_table(nmax)
    total = 0
    v = np.arange(1, S + 1, dtype=np.int64)
    for k in range(K + 1, 2 * K + 1):
        base = k * k * v
        for l in range(1, lmax + 1):
            args = base - l * q
            good = args >= 1
            if good.any():
                total += int(dtab[args[good]].sum())
    return total


def _divisor_table(n: int) -> np.ndarray:
    d = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        d[i::i] += 1
    return d


def divisor_triple_reference(K: int, S: int, X: int, q: int,
                             eta: float = 0.1) -> float:
    """(X/q)(X^(1/2+eta) + X L^3 / K), L = log X; report-only comparison."""
    L = math.log(X)
    return X / q * (X ** (0.5 + eta) + X * L ** 3 / K)
