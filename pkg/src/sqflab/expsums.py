"""Complete exponential sums: Kloosterman-type sums, Gauss sums, and the
character sums S1, S2 whose explicit bounds power the large-modulus range.

All sums are evaluated exactly (complex double accumulation over per-modulus
root-of-unity tables).  S1 carries two independent paths — the literal triple
sum and the Gauss-times-S2 factorization — and the CRT product identity over
a composite modulus is checked against a literal evaluation of the full sum.
Full-sweep helpers return (n, n, n) tables computed with FFTs so exhaustive
bound checks over all multiplier triples stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import factorize, is_prime, jacobi_symbol, phi_of
from .records import VerificationRecord

_KINDS = ("K", "K2", "Gauss", "S1", "S2")
_MAX_LITERAL_MODULUS = 10 ** 4


@dataclass(frozen=True)
class ExpSumValue:
    """One exponential-sum value with its modulus and flavor tag."""

    re: float
    im: float
    modulus: int
    kind: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        coarse = float(self.modulus) ** 3 * (1 + 1e-9) + 1e-9
        if self.magnitude > coarse:
            raise ValueError("value exceeds the coarse modulus^3 sanity bound")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)


@lru_cache(maxsize=64)
def _phase_table(M: int) -> np.ndarray:
    """e(k/M) for k < M; one table per modulus so phases never drift."""
    return np.exp(2j * np.pi * np.arange(M) / M)


@lru_cache(maxsize=64)
def _symbol_table(p: int) -> np.ndarray:
    """Legendre symbols (h/p), h < p, as a float array."""
    return np.array([jacobi_symbol(h, p) for h in range(p)], dtype=np.float64)


def _sum_value(kind: str, modulus: int, z: complex) -> ExpSumValue:
    return ExpSumValue(float(z.real), float(z.imag), modulus, kind)


# ---------------------------------------------------------------------------
# classical sums
# ---------------------------------------------------------------------------

def kloosterman_K(a: int, b: int, q: int) -> ExpSumValue:
    """K(a,b;q) = sum over x coprime to q of e((a x + b xbar)/q)."""
    if q <= 1:
        raise ValueError("require q >= 2")
    if q > _MAX_LITERAL_MODULUS:
        raise ValueError("modulus too large for a literal sum")
    E = _phase_table(q)
    idx = [(a * x + b * pow(x, -1, q)) % q for x in range(1, q) if math.gcd(x, q) == 1]
    return _sum_value("K", q, complex(np.sum(E[idx])) if idx else 0j)


def k2_sum(a: int, b: int, q: int) -> ExpSumValue:
    """K2(a,b;q) = sum over x coprime to q of e((a x + b xbar^2)/q)."""
    if q <= 1:
        raise ValueError("require q >= 2")
    if q > _MAX_LITERAL_MODULUS:
        raise ValueError("modulus too large for a literal sum")
    E = _phase_table(q)
    idx = [(a * x + b * pow(x, -2, q)) % q for x in range(1, q) if math.gcd(x, q) == 1]
    return _sum_value("K2", q, complex(np.sum(E[idx])) if idx else 0j)


def kloosterman_weil_report(p: int) -> VerificationRecord:
    """max |K(a,b;p)| / (2 sqrt(p)) over a,b != 0 mod p — report only; the
    square-root cancellation is not an asserted input anywhere downstream."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    table = np.zeros((p, p))
    for x in range(1, p):
        table[x, pow(x, -1, p)] = 1.0
    K = np.conj(np.fft.fft2(table))
    worst = float(np.max(np.abs(K[1:, 1:])))
    return VerificationRecord.report("expsums.weil", {"p": p},
                                     worst / (2 * math.sqrt(p)), 1.0)


def gauss_sum(t: int, p: int) -> ExpSumValue:
    """sum_{h=1}^{p-1} (h/p) e(t h / p); magnitude sqrt(p) for p not dividing
    t, zero otherwise."""
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    E = _phase_table(p)
    sym = _symbol_table(p)
    h = np.arange(1, p)
    z = complex(np.sum(sym[h] * E[(t * h) % p]))
    return _sum_value("Gauss", p, z)


# ---------------------------------------------------------------------------
# S1 and S2
# ---------------------------------------------------------------------------

def _prime_power(n: int) -> tuple:
    fact = factorize(n).factors
    if len(fact) != 1:
        raise ValueError(f"{n} is not a prime power")
    return fact[0]


def s2_sum(r_pow: int, q: int, m2: int, b: int, c: int, d: int) -> ExpSumValue:
    """S2(r^f, q, m2; b,c,d): the triple sum over alpha,beta,gamma mod r^f
    constrained by r^f | m2 alpha^2 beta - q gamma.  The constraint pins
    gamma, so the evaluation is a double sum."""
    r, f = _prime_power(r_pow)
    if m2 == 0:
        raise ValueError("m2 must be nonzero")
    if q % r == 0:
        raise ValueError("require r coprime to q")
    n = r_pow
    if n > _MAX_LITERAL_MODULUS:
        raise ValueError("modulus too large for a literal sum")
    E = _phase_table(n)
    coef = (m2 * pow(q, -1, n)) % n
    alpha = np.arange(n, dtype=np.int64)
    gamma = (coef * ((alpha * alpha) % n))[:, None] * alpha[None, :] % n
    idx = ((b % n) * alpha[:, None] + (c % n) * alpha[None, :] + (d % n) * gamma) % n
    return _sum_value("S2", n, complex(np.sum(E[idx])))


def s1_sum(p: int, q: int, m2: int, b: int, c: int, d: int,
           method: str = "factored") -> ExpSumValue:
    """S1(p, q, m2; b,c,d) = sum over alpha,beta,gamma mod p of
    ((m2 alpha^2 beta - q gamma)/p) e((b alpha + c beta + d gamma)/p).

    method="factored" uses S1 = gauss_sum(-d qbar, p) * S2(p, ...), an exact
    consequence of substituting h = m2 alpha^2 beta - q gamma; "literal"
    evaluates the triple sum directly as an independent oracle.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if m2 == 0:
        raise ValueError("m2 must be nonzero")
    if (m2 * q) % p == 0:
        raise ValueError("require p coprime to m2 q")
    if method == "factored":
        g = gauss_sum((-d * pow(q, -1, p)) % p, p)
        s2 = s2_sum(p, q, m2, b, c, d)
        return _sum_value("S1", p, g.value * s2.value)
    if method != "literal":
        raise ValueError("method must be 'factored' or 'literal'")
    E = _phase_table(p)
    sym = _symbol_table(p)
    alpha = np.arange(p, dtype=np.int64)
    a2b = ((m2 % p) * ((alpha * alpha) % p))[:, None] * alpha[None, :] % p
    resid = (a2b[:, :, None] - (q % p) * alpha[None, None, :]) % p
    idx = ((b % p) * alpha[:, None, None] + (c % p) * alpha[None, :, None]
           + (d % p) * alpha[None, None, :]) % p
    return _sum_value("S1", p, complex(np.sum(sym[resid] * E[idx])))


def s1_table(p: int, q: int, m2: int) -> np.ndarray:
    """All S1(p,q,m2;b,c,d) at once as a (p,p,p) complex array indexed
    [b,c,d], via a 3D FFT of the Jacobi-symbol cube."""
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    if m2 == 0 or (m2 * q) % p == 0:
        raise ValueError("require p coprime to m2 q, m2 nonzero")
    sym = _symbol_table(p)
    alpha = np.arange(p, dtype=np.int64)
    a2b = ((m2 % p) * ((alpha * alpha) % p))[:, None] * alpha[None, :] % p
    resid = (a2b[:, :, None] - (q % p) * alpha[None, None, :]) % p
    return np.conj(np.fft.fftn(sym[resid]))


def s2_table(r_pow: int, q: int, m2: int) -> np.ndarray:
    """All S2(r^f,q,m2;b,c,d) as a (n,n,n) complex array indexed [b,c,d]."""
    r, f = _prime_power(r_pow)
    if m2 == 0:
        raise ValueError("m2 must be nonzero")
    if q % r == 0:
        raise ValueError("require r coprime to q")
    n = r_pow
    coef = (m2 * pow(q, -1, n)) % n
    alpha = np.arange(n, dtype=np.int64)
    gamma = (coef * ((alpha * alpha) % n))[:, None] * alpha[None, :] % n
    cube = np.zeros((n, n, n))
    ii, jj = np.meshgrid(alpha, alpha, indexing="ij")
    cube[ii, jj, gamma] = 1.0
    return np.conj(np.fft.fftn(cube))


def s2_gcd_bound(r_pow: int, m2: int, b: int, c: int, d: int) -> float:
    """The explicit envelope: 2 r (r,b,c,d m2) at f=1, else
    2 r^{3f/2} (r^f,b,c,d m2)^{1/2} for odd r and 4 2^{3f/2} (...)^{1/2}."""
    r, f = _prime_power(r_pow)
    g = math.gcd(r_pow, math.gcd(b, math.gcd(c, d * m2)))
    if f == 1:
        return 2.0 * r * g
    lead = 4.0 if r == 2 else 2.0
    return lead * r_pow ** 1.5 * math.sqrt(g)


# ---------------------------------------------------------------------------
# CRT factorization over u p1 p2
# ---------------------------------------------------------------------------

def _crt_multiplier(v: int, M: int, Mi: int) -> int:
    """Local additive multiplier: e(v x / M) restricted to the Mi coordinate
    is e(v ((M/Mi)^-1 mod Mi) x_i / Mi)."""
    return (v * pow(M // Mi, -1, Mi)) % Mi


def full_sum_S(u: int, p1: int, p2: int, q: int, m2: int,
               lam: int, mu: int, nu: int) -> complex:
    """Literal evaluation of S(u, p1 p2, q, m2; lam, mu, nu): the sum over
    alpha, beta, gamma mod u p1 p2 with u | m2 alpha^2 beta - q gamma of
    ((m2 alpha^2 beta - q gamma)/(p1 p2)) e((lam alpha + mu beta + nu gamma)
    / (u p1 p2)).

    The congruence pins gamma mod u; the remaining gamma-progression is a
    complete system mod p1 p2, where the Jacobi character's discrete Fourier
    transform collapses it to one coefficient.  Cost O(M^2) for M = u p1 p2.
    """
    _validate_crt_args(u, p1, p2, q, m2)
    P = p1 * p2
    M = u * P
    EM = _phase_table(M)
    EP = _phase_table(P)
    J = np.array([jacobi_symbol(t, P) for t in range(P)], dtype=np.float64)
    ubar = pow(u, -1, P)
    qbar_P = pow(q % P, -1, P)
    k1 = (nu * ubar * qbar_P) % P
    t = np.arange(P)
    jhat = complex(np.sum(J * EP[(-k1 * t) % P]))
    if jhat == 0:
        return 0j
    qbar_u = pow(q % u, -1, u) if u > 1 else 0
    lam, mu, nu = lam % M, mu % M, nu % M
    beta = np.arange(M, dtype=np.int64)
    total = 0j
    for alpha in range(M):
        sq = alpha * alpha
        if u > 1:
            gamma0 = (qbar_u * m2 * sq) % u * beta % u
        else:
            gamma0 = np.zeros(M, dtype=np.int64)
        W = (((m2 * sq) % P) * beta - (q % P) * gamma0) % P
        idx = (lam * alpha + mu * beta + nu * gamma0) % M
        total += complex(np.sum(EM[idx] * EP[(k1 * W) % P]))
    return jhat * total


def crt_product(u: int, p1: int, p2: int, q: int, m2: int,
                lam: int, mu: int, nu: int) -> complex:
    """S1(p1) S1(p2) prod_{r^f || u} S2(r^f) with each factor taking the
    local multipliers of lam, mu, nu for its own modulus."""
    _validate_crt_args(u, p1, p2, q, m2)
    M = u * p1 * p2
    out = 1 + 0j
    for p in (p1, p2):
        out *= s1_sum(p, q, m2, _crt_multiplier(lam, M, p),
                      _crt_multiplier(mu, M, p), _crt_multiplier(nu, M, p)).value
    for r, f in factorize(u).factors:
        n = r ** f
        out *= s2_sum(n, q, m2, _crt_multiplier(lam, M, n),
                      _crt_multiplier(mu, M, n), _crt_multiplier(nu, M, n)).value
    return out


def _validate_crt_args(u: int, p1: int, p2: int, q: int, m2: int) -> None:
    if u < 1 or u > 50:
        raise ValueError("require 1 <= u <= 50")
    if p1 == p2:
        raise ValueError("moduli overlap: p1 = p2")
    for p in (p1, p2):
        if p == 2 or not is_prime(p):
            raise ValueError("p1, p2 must be distinct odd primes")
        if (m2 * q) % p == 0:
            raise ValueError("require p1, p2 coprime to m2 q")
    if p1 * p2 > 400:
        raise ValueError("require p1 p2 <= 400")
    if m2 == 0:
        raise ValueError("m2 must be nonzero")
    if math.gcd(u, p1 * p2 * q * m2) != 1:
        raise ValueError("require u coprime to p1 p2 q m2")


def crt_factor_check(u: int, p1: int, p2: int, q: int, m2: int,
                     b: int, c: int, d: int) -> VerificationRecord:
    """Compare the literal full sum against the factored product."""
    full = full_sum_S(u, p1, p2, q, m2, b, c, d)
    prod = crt_product(u, p1, p2, q, m2, b, c, d)
    tol = 1e-6 * max(1.0, abs(full))
    params = {"u": u, "p1": p1, "p2": p2, "q": q, "m2": m2,
              "b": b, "c": c, "d": d}
    return VerificationRecord.checked("expsums.crt", params,
                                      abs(full - prod), 0.0, tol)
