"""Multiplicative functions (kappa, h, beta, f_q), the Gamma factors, and
Euler-product constants with rigorous truncation-error bounds.

Infinite products over primes are evaluated by zeta-factor acceleration:
the local factor f(p) = num(1/p)/den(1/p) is rewritten as
prod_k zeta(k)^{-e_k} times a residual local factor r(p) = 1 + O(p^-(J+1)),
so a short truncated product meets a 1e-12 error target.  zeta itself is
computed in-house by Euler-Maclaurin summation in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf, bernoulli

from .arith import factorize, mu_of, phi_of, prime_factors, primes_up_to
from .records import ApproxReal, VerificationRecord

_WORK_PREC = 180  # bits; leaves ~40 guard digits below the 1e-12 default eps


# ---------------------------------------------------------------------------
# basic multiplicative functions (exact rationals)
# ---------------------------------------------------------------------------

def kappa(l: int) -> Fraction:
    """Multiplicative: (p^2-p-1)/(p^2-1) at p, (p^2-p)/(p^2-1) at p^2,
    0 at p^alpha for alpha >= 3; kappa(1) = 1."""
    if l < 1:
        raise ValueError("kappa requires l >= 1")
    out = Fraction(1)
    for p, e in factorize(l).factors:
        if e == 1:
            out *= Fraction(p * p - p - 1, p * p - 1)
        elif e == 2:
            out *= Fraction(p * p - p, p * p - 1)
        else:
            return Fraction(0)
    return out


def h_of(d: int) -> Fraction:
    """h(d) = mu^2(d) * prod_{p|d} (1 - 2/p^2)^(-1), exact."""
    if d < 1:
        raise ValueError("h_of requires d >= 1")
    out = Fraction(1)
    for p, e in factorize(d).factors:
        if e > 1:
            return Fraction(0)
        out *= Fraction(p * p, p * p - 2)
    return out


def beta_of(t: int) -> Fraction:
    """Multiplicative: 2/(p^2-2) at p, -p^2/(p^2-2) at p^2, 0 for higher
    powers; satisfies h = 1 * beta (Dirichlet convolution)."""
    if t < 1:
        raise ValueError("beta_of requires t >= 1")
    out = Fraction(1)
    for p, e in factorize(t).factors:
        if e == 1:
            out *= Fraction(2, p * p - 2)
        elif e == 2:
            out *= Fraction(-p * p, p * p - 2)
        else:
            return Fraction(0)
    return out


def gq_sum(l: int, r: int) -> Fraction:
    """sum over d with d^2 | l, gcd(d,r)=1 of h(d)/d^2, exact."""
    if l == 0 or r == 0:
        raise ValueError("gq_sum requires nonzero l and r")
    core = 1
    for p, e in factorize(abs(l)).factors:
        core *= p ** (e // 2)
    total = Fraction(0)
    for d in _divisors(core):
        if math.gcd(d, r) == 1:
            total += h_of(d) / (d * d)
    return total


def gq_product(l: int, r: int) -> Fraction:
    """prod over p with p^2 | l, p not dividing r of (p^2-1)/(p^2-2), exact."""
    if l == 0 or r == 0:
        raise ValueError("gq_product requires nonzero l and r")
    out = Fraction(1)
    for p, e in factorize(abs(l)).factors:
        if e >= 2 and r % p != 0:
            out *= Fraction(p * p - 1, p * p - 2)
    return out


def _divisors(n: int) -> list:
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# ---------------------------------------------------------------------------
# Gamma factors
# ---------------------------------------------------------------------------

def gamma_an(m: int) -> float:
    """Analytic factor: (sqrt(m)+1-sqrt(m-1))/m for m>0, and
    (sqrt(1-m)-sqrt(-m)-1)/(-m) for m<0."""
    if m == 0:
        raise ValueError("gamma_an requires m != 0")
    if m > 0:
        return (math.sqrt(m) + 1 - math.sqrt(m - 1)) / m
    return (math.sqrt(1 - m) - math.sqrt(-m) - 1) / (-m)


def gamma_ar(m: int) -> float:
    """Arithmetic factor for squarefree m:
    prod_{p | m} (1 + (p+sqrt(p)+1)/(p^(3/2)+sqrt(p)+1))^(-1)."""
    if m == 0:
        raise ValueError("gamma_ar requires m != 0")
    fac = factorize(abs(m))
    if any(e > 1 for _, e in fac.factors):
        raise ValueError("gamma_ar is only defined here for squarefree m")
    with mp.workprec(_WORK_PREC):
        out = mpf(1)
        for p, _ in fac.factors:
            sp = mp.sqrt(p)
            out /= 1 + (p + sp + 1) / (p * sp + sp + 1)
        return float(out)


# ---------------------------------------------------------------------------
# f_q
# ---------------------------------------------------------------------------

def _require_valid_mq(m: int, q: int) -> None:
    if m == 0:
        raise ValueError("m must be nonzero")
    if q < 1:
        raise ValueError("q must be a positive integer")
    if math.gcd(abs(m), q) != 1:
        raise ValueError("require gcd(m, q) = 1")


def f_q_rational_part(l: int, m: int, q: int) -> Fraction:
    """The exact finite-product part of f_q(l, m): everything except the
    leading C_2 constant.  Divisibility conditions use |m| and |l|."""
    _require_valid_mq(m, q)
    if l == 0:
        raise ValueError("l = 0 goes through f_q_zero")
    m_abs = abs(m)
    out = Fraction(1)
    for p in prime_factors(m_abs):
        out *= Fraction(p * p - 1, p * p - 2)
    for p in prime_factors(q):
        out *= Fraction(p * p - p, p * p - 2)
    out *= kappa(math.gcd(abs(l), m_abs * m_abs))
    for p, e in factorize(abs(l)).factors:
        if e >= 2 and m_abs % p != 0 and q % p != 0:
            out *= Fraction(p * p - 1, p * p - 2)
    return out


def f_q_of(l: int, m: int, q: int, eps: float = 1e-12) -> ApproxReal:
    """f_q(l, m) for l != 0: C_2 times an exact rational local product;
    the error bound comes only from the C_2 truncation."""
    rat = f_q_rational_part(l, m, q)
    c2 = euler_constant("C2", eps)
    val = c2.value * float(rat)
    err = c2.abs_err * float(abs(rat)) + abs(val) * 1e-15
    return ApproxReal(val, err)


def f_q_zero(m: int, q: int, eps: float = 1e-12) -> ApproxReal:
    """f_q(0, m) via the closed form phi(|m|q)/(|m|q) * C(|m|q)."""
    _require_valid_mq(m, q)
    mq = abs(m) * q
    rat = Fraction(phi_of(mq), mq)
    c = euler_constant("C_of_q", eps, arg=mq)
    val = c.value * float(rat)
    return ApproxReal(val, c.abs_err * float(rat) + abs(val) * 1e-15)


def f_q_zero_local_factors(p: int, m: int, q: int) -> tuple:
    """Local factor at prime p of the literal infinite product defining
    f_q(0, m), paired with the local factor of the closed form
    phi(|m|q)/(|m|q) * C(|m|q).  Both exact rationals; they must be equal."""
    _require_valid_mq(m, q)
    m_abs = abs(m)
    p2 = p * p
    literal = Fraction(p2 - 2, p2)            # C_2 local factor
    if m_abs % p == 0:
        literal *= Fraction(p2 - 1, p2 - 2)   # p | m product
        literal *= Fraction(p2 - p, p2 - 1)   # kappa(m^2) local factor, exponent 2
    if q % p == 0:
        literal *= Fraction(p2 - p, p2 - 2)   # p | q product
    if m_abs % p != 0 and q % p != 0:
        literal *= Fraction(p2 - 1, p2 - 2)   # p^2 | 0 holds for every p
    if (m_abs * q) % p == 0:
        closed = Fraction(p - 1, p)
    else:
        closed = Fraction(p2 - 1, p2)
    return literal, closed


# ---------------------------------------------------------------------------
# zeta by Euler-Maclaurin
# ---------------------------------------------------------------------------

_zeta_cache = {}


def zeta_em(s, N: int = 128, M: int = 24):
    """zeta(s) for real s != 1 (s > -(2M-1)) by Euler-Maclaurin:

        zeta(s) = sum_{n<=N} n^-s + N^(1-s)/(s-1) - N^-s/2
                  + sum_{i=1..M} B_2i/(2i)! * (s)_(2i-1) * N^(-s-2i+1) + R,

    with |R| below the working precision for the default N, M.  Returns an
    mpf at the caller's precision.
    """
    key = (str(s), N, M, mp.prec)
    if key in _zeta_cache:
        return _zeta_cache[key]
    with mp.workprec(mp.prec + 40):
        if isinstance(s, Fraction):
            s = mpf(s.numerator) / s.denominator
        s = mpf(s)
        if s == 1:
            raise ValueError("zeta pole at s = 1")
        total = mp.fsum(mpf(n) ** (-s) for n in range(1, N + 1))
        total += mpf(N) ** (1 - s) / (s - 1)
        total -= mpf(N) ** (-s) / 2
        rising = s  # (s)_(2i-1) = s (s+1) ... (s+2i-2)
        for i in range(1, M + 1):
            total += (bernoulli(2 * i) / mp.factorial(2 * i)) * rising \
                * mpf(N) ** (-s - 2 * i + 1)
            rising *= (s + 2 * i - 1) * (s + 2 * i)
        # remainder <= |B_(2M+2)/(2M+2)! * (s)_(2M+1) * N^(-s-2M-1)|
        rem = abs(bernoulli(2 * M + 2) / mp.factorial(2 * M + 2)
                  * rising * mpf(N) ** (-s - 2 * M - 1))
        if rem > mpf(2) ** (-mp.prec) * (abs(total) + 1):
            raise ArithmeticError("Euler-Maclaurin depth insufficient")
    _zeta_cache[key] = total
    return total


# ---------------------------------------------------------------------------
# accelerated Euler products
# ---------------------------------------------------------------------------

_SERIES_ORDER = 64
_ZETA_DEPTH = 8        # extract zeta(2)..zeta(8); residual is 1 + O(p^-9)
_GROWTH_BASE = 2.5     # |series coeff k| <= D * 2.5^k (min root modulus 1/2)


def _log_series(coeffs: list) -> list:
    """Power-series log of 1 + a_1 x + ... (exact Fractions, _SERIES_ORDER)."""
    a = [Fraction(c) for c in coeffs] + [Fraction(0)] * _SERIES_ORDER
    if a[0] != 1:
        raise ValueError("local factor must have constant term 1")
    ell = [Fraction(0)] * (_SERIES_ORDER + 1)
    for k in range(1, _SERIES_ORDER + 1):
        acc = k * a[k]
        for j in range(1, k):
            acc -= j * ell[j] * a[k - j]
        ell[k] = Fraction(acc, k)
    return ell


@dataclass(frozen=True)
class LocalFactorFn:
    """Euler local factor p -> num(1/p)/den(1/p) with declared tail data:
    |factor(p) - 1| <= tail_coef * p^(-tail_exponent)."""

    name: str
    num: tuple
    den: tuple
    tail_exponent: int
    tail_coef: float

    def factor(self, p: int) -> Fraction:
        x = Fraction(1, p)
        num = sum(Fraction(c) * x**i for i, c in enumerate(self.num))
        den = sum(Fraction(c) * x**i for i, c in enumerate(self.den))
        return num / den

    def tail_ok(self, p: int) -> bool:
        return float(abs(self.factor(p) - 1)) <= self.tail_coef / p**self.tail_exponent


LOCAL_FACTORS = {
    # (1-x)^2 (1+2x) = 1 - 3x^2 + 2x^3
    "C": LocalFactorFn("C", (1, 0, -3, 2), (1,), 2, 3.0),
    "C2": LocalFactorFn("C2", (1, 0, -2), (1,), 2, 2.0),
    # (1-3x^2+2x^3)/(1-2x^2) - 1 = -x^2 (1-2x)/(1-2x^2), magnitude <= x^2
    "Cprime": LocalFactorFn("Cprime", (1, 0, -3, 2), (1, 0, -2), 2, 1.0),
    "C_beta": LocalFactorFn("C_beta", (1, 0, -3, 2), (1, 0, -2), 2, 1.0),
    "sum_h_d2": LocalFactorFn("sum_h_d2", (1, 0, -1), (1, 0, -2), 2, 2.0),
    "sum_h_d4": LocalFactorFn("sum_h_d4", (1, 0, -2, 0, 1), (1, 0, -2), 4, 2.0),
}


@lru_cache(maxsize=None)
def _accelerated_product(name: str, target_exp: int) -> tuple:
    """prod over all primes of the named local factor, with zeta acceleration.

    Returns (value: mpf-as-str storage avoided; actual mpf, tail_bound: float)
    computed at _WORK_PREC with truncation point chosen so the tail factor
    is below 10^-target_exp.
    """
    lf = LOCAL_FACTORS[name]
    with mp.workprec(_WORK_PREC):
        series = [x - y for x, y in zip(_log_series(list(lf.num)),
                                        _log_series(list(lf.den)))]
        if series[1] != 0:
            raise ArithmeticError("divergent product: x^1 term present")
        exponents = {}
        for k in range(2, _ZETA_DEPTH + 1):
            e_k = series[k]
            if e_k == 0:
                continue
            exponents[k] = e_k
            # subtract e_k * -log(1 - x^k) = e_k * sum_j x^(kj)/j
            for j in range(1, _SERIES_ORDER // k + 1):
                series[k * j] -= e_k / j
        # residual log-series coefficient envelope, geometric beyond the
        # computed order because every root of num/den has modulus >= 1/2
        growth = max((abs(series[k]) / Fraction(5, 2) ** k
                      for k in range(2, _SERIES_ORDER + 1) if series[k] != 0),
                     default=Fraction(0))
        # choose truncation P so sum_{p>P} |log r(p)| < 10^-target_exp
        P = 1000
        while True:
            tail = mpf(0)
            for k in range(_ZETA_DEPTH + 1, _SERIES_ORDER + 1):
                if series[k]:
                    # sum_{p>P} p^-k <= P^(1-k)/(k-1)
                    tail += abs(mpf(series[k].numerator) / series[k].denominator) \
                        * mpf(P) ** (1 - k) / (k - 1)
            tail += mpf(float(growth)) * (mpf(_GROWTH_BASE) / P) ** (_SERIES_ORDER + 1) \
                / (1 - mpf(_GROWTH_BASE) / P) * 2
            tail_factor = mp.expm1(tail)
            if tail_factor < mpf(10) ** (-target_exp) or P >= 10**7:
                break
            P *= 4
        value = mpf(1)
        for k, e_k in exponents.items():
            zk = zeta_em(k)
            value *= zk ** (mpf(e_k.numerator) / e_k.denominator)
        for p in primes_up_to(P):
            p = int(p)
            r = lf.factor(p)
            rp = mpf(r.numerator) / r.denominator
            for k, e_k in exponents.items():
                rp *= (1 - mpf(p) ** (-k)) ** (mpf(e_k.numerator) / e_k.denominator)
            value *= rp
        return value, float(tail_factor)


def _finite_local_product(name: str, r: int) -> Fraction:
    lf = LOCAL_FACTORS[name]
    out = Fraction(1)
    for p in prime_factors(r):
        out *= lf.factor(p)
    return out


def euler_product_mp(kind: str, r: int = 1, target_exp: int = 26):
    """(mpf value, tail-factor bound) for the gcd-restricted products
    sum_h_d2 / sum_h_d4 / C_beta at full working precision; used where a
    float-rounded constant would lose too much in downstream cancellation."""
    with mp.workprec(_WORK_PREC):
        base, tail = _accelerated_product(kind, target_exp)
        rat = _finite_local_product(kind, r)
        return base / (mpf(rat.numerator) / rat.denominator), tail


def euler_constant(kind: str, eps: float = 1e-12, arg: int = None) -> ApproxReal:
    """Named Euler-product constants with abs_err <= eps.

    Kinds: C, C2, Cprime, C_of_q (arg=q), sum_h_d2 (arg=r), sum_h_d4 (arg=r),
    C_beta (arg=r), hall_factor (arg=q).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    target_exp = max(14, int(-math.log10(eps)) + 2)
    with mp.workprec(_WORK_PREC):
        if kind == "C_of_q":
            q = _require_arg(arg)
            val = 1 / zeta_em(2)
            rat = Fraction(1)
            for p in prime_factors(q):
                rat *= Fraction(p * p, p * p - 1)
            val *= mpf(rat.numerator) / rat.denominator
            return _to_approx(val, mpf(2) ** (60 - _WORK_PREC) * abs(val), eps, kind)
        if kind == "hall_factor":
            q = _require_arg(arg)
            rat = Fraction(1)
            for p in prime_factors(q):
                rat *= Fraction(p, p + 2)
            val = mpf(rat.numerator) / rat.denominator
            return _to_approx(val, mpf(0), eps, kind)
        if kind == "C":
            base, tail = _accelerated_product("C", target_exp)
            val = zeta_em(Fraction(3, 2)) / mp.pi * base
        elif kind == "C2":
            base, tail = _accelerated_product("C2", target_exp)
            val = base
        elif kind == "Cprime":
            base, tail = _accelerated_product("Cprime", target_exp)
            val = zeta_em(Fraction(3, 2)) / (2 * mp.pi) * base
        elif kind in ("C_beta", "sum_h_d2", "sum_h_d4"):
            r = _require_arg(arg if arg is not None else 1)
            val, tail = euler_product_mp(kind, r, target_exp)
        else:
            raise ValueError(f"unknown euler_constant kind: {kind}")
        err = abs(val) * (mpf(tail) + mpf(2) ** (60 - _WORK_PREC))
        return _to_approx(val, err, eps, kind)


def _require_arg(arg) -> int:
    if arg is None or int(arg) < 1:
        raise ValueError("this kind requires a positive integer argument")
    return int(arg)


def _to_approx(val, err, eps: float, kind: str) -> ApproxReal:
    err_f = float(err) + abs(float(val)) * 2e-16
    if err_f > eps:
        raise ArithmeticError(f"cannot reach eps={eps} for kind {kind}")
    return ApproxReal(float(val), err_f)


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------

def kappa_mu_sums(m: int) -> tuple:
    """The three sums over rho*sigma | m^2 of kappa(rho)mu(sigma) weighted by
    1/(rho sigma), 1, and sqrt(rho sigma); m squarefree.  Returns
    (Fraction, Fraction, float)."""
    m_abs = abs(m)
    if mu_of(m_abs) == 0:
        raise ValueError("kappa_mu_sums requires squarefree m")
    m2 = m_abs * m_abs
    divs = _divisors(m2)
    s_recip = Fraction(0)
    s_plain = Fraction(0)
    with mp.workprec(_WORK_PREC):
        s_sqrt = mpf(0)
        for rho in divs:
            krho = kappa(rho)
            if krho == 0:
                continue
            for sigma in _divisors(m2 // rho):
                msig = mu_of(sigma)
                if msig == 0:
                    continue
                term = krho * msig
                s_recip += term / (rho * sigma)
                s_plain += term
                s_sqrt += (mpf(term.numerator) / term.denominator) \
                    * mp.sqrt(rho * sigma)
        return s_recip, s_plain, float(s_sqrt)


def kappa_mu_products(m: int) -> tuple:
    """Closed product forms matching kappa_mu_sums, per prime p | m:
    (p^2-1)/p^2, (p^2-p)/(p^2-1), (p^2-p^(3/2)+p-1)/(p^2-1)."""
    m_abs = abs(m)
    p_recip = Fraction(1)
    p_plain = Fraction(1)
    with mp.workprec(_WORK_PREC):
        p_sqrt = mpf(1)
        for p in prime_factors(m_abs):
            p_recip *= Fraction(p * p - 1, p * p)
            p_plain *= Fraction(p * p - p, p * p - 1)
            p_sqrt *= (p * p - p * mp.sqrt(p) + p - 1) / (p * p - 1)
        return p_recip, p_plain, float(p_sqrt)


def h_series_partials(r: int, D: int = 10**4) -> tuple:
    """Partial sums over squarefree d <= D, gcd(d,r)=1 of h(d)/d^2 and
    h(d)/d^4 (floats), with rigorous tail bounds for the two full series."""
    import numpy as np
    from .arith import squarefree_window

    win = squarefree_window(1, D + 1)
    d_vals = win.squarefree_values()
    mask = np.gcd(d_vals, r) == 1
    d_vals = d_vals[mask].astype(np.float64)
    hv = np.ones_like(d_vals)
    for p in primes_up_to(D):
        p = int(p)
        sel = (d_vals % p) == 0
        if sel.any():
            hv[sel] *= p * p / (p * p - 2.0)
    s2 = float(np.sum(hv / d_vals**2))
    s4 = float(np.sum(hv / d_vals**4))
    hmax = 1.0 / euler_constant("C2", 1e-13).value
    tail2 = hmax / D
    tail4 = hmax / (3 * D**3)
    return s2, s4, tail2, tail4


def identity_suite(m_max: int, r_max: int) -> list:
    """Exact identity battery: the three kappa-mu sums against their product
    forms for squarefree m <= m_max; the two h-series against their Euler
    products for r <= r_max; and the gcd-restricted h(d)/d^2 identity."""
    if m_max < 1 or r_max < 1:
        raise ValueError("m_max and r_max must be >= 1")
    records = []
    for m in range(1, m_max + 1):
        if mu_of(m) == 0:
            continue
        s1, s2, s3 = kappa_mu_sums(m)
        q1, q2, q3 = kappa_mu_products(m)
        records.append(VerificationRecord(
            "products.kmu_recip", {"m": m}, float(s1), float(q1), 0.0,
            "assert", s1 == q1))
        records.append(VerificationRecord(
            "products.kmu_plain", {"m": m}, float(s2), float(q2), 0.0,
            "assert", s2 == q2))
        records.append(VerificationRecord.checked(
            "products.kmu_sqrt", {"m": m}, s3, q3, 1e-12 * max(1.0, abs(q3))))
    for r in range(1, r_max + 1):
        s2, s4, tail2, tail4 = h_series_partials(r)
        p2 = euler_constant("sum_h_d2", 1e-13, arg=r)
        p4 = euler_constant("sum_h_d4", 1e-13, arg=r)
        records.append(VerificationRecord.checked(
            "products.h_d2", {"r": r}, s2, p2.value, tail2 + p2.abs_err + 1e-12))
        records.append(VerificationRecord.checked(
            "products.h_d4", {"r": r}, s4, p4.value, tail4 + p4.abs_err + 1e-12))
    for r in (1, 2, 6, 30):
        bad = 0
        first_bad = 0
        for l in range(1, 10**4 + 1):
            if gq_sum(l, r) != gq_product(l, r):
                bad += 1
                if not first_bad:
                    first_bad = l
        records.append(VerificationRecord(
            "gq.exact", {"r": r, "l_max": 10**4, "first_failure": first_bad},
            float(bad), 0.0, 0.0, "assert", bad == 0))
    return records
