"""Exponential sums: Kloosterman/Gauss values against hand-computable cases,
S1/S2 against literal triple-sum oracles, the explicit gcd envelopes over
exhaustive multiplier sweeps, and the CRT factorization identity."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqflab.arith import phi_of
from sqflab.expsums import (ExpSumValue, crt_factor_check, crt_product,
                            full_sum_S, gauss_sum, k2_sum, kloosterman_K,
                            kloosterman_weil_report, s1_sum, s1_table,
                            s2_gcd_bound, s2_sum, s2_table)


def _e(k, n):
    return cmath.exp(2j * cmath.pi * k / n)


# ---------------------------------------------------------------------------
# classical sums
# ---------------------------------------------------------------------------

def test_kloosterman_values_and_symmetry():
    for q in (2, 3, 5, 12, 30):
        assert kloosterman_K(0, 0, q).value == pytest.approx(phi_of(q))
    # x + xbar runs over {2, 0, 0, 3} mod 5
    want = 2 + 2 * math.cos(4 * math.pi / 5)
    got = kloosterman_K(1, 1, 5)
    assert got.value == pytest.approx(want, abs=1e-12)
    assert got.kind == "K" and got.modulus == 5
    for (a, b, q) in [(1, 2, 7), (3, 5, 11), (2, 9, 15)]:
        # x -> xbar swaps the roles of a and b; x -> -x conjugates
        assert kloosterman_K(a, b, q).value == pytest.approx(
            kloosterman_K(b, a, q).value, abs=1e-10)
        assert abs(kloosterman_K(a, b, q).im) < 1e-10


def test_kloosterman_rejections():
    with pytest.raises(ValueError):
        kloosterman_K(1, 1, 1)
    with pytest.raises(ValueError):
        kloosterman_K(1, 1, 10 ** 4 + 1)


def test_k2_values():
    for q in (3, 5, 14):
        assert k2_sum(0, 0, q).value == pytest.approx(phi_of(q))
    # x = 1: e((1+1)/3); x = 2: xbar^2 = 1, e((2+1)/3) = 1
    want = 1 + _e(2, 3)
    assert k2_sum(1, 1, 3).value == pytest.approx(want, abs=1e-12)
    for (a, b, q) in [(1, 1, 7), (2, 3, 11), (1, 4, 9)]:
        lhs = k2_sum(a, b, q).value.conjugate()
        rhs = k2_sum(-a, -b, q).value
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_gauss_values():
    for p in (3, 5, 7, 11, 19, 31):
        g1 = gauss_sum(1, p)
        assert abs(g1.value) == pytest.approx(math.sqrt(p), rel=1e-12)
        # classical evaluation: sqrt(p) or i sqrt(p) by p mod 4
        if p % 4 == 1:
            assert g1.value == pytest.approx(math.sqrt(p), abs=1e-10)
        else:
            assert g1.value == pytest.approx(1j * math.sqrt(p), abs=1e-10)
        assert gauss_sum(0, p).value == pytest.approx(0.0, abs=1e-12)
        assert gauss_sum(p, p).value == pytest.approx(0.0, abs=1e-12)
        for t in range(1, p):
            from sqflab.arith import jacobi_symbol
            assert gauss_sum(t, p).value == pytest.approx(
                jacobi_symbol(t, p) * g1.value, abs=1e-10)


def test_gauss_rejections():
    with pytest.raises(ValueError):
        gauss_sum(1, 2)
    with pytest.raises(ValueError):
        gauss_sum(1, 9)


def test_weil_report():
    rec = kloosterman_weil_report(53)
    assert rec.mode == "report_only" and rec.passed
    assert 0.0 < rec.lhs <= 1.0 + 1e-9
    with pytest.raises(ValueError):
        kloosterman_weil_report(10)


# ---------------------------------------------------------------------------
# S2 against the literal triple sum
# ---------------------------------------------------------------------------

def _s2_brute(n, q, m2, b, c, d):
    """Direct sum over all (alpha, beta, gamma) with n | m2 a^2 b - q g."""
    total = 0j
    for a in range(n):
        for be in range(n):
            lhs = (m2 * a * a * be) % n
            for g in range(n):
                if (lhs - q * g) % n == 0:
                    total += _e((b * a + c * be + d * g) % n, n)
    return total


def test_s2_vs_brute():
    cases = [(3, 1, 1), (4, 3, 1), (5, 2, -2), (8, 5, 3),
             (9, 2, 1), (25, 3, 2), (27, 5, -1)]
    for (n, q, m2) in cases:
        for (b, c, d) in [(0, 0, 0), (1, 0, 0), (1, 2, 1), (n - 1, 1, 2)]:
            got = s2_sum(n, q, m2, b, c, d)
            want = _s2_brute(n, q, m2, b, c, d)
            assert got.value == pytest.approx(want, abs=1e-9), (n, q, m2, b, c, d)
            assert got.kind == "S2"


def test_s2_reflection_and_reality():
    for (n, q, m2) in [(5, 2, 3), (9, 2, 1), (8, 3, 5)]:
        tab = s2_table(n, q, m2)
        # S2 is always real: gamma is pinned, terms pair off conjugately
        assert float(np.max(np.abs(tab.imag))) < 1e-9
        for (b, c, d) in [(1, 2, 3), (0, 1, n - 1), (2, 2, 2)]:
            assert tab[b, c, d] == pytest.approx(
                s2_sum(n, q, m2, b, c, d).value, abs=1e-9)
            lhs = s2_sum(n, q, m2, b, c, d).value.conjugate()
            rhs = s2_sum(n, q, m2, -b, -c, -d).value
            assert lhs == pytest.approx(rhs, abs=1e-9)


def test_s2_bound_exhaustive():
    for (n, q, m2) in [(3, 1, 1), (5, 2, -2), (9, 2, 1), (4, 3, 1),
                       (8, 3, 5), (25, 3, 2)]:
        tab = s2_table(n, q, m2)
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    bound = s2_gcd_bound(n, m2, b, c, d)
                    assert abs(tab[b, c, d]) <= bound + 1e-9, (n, q, m2, b, c, d)


def test_s2_rejections():
    with pytest.raises(ValueError):
        s2_sum(6, 1, 1, 0, 0, 0)  # not a prime power
    with pytest.raises(ValueError):
        s2_sum(9, 3, 1, 0, 0, 0)  # q shares the prime
    with pytest.raises(ValueError):
        s2_sum(9, 1, 0, 0, 0, 0)


# ---------------------------------------------------------------------------
# S1: two paths, vanishing, bound, reality pattern
# ---------------------------------------------------------------------------

@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 40),
       st.integers(-12, 12), st.integers(0, 12), st.integers(0, 12),
       st.integers(0, 12))
@settings(max_examples=60, deadline=None)
def test_s1_factored_matches_literal(p, q, m2, b, c, d):
    if m2 == 0 or (m2 * q) % p == 0:
        return
    lhs = s1_sum(p, q, m2, b, c, d, method="factored").value
    rhs = s1_sum(p, q, m2, b, c, d, method="literal").value
    assert lhs == pytest.approx(rhs, abs=1e-9 * p ** 1.5 + 1e-12)


def test_s1_vanishes_without_gamma_twist():
    # d = 0 makes the Gauss factor gauss_sum(0, p) = 0
    for p in (3, 5, 7, 11):
        for (q, m2, b, c) in [(1, 1, 0, 0), (2, 3, 1, 2), (5, -2, 4, 1)]:
            if (m2 * q) % p == 0:
                continue
            assert s1_sum(p, q, m2, b, c, 0).value == pytest.approx(0, abs=1e-10)
            assert s1_sum(p, q, m2, b, c, p).value == pytest.approx(0, abs=1e-10)


def test_s1_table_and_weil_style_bound():
    for (p, q, m2) in [(3, 1, 1), (5, 2, 3), (7, 1, 1), (13, 5, -2)]:
        tab = s1_table(p, q, m2)
        worst = float(np.max(np.abs(tab)))
        assert worst <= 2 * p ** 1.5 + 1e-9, (p, q, m2, worst)
        for (b, c, d) in [(0, 0, 1), (1, 2 % p, 3 % p), (p - 1, 0, 2)]:
            assert tab[b, c, d] == pytest.approx(
                s1_sum(p, q, m2, b, c, d).value, abs=1e-9)
        # parity of the Gauss factor: real for p = 1 (4), imaginary else
        if p % 4 == 1:
            assert float(np.max(np.abs(tab.imag))) < 1e-9
        else:
            assert float(np.max(np.abs(tab.real))) < 1e-9


def test_s1_rejections():
    with pytest.raises(ValueError):
        s1_sum(2, 1, 1, 0, 0, 1)
    with pytest.raises(ValueError):
        s1_sum(9, 1, 1, 0, 0, 1)
    with pytest.raises(ValueError):
        s1_sum(5, 5, 1, 0, 0, 1)
    with pytest.raises(ValueError):
        s1_sum(5, 1, 1, 0, 0, 1, method="fft")


# ---------------------------------------------------------------------------
# CRT factorization
# ---------------------------------------------------------------------------

def test_crt_identity_small_cases():
    cases = [(1, 3, 5, 1, 1), (2, 3, 5, 1, 1), (6, 5, 7, 1, 1),
             (9, 5, 11, 2, 1), (4, 3, 7, 5, 1)]
    for (u, p1, p2, q, m2) in cases:
        for (b, c, d) in [(1, 1, 1), (0, 2, 5)]:
            rec = crt_factor_check(u, p1, p2, q, m2, b, c, d)
            assert rec.passed, rec.as_dict()
            assert rec.check_id == "expsums.crt"


def test_crt_zero_shortcut_consistent():
    # when the collapsed character coefficient vanishes the literal sum is 0,
    # and the factored product must agree
    val = full_sum_S(1, 3, 5, 1, 1, 1, 1, 0)
    assert val == pytest.approx(crt_product(1, 3, 5, 1, 1, 1, 1, 0), abs=1e-9)
    assert abs(val) < 1e-9


def test_crt_precondition_rejections():
    with pytest.raises(ValueError):
        full_sum_S(60, 3, 5, 1, 1, 0, 0, 1)  # u > 50
    with pytest.raises(ValueError):
        full_sum_S(1, 5, 5, 1, 1, 0, 0, 1)  # p1 = p2
    with pytest.raises(ValueError):
        full_sum_S(1, 2, 5, 1, 1, 0, 0, 1)  # even prime
    with pytest.raises(ValueError):
        full_sum_S(1, 23, 19, 1, 1, 0, 0, 1)  # p1 p2 > 400
    with pytest.raises(ValueError):
        full_sum_S(3, 5, 7, 1, 3, 0, 0, 1)  # gcd(u, m2) > 1
    with pytest.raises(ValueError):
        full_sum_S(1, 3, 5, 3, 1, 0, 0, 1)  # p1 | q
    with pytest.raises(ValueError):
        full_sum_S(1, 3, 5, 1, 0, 0, 0, 1)  # m2 = 0


# ---------------------------------------------------------------------------
# value container
# ---------------------------------------------------------------------------

def test_expsumvalue_validation():
    v = ExpSumValue(3.0, -4.0, 7, "K")
    assert v.value == 3 - 4j and v.magnitude == pytest.approx(5.0)
    with pytest.raises(ValueError):
        ExpSumValue(0.0, 0.0, 7, "weird")
    with pytest.raises(ValueError):
        ExpSumValue(0.0, 0.0, 1, "K")
    with pytest.raises(ValueError):
        ExpSumValue(400.0, 0.0, 7, "K")  # exceeds modulus^3
