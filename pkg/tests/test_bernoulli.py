import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from wiltonlab import bernoulli as b
from wiltonlab import contfrac as cf
from wiltonlab.config import constants

Z2 = math.pi**2 / 6

# int_x^oo B_k({u}) u^-s du: 25-digit mpmath quadrature on unit intervals up to 300,
# plus a 14-term asymptotic tail
TAIL_ORACLE = [
    (0.3, 1, 2, -0.039909527242263559322),
    (2.5, 1, 2, 0.00649360322431207421),
    (17.25, 1, 2, 0.000031960638667905104435),
    (0.7, 2, 3, 0.020955877676655295009),
    (5.1, 2, 3, -0.000080451716267644939413),
    (40.0, 2, 3, 3.2542401563910162753e-9),
]


@pytest.mark.parametrize("t, want", [(0, 0.0), (0.5, 0.0), (0.25, -0.25), (3.0, 0.0), (1.75, 0.25)])
def test_bernoulli1_examples(t, want):
    assert b.bernoulli1(t) == want


@pytest.mark.parametrize("t, want", [(0, 1 / 6), (0.5, -1 / 12), (1.0, 1 / 6)])
def test_bernoulli2_examples(t, want):
    assert b.bernoulli2(t) == pytest.approx(want, abs=1e-16)


def test_bernoulli_exact_on_fractions():
    assert b.bernoulli1(Fraction(1, 3)) == Fraction(-1, 6)
    assert b.bernoulli2(Fraction(1, 3)) == Fraction(1, 9) - Fraction(1, 3) + Fraction(1, 6)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=1000))
def test_bernoulli_periodic_and_odd(t):
    assert b.bernoulli1(t + 1) == b.bernoulli1(t)
    assert b.bernoulli2(t + 1) == b.bernoulli2(t)
    assert b.bernoulli1(-t) == -b.bernoulli1(t)
    assert b.bernoulli2(-t) == b.bernoulli2(t)


def test_bernoulli_vectorised():
    t = np.array([0.0, 0.25, 0.5, 1.0])
    assert np.array_equal(b.bernoulli1(t), [0.0, -0.25, 0.0, 0.0])


def test_phi1_partial_examples():
    assert b.phi1_partial(Fraction(1, 2), 1000) == 0.0
    assert b.phi1_partial(0.3, 1) == pytest.approx(0.3 - 0.5)
    assert b.phi1_partial(Fraction(1, 3), 2) == pytest.approx(-1 / 12, abs=1e-16)
    with pytest.raises(ValueError):
        b.phi1_partial(0.3, 0.5)


def test_phi1_partial_stream_matches_float_at_small_v():
    g = cf.golden()
    x = (math.sqrt(5) - 1) / 2
    n = np.arange(1, 1001)
    direct = math.fsum(b.bernoulli1(n * x) / n)
    assert b.phi1_partial(g, 1000) == pytest.approx(direct, abs=1e-12)


def test_phi2_examples():
    assert b.phi2(0, 1e-8).value == pytest.approx(Z2 / 6, abs=1e-8)
    assert b.phi2(Fraction(1, 2), 1e-8).value == pytest.approx(-Z2 / 48, abs=1e-8)
    # 1.3 - 1 is not exactly 0.3 in binary, hence the tolerance; exact inputs agree bit for bit
    assert abs(b.phi2(0.3, 1e-6).value - b.phi2(1.3, 1e-6).value) < 1e-12
    assert b.phi2(Fraction(3, 10), 1e-6).value == b.phi2(Fraction(13, 10), 1e-6).value


def test_phi2_tail_bound_and_terms():
    r = b.phi2(0.2, 1e-5)
    assert r.terms_used == math.ceil(1 / (6e-5))
    assert r.tail_bound <= 1e-5


def test_phi2_unreachable_tolerance_reports_bound():
    with pytest.raises(ValueError, match="reaches"):
        b.phi2(0.1, 1e-12)


def test_phi2_via_integral_examples():
    assert b.phi2_via_integral(0, 1e-6).value == pytest.approx(Z2 / 6, abs=1e-15)
    assert b.phi2_via_integral(1.0, 1e-6).value == pytest.approx(Z2 / 6, abs=1e-12)
    assert b.phi2_via_integral(0.5, 1e-8).value == pytest.approx(-Z2 / 48, abs=2e-8)
    with pytest.raises(ValueError):
        b.phi2_via_integral(1.5)


@given(st.floats(0.0, 1.0))
def test_phi2_routes_agree(x):
    a = b.phi2(x, 1e-4)
    c = b.phi2_via_integral(x, 1e-4)
    assert abs(a.value - c.value) <= a.tail_bound + c.tail_bound + 1e-12


@pytest.mark.parametrize("m, n, want", [(1, 1, Fraction(1, 12)), (1, 2, Fraction(1, 24)),
                                        (6, 4, Fraction(1, 72))])
def test_landau_examples(m, n, want):
    assert b.landau_inner(m, n) == want


def test_landau_rejects_nonpositive():
    with pytest.raises(ValueError):
        b.landau_inner(0, 3)


@given(st.integers(1, 40), st.integers(1, 40))
def test_landau_symmetric(m, n):
    assert b.landau_inner(m, n) == b.landau_inner(n, m)


def test_sylvester_examples():
    for v in (1, 10, 1e4):
        assert b.sylvester_residual(1.0, v) == 0.0
    C = constants()["sylvester_C"]
    assert abs(b.sylvester_residual(0.3, 100)) <= C / (0.3 * 100)
    # a binary float near 3/10 behaves like its exact value, not like a float artefact
    assert abs(b.sylvester_residual(0.3, 1e5)) * 0.3 * 1e5 <= C
    assert b.sylvester_residual(0.3, 1e4) == pytest.approx(
        b.sylvester_residual(Fraction(3, 10), 1e4), abs=1e-12)
    with pytest.raises(ValueError):
        b.sylvester_residual(0.0, 10)
    with pytest.raises(ValueError):
        b.sylvester_residual(0.01, 10)


def test_sylvester_decreasing_on_average():
    xs = [(i + math.sqrt(2) - 1) / 23 for i in range(1, 23)]
    for v in (100, 1000):
        small = np.mean([abs(b.sylvester_residual(x, 2 * v)) for x in xs])
        big = np.mean([abs(b.sylvester_residual(x, v)) for x in xs])
        assert small < big


@pytest.mark.parametrize("x, k, s, want", TAIL_ORACLE)
def test_bernoulli_tail_oracle(x, k, s, want):
    # absolute accuracy is set by cancellation among O(1) piece integrals
    assert b.bernoulli_tail(x, k, s)[0] == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_bernoulli_tail_vectorised_and_remainder():
    xs = np.array([o[0] for o in TAIL_ORACLE if o[1] == 1])
    got = b.bernoulli_tail(xs, 1, 2)
    assert np.allclose(got, [o[3] for o in TAIL_ORACLE if o[1] == 1], rtol=1e-12, atol=1e-15)
    assert b.asymptotic_remainder(16.0, 1, 2) < 1e-16


@given(st.floats(0.01, 0.99), st.sampled_from([1e-3, 1e-4]))
def test_phi2_difference_is_difference(x, h):
    assume(x + h < 1)
    N = 20000
    d = b.phi2_difference(x, h, N).value
    direct = b._b2_sum(x + h, N) - b._b2_sum(x, N)
    assert d == pytest.approx(direct, abs=1e-12)


def test_phi2_rational_expansion_at_half():
    # (phi2(1/2+h) - phi2(1/2) - c|h|)/(|h| log|h|) -> 1/q with q = 2
    A1 = math.log(2 * math.pi) - 0.5772156649015329
    h = 1e-5
    d = b.phi2_difference(0.5, h, 10**7).value
    ratio = (d - (2 * math.log(2) - 1 + A1) * h / 2) / (h * math.log(h))
    assert ratio == pytest.approx(0.5, rel=0.15)


def test_mod_continuity_phi2_ratio():
    sup, where = b.mod_continuity_phi2(1e-3)
    assert where == 0.0
    assert 0.5 <= sup / (1e-3 * math.log(1e3)) <= 1.5
