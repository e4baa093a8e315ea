"""Periodic Bernoulli functions and the series built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import polygamma, zeta

from .contfrac import CFExpansion, frac_multiples, gauss_map

ZETA2 = math.pi**2 / 6
PHI2_MAX_TERMS = 10**8
CHUNK = 1 << 20
ASYMPTOTIC_START = 16
ASYMPTOTIC_ORDER = 12


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float
    terms_used: int


def _frac(t):
    return t - np.floor(t)


def bernoulli1(t):
    """B_1(t) = {t} - 1/2, set to 0 at integers."""
    if isinstance(t, Fraction):
        f = t - math.floor(t)
        return Fraction(0) if f == 0 else f - Fraction(1, 2)
    f = _frac(np.asarray(t, dtype=float))
    out = np.where(f == 0, 0.0, f - 0.5)
    return float(out) if out.ndim == 0 else out


def bernoulli2(t):
    """B_2(t) = {t}^2 - {t} + 1/6."""
    if isinstance(t, Fraction):
        f = t - math.floor(t)
        return f * f - f + Fraction(1, 6)
    f = _frac(np.asarray(t, dtype=float))
    out = f * f - f + 1.0 / 6.0
    return float(out) if out.ndim == 0 else out


def _fracs(x, n: np.ndarray) -> np.ndarray:
    if isinstance(x, (Fraction, CFExpansion)):
        return frac_multiples(x, n)
    x = float(x)
    return _frac(n * (x - math.floor(x)))


def phi1_partial(x, v: float) -> float:
    """sum_{n <= v} B_1(n x)/n, accumulated exactly by math.fsum."""
    if v < 1:
        raise ValueError("v must be at least 1")
    N = int(math.floor(v))
    parts = []
    for start in range(1, N + 1, CHUNK):
        n = np.arange(start, min(N, start + CHUNK - 1) + 1, dtype=np.int64)
        f = _fracs(x, n)
        terms = np.where(f == 0, 0.0, f - 0.5) / n
        parts.append(math.fsum(terms))
    return math.fsum(parts)


def zeta2_tail(N: int) -> float:
    """sum_{n > N} 1/n^2."""
    return float(polygamma(1, N + 1))


# term and summation rounding in the partial sums, well above the observed ~6e-17
ROUNDING = 1e-15


def phi2_terms_for(tol: float) -> int:
    if tol <= ROUNDING:
        raise ValueError("tol must exceed the rounding allowance")
    N = math.ceil(1.0 / (6.0 * (tol - ROUNDING)))
    if N > PHI2_MAX_TERMS:
        best = zeta2_tail(PHI2_MAX_TERMS) / 6
        raise ValueError(f"tolerance {tol:g} needs {N} terms; the cap of "
                         f"{PHI2_MAX_TERMS} terms reaches {best:.3g}")
    return N


def _b2_sum(x, N: int, shift: float = 0.0) -> float:
    parts = []
    for start in range(1, N + 1, CHUNK):
        n = np.arange(start, min(N, start + CHUNK - 1) + 1, dtype=np.int64)
        f = _fracs(x, n)
        parts.append(math.fsum((f * f - f + (1.0 / 6.0 - shift)) / (n.astype(float) ** 2)))
    return math.fsum(parts)


def phi2(x, tol: float = 1e-8) -> SeriesValue:
    """sum_n B_2(n x)/n^2 truncated where the tail is below tol (|B_2| <= 1/6)."""
    N = phi2_terms_for(tol)
    return SeriesValue(_b2_sum(x, N), zeta2_tail(N) / 6 + ROUNDING, N)


def phi2_via_integral(x, tol: float = 1e-8) -> SeriesValue:
    """2 sum_n (1/n) int_0^x B_1(n u) du + zeta(2)/6 on 0 <= x <= 1.

    Each inner integral is (B_2(n x) - B_2(0))/(2n).
    """
    if not 0 <= float(x) <= 1:
        raise ValueError("phi2_via_integral needs 0 <= x <= 1")
    N = phi2_terms_for(tol)
    # B_2(nx) - B_2(0) lies in [-1/4, 0]
    return SeriesValue(_b2_sum(x, N, shift=1.0 / 6.0) + ZETA2 / 6, zeta2_tail(N) / 4 + ROUNDING, N)


def phi2_difference(x: float, h: float, N: int) -> SeriesValue:
    """phi2(x + h) - phi2(x) summed termwise to N; |B_2(a) - B_2(b)| <= 1/4 bounds the tail."""
    parts = []
    for start in range(1, N + 1, CHUNK):
        n = np.arange(start, min(N, start + CHUNK - 1) + 1, dtype=np.float64)
        f1 = _frac(n * x)
        f2 = _frac(n * x + n * h)
        parts.append(math.fsum(((f2 * f2 - f2) - (f1 * f1 - f1)) / (n * n)))
    return SeriesValue(math.fsum(parts), zeta2_tail(N) / 4, N)


def landau_inner(m: int, n: int) -> Fraction:
    """int_0^1 B_1(m t) B_1(n t) dt by exact piecewise integration.

    On each piece between consecutive points k/m, k/n the integrand is
    (m t - i - 1/2)(n t - j - 1/2), a quadratic with rational coefficients.
    The result is checked against gcd(m, n)^2 / (12 m n).
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    cuts = sorted({Fraction(k, m) for k in range(m + 1)} | {Fraction(k, n) for k in range(n + 1)})
    total = Fraction(0)
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        i, j = math.floor(m * mid), math.floor(n * mid)
        # (m t - c1)(n t - c2) = mn t^2 - (m c2 + n c1) t + c1 c2
        c1, c2 = i + Fraction(1, 2), j + Fraction(1, 2)
        A, B, C = m * n, -(m * c2 + n * c1), c1 * c2
        total += A * (b**3 - a**3) / 3 + B * (b**2 - a**2) / 2 + C * (b - a)
    closed = Fraction(math.gcd(m, n) ** 2, 12 * m * n)
    if total != closed:
        raise InvariantViolation(f"landau({m},{n}): piecewise {total} != closed form {closed}")
    return total


def sylvester_residual(x: float, v: float) -> float:
    """Residual of the two-term Sylvester relation for the phi1 partial sums.

    sum_{m<=v} B_1(m x)/m + x sum_{n<=x v} B_1(n alpha(x))/n - F(x) + log(1/x)/2
    """
    from .autocorr import F

    xf = float(x)
    if xf <= 0 or xf > 1:
        raise ValueError("sylvester_residual needs 0 < x <= 1")
    if xf * v < 1:
        raise ValueError("sylvester_residual needs x v >= 1")
    # Both sums see the same exact number: with float arithmetic n*x may round
    # onto an integer while n*alpha(x) does not, and B_1 jumps by 1 there.
    ex = x if isinstance(x, Fraction) else Fraction(xf)
    lhs = phi1_partial(ex, v) + xf * phi1_partial(gauss_map(ex), xf * v)
    return lhs - F(xf) + 0.5 * math.log(1 / xf)


# Tails int_x^oo B_k({u}) u^{-s} du, used by the series routes for A.

@lru_cache(maxsize=None)
def _bernoulli_poly(r: int) -> tuple[Fraction, ...]:
    """Coefficients of B_r(y), lowest degree first."""
    B = [Fraction(1)]
    for m in range(1, r + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    coeffs = [Fraction(0)] * (r + 1)
    for j in range(r + 1):
        coeffs[r - j] = math.comb(r, j) * B[j]
    return tuple(coeffs)


def _periodic_poly(r: int, y):
    """P_r(y) = B_r(y)/r! evaluated at y in [0, 1)."""
    c = [float(v / math.factorial(r)) for v in _bernoulli_poly(r)]
    out = np.zeros_like(y) + c[-1]
    for a in reversed(c[:-1]):
        out = out * y + a
    return out


def _rising(s: int, j: int) -> int:
    out = 1
    for i in range(j):
        out *= s + i
    return out


def _asymptotic_tail(x: np.ndarray, k: int, s: int) -> np.ndarray:
    """int_x^oo P_k(u) u^{-s} du by repeated integration by parts, for x >= 16."""
    y = _frac(x)
    out = np.zeros_like(x)
    for r in range(k + 1, ASYMPTOTIC_ORDER + 1):
        j = r - k - 1
        deriv = (-1) ** j * _rising(s, j) * x ** (-(s + j))
        out += (-1) ** (r - k) * _periodic_poly(r, y) * deriv
    return out


def asymptotic_remainder(x: float, k: int, s: int) -> float:
    """Bound on the neglected part of _asymptotic_tail at x."""
    R = ASYMPTOTIC_ORDER
    return 2 * float(zeta(R)) / (2 * math.pi) ** R * _rising(s, R - k - 1) * x ** (-(s + R - k - 1))


def _piece_integrals(lo: np.ndarray, hi: np.ndarray, j: np.ndarray, k: int, s: int) -> np.ndarray:
    """int_lo^hi B_k(u - j) u^{-s} du with the polynomial expanded in u."""
    if k == 1:
        coeffs = [-(j + 0.5), np.ones_like(lo)]
    else:
        coeffs = [j * j + j + 1.0 / 6.0, -(2 * j + 1.0), np.ones_like(lo)]
    out = np.zeros_like(lo)
    for i, c in enumerate(coeffs):
        e = i - s
        if e == -1:
            out += c * np.log(hi / lo)
        else:
            out += c * (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)
    return out


def bernoulli_tail(x, k: int, s: int) -> np.ndarray:
    """int_x^oo B_k({u}) u^{-s} du for x > 0, k in {1, 2}, s >= 2.

    Exact unit-interval pieces up to u = 16, then the Bernoulli-polynomial
    expansion whose remainder is below 1e-16 there.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    far = x >= ASYMPTOTIC_START
    fact = math.factorial(k)
    if far.any():
        out[far] = fact * _asymptotic_tail(x[far], k, s)
    near = ~far
    if near.any():
        xn = x[near]
        acc = np.zeros_like(xn)
        for j in range(int(np.floor(xn.min())), ASYMPTOTIC_START):
            jj = np.full_like(xn, float(j))
            lo = np.maximum(xn, j)
            mask = lo < j + 1
            if mask.any():
                acc[mask] += _piece_integrals(lo[mask], jj[mask] + 1, jj[mask], k, s)
        start = np.array([float(ASYMPTOTIC_START)])
        acc += fact * _asymptotic_tail(start, k, s)[0]
        out[near] = acc
    return out


def mod_continuity_phi2(h: float, grid: int = 40, rel_tol: float = 1e-3):
    """Empirical sup of |phi2(x + h) - phi2(x)| over x = i/grid, i = 0..grid-1.

    Each difference is summed until the rigorous tail is below
    rel_tol * h log(1/h). Returns (sup, argmax x). Forward differences
    suffice: phi2 is even and 1-periodic, so the backward difference at x
    equals the forward one at 1 - x, which is also on the grid.
    """
    target = rel_tol * h * math.log(1 / h)
    N = max(1000, math.ceil(0.25 / target))
    best, where = -1.0, 0.0
    for i in range(grid):
        x = i / grid
        d = abs(phi2_difference(x, h, N).value)
        if d > best:
            best, where = d, x
    return best, where
