"""The autocorrelation A(lam) = int_0^oo {t}{lam t} dt/t^2 and the function F.

Three independent routes evaluate A:

* ``A_direct`` integrates the definition piece by piece in closed form;
* ``A_via_series`` uses the phi1 representation
  A = log(lam)/2 + (A(1)+1)/2 - lam int_lam^oo phi1(t) dt/t^2;
* ``A_via_phi2`` uses the phi2 representation
  A = log(lam)/2 + (1+A(1))/2 + phi2(lam)/(2 lam) - lam int_lam^oo phi2(t) dt/t^3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bernoulli
from .config import constants

EULER_GAMMA = 0.57721566490153286061
A_ONE = math.log(2 * math.pi) - EULER_GAMMA
MAX_PIECES = 10**8
METHODS = ("direct", "via_phi2", "via_series", "via_delta")

# |int_x^oo B_2({u}) u^-3 du| <= 4 max|B_3|/6 / x^3
H2_BOUND = 4 * (math.sqrt(3) / 36) / 6


@dataclass(frozen=True)
class AValue:
    value: float
    method: str
    err_estimate: float


def default_cutoff(lam: float, pieces: float = 4e4) -> float:
    return max(10.0 * max(1.0, 1.0 / lam), pieces / (2.0 * (1.0 + lam)))


def _direct_sums(lam: float, T: float) -> tuple[float, float]:
    """Exact integrals S(T), S(2T) of {t}{lam t}/t^2 over [0, T] and [0, 2T]."""
    T2 = 2.0 * T
    cuts = np.union1d(np.arange(1.0, math.floor(T2) + 1.0),
                      np.arange(1.0, math.floor(lam * T2) + 1.0) / lam)
    cuts = np.union1d(cuts[cuts < T2], [T, T2])
    a = np.concatenate(([0.0], cuts[:-1]))
    b = cuts
    mid = 0.5 * (a + b)
    m = np.floor(mid)
    n = np.floor(lam * mid)
    width = b - a
    safe_a = np.where(a > 0, a, 1.0)
    # {t}{lam t}/t^2 = lam - (n + lam m)/t + m n/t^2 on the piece
    pieces = (lam * width
              - (n + lam * m) * np.log1p(width / safe_a)
              + m * n * width / (safe_a * b))
    pieces = np.where(a > 0, pieces, lam * b)
    split = np.searchsorted(b, T, side="right")
    first = math.fsum(pieces[:split])
    return first, first + math.fsum(pieces[split:])


def A_direct(lam: float, T: float | None = None) -> AValue:
    """A(lam) from its definition, with the tail removed by 2 S(2T) - S(T)."""
    if lam < 0:
        raise ValueError("A needs lam >= 0")
    if lam == 0:
        return AValue(0.0, "direct", 0.0)
    if T is None:
        T = default_cutoff(lam)
    if T < 10 * max(1.0, 1.0 / lam):
        raise ValueError("A_direct needs T >= 10 max(1, 1/lam)")
    if 2 * T * (1 + lam) > MAX_PIECES:
        raise MemoryError(f"A_direct({lam}, {T}) would need more than {MAX_PIECES} pieces")
    s1, s2 = _direct_sums(lam, T)
    return AValue(2 * s2 - s1, "direct", abs(s2 - s1))


def A_via_series(lam: float, N: int = 10_000) -> AValue:
    """A(lam) through the phi1 route with N terms of the inner sum.

    Each term int_{n lam}^oo B_1(u)/u^2 du is integrated in closed form.
    """
    if lam <= 0:
        raise ValueError("A_via_series needs lam > 0")
    n = np.arange(1, N + 1, dtype=float)
    inner = math.fsum(bernoulli.bernoulli_tail(n * lam, 1, 2))
    value = 0.5 * math.log(lam) + 0.5 * (A_ONE + 1) - lam * inner
    err = constants()["series_c"] * (1 / lam + 1 / lam**2) / N
    return AValue(value, "via_series", err)


def A_via_phi2(lam: float, tol: float = 1e-6) -> AValue:
    """A(lam) through the phi2 route.

    The integral of phi2(t)/t^3 is summed term by term, each term being
    int_{n lam}^oo B_2(u)/u^3 du in closed form; the sum over n stops where
    the remaining terms are below tol/2. phi2(lam) is taken to tolerance lam*tol.
    """
    if lam <= 0:
        raise ValueError("A_via_phi2 needs lam > 0")
    p = bernoulli.phi2(lam, tol * lam)
    N = math.ceil(math.sqrt(H2_BOUND / (2 * lam**2 * (tol / 2))))
    n = np.arange(1, N + 1, dtype=float)
    inner = math.fsum(bernoulli.bernoulli_tail(n * lam, 2, 3))
    value = (0.5 * math.log(lam) + 0.5 * (1 + A_ONE) + p.value / (2 * lam) - lam * inner)
    err = p.tail_bound / (2 * lam) + H2_BOUND / (2 * lam**2 * N**2) + 1e-15 * N
    return AValue(value, "via_phi2", err)


def A(lam: float, method: str = "direct", tol: float | None = None) -> AValue:
    if method in ("direct",):
        T = None if tol is None else max(default_cutoff(lam), 1.0 / (8 * tol))
        return A_direct(lam, T)
    if method in ("phi2", "via_phi2"):
        return A_via_phi2(lam, tol or 1e-6)
    if method in ("series", "via_series"):
        N = 10_000 if tol is None else max(1000, math.ceil(constants()["series_c"] * (1 / lam + 1 / lam**2) / tol))
        return A_via_series(lam, N)
    if method in ("delta", "via_delta"):
        from .divisor import A_via_delta
        return A_via_delta(lam)
    raise ValueError(f"unknown method {method!r}")


def F(x: float, T: float | None = None) -> float:
    """F(x) = (x+1)/2 A(1) - A(x) - (x/2) log x on [0, 1]."""
    return F_value(x, T)[0]


def F_value(x: float, T: float | None = None) -> tuple[float, float]:
    """(F(x), error estimate inherited from the direct route)."""
    x = float(x)
    if not 0 <= x <= 1:
        raise ValueError("F is defined on [0, 1]")
    if x == 0:
        return 0.5 * A_ONE, 0.0
    if x == 1:
        return 0.0, 0.0
    return _F_cached(x, T)


SMALL_X = 1e-5


@lru_cache(maxsize=1 << 16)
def _F_cached(x: float, T: float | None) -> tuple[float, float]:
    if x < SMALL_X and T is None:
        # A(x) = x A(1/x) with A(L) = log(L)/2 + (1+A(1))/2 + O(1/L)
        return 0.5 * A_ONE - 0.5 * x, x * x
    a = A_direct(x, T if T is not None else default_cutoff(x, 2e4))
    return 0.5 * (x + 1) * A_ONE - a.value - 0.5 * x * math.log(x), a.err_estimate


TABLE_SIZE = 4096


@lru_cache(maxsize=4)
def F_table(size: int = TABLE_SIZE) -> tuple[np.ndarray, np.ndarray]:
    """F on the uniform grid i/size, i = 0..size (direct route, cached)."""
    xs = np.arange(size + 1) / size
    vals = np.array([F_value(float(x), default_cutoff(float(x), 8e3) if 0 < x < 1 else None)[0]
                     for x in xs])
    return xs, vals


def F_interp(x) -> np.ndarray:
    """Linear interpolation in F_table, for bulk evaluation inside quadratures."""
    xs, vals = F_table()
    return np.interp(np.asarray(x, dtype=float), xs, vals)


def F_sup_scan(points: int = 10_000) -> float:
    xs = (np.arange(points) + 0.5) / points
    return float(np.max(np.abs(F_interp(xs))))


def mod_continuity_A(h: float, grid: int = 2000, values: dict | None = None) -> tuple[float, float]:
    """Empirical sup |A(y) - A(x)| over |y - x| = h, x = 2i/grid, i = 0..grid.

    Both y = x + h and y = x - h are tried: at a rational the left and right
    slopes differ. Returns (sup, argmax). ``values`` may cache A(x) at the
    grid between calls.
    """
    if not 0 < h <= 1:
        raise ValueError("h must be in (0, 1]")
    best, where = -1.0, 0.0
    for i in range(grid + 1):
        x = 2.0 * i / grid
        if values is not None and x in values:
            ax = values[x]
        else:
            ax = A_direct(x, default_cutoff(x, 8e3)).value if x > 0 else 0.0
            if values is not None:
                values[x] = ax
        for y in (x - h, x + h):
            if y < 0:
                continue
            d = abs(A_direct(y, default_cutoff(y, 8e3)).value - ax)
            if d > best:
                best, where = d, x
    return best, where
