"""Divisor function, Dirichlet remainder, psi1 sums and the Delta route for A."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .autocorr import AValue, EULER_GAMMA, F_value
from .config import constants
from .contfrac import CFExpansion, frac_multiples

TAU_CAP = 10**8
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class TauTable:
    limit: int
    tau: np.ndarray

    def __getitem__(self, n):
        return self.tau[n]


def tau_sieve(V: int) -> TauTable:
    """tau(n) for n <= V, counting divisor pairs d < n/d once per d <= sqrt(V)."""
    if V < 1:
        raise ValueError("V must be at least 1")
    if V > TAU_CAP:
        raise MemoryError(f"tau_sieve is capped at {TAU_CAP}")
    tau = np.zeros(V + 1, dtype=np.int64)
    for d in range(1, math.isqrt(V) + 1):
        tau[d * d] += 1
        tau[d * (d + 1)::d] += 2
    return TauTable(V, tau)


def summatory_tau(x: float) -> int:
    """sum_{n <= x} tau(n) = 2 sum_{d <= sqrt x} floor(x/d) - floor(sqrt x)^2."""
    X = int(math.floor(x))
    if X < 1:
        return 0
    r = math.isqrt(X)
    return 2 * sum(X // d for d in range(1, r + 1)) - r * r


def dirichlet_remainder(x: float) -> float:
    if x < 1:
        raise ValueError("dirichlet_remainder needs x >= 1")
    return summatory_tau(x) - x * (math.log(x) + 2 * EULER_GAMMA - 1)


def _sine_sum(x, v: float, tab: TauTable) -> float:
    N = int(math.floor(v))
    if N > tab.limit:
        raise ValueError(f"v = {v} exceeds the tau table ({tab.limit})")
    if N < 1:
        return 0.0
    n = np.arange(1, N + 1, dtype=np.int64)
    if isinstance(x, (Fraction, CFExpansion)):
        f = frac_multiples(x, n)
    else:
        f = (n * float(x)) % 1.0
    return math.fsum(tab.tau[1:N + 1] * np.sin(2 * math.pi * f) / n)


def psi1_partial(x, v: float, tab: TauTable) -> float:
    """-(1/pi) sum_{n <= v} tau(n) sin(2 pi n x)/n."""
    return -_sine_sum(x, v, tab) / math.pi


def _as_real(x) -> float:
    if isinstance(x, CFExpansion):
        return x.approx()
    return float(x)


def wilton_afe_residual(x, v: float, tab: TauTable) -> float:
    """LHS - RHS of the two-term relation for the psi1 sums.

    (1/pi) sum_{n<=v} tau(n) sin(2 pi n x)/n + (x/pi) sum_{n<=x^2 v} tau(n) sin(2 pi n/x)/n
    + log(x)/2 + F(x). The phases {n/x} = {n alpha(x)} come from the shifted
    quotient stream, so they are exact up to double rounding.
    """
    xr = _as_real(x)
    if not 0 < xr <= 1:
        raise ValueError("x must lie in (0, 1]")
    if xr * xr * v < 2:
        raise ValueError("needs x^2 v >= 2")
    if isinstance(x, CFExpansion):
        inv = x.shift(1) if not x.terminating else x.shift(1).value()
    elif isinstance(x, Fraction):
        inv = (1 / x) % 1
    else:
        inv = (1.0 / xr) % 1.0
    first = _sine_sum(x, v, tab)
    second = _sine_sum(inv, xr * xr * v, tab)
    return (first + xr * second) / math.pi + 0.5 * math.log(xr) + F_value(xr)[0]


def walfisz_ratio(x, v: float, tab: TauTable) -> float:
    return abs(_sine_sum(x, v, tab)) / math.log(v)


def A_via_delta(x: float, T: float = 10_000.0) -> AValue:
    """A(x) = int_0^oo Delta(t) sin(2 pi t x)/(pi t^2) dt truncated at T.

    [0, 1] by adaptive quadrature (Delta = -t(log t + 2 gamma - 1) there);
    each [k, k+1] by Gauss-Legendre panels short enough to resolve the sine.
    The tail is estimated as c T^(-2/3).
    """
    if x <= 0:
        raise ValueError("A_via_delta needs x > 0")
    if T < 10:
        raise ValueError("A_via_delta needs T >= 10")
    K = int(math.floor(T))
    if K * max(1, math.ceil(2 * x)) > 10**8:
        raise MemoryError("too many panels")
    c = 2 * EULER_GAMMA - 1
    w = 2 * math.pi * x
    head = integrate.quad(lambda t: -(math.log(t) + c) * math.sin(w * t) / (math.pi * t),
                          0, 1, limit=200, epsabs=1e-13)[0]
    tab = tau_sieve(K)
    D = np.cumsum(tab.tau)[1:K]  # D[k-1] = sum_{n <= k} tau(n), k = 1..K-1
    sub = max(1, math.ceil(2 * x))
    parts = []
    for s in range(sub):
        a = np.arange(1, K, dtype=float) + s / sub
        half = 0.5 / sub
        t = (a + half)[:, None] + half * GL_NODES[None, :]
        vals = (D[:, None] - t * (np.log(t) + c)) * np.sin(w * t) / (math.pi * t * t)
        parts.append(math.fsum((vals @ GL_WEIGHTS) * half))
    value = head + math.fsum(parts)
    return AValue(value, "via_delta", constants()["delta_tail_c"] * T ** (-2 / 3))
