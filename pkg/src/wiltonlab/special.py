"""Wilton and Brjuno sums, the convergence criterion, G, delta and Upsilon."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bernoulli
from .autocorr import A_ONE, F_interp, F_value
from .bernoulli import SeriesValue
from .config import constants
from .contfrac import (CFExpansion, as_expansion, convergents, orbit,
                       orbit_batch)

LOG2 = math.log(2)
TAIL_TERMS = 20
FIB_SUM = 3.36  # sum_j 1/F_{j+1}
QUAD_BITS = 60


@dataclass(frozen=True)
class WiltonEval:
    partial: float
    K: int
    tail_estimate: float
    converged: bool
    enclosure: float = 0.0


@dataclass(frozen=True)
class CriterionTrace:
    terms: tuple[float, ...]
    partial_sums: tuple[float, ...]

    def cauchy_gap(self, last: int = 10) -> float:
        s = self.partial_sums[-last:]
        return max(s) - min(s) if s else 0.0


def _is_one(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool) and x == 1


def _over(num: float, q: int) -> float:
    """num / q for a positive num and an int q of any size."""
    try:
        return num / q
    except OverflowError:
        return math.exp(math.log(num) - math.log(q))


def _gamma_sum(x, K: int, signed: bool, tol: float) -> WiltonEval:
    if _is_one(x):
        x = Fraction(0)  # W(1) = W(0) = 0 by periodicity
    cf = as_expansion(x)
    if K <= 0 or (cf.terminating and cf.depth == 0):
        return WiltonEval(0.0, 0, 0.0, True)
    orb = orbit(cf, K - 1)
    n = len(orb)
    if orb.terminated:
        n -= 1  # gamma at the depth is undefined: the rational sum stops before it
    terms, width = [], 0.0
    for k in range(n):
        lo, hi = orb.gamma[k]
        sign = -1.0 if (signed and k % 2) else 1.0
        terms.append(sign * orb.mid("gamma", k))
        width += hi - lo
    partial = math.fsum(terms)
    tail = 0.0
    if not cf.terminating:
        conv = convergents(cf, n + TAIL_TERMS + 1)
        q = conv.q
        tail = math.fsum(_over(math.log(q[k + 1]) + LOG2, q[k]) for k in range(n, len(q) - 1))
    return WiltonEval(partial, n, tail, tail + width <= tol, width)


def wilton(x, K: int = 60, tol: float = 1e-9) -> WiltonEval:
    """Alternating sum of gamma_k for k < K (for a rational, k below its depth)."""
    return _gamma_sum(x, K, True, tol)


def brjuno(x, K: int = 60, tol: float = 1e-9) -> WiltonEval:
    """Sum of gamma_k for k < K."""
    return _gamma_sum(x, K, False, tol)


def criterion(x, K: int) -> CriterionTrace:
    """Terms (-1)^k log(q_{k+1})/q_k and their partial sums, k < K."""
    cf = as_expansion(x)
    q = convergents(cf, K).q
    terms = tuple((-1) ** k * _over(math.log(q[k + 1]), q[k]) for k in range(len(q) - 1))
    sums, acc = [], 0.0
    for t in terms:
        acc += t
        sums.append(acc)
    return CriterionTrace(terms, tuple(sums))


def F_sup() -> float:
    return constants()["F_sup"]


def G(x, tol: float = 1e-9) -> SeriesValue:
    """G(x) = sum_j (-1)^j beta_{j-1} F(alpha_j) on [0, 1).

    Rationals use the full sum over j <= depth. For streams the sum stops at
    the first J with 3.36 ||F|| / q_{J+1} <= tol. The returned bound also
    carries the error estimates of the F values.
    """
    cf = as_expansion(x)
    if cf.terminating:
        J = cf.depth
    else:
        q = convergents(cf, 200).q
        J = next((j for j in range(len(q) - 1) if FIB_SUM * F_sup() / q[j + 1] <= tol), None)
        if J is None:
            raise ValueError("tolerance not reachable within 200 quotients")
    orb = orbit(cf, J)
    terms, err = [], 0.0
    for j in range(len(orb)):
        b_prev = orb.beta[j - 1][1] if j else 1.0
        b_mid = 0.5 * sum(orb.beta[j - 1]) if j else 1.0
        f, f_err = F_value(orb.mid("alpha", j))
        terms.append((-1) ** j * b_mid * f)
        err += b_prev * f_err + 0.5 * (orb.width("beta", j - 1) if j else 0.0) * abs(f)
    trunc = 0.0 if cf.terminating else FIB_SUM * F_sup() / orb.convergents.q[J + 1]
    return SeriesValue(math.fsum(terms), trunc + err, len(orb))


def delta(x) -> float:
    """(-1)^(K+1) A(1)/(2q) at a rational p/q of depth K, 0 at irrationals."""
    if x is None or (isinstance(x, CFExpansion) and not x.terminating):
        return 0.0
    cf = as_expansion(x)
    r = cf.value()
    K = cf.depth
    return (-1) ** (K + 1) * A_ONE / (2 * r.denominator)


# Bulk evaluation at exact dyadic nodes, for quadratures.

def _dyadic(t: np.ndarray) -> np.ndarray:
    return np.round(np.asarray(t) * 2.0**QUAD_BITS).astype(np.int64)


def G_batch(t: np.ndarray, min_weight: float = 1e-15) -> np.ndarray:
    """G at the dyadic rationals nearest to t (F from the cached table)."""
    alpha, _ = orbit_batch(_dyadic(t), 2**QUAD_BITS)
    total = np.zeros(alpha.shape[1])
    beta = np.ones(alpha.shape[1])
    for j in range(alpha.shape[0]):
        total += (-1) ** j * beta * F_interp(alpha[j])
        live = alpha[j] > 0
        beta = beta * alpha[j]
        if not live.any() or beta.max() < min_weight:
            break
    return total


def W_batch(t: np.ndarray) -> np.ndarray:
    """W at the dyadic rationals nearest to t."""
    alpha, _ = orbit_batch(_dyadic(t), 2**QUAD_BITS)
    total = np.zeros(alpha.shape[1])
    beta = np.ones(alpha.shape[1])
    for k in range(alpha.shape[0]):
        a = alpha[k]
        live = a > 0
        if not live.any():
            break
        total += np.where(live, (-1) ** k * beta * -np.log(np.where(live, a, 1.0)), 0.0)
        beta = beta * a
    return total


OFFSET = (math.sqrt(5) - 1) / 2


def midpoint_quad(fn, a: float, b: float, tol: float = 1e-6, start: int = 10, max_level: int = 20):
    """Stratified midpoint rule with paired irrational offsets, doubled until stable.

    Nodes sit at (i + t)/M and (i + 1 - t)/M with t irrational, so they never
    hit a rational jump, and the pairing cancels the first-order error.

    Returns (integral, error estimate) with the estimate the last change.
    """
    if b <= a:
        return 0.0, 0.0
    prev = None
    for level in range(start, max_level + 1):
        M = 1 << level
        i = np.arange(M)
        nodes = a + (b - a) * np.concatenate((i + OFFSET, i + 1 - OFFSET)) / M
        val = (b - a) * math.fsum(fn(nodes)) / (2 * M)
        if prev is not None and abs(val - prev) <= tol:
            return val, abs(val - prev)
        prev = val
    return val, abs(val - prev) if prev is not None else math.inf


def upsilon(x: float, tol: float = 1e-6) -> SeriesValue:
    """Integral of W over [0, x] through phi2(0) - phi2(x) + 2 int_0^x G."""
    x = float(x)
    if not 0 <= x <= 1:
        raise ValueError("upsilon is defined on [0, 1]")
    if x == 0:
        return SeriesValue(0.0, 0.0, 0)
    N = bernoulli.phi2_terms_for(tol / 2)
    dphi = bernoulli._b2_sum(x, N, shift=1.0 / 6.0)
    integral, q_err = midpoint_quad(G_batch, 0.0, x, tol / 4)
    return SeriesValue(-dphi + 2 * integral, bernoulli.zeta2_tail(N) / 4 + 2 * q_err, N)


def upsilon_increment(a: float, b: float, tol: float = 1e-7) -> SeriesValue:
    """Upsilon(b) - Upsilon(a) = phi2(a) - phi2(b) + 2 int_a^b G, for 0 <= a <= b <= 1."""
    if not 0 <= a <= b <= 1:
        raise ValueError("needs 0 <= a <= b <= 1")
    N = bernoulli.phi2_terms_for(tol / 2)
    d = bernoulli.phi2_difference(a, b - a, N)
    integral, q_err = midpoint_quad(G_batch, a, b, tol / 4)
    return SeriesValue(-d.value + 2 * integral, d.tail_bound + 2 * q_err, N)


def upsilon_direct(x: float, tol: float = 1e-4) -> SeriesValue:
    """Integral of W over [0, x] by direct quadrature of the Wilton sums."""
    val, err = midpoint_quad(W_batch, 0.0, float(x), tol, start=12, max_level=22)
    return SeriesValue(val, err, 0)


def functional_residuals(x, K: int = 50, eq_depths=(1, 2, 5)) -> list[dict]:
    """Residuals of the functional equations for W and G at depth K.

    Each record carries lhs, rhs, residual = lhs - rhs and the bound the
    residual must respect (tails plus enclosure widths plus rounding).
    """
    cf = as_expansion(x)
    shifted = cf.shift(1)
    out = []
    orb = orbit(cf, max(eq_depths) + 1)
    x0 = orb.mid("alpha", 0)

    w = wilton(cf, K)
    w1 = wilton(shifted, K - 1)
    lhs = w.partial
    rhs = -math.log(x0) + (-x0 * w1.partial)
    bound = w.tail_estimate + w.enclosure + x0 * (w1.tail_estimate + w1.enclosure) + 1e-13
    out.append(dict(equation="W", lhs=lhs, rhs=rhs, residual=lhs - rhs, bound=bound))

    g = G(cf)
    g1 = G(shifted)
    f0, f_err = F_value(x0)
    lhs = g.value
    rhs = f0 - x0 * g1.value
    out.append(dict(equation="G", lhs=lhs, rhs=rhs, residual=lhs - rhs,
                    bound=g.tail_bound + g1.tail_bound + f_err + 1e-13))

    for Ke in eq_depths:
        if cf.terminating and Ke > cf.depth:
            continue
        head = [(-1) ** k * orb.mid("gamma", k) for k in range(Ke)]
        wk = wilton(cf.shift(Ke), K - Ke)
        beta = orb.mid("beta", Ke - 1)
        rhs = math.fsum(head) + (-1) ** Ke * beta * wk.partial
        bound = (w.tail_estimate + w.enclosure + beta * (wk.tail_estimate + wk.enclosure)
                 + sum(orb.width("gamma", k) for k in range(Ke)) + 1e-13)
        out.append(dict(equation=f"W-general-{Ke}", lhs=w.partial, rhs=rhs,
                        residual=w.partial - rhs, bound=bound))
    return out
