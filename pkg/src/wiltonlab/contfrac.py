"""Exact continued fractions, convergents and Gauss-map orbits.

Numbers in [0, 1) are handled either as exact rationals (``fractions.Fraction``)
or as streams of partial quotients. Floating point seeds are never iterated
through the Gauss map; every orbit quantity is derived from the quotients, so
enclosures stay valid at any depth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

Rational = Fraction

TAIL_CAP = 64
DEFAULT_TAIL_TOL = Fraction(1, 2**70)


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients a_1, a_2, ... of a number in [0, 1).

    A terminating expansion lists every quotient in ``prefix``. A stream has
    either a repeating ``period`` after the prefix or a ``rule`` giving a_k
    for 1-based k.
    """

    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    rule: Callable[[int], int] | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if any(a < 1 for a in self.prefix + self.period):
            raise DomainError("partial quotients must be positive")

    @property
    def terminating(self) -> bool:
        return not self.period and self.rule is None

    @property
    def depth(self) -> int | None:
        return len(self.prefix) if self.terminating else None

    def quotient(self, k: int) -> int | None:
        """a_k for k >= 1, or None past the end of a terminating expansion."""
        if k < 1:
            raise IndexError("quotients are indexed from 1")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.period:
            return self.period[(k - len(self.prefix) - 1) % len(self.period)]
        if self.rule is not None:
            return int(self.rule(k))
        return None

    def take(self, n: int) -> list[int]:
        out = []
        for k in range(1, n + 1):
            a = self.quotient(k)
            if a is None:
                break
            out.append(a)
        return out

    def __iter__(self) -> Iterator[int]:
        k = 1
        while True:
            a = self.quotient(k)
            if a is None:
                return
            yield a
            k += 1

    def shift(self, s: int = 1) -> CFExpansion:
        """Expansion of the s-th Gauss iterate (drop the first s quotients)."""
        if s < 0:
            raise ValueError("shift must be non-negative")
        if s == 0:
            return self
        if self.terminating:
            return CFExpansion(self.prefix[s:], label=self.label)
        if s <= len(self.prefix):
            return CFExpansion(self.prefix[s:], self.period, self.rule, self.label)
        if self.period:
            r = (s - len(self.prefix)) % len(self.period)
            return CFExpansion((), self.period[r:] + self.period[:r], None, self.label)
        rule = self.rule
        return CFExpansion((), (), lambda k, _r=rule, _s=s: _r(k + _s), self.label)

    def value(self) -> Fraction:
        if not self.terminating:
            raise DomainError("a stream has no exact rational value")
        return evaluate(self.prefix)

    def approx(self, tol: Fraction = DEFAULT_TAIL_TOL) -> float:
        lo, hi, _ = tail_enclosure(self, 0, tol)
        return float((lo + hi) / 2)


def periodic(period: Sequence[int], prefix: Sequence[int] = (), label: str = "") -> CFExpansion:
    return CFExpansion(tuple(prefix), tuple(period), None, label or f"periodic:{','.join(map(str, period))}")


def golden() -> CFExpansion:
    return periodic((1,), label="golden")


def sqrt2m1() -> CFExpansion:
    return periodic((2,), label="sqrt2m1")


def stream(rule: Callable[[int], int], label: str = "stream") -> CFExpansion:
    return CFExpansion((), (), rule, label)


def evaluate(quotients: Sequence[int]) -> Fraction:
    """Exact value of [0; a_1, ..., a_K]."""
    x = Fraction(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    return x


def as_rational(r) -> Fraction:
    if isinstance(r, Fraction):
        return r
    if isinstance(r, str):
        return Fraction(r.strip())
    if isinstance(r, int):
        return Fraction(r)
    if isinstance(r, tuple) and len(r) == 2:
        return Fraction(int(r[0]), int(r[1]))
    raise TypeError(f"cannot read {r!r} as a rational")


def gauss_map(x):
    """{1/x}. Exact for Fraction input."""
    if x <= 0:
        raise DomainError("the Gauss map needs x > 0")
    if isinstance(x, Fraction):
        y = 1 / x
        return y - math.floor(y)
    y = 1.0 / x
    return y - math.floor(y)


def expand_rational(r) -> CFExpansion:
    """Canonical expansion of a rational in [0, 1); the last quotient is >= 2."""
    r = as_rational(r)
    if r < 0 or r >= 1:
        raise DomainError("expand_rational needs 0 <= r < 1")
    num, den = r.numerator, r.denominator
    quotients = []
    while num:
        a, rem = divmod(den, num)
        quotients.append(a)
        num, den = rem, num
    return CFExpansion(tuple(quotients), label=f"{r.numerator}/{r.denominator}")


def as_expansion(x) -> CFExpansion:
    if isinstance(x, CFExpansion):
        return x
    return expand_rational(as_rational(x))


def depth(r) -> int:
    """Length of the canonical expansion; 0 and 1 have depth 0."""
    r = as_rational(r)
    if r == 1:
        return 0
    return len(expand_rational(r).prefix)


@dataclass(frozen=True)
class Convergents:
    p: tuple[int, ...]
    q: tuple[int, ...]
    truncated: bool = False

    def __len__(self):
        return len(self.q)

    def fraction(self, k: int) -> Fraction:
        return Fraction(self.p[k], self.q[k])


def convergents(cf: CFExpansion, K: int) -> Convergents:
    """p_k/q_k for k = 0..K, starting from p_0/q_0 = 0/1."""
    cf = as_expansion(cf)
    p_prev, q_prev, p, q = 1, 0, 0, 1
    ps, qs = [p], [q]
    truncated = False
    for k in range(1, K + 1):
        a = cf.quotient(k)
        if a is None:
            truncated = True
            break
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        ps.append(p)
        qs.append(q)
    return Convergents(tuple(ps), tuple(qs), truncated)


def fibonacci(n: int) -> int:
    """F_n with F_1 = F_2 = 1."""
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def tail_enclosure(cf: CFExpansion, k: int, tol: Fraction = DEFAULT_TAIL_TOL):
    """Bracket [0; a_{k+1}, a_{k+2}, ...] between two consecutive tail convergents.

    Returns (lo, hi, reached) with exact Fractions. ``reached`` is False when
    the width is still above ``tol`` after TAIL_CAP terms.
    """
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for m in range(1, TAIL_CAP + 2):
        a = cf.quotient(k + m)
        if a is None:
            v = Fraction(p, q)
            return v, v, True
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if m >= 2 and Fraction(1, q * q_prev) < tol:
            a_, b_ = Fraction(p, q), Fraction(p_prev, q_prev)
            return min(a_, b_), max(a_, b_), True
    a_, b_ = Fraction(p, q), Fraction(p_prev, q_prev)
    return min(a_, b_), max(a_, b_), False


def _down(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) <= x else math.nextafter(f, -math.inf)


def _up(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) >= x else math.nextafter(f, math.inf)


@dataclass(frozen=True)
class GaussOrbit:
    """Enclosures [lo, hi] of alpha_k, beta_k, gamma_k for k = 0..len-1.

    For a rational of depth K the orbit ends at k = K with alpha_K = 0,
    beta_K = 0 and gamma_K = None.
    """

    alpha: tuple[tuple[float, float], ...]
    beta: tuple[tuple[float, float], ...]
    gamma: tuple[tuple[float, float] | None, ...]
    convergents: Convergents
    truncated: bool = False
    terminated: bool = False
    alpha_exact: tuple[tuple[Fraction, Fraction], ...] = field(default=(), repr=False)
    points: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.alpha)

    def mid(self, name: str, k: int) -> float:
        """Point estimate inside the enclosure (from the exact midpoints when known)."""
        lo, hi = getattr(self, name)[k]
        pts = self.points.get(name)
        if pts is not None and pts[k] is not None:
            return min(max(pts[k], lo), hi)
        return 0.5 * (lo + hi)

    def width(self, name: str, k: int) -> float:
        lo, hi = getattr(self, name)[k]
        return hi - lo

    def to_dict(self) -> list[dict]:
        rows = []
        for k in range(len(self.alpha)):
            g = self.gamma[k]
            rows.append({"k": k, "alpha": list(self.alpha[k]), "beta": list(self.beta[k]),
                         "gamma": list(g) if g is not None else None})
        return rows


_LOG_SLACK = 4 * 2.0**-52


def orbit(cf, K: int, tol: Fraction = DEFAULT_TAIL_TOL) -> GaussOrbit:
    """Orbit quantities for k = 0..K (stopping early at a rational's depth)."""
    if K < 0:
        raise ValueError("K must be non-negative")
    cf = as_expansion(cf)
    conv = convergents(cf, K + 1)
    last = K
    terminated = False
    if cf.terminating and cf.depth <= K:
        last = cf.depth
        terminated = True
    truncated = cf.terminating and K > cf.depth

    alpha_ex = []
    reached_all = True
    for k in range(last + 2):
        if cf.terminating and k >= cf.depth:
            alpha_ex.append((Fraction(0), Fraction(0)))
            continue
        lo, hi, ok = tail_enclosure(cf, k, tol)
        reached_all &= ok
        alpha_ex.append((lo, hi))

    alpha, beta, gamma = [], [], []
    a_pt, b_pt, g_pt = [], [], []
    q = conv.q
    for k in range(last + 1):
        a_lo, a_hi = alpha_ex[k]
        alpha.append((_down(a_lo), _up(a_hi)))
        a_mid = (a_lo + a_hi) / 2
        a_pt.append(float(a_mid))
        if terminated and k == last:
            beta.append((0.0, 0.0))
            b_pt.append(0.0)
        else:
            n_lo, n_hi = alpha_ex[k + 1]
            b_lo = Fraction(1) / (q[k + 1] + n_hi * q[k])
            b_hi = Fraction(1) / (q[k + 1] + n_lo * q[k])
            beta.append((_down(b_lo), _up(b_hi)))
            b_pt.append(float((b_lo + b_hi) / 2))
        if terminated and k == last:
            gamma.append(None)
            g_pt.append(None)
            continue
        # math.log of an integer-valued Fraction is log of an exact float
        g_pt.append((b_pt[k - 1] if k else 1.0) * math.log(1 / a_mid))
        prev_lo, prev_hi = beta[k - 1] if k else (1.0, 1.0)
        lg_lo = -math.log(alpha[k][1]) if alpha[k][1] < 1 else 0.0
        lg_hi = -math.log(alpha[k][0])
        g_lo = prev_lo * lg_lo * (1 - _LOG_SLACK)
        g_hi = prev_hi * lg_hi * (1 + _LOG_SLACK)
        gamma.append((max(g_lo, 0.0), g_hi))
    return GaussOrbit(tuple(alpha), tuple(beta), tuple(gamma), conv,
                      truncated=truncated or not reached_all, terminated=terminated,
                      alpha_exact=tuple(alpha_ex[: last + 1]),
                      points={"alpha": a_pt, "beta": b_pt, "gamma": g_pt})


@dataclass(frozen=True)
class Cell:
    quotients: tuple[int, ...]
    endpoints: tuple[Fraction, Fraction]

    @property
    def increasing(self) -> bool:
        return self.endpoints[0] < self.endpoints[1]


def cell_endpoints(b: Sequence[int]) -> Cell:
    """Endpoints p_k/q_k and (p_k+p_{k-1})/(q_k+q_{k-1}) of the cell c(b_1..b_k)."""
    b = tuple(int(v) for v in b)
    if any(v < 1 for v in b):
        raise DomainError("cell quotients must be positive")
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in b:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return Cell(b, (Fraction(p, q), Fraction(p + p_prev, q + q_prev)))


def parse_spec(spec: str):
    """Read 'p/q', 'golden', 'sqrt2m1' or 'periodic:a1,a2,...'."""
    s = spec.strip()
    if s == "golden":
        return golden()
    if s == "sqrt2m1":
        return sqrt2m1()
    if s.startswith("periodic:"):
        period = tuple(int(t) for t in s.split(":", 1)[1].split(",") if t)
        return periodic(period)
    r = Fraction(s)
    if r == 1:
        return r
    return expand_rational(r)


def frac_multiples(x, n: np.ndarray) -> np.ndarray:
    """{n x} for an integer array n, with x exact (Fraction) or a quotient stream.

    For a stream, x is replaced by a convergent P/Q so large that n|x - P/Q|
    is far below double rounding, and the residue n P mod Q is formed in exact
    integer arithmetic. The tiny remainder n (x - P/Q) is added in floating point.
    """
    n = np.asarray(n, dtype=np.int64)
    if n.size == 0:
        return np.zeros(0)
    n_max = int(n.max())
    if isinstance(x, float):
        x = Fraction(x)
    if isinstance(x, CFExpansion) and x.terminating:
        x = x.value()
    if isinstance(x, Fraction):
        P, Q, d = x.numerator % x.denominator, x.denominator, 0.0
    else:
        need = math.isqrt(max(n_max, 1)) * 10**9
        p_prev, q_prev, p, q = 1, 0, 0, 1
        k = 0
        while q < need:
            k += 1
            a = x.quotient(k)
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
        P, Q = p, q
        lo, hi, _ = tail_enclosure(x, 0, Fraction(1, Q * Q * 2**40))
        d = float((lo + hi) / 2 - Fraction(P, Q))
    if P * n_max < 2**62:
        res = (n * P) % Q
        base = res.astype(np.float64) / Q if Q < 2**53 else _object_ratio(res, Q)
    else:
        obj = (n.astype(object) * P) % Q
        base = _object_ratio(obj, Q)
    out = base + n * d
    return out - np.floor(out)


def _object_ratio(res, Q: int) -> np.ndarray:
    return np.array([float(Fraction(int(r), Q)) for r in np.asarray(res).ravel()]).reshape(np.shape(res))


def orbit_batch(num: np.ndarray, den: int, max_depth: int = 100):
    """Exact Gauss orbits of many rationals num/den (int64 numerators, den < 2**62).

    Returns (alpha, depth): alpha[k, i] is alpha_k of the i-th point as a double
    (0 once the orbit has terminated) and depth[i] its depth.
    """
    a = np.asarray(num, dtype=np.int64).copy()
    b = np.full(a.shape, den, dtype=np.int64)
    rows = []
    depth_arr = np.zeros(a.shape, dtype=np.int64)
    for k in range(max_depth + 1):
        live = a != 0
        rows.append(np.where(live, a / np.where(live, b, 1), 0.0))
        if not live.any():
            break
        depth_arr += live
        safe = np.where(live, a, 1)
        quot = b // safe
        a, b = np.where(live, b - quot * safe, 0), np.where(live, safe, b)
    return np.array(rows), depth_arr
