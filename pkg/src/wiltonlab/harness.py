"""Identity and property suites, calibration of frozen constants, reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.special import digamma, spence

from . import autocorr, bernoulli, contfrac, divisor, special
from .config import constants

SCHEMA = 1
THETA = math.sqrt(2) - 1  # irrational offset for grids avoiding rationals
LAMBDAS = (1 / 3, 1 / 2, 0.9, 1.7, 3.0)
AFE_POINTS = ("golden", "sqrt2m1", "3/5", "periodic:1,2", "periodic:2,1,1")
AFE_V = (1e3, 1e4, 1e5)
QUADRATIC = ("sqrt2m1", "periodic:1,2", "periodic:2,1,1", "periodic:3", "periodic:1,4")
PERIODS = ((1,), (2,), (3,), (4,), (5,), (1, 2), (1, 3), (2, 3), (1, 4), (2, 5),
           (1, 1, 2), (1, 2, 3), (2, 1, 1), (3, 1, 2), (1, 5, 2), (4, 1, 1),
           (1, 2, 1, 3), (2, 2, 1, 1), (6, 1), (1, 7))


@dataclass
class Case:
    inputs: dict
    lhs: float
    rhs: float
    residual: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        return {"inputs": self.inputs, "lhs": self.lhs, "rhs": self.rhs,
                "residual": self.residual, "bound": self.bound, "pass": self.passed}


@dataclass
class CheckReport:
    suite: str
    cases: list[Case] = field(default_factory=list)
    frozen_constants: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.passed]

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, "suite": self.suite,
                           "frozen_constants": self.frozen_constants,
                           "cases": [c.to_dict() for c in self.cases]},
                          indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> CheckReport:
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        cases = [Case(c["inputs"], c["lhs"], c["rhs"], c["residual"], c["bound"], c["pass"])
                 for c in data["cases"]]
        return cls(data["suite"], cases, data["frozen_constants"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["suite", "case", "inputs", "lhs", "rhs", "residual", "bound", "pass"])
        for i, c in enumerate(self.cases):
            w.writerow([self.suite, i, json.dumps(c.inputs, sort_keys=True),
                        _g17(c.lhs), _g17(c.rhs), _g17(c.residual), _g17(c.bound),
                        "true" if c.passed else "false"])
        return buf.getvalue()


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def _finite(v) -> float:
    v = float(v)
    return math.inf if math.isnan(v) else v


def case(inputs: dict, lhs, rhs, bound) -> Case:
    """Two-sided check |lhs - rhs| <= bound."""
    lhs, rhs, bound = _finite(lhs), _finite(rhs), float(bound)
    res = lhs - rhs
    return Case(inputs, lhs, rhs, res, bound, abs(res) <= bound)


def upper(inputs: dict, value, limit) -> Case:
    """One-sided check value <= limit, stored with residual = excess over the limit."""
    value, limit = float(value), float(limit)
    res = max(0.0, value - limit)
    return Case(inputs, value, limit, res, 0.0, res <= 0.0)


def exact(inputs: dict, lhs: Fraction, rhs: Fraction) -> Case:
    inputs = dict(inputs, lhs_exact=str(lhs), rhs_exact=str(rhs))
    return Case(inputs, float(lhs), float(rhs), float(lhs - rhs), 0.0, lhs == rhs)


def _label(x) -> str:
    if isinstance(x, contfrac.CFExpansion):
        return x.label or ("[" + ",".join(map(str, x.take(8))) + ",...]")
    return str(x)


def _real(x) -> float:
    return x.approx() if isinstance(x, contfrac.CFExpansion) else float(x)


# cf-identities

def suite_cf_identities(cfg: dict) -> list[Case]:
    out = []
    streams = [contfrac.golden(), contfrac.sqrt2m1()] + [contfrac.periodic(p) for p in PERIODS[:8]]
    rationals = [Fraction(2, 7), Fraction(16, 113), Fraction(13, 21), Fraction(1, 50),
                 Fraction(987, 1597)]
    for x in streams + [contfrac.expand_rational(r) for r in rationals]:
        conv = contfrac.convergents(x, 25)
        for k in range(1, len(conv)):
            det = conv.p[k] * conv.q[k - 1] - conv.p[k - 1] * conv.q[k]
            out.append(exact({"check": "determinant", "x": _label(x), "k": k},
                             Fraction(det), Fraction((-1) ** (k - 1))))
        orb = contfrac.orbit(x, 20)
        for k in range(len(orb) - 1):
            if orb.terminated and k + 1 >= len(orb) - 1:
                break
            lo = 1.0 / (conv.q[k + 1] + orb.alpha[k + 1][1] * conv.q[k])
            hi = 1.0 / (conv.q[k + 1] + orb.alpha[k + 1][0] * conv.q[k])
            mid = orb.mid("beta", k)
            out.append(case({"check": "beta-convergents", "x": _label(x), "k": k},
                            mid, 0.5 * (lo + hi),
                            0.5 * (hi - lo) + orb.width("beta", k) + 4e-16 * mid))
    q = contfrac.convergents(contfrac.golden(), 40).q
    for k in range(1, 41):
        out.append(exact({"check": "golden-fibonacci", "k": k},
                         Fraction(q[k]), Fraction(contfrac.fibonacci(k + 1))))
    for r in rationals + [Fraction(1, 2), Fraction(3, 4)]:
        e = contfrac.expand_rational(r)
        out.append(exact({"check": "expand-evaluate", "x": str(r)}, contfrac.evaluate(e.prefix), r))
        out.append(exact({"check": "gauss-map", "x": str(r)}, contfrac.gauss_map(r),
                         Fraction(r.denominator % r.numerator, r.numerator)))
    for b in ((1,), (2, 3), (1, 1, 1, 1), (3, 1, 4, 1, 5)):
        cell = contfrac.cell_endpoints(b)
        inside = (cell.endpoints[0] + cell.endpoints[1]) / 2
        got = tuple(contfrac.expand_rational(inside).take(len(b)))
        out.append(exact({"check": "cell-prefix", "b": list(b)},
                         Fraction(int(got == b)), Fraction(1)))
    return out


# gauss-invariance

def _li2(z: float) -> float:
    return float(spence(1.0 - z))


def gauss_branch(f: str, k: int) -> float:
    """int over (1/(k+1), 1/k) of f(1/t - k)/(1+t) dt in closed form."""
    a, b = 1.0 / (k + 1), 1.0 / k
    if f == "t":
        P = lambda t: math.log(t / (1 + t)) - k * math.log1p(t)
        return P(b) - P(a)
    # log(1/(1/t - k)) = log t - log(1 - k t)
    # with u = k(1+t)/(1+k) taken exactly at the ends: u(1/k) = 1, u(1/(k+1)) = k(k+2)/(k+1)^2
    P1 = lambda t: math.log(t) * math.log1p(t) + _li2(-t)
    P2 = lambda t, u: math.log1p(k) * math.log1p(t) - _li2(u)
    return (P1(b) - P1(a)) - (P2(b, 1.0) - P2(a, k * (k + 2) / (k + 1) ** 2))


def gauss_tail(f: str, K: int) -> float:
    """Sum of the branches k > K, equal to int_0^1 f(s)/(K+1+s) ds."""
    if f == "t":
        return 1.0 - (K + 1) * math.log((K + 2) / (K + 1))
    return -_li2(-1.0 / (K + 1))


GAUSS_RHS = {"t": 1.0 - math.log(2), "log": math.pi**2 / 12}


def suite_gauss_invariance(cfg: dict) -> list[Case]:
    out = []
    funcs = {"t": lambda s: s, "log": lambda s: -math.log(s) if s > 0 else 0.0}
    K = int(cfg.get("branches", 100_000))
    for name, fn in funcs.items():
        lhs = math.fsum(gauss_branch(name, k) for k in range(1, K + 1)) + gauss_tail(name, K)
        out.append(case({"f": name, "route": "closed-form", "branches": K}, lhs, GAUSS_RHS[name], 1e-6))
        # independent route: quadrature of f(alpha(t))/(1+t) on each branch
        Kq = 200
        parts = []
        for k in range(1, Kq + 1):
            g = lambda t, k=k: fn(1.0 / t - k) / (1.0 + t)
            parts.append(integrate.quad(g, 1.0 / (k + 1), 1.0 / k, epsabs=1e-13, limit=100)[0])
        lhs_q = math.fsum(parts) + gauss_tail(name, Kq)
        out.append(case({"f": name, "route": "quadrature", "branches": Kq}, lhs_q, GAUSS_RHS[name], 1e-6))
    return out


# landau

def suite_landau(cfg: dict) -> list[Case]:
    M = int(cfg.get("max", 30))
    out = []
    for m in range(1, M + 1):
        for n in range(1, M + 1):
            closed = Fraction(math.gcd(m, n) ** 2, 12 * m * n)
            try:
                val = bernoulli.landau_inner(m, n)
            except bernoulli.InvariantViolation:
                val = Fraction(-1)
            out.append(exact({"m": m, "n": n}, val, closed))
    return out


# wilton-feq

def suite_wilton_feq(cfg: dict) -> list[Case]:
    out = []
    g = contfrac.golden()
    x = (math.sqrt(5) - 1) / 2
    out.append(case({"check": "W golden", "K": 60}, special.wilton(g, 60).partial,
                    x * math.log(1 / x), 1e-9))
    out.append(case({"check": "Phi golden", "K": 60}, special.brjuno(g, 60).partial,
                    math.log(1 / x) / (1 - x), 1e-9))
    y = math.sqrt(2) - 1
    out.append(case({"check": "Phi sqrt2m1", "K": 60}, special.brjuno(contfrac.sqrt2m1(), 60).partial,
                    math.log(1 / y) / (1 - y), 1e-9))
    for k in range(2, 51):
        out.append(case({"check": "W(1/k)", "k": k}, special.wilton(Fraction(1, k)).partial,
                        math.log(k), 0.0))
    depth = int(cfg.get("depth", 50))
    for p in PERIODS:
        for rec in special.functional_residuals(contfrac.periodic(p), depth):
            out.append(case({"check": rec["equation"], "period": list(p), "depth": depth},
                            rec["lhs"], rec["rhs"], rec["bound"]))
    for xs in (1e-2, 1e-3):
        u = special.upsilon(xs, tol=min(1e-6, 0.1 * xs * xs))
        law = xs * math.log(1 / xs) + xs
        out.append(case({"check": "Upsilon small-x", "x": xs, "tail": u.tail_bound},
                        u.value, law, 5 * xs * xs))
    for xs in (0.2, 0.9):
        a = special.upsilon(xs, tol=1e-5)
        b = special.upsilon_direct(xs, tol=2e-4)
        out.append(case({"check": "Upsilon two routes", "x": xs}, a.value, b.value, 1e-3))
    return out


# phi1-sylvester

def sylvester_grid() -> list[float]:
    return [(i + THETA / 1024) / 37 for i in range(1, 37)]


SYLVESTER_V = (1e2, 1e3, 1e4)


def suite_phi1_sylvester(cfg: dict) -> list[Case]:
    C = constants()["sylvester_C"]
    out = []
    for x in sylvester_grid():
        for v in SYLVESTER_V:
            eps = bernoulli.sylvester_residual(x, v)
            out.append(upper({"x": x, "v": v, "check": "|eps| x v <= C"}, abs(eps) * x * v, C))
    for v in (1, 10, 1e3, 1e5):
        out.append(case({"x": 1, "v": v, "check": "eps(1, v) = 0"},
                        bernoulli.sylvester_residual(1.0, v), 0.0, 1e-15))
    return out


# phi2-consistency

def suite_phi2_consistency(cfg: dict) -> list[Case]:
    tol = float(cfg.get("tol", 1e-6))
    out = []
    for i in range(100):
        x = (i + THETA) / 100
        a = bernoulli.phi2(x, tol)
        b = bernoulli.phi2_via_integral(x, tol)
        out.append(case({"x": x, "tol": tol}, a.value, b.value, a.tail_bound + b.tail_bound + 1e-12))
    z2 = bernoulli.ZETA2
    out.append(case({"x": 0, "tol": 1e-8}, bernoulli.phi2(Fraction(0), 1e-8).value, z2 / 6, 1e-8))
    out.append(case({"x": "1/2", "tol": 1e-8}, bernoulli.phi2(Fraction(1, 2), 1e-8).value, -z2 / 48, 1e-8))
    out.append(case({"x": 1, "route": "integral"}, bernoulli.phi2_via_integral(1.0, tol).value, z2 / 6, tol))
    out.append(case({"x": "0.3 vs 1.3", "check": "periodicity"},
                    bernoulli.phi2(Fraction(3, 10), tol).value,
                    bernoulli.phi2(Fraction(13, 10), tol).value, 0.0))
    return out


# A-routes and A-reflection

ROUTES = ("direct", "via_phi2", "via_series")


def A_route(lam: float, method: str) -> autocorr.AValue:
    if method == "direct":
        return autocorr.A_direct(lam)
    if method == "via_phi2":
        return autocorr.A_via_phi2(lam, 1e-6)
    if method == "via_series":
        return autocorr.A_via_series(lam, 20_000)
    return divisor.A_via_delta(lam, 1e4)


def suite_A_routes(cfg: dict) -> list[Case]:
    out = []
    a1 = autocorr.A_direct(1.0, 1e5)
    out.append(case({"lambda": 1, "method": "direct", "T": 1e5}, a1.value, autocorr.A_ONE, 1e-4))
    for m, tol in (("via_phi2", 1e-3), ("via_series", 1e-3), ("via_delta", 1e-2)):
        out.append(case({"lambda": 1, "method": m}, A_route(1.0, m).value, autocorr.A_ONE, tol))
    for lam in (0.05, 1 / 3, 0.5, 0.9, 1.7, 3.0, 20.0):
        d = A_route(lam, "direct")
        for m in ("via_phi2", "via_series"):
            r = A_route(lam, m)
            out.append(case({"lambda": lam, "methods": ["direct", m]}, d.value, r.value,
                             d.err_estimate + r.err_estimate))
    for lam in (0.5, 2.0, 20.0):
        d = A_route(lam, "direct")
        r = A_route(lam, "via_delta")
        out.append(case({"lambda": lam, "methods": ["direct", "via_delta"]}, d.value, r.value,
                        d.err_estimate + r.err_estimate))
    # A(lam) ~ log(lam)/2: the remainder after (1 + A(1))/2 is O(1/lam)
    for lam in (20.0, 100.0, 500.0):
        d = A_route(lam, "direct")
        rem = d.value - 0.5 * math.log(lam) - 0.5 * (1 + autocorr.A_ONE)
        out.append(upper({"lambda": lam, "check": "lam |A - log(lam)/2 - (1+A1)/2|"},
                         lam * abs(rem), 1.0))
    return out


def suite_A_reflection(cfg: dict) -> list[Case]:
    out = []
    for lam in LAMBDAS:
        for m in ROUTES:
            a = A_route(lam, m)
            b = A_route(1 / lam, m)
            out.append(case({"lambda": lam, "method": m}, a.value, lam * b.value,
                            a.err_estimate + lam * b.err_estimate))
    return out


# afe-psi1

def afe_measurements(vs=AFE_V, tab=None) -> list[tuple[str, float, float, float]]:
    """(x label, x, v, residual) over the canonical AFE grid."""
    tab = tab or divisor.tau_sieve(int(max(vs)))
    rows = []
    for spec in AFE_POINTS:
        x = contfrac.parse_spec(spec)
        for v in vs:
            rows.append((spec, _real(x), v, divisor.wilton_afe_residual(x, v, tab)))
    return rows


def afe_scale(x: float, v: float) -> float:
    y = x * x * v
    return math.log(y) ** 2 / math.sqrt(y)


def walfisz_grid() -> list[float]:
    return [(i + THETA) / 200 for i in range(200)]


def suite_afe_psi1(cfg: dict) -> list[Case]:
    vmax = float(cfg.get("vmax", 1e5))
    vs = tuple(v for v in AFE_V if v <= vmax) or (vmax,)
    tab = divisor.tau_sieve(int(vmax))
    C = constants()
    out = []
    rows = afe_measurements(vs, tab)
    for spec, x, v, r in rows:
        out.append(upper({"x": spec, "v": v, "check": "|residual| <= C (x^2 v)^-1/2 log^2"},
                         abs(r) / afe_scale(x, v), C["afe_C"]))
    X = [math.log(x * x * v) for _, x, v, _ in rows]
    Y = [math.log(abs(r)) for *_, r in rows]
    if len(set(vs)) >= 2:
        out.append(upper({"check": "pooled log-log slope", "v": list(vs)},
                         float(np.polyfit(X, Y, 1)[0]), -0.4))
        for spec in AFE_POINTS:
            idx = [i for i, row in enumerate(rows) if row[0] == spec]
            slope = float(np.polyfit([X[i] for i in idx], [Y[i] for i in idx], 1)[0])
            out.append(upper({"check": "log-log slope", "x": spec, "v": list(vs)}, slope, -0.4))
    for v in vs:
        worst = max(divisor.walfisz_ratio(x, v, tab) for x in walfisz_grid())
        out.append(upper({"check": "walfisz |sum| / log v", "v": v}, worst, C["walfisz_C"]))
    for spec in QUADRATIC:
        x = contfrac.parse_spec(spec)
        diffs = [abs(bernoulli.phi1_partial(x, v) - divisor.psi1_partial(x, v, tab)) for v in vs]
        if len(diffs) >= 2:
            slope = float(np.polyfit(np.log(vs), np.log(diffs), 1)[0])
            out.append(upper({"check": "phi1 - psi1 trend slope", "x": spec, "v": list(vs)}, slope, 0.0))
    return out


# moduli

MODULI_H = (1e-3, 1e-4, 1e-5)


def _toward_one(inputs: dict, ratios: dict) -> list[Case]:
    hs = sorted(ratios, reverse=True)
    inputs = dict(inputs, ratios={format(h, "g"): r for h, r in ratios.items()})
    out = [case(dict(inputs, h=1e-4, check="ratio in [0.5, 1.5]"), ratios[1e-4], 1.0, 0.5)]
    out.append(upper(dict(inputs, check="|ratio - 1| shrinks from h=1e-3 to 1e-5"),
                     abs(ratios[hs[-1]] - 1), abs(ratios[hs[0]] - 1)))
    return out


def phi2_rational_ratio(h: float, N: int = 10**7) -> float:
    """[phi2(1/2+h) - phi2(1/2) - (2 log 2 - 1 + A(1))|h|/2] / (|h| log|h|)."""
    d = bernoulli.phi2_difference(0.5, h, N).value
    lin = (2 * math.log(2) - 1 + autocorr.A_ONE) * abs(h) / 2
    return (d - lin) / (abs(h) * math.log(abs(h)))


def suite_moduli(cfg: dict) -> list[Case]:
    out = []
    r2 = {}
    for h in MODULI_H:
        sup, _ = bernoulli.mod_continuity_phi2(h)
        r2[h] = sup / (h * math.log(1 / h))
    out += _toward_one({"function": "phi2"}, r2)
    rA, cache = {}, {}
    for h in MODULI_H:
        sup, _ = autocorr.mod_continuity_A(h, grid=int(cfg.get("grid", 200)), values=cache)
        rA[h] = sup / (0.5 * h * math.log(1 / h))
    out += _toward_one({"function": "A"}, rA)
    for h in (1e-5, -1e-5):
        out.append(case({"check": "phi2 expansion at 1/2", "h": h}, phi2_rational_ratio(h), 0.5, 0.075))
    return out


# phi1 limits (suite "theorem2-sample")

def phi1_rational(r: Fraction) -> float:
    """phi1(p/q) = -(1/q) sum_{j<q} B_1(j p/q) psi(j/q), psi the digamma function."""
    p, q = r.numerator, r.denominator
    terms = [(((j * p) % q) / q - 0.5) * float(digamma(j / q)) for j in range(1, q)]
    return -math.fsum(terms) / q


def suite_phi1_limits(cfg: dict) -> list[Case]:
    v = float(cfg.get("v", 1e6))
    tab = divisor.tau_sieve(int(v))
    out = []
    for spec in ("golden", "sqrt2m1"):
        x = contfrac.parse_spec(spec)
        p1 = bernoulli.phi1_partial(x, v)
        s1 = divisor.psi1_partial(x, v, tab)
        lim = -0.5 * special.wilton(x).partial + special.G(x).value
        out.append(case({"x": spec, "v": v, "check": "phi1 partial vs -W/2 + G"}, p1, lim, 0.05))
        out.append(case({"x": spec, "v": v, "check": "phi1 partial vs psi1 partial"}, p1, s1, 0.02))
    for r in (Fraction(2, 7), Fraction(1, 3), Fraction(3, 5), Fraction(5, 12), Fraction(8, 13)):
        oracle = phi1_rational(r)
        w = special.wilton(r)
        g = special.G(r)
        lim = -0.5 * w.partial + g.value + special.delta(r)
        out.append(case({"x": str(r), "check": "phi1(r) vs -W/2 + G + delta"}, oracle, lim,
                        g.tail_bound + w.enclosure + 1e-12))
        out.append(case({"x": str(r), "v": v, "check": "phi1 partial vs phi1(r)"},
                        bernoulli.phi1_partial(r, v), oracle, r.denominator / v))
    return out


SUITES = {
    "cf-identities": suite_cf_identities,
    "gauss-invariance": suite_gauss_invariance,
    "landau": suite_landau,
    "wilton-feq": suite_wilton_feq,
    "phi1-sylvester": suite_phi1_sylvester,
    "phi2-consistency": suite_phi2_consistency,
    "A-routes": suite_A_routes,
    "A-reflection": suite_A_reflection,
    "afe-psi1": suite_afe_psi1,
    "moduli": suite_moduli,
    "theorem2-sample": suite_phi1_limits,
}


def run_suite(name: str, config: dict | None = None) -> CheckReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cases = SUITES[name](dict(config or {}))
    return CheckReport(name, cases, dict(constants()))


# calibration

def _measure_sylvester() -> float:
    return max(abs(bernoulli.sylvester_residual(x, v)) * x * v
               for x in sylvester_grid() for v in SYLVESTER_V)


def _measure_walfisz() -> float:
    tab = divisor.tau_sieve(int(max(AFE_V)))
    return max(divisor.walfisz_ratio(x, v, tab) for v in AFE_V for x in walfisz_grid())


def _measure_afe() -> float:
    return max(abs(r) / afe_scale(x, v) for _, x, v, r in afe_measurements())


def _measure_series() -> float:
    worst = 0.0
    for lam in set(LAMBDAS) | {1 / l for l in LAMBDAS} | {0.05, 20.0, 1.0}:
        N = 20_000
        d = autocorr.A_direct(lam)
        s = autocorr.A_via_series(lam, N)
        worst = max(worst, abs(s.value - d.value) * N / (1 / lam + 1 / lam**2))
    return worst


def _measure_delta_tail() -> float:
    worst = 0.0
    for lam in (0.5, 1.0, 2.0, 20.0):
        d = autocorr.A_direct(lam)
        for T in (1e3, 1e4):
            worst = max(worst, abs(divisor.A_via_delta(lam, T).value - d.value) * T ** (2 / 3))
    return worst


CALIBRATIONS = {
    "sylvester": ("sylvester_C", _measure_sylvester, 2.0),
    "walfisz": ("walfisz_C", _measure_walfisz, 2.0),
    "afe-psi1": ("afe_C", _measure_afe, 2.0),
    "series": ("series_c", _measure_series, 2.0),
    "delta-tail": ("delta_tail_c", _measure_delta_tail, 2.0),
    "F-sup": ("F_sup", lambda: autocorr.F_sup_scan(), 1.1),
}


def calibrate(name: str, out_path: str | None = None) -> dict:
    """Measure the empirical max of a ratio on its canonical grid and apply the margin.

    Returns {key: constant, key + "_measured": raw max}; with out_path the
    values are merged into that JSON file (never the shipped one).
    """
    names = list(CALIBRATIONS) if name == "all" else [name]
    result = {}
    for n in names:
        if n not in CALIBRATIONS:
            raise ValueError(f"unknown calibration {n!r}; choose from all, {', '.join(CALIBRATIONS)}")
        key, measure, margin = CALIBRATIONS[n]
        raw = measure()
        result[key] = float(f"{margin * raw:.3g}")
        result[key + "_measured"] = raw
    if out_path:
        try:
            with open(out_path, encoding="utf-8") as fh:
                current = json.load(fh)
        except FileNotFoundError:
            current = {"schema": SCHEMA}
        current.update(result)
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(current, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return result
