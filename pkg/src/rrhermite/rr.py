"""Rogers-Ramanujan type series: constant-term and multi-sum sides, and an identity registry.

Identities are data. A recipe is a linear combination of products of
factors; each factor is a small dict naming a series type (Pochhammer
product, eta, lattice theta sum, Nahm-type multi-sum, constant term, ...).
"""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import rootsys
from .hermite import q_hermite
from .qseries import (QSeries, XPoly, ct_pair, eta, mu, mu_norm, pochhammer, qpoch_inv, theta5)
from .rootsys import RootSystem, Weight
from .theta import FULL, ThetaSpec, theta, xi_sum

log = logging.getLogger(__name__)

ClassSet = Union[str, Iterable[int]]


# --- the two sides of the constant-term theorem --------------------------

@dataclass(frozen=True)
class XiSpec:
    rs: RootSystem
    classes: Tuple[FrozenSet[int], ...]
    r: int = 0

    @classmethod
    def make(cls, rs: RootSystem, classes: Sequence[ClassSet], r: Optional[int] = None) -> "XiSpec":
        specs = tuple(ThetaSpec.of(rs, c).classes for c in classes)
        if not specs:
            raise ValueError("level p must be at least 1")
        if r is None:
            r = atomic_r(rs, specs) if all(len(s) == 1 for s in specs) else 0
        if r not in rootsys.classes(rs):
            raise ValueError(f"r = {r} is not 0 or a minuscule index")
        return cls(rs, specs, r)

    @property
    def p(self) -> int:
        return len(self.classes)

    @property
    def c(self) -> Weight:
        return rootsys.neg(self.rs.omega(self.r))

    def theta_specs(self) -> List[ThetaSpec]:
        return [ThetaSpec(self.rs, s) for s in self.classes]


def atomic_r(rs: RootSystem, classes: Sequence[FrozenSet[int]]) -> int:
    """The r with class(-omega_r) equal to the sum of the atomic classes."""
    total = 0
    for s in classes:
        (k,) = tuple(s)
        total = rootsys.class_add(rs, total, k)
    return rootsys.class_neg(rs, total)


def admissible(spec: XiSpec) -> bool:
    """Whether class(c) lies in the sumset of the chosen classes."""
    reach = {0}
    for s in spec.classes:
        reach = {rootsys.class_add(spec.rs, a, k) for a in reach for k in s}
    return rootsys.class_of(spec.rs, spec.c) in reach


def xi_multisum(spec: XiSpec, order) -> QSeries:
    """Chain sum over b_1..b_{p-1} in P_- ending at c, with Pochhammer denominators."""
    if not admissible(spec):
        log.warning("no chain satisfies the class constraints for %s; the series is zero", spec)
        return QSeries.zero(order)
    return xi_sum(spec.rs, spec.theta_specs(), spec.c, order)


def xi_ct(spec: XiSpec, order) -> QSeries:
    """<mu>^{p-1} CT(prod theta_i * P_{c'} * mu), computed directly."""
    rs = spec.rs
    order = Fraction(order)
    thetas = [theta(s, order) for s in spec.theta_specs()]
    pc = q_hermite(rs, rootsys.dual_label(rs, spec.c)).poly
    other = (pc * mu(rs, order)).truncate(order)
    prod = thetas[0]
    for t in thetas[1:-1]:
        prod = (prod * t).truncate(order)
    if len(thetas) > 1:
        other = (other * thetas[-1]).truncate(order)
    value = ct_pair(prod, other)
    if spec.p > 1:
        value = value * (mu_norm(rs, order) ** (spec.p - 1))
    return value.truncate(order)


# --- gl version ---------------------------------------------------------

def _gl_weights(dim: int, bound: Fraction) -> List[Tuple[int, ...]]:
    """Integer vectors d with sum(d_i^2)/2 <= bound."""
    r = math.isqrt(int(2 * bound))
    out = []
    for d in iproduct(range(-r, r + 1), repeat=dim):
        if Fraction(sum(x * x for x in d), 2) <= bound:
            out.append(d)
    return out


def xi_gl(n: int, p: int, classes: Sequence[Iterable[int]], r: int, order) -> QSeries:
    """gl_{n+1} chain sum in epsilon coordinates.

    b = (u_1..u_{n+1}) is antidominant when u_1 <= ... <= u_{n+1}; its class
    is sum(u_i) mod n+1; the denominator is prod_j (q)_{u_{j+1} - u_j}; the
    chain ends at c = -(e_1 + ... + e_r).
    """
    order = Fraction(order)
    mod = n + 1
    cls = [frozenset(k % mod for k in s) for s in classes]
    if len(cls) != p:
        raise ValueError("need one class set per theta factor")
    c = tuple([-1] * r + [0] * (mod - r))
    steps = _gl_weights(mod, order)
    total = QSeries.zero(order)
    dens: Dict[Tuple[int, ...], QSeries] = {}

    def den(b):
        d = dens.get(b)
        if d is None:
            d = QSeries.one(order)
            for j in range(n):
                d = (d * qpoch_inv(b[j + 1] - b[j], order)).truncate(order)
            dens[b] = d
        return d

    def rec(chain, spent):
        nonlocal total
        last = chain[-1] if chain else tuple([0] * mod)
        if len(chain) == p - 1:
            d = tuple(x - y for x, y in zip(c, last))
            if sum(d) % mod not in cls[p - 1]:
                return
            e = spent + Fraction(sum(x * x for x in d), 2)
            if e > order:
                return
            term = QSeries.monomial(e, order=order)
            for b in chain:
                term = (term * den(b)).truncate(order)
            total = total + term
            return
        for d in steps:
            e = spent + Fraction(sum(x * x for x in d), 2)
            if e > order or sum(d) % mod not in cls[len(chain)]:
                continue
            b = tuple(x + y for x, y in zip(last, d))
            if all(b[i] <= b[i + 1] for i in range(n)):
                rec(chain + [b], e)

    rec([], Fraction(0))
    return total.truncate(order)


def _shell_sum(j: Fraction, scale: Fraction, order: Fraction) -> QSeries:
    """sum over s in j + Z of q^{scale s^2 / 2}."""
    terms: Dict[Fraction, int] = {}
    k = math.floor(-j) - 1
    lo = k - math.isqrt(int(2 * order / scale) + 1) - 2
    hi = k + math.isqrt(int(2 * order / scale) + 1) + 4
    for t in range(lo, hi + 1):
        s = j + t
        e = scale * s * s / 2
        if e <= order:
            terms[e] = terms.get(e, 0) + 1
    return QSeries(terms, order)


def gl_eta_factor(multiplicities: Sequence[int], order) -> QSeries:
    """prod_j (sum over s in j/(n+1) + Z of q^{s^2/2})^{lambda_j}, n+1 = len(multiplicities)."""
    order = Fraction(order)
    mod = len(multiplicities)
    out = QSeries.one(order)
    for j, lam in enumerate(multiplicities):
        if lam:
            out = (out * _shell_sum(Fraction(j, mod), Fraction(1), order) ** lam).truncate(order)
    return out


def gl_center_factor(n: int, atoms: Sequence[int], r: int, order) -> QSeries:
    """Center-direction lattice sum that actually splits off the gl chain sum.

    Steps t_i in k_i/(n+1) + Z with t_1 + ... + t_p = -r/(n+1), weighted
    by q^{(n+1) sum t_i^2 / 2}.
    """
    order = Fraction(order)
    mod = n + 1
    p = len(atoms)
    target = Fraction(-r, mod)
    radius = math.isqrt(int(2 * order / mod) + 1) + 2
    total: Dict[Fraction, int] = {}
    for ints in iproduct(range(-radius - 1, radius + 2), repeat=p - 1):
        ts = [Fraction(atoms[i], mod) + ints[i] for i in range(p - 1)]
        last = target - sum(ts)
        if (last - Fraction(atoms[-1], mod)).denominator != 1:
            continue
        ts.append(last)
        e = Fraction(mod, 2) * sum(t * t for t in ts)
        if e <= order:
            total[e] = total.get(e, 0) + 1
    return QSeries(total, order)


def gl_check(n: int, multiplicities: Sequence[int], order) -> Dict[str, object]:
    """Compare the gl chain sum with both factorizations for atomic class multiplicities."""
    order = Fraction(order)
    atoms = [j for j, lam in enumerate(multiplicities) for _ in range(lam)]
    p = len(atoms)
    rs = rootsys.build("A", n)
    spec = XiSpec.make(rs, [[k] for k in atoms])
    gl = xi_gl(n, p, [[k] for k in atoms], spec.r, order)
    an = xi_multisum(spec, order)
    literal = (gl_eta_factor(multiplicities, order) * an).truncate(order)
    corrected = (gl_center_factor(n, atoms, spec.r, order) * an).truncate(order)
    return {
        "r": spec.r,
        "gl": gl,
        "literal_ok": gl == literal,
        "literal_mismatch": gl.first_mismatch(literal),
        "corrected_ok": gl == corrected,
    }


# --- recipes ------------------------------------------------------------

def _fr(x) -> Fraction:
    if isinstance(x, str) and "/" in x:
        return Fraction(x)
    return Fraction(x)


def _classes_arg(rs: RootSystem, c) -> ClassSet:
    if c == FULL or c == "FULL":
        return FULL
    if isinstance(c, int):
        return [c]
    return list(c)


def _nahm(f: Mapping, order: Fraction) -> QSeries:
    quad = [[_fr(x) for x in row] for row in f["quad"]]
    k = len(quad)
    lin = [_fr(x) for x in f.get("linear", [0] * k)]
    const = _fr(f.get("const", 0))
    dens = [(_fr(d.get("base", 1)), [int(x) for x in d["lin"]], int(d.get("off", 0))) for d in f.get("dens", [])]
    congs = [([int(x) for x in cg["lin"]], int(cg["mod"]), int(cg["res"])) for cg in f.get("cong", [])]
    sign_lin = [int(x) for x in f["sign"]] if "sign" in f else None
    sym = np.array([[float(quad[i][j] + quad[j][i]) / 2 for j in range(k)] for i in range(k)])
    inv = np.linalg.inv(sym)
    lvec = np.array([float(x) for x in lin])
    center = -inv @ lvec / 2
    rad2 = float(order - const) + float(lvec @ inv @ lvec) / 4
    if rad2 < 0:
        return QSeries.zero(order)
    hi = [max(0, math.floor(center[i] + math.sqrt(rad2 * inv[i][i]) + 1e-9) + 1) for i in range(k)]
    terms: Dict[Fraction, Fraction] = {}
    total = QSeries.zero(order)

    def exponent(v):
        e = const
        for i in range(k):
            if v[i]:
                e += lin[i] * v[i]
                for j in range(k):
                    if v[j]:
                        e += quad[i][j] * v[i] * v[j]
        return e

    for v in iproduct(*[range(h + 1) for h in hi]):
        if any(sum(a * b for a, b in zip(cl, v)) % m != res % m for cl, m, res in congs):
            continue
        e = exponent(v)
        if e > order:
            continue
        idx = [(base, sum(a * b for a, b in zip(cl, v)) + off) for base, cl, off in dens]
        if any(i < 0 for _, i in idx):
            continue
        sign = -1 if sign_lin is not None and sum(a * b for a, b in zip(sign_lin, v)) % 2 else 1
        rest = order - e
        term = QSeries.one(rest)
        for base, i in idx:
            if i:
                term = (term * qpoch_inv(i, rest, base=base)).truncate(rest)
        total = total + term.shift(e) * sign
    return total.truncate(order)


def _lattice(f: Mapping, order: Fraction) -> QSeries:
    a = _fr(f["a"])
    s = _fr(f.get("shift", 0))
    alt = bool(f.get("alt", False))
    terms: Dict[Fraction, int] = {}
    reach = math.isqrt(int(order / a) + 1) + 2
    base = math.floor(-s)
    for n in range(base - reach, base + reach + 2):
        e = a * (n + s) ** 2
        if e <= order:
            c = -1 if alt and n % 2 else 1
            terms[e] = terms.get(e, 0) + c
    return QSeries(terms, order)


def _mod_product(f: Mapping, order: Fraction) -> QSeries:
    step = _fr(f.get("step", 1))
    rules = [(int(m), {int(x) % int(m) for x in res}) for m, res in f["exclude"]]
    out = QSeries.one(order)
    k = 1
    while k * step <= order:
        if not any(k % m in res for m, res in rules):
            out = (out * (QSeries.one() - QSeries.monomial(k * step))).truncate(order)
        k += 1
    return out


def _ct(f: Mapping, order: Fraction) -> QSeries:
    rs = rootsys.parse_id(f["rs"])
    thetas = [theta(ThetaSpec.of(rs, _classes_arg(rs, c)), order) for c in f.get("thetas", [])]
    prod = XPoly.one(rs, order)
    for t in thetas:
        prod = (prod * t).truncate(order)
    extra = XPoly.one(rs)
    if f.get("orbit") is not None:
        extra = XPoly.orbit_sum(rs, f["orbit"])
    if f.get("monomial") is not None:
        extra = extra * XPoly.monomial(rs, f["monomial"])
    if f.get("measure", True):
        extra = (extra * mu(rs, order)).truncate(order)
    return ct_pair(prod, extra).truncate(order)


def _xi(f: Mapping, order: Fraction) -> QSeries:
    rs = rootsys.parse_id(f["rs"])
    spec = XiSpec.make(rs, [_classes_arg(rs, c) for c in f["classes"]], f.get("r"))
    method = f.get("method", "ct")
    if method == "ct":
        return xi_ct(spec, order)
    if method == "multisum":
        return xi_multisum(spec, order)
    raise ValueError(f"unknown xi method {method!r}")


def _poch(f: Mapping, order: Fraction) -> QSeries:
    n = f.get("n", "inf")
    n = math.inf if n in ("inf", None) else int(n)
    return pochhammer(_fr(f.get("a", 0)), _fr(f["base"]), n, order, int(f.get("coeff", 1)))


def _eval_raw(f: Mapping, order: Fraction) -> QSeries:
    kind = f["type"]
    if kind == "poch":
        return _poch(f, order)
    if kind == "eta":
        return eta(order, _fr(f.get("scale", 1)))
    if kind == "theta5":
        return theta5(_fr(f["m"]), _fr(f.get("scale", 1)), order)
    if kind == "lattice":
        return _lattice(f, order)
    if kind == "mod_product":
        return _mod_product(f, order)
    if kind == "monomial":
        return QSeries.monomial(_fr(f["exp"]), _fr(f.get("coeff", 1)))
    if kind == "nahm":
        return _nahm(f, order)
    if kind == "xi":
        return _xi(f, order)
    if kind == "ct":
        return _ct(f, order)
    if kind == "sum":
        return evaluate(f, order)
    raise ValueError(f"unknown factor type {kind!r}")


def _factor_at(f: Mapping, order: Fraction) -> QSeries:
    scale = _fr(f.get("scale", 1)) if f["type"] not in ("eta", "theta5") else Fraction(1)
    if scale != 1:
        return _factor_cached(json.dumps(f, sort_keys=True), order / scale).scale(scale)
    return _factor_cached(json.dumps(f, sort_keys=True), order)


@lru_cache(maxsize=1024)
def _factor_cached(key: str, order: Fraction) -> QSeries:
    f = json.loads(key)
    f.pop("power", None)
    if f["type"] not in ("eta", "theta5"):
        f.pop("scale", None)
    return _eval_raw(f, order)


def _valuation(f: Mapping, probe: Fraction) -> Fraction:
    if f["type"] == "monomial":
        return _fr(f["exp"])
    probe = max(probe, Fraction(1))
    for _ in range(6):
        s = _factor_at(f, probe)
        if not s.is_zero():
            return s.valuation()
        probe = 2 * probe + 1
    raise ZeroDivisionError(f"factor {f} vanishes to order {probe}")


def _term(factors: Sequence[Mapping], order: Fraction) -> QSeries:
    powers = [int(f.get("power", 1)) for f in factors]
    # monomials first, so other factors are probed at the order they will be needed at
    shift = sum(p * _fr(f["exp"]) for f, p in zip(factors, powers) if f["type"] == "monomial")
    vals = [_valuation(f, order - shift) for f in factors]
    total_v = sum(p * v for p, v in zip(powers, vals))
    rel = order - total_v
    if rel < 0:
        return QSeries.zero(order)
    out = QSeries.one(rel)
    for f, v, p in zip(factors, vals, powers):
        if p == 0:
            continue
        if f["type"] == "monomial":
            out = out * _fr(f.get("coeff", 1)) ** p
            continue
        unit = _factor_at(f, rel + v).shift(-v).truncate(rel)
        piece = unit ** p if p > 0 else unit.inverse(rel) ** (-p)
        out = (out * piece).truncate(rel)
    return out.shift(total_v).truncate(order)


def evaluate(recipe: Mapping, order) -> QSeries:
    """Evaluate a recipe: {"terms": [{"coeff": c, "factors": [...]}, ...]} or {"factors": [...]}."""
    order = Fraction(order)
    terms = recipe.get("terms")
    if terms is None:
        terms = [{"coeff": recipe.get("coeff", 1), "factors": recipe.get("factors", [])}]
    total = QSeries.zero(order)
    for t in terms:
        c = _fr(t.get("coeff", 1))
        if c:
            total = total + _term(t.get("factors", []), order) * c
    return total.truncate(order)


# --- recipe builders ----------------------------------------------------

def poch(a, base, coeff=1, power=1, n="inf") -> dict:
    return {"type": "poch", "a": str(Fraction(a)), "base": str(Fraction(base)), "coeff": coeff, "power": power, "n": n}


def qinf(base=1, power=1) -> dict:
    return poch(base, base, 1, power)


def eta_f(scale=1, power=1) -> dict:
    return {"type": "eta", "scale": str(Fraction(scale)), "power": power}


def theta5_f(m, scale=1, power=1) -> dict:
    return {"type": "theta5", "m": str(Fraction(m)), "scale": str(Fraction(scale)), "power": power}


def mono(exp, coeff=1) -> dict:
    return {"type": "monomial", "exp": str(Fraction(exp)), "coeff": str(Fraction(coeff))}


def lattice(a, shift=0, alt=False) -> dict:
    return {"type": "lattice", "a": str(Fraction(a)), "shift": str(Fraction(shift)), "alt": alt}


def xi_f(rs: str, classes, r=None, method="ct", power=1) -> dict:
    out = {"type": "xi", "rs": rs, "classes": classes, "method": method, "power": power}
    if r is not None:
        out["r"] = r
    return out


def nahm(quad, linear=None, const=0, dens=(), cong=(), sign=None, power=1) -> dict:
    f = {
        "type": "nahm",
        "quad": [[str(Fraction(x)) for x in row] for row in quad],
        "linear": [str(Fraction(x)) for x in (linear or [0] * len(quad))],
        "const": str(Fraction(const)),
        "dens": [{"base": str(Fraction(b)), "lin": list(l), "off": o} for b, l, o in dens],
        "cong": [{"lin": list(l), "mod": m, "res": r} for l, m, r in cong],
        "power": power,
    }
    if sign is not None:
        f["sign"] = list(sign)
    return f


def prod_(*factors, coeff=1) -> dict:
    return {"terms": [{"coeff": str(Fraction(coeff)), "factors": list(factors)}]}


def lin_(*terms) -> dict:
    """Linear combination of (coeff, recipe-with-single-term) pairs."""
    out = []
    for c, rec in terms:
        for t in rec["terms"]:
            out.append({"coeff": str(Fraction(c) * Fraction(t.get("coeff", 1))), "factors": t["factors"]})
    return {"terms": out}


def _ordered_sum(n: int, quad_scale, first_den: Tuple, rest_base, linear_scale=None) -> dict:
    """Sum over 0 <= v_1 <= ... <= v_n written in the gaps w_i = v_i - v_{i-1} >= 0.

    quad_scale * sum v_i^2, first denominator (q^b; q^b)_{mult * v_1},
    then (q^rest_base; q^rest_base)_{v_{i+1} - v_i}.
    """
    # v_i = w_1 + ... + w_i, so sum v_i^2 = sum_{a,b} (n - max(a,b)) w_a w_b
    quad = [[Fraction(quad_scale) * (n - max(a, b)) for b in range(n)] for a in range(n)]
    base, mult = first_den
    dens = [(base, [mult] + [0] * (n - 1), 0)]
    for i in range(1, n):
        lin = [0] * n
        lin[i] = 1
        dens.append((rest_base, lin, 0))
    return prod_(nahm(quad, dens=dens))


# --- the registry -------------------------------------------------------

@dataclass(frozen=True)
class IdentityRecord:
    id: str
    lhs: dict
    rhs: dict
    order: int
    paper_eq: str
    note: str = ""
    misprint: bool = False


@dataclass
class Report:
    id: str
    paper_eq: str
    order: int
    status: str
    first_mismatch_exponent: Optional[Fraction]
    elapsed_ms: float
    misprint: bool = False

    def to_json(self) -> dict:
        e = self.first_mismatch_exponent
        return {
            "id": self.id,
            "paper_eq": self.paper_eq,
            "order": self.order,
            "status": self.status,
            "first_mismatch_exponent": None if e is None else str(e),
            "elapsed_ms": round(self.elapsed_ms, 1),
            "misprint": self.misprint,
        }


RANK1_ORDER = 40
RANK2_ORDER = 15
LEVEL2_ORDER = 25
WARNAAR_ORDER = 20

_REGISTRY: Dict[str, IdentityRecord] = {}


def register(rec: IdentityRecord) -> None:
    if rec.id in _REGISTRY:
        raise ValueError(f"duplicate identity id {rec.id!r}")
    _REGISTRY[rec.id] = rec


def registry() -> Dict[str, IdentityRecord]:
    return dict(_REGISTRY)


def _durfee(m: int) -> IdentityRecord:
    # k = l + m; the summation variable is l
    return IdentityRecord(
        f"durfee({m})",
        prod_(qinf(power=-1)),
        prod_(nahm([[1]], [m], dens=[(1, [1], m), (1, [1], 0)])),
        RANK1_ORDER, "Durfee rectangle identity")


def _theta_shift(m: int, literal: bool) -> IdentityRecord:
    lhs = prod_({"type": "ct", "rs": "A1", "thetas": ["FULL", "FULL"], "monomial": [m], "measure": False},
                qinf(power=-2))
    if literal:
        rhs = prod_(mono(Fraction(m * m, 2)), lattice(Fraction(1, 2)), qinf(power=-2))
        return IdentityRecord(f"theta-sq-shift-literal({m})", lhs, rhs, RANK1_ORDER,
                              "theta square coefficient of X^m, prefactor as printed",
                              "prefactor q^{m^2/2} as printed", misprint=True)
    rhs = prod_(mono(Fraction(m * m, 8)), lattice(Fraction(1, 2), Fraction(m, 2)), qinf(power=-2))
    return IdentityRecord(f"theta-sq-shift({m})", lhs, rhs, RANK1_ORDER,
                          "theta square coefficient of X^m",
                          "prefactor q^{m^2/8}, lattice shifted by m/2")


def _theta_shift_sum(m: int) -> IdentityRecord:
    lhs = prod_({"type": "ct", "rs": "A1", "thetas": ["FULL", "FULL"], "monomial": [m], "measure": False},
                qinf(power=-2))
    # n_2 = m + 2k: exponent n1^2/2 - n1 k + k^2 - m n1/2 + m k + m^2/4
    rhs = prod_(nahm([[Fraction(1, 2), Fraction(-1, 2)], [Fraction(-1, 2), 1]],
                     [Fraction(-m, 2), m], Fraction(m * m, 4),
                     dens=[(1, [1, 0], 0), (1, [0, 1], m), (1, [0, 1], 0)]))
    return IdentityRecord(f"theta-sq-shift-multisum({m})", lhs, rhs, RANK1_ORDER,
                          "theta square coefficient of X^m, double-sum form")


_XI3_SPLIT = {
    # (u, v, w): (normalizing exponent, rhs recipe)
    "000": (Fraction(-1, 20), lambda: lin_(
        (1, prod_(theta5_f(Fraction(3, 4), 2), eta_f(1), eta_f(2, -1), eta_f(Fraction(1, 2), -1))),
        (1, prod_(theta5_f(Fraction(13, 4), 2), eta_f(1), eta_f(2, -1), eta_f(Fraction(1, 2), -1))),
        (-1, prod_(theta5_f(2, 2), eta_f(2), eta_f(1, -2))))),
    "110": (Fraction(-1, 20), lambda: prod_(theta5_f(2, 2), eta_f(2), eta_f(1, -2))),
    "111": (Fraction(-4, 20), lambda: lin_(
        (1, prod_(theta5_f(Fraction(3, 2), 1), theta5_f(2, 2), eta_f(1, 3), eta_f(Fraction(1, 2), -2),
                  eta_f(2, -2), eta_f(10, -1))),
        (-1, prod_(theta5_f(1, 2), eta_f(2), eta_f(1, -2))))),
    "100": (Fraction(-4, 20), lambda: prod_(theta5_f(1, 2), eta_f(2), eta_f(1, -2))),
}


def _xi3_classes(u, v, w):
    return [[u], [v], [w]]


def _build_registry() -> None:
    R1 = RANK1_ORDER
    register(IdentityRecord("euler", prod_(qinf(power=-1)),
                            prod_(nahm([[1]], dens=[(1, [1], 0), (1, [1], 0)])), 50, "Euler identity"))
    for m in range(-2, 5):
        register(_durfee(m))

    # theta squared without the measure
    ct2 = prod_({"type": "ct", "rs": "A1", "thetas": ["FULL", "FULL"], "measure": False}, qinf(power=-2))
    register(IdentityRecord("theta-sq-ct", ct2, prod_(lattice(Fraction(1, 2)), qinf(power=-2)), R1,
                            "constant term of theta squared"))
    register(IdentityRecord("theta-sq-product", ct2,
                            prod_(poch(Fraction(1, 2), 1, -1, 2), qinf(power=-1)), R1,
                            "constant term of theta squared, product form"))
    register(IdentityRecord("theta-sq-multisum", ct2,
                            prod_(nahm([[Fraction(1, 2), -1], [0, 1]],
                                       dens=[(1, [1, 0], 0), (1, [0, 1], 0), (1, [0, 1], 0)])), R1,
                            "constant term of theta squared, double-sum form"))
    for m in range(0, 4):
        register(_theta_shift(m, literal=False))
        register(_theta_shift_sum(m))
    for m in range(1, 4):
        register(_theta_shift(m, literal=True))

    # level two with the measure
    xi_full = prod_(xi_f("A1", ["FULL", "FULL"], 0))
    xi_even = prod_(xi_f("A1", [[0], [0]], 0))
    xi_odd = prod_(xi_f("A1", [[1], [1]], 0))
    register(IdentityRecord("xi2-full", xi_full, prod_(nahm([[Fraction(1, 2)]], dens=[(1, [1], 0)])), R1,
                            "level-two rank-one series, full theta"))
    register(IdentityRecord("xi2-even", xi_even, prod_(nahm([[2]], dens=[(1, [2], 0)])), R1,
                            "level-two rank-one series, even theta"))
    register(IdentityRecord("xi2-even-theta", xi_even, prod_(lattice(4, Fraction(-1, 8)), mono(Fraction(-1, 16)),
                                                            qinf(2, -1)), R1,
                            "level-two even series, theta quotient"))
    register(IdentityRecord("xi2-even-product", xi_even,
                            prod_(poch(3, 8, -1), poch(5, 8, -1), qinf(8), qinf(2, -1)), R1,
                            "level-two even series, product form"))
    register(IdentityRecord("xi2-odd", xi_odd,
                            prod_(mono(Fraction(1, 2)), nahm([[2]], [2], dens=[(1, [2], 1)])), R1,
                            "level-two odd series"))
    register(IdentityRecord("xi2-odd-difference", xi_odd, lin_((1, xi_full), (-1, xi_even)), R1,
                            "odd series as full minus even"))
    register(IdentityRecord("xi2-odd-theta", xi_odd,
                            prod_(mono(Fraction(1, 2)), lattice(4, Fraction(-3, 8)), mono(Fraction(-9, 16)),
                                  qinf(2, -1)), R1,
                            "level-two odd series, theta quotient"))
    register(IdentityRecord("xi2-odd-product", xi_odd,
                            prod_(mono(Fraction(1, 2)), poch(1, 8, -1), poch(7, 8, -1), qinf(8), qinf(2, -1)), R1,
                            "level-two odd series, product form"))
    register(IdentityRecord("xi2-full-eta", xi_full,
                            prod_(mono(Fraction(1, 48)), eta_f(1, 2), eta_f(Fraction(1, 2), -1), eta_f(2, -1)), R1,
                            "level-two full series, eta quotient"))
    xi_full_1 = prod_(xi_f("A1", ["FULL", "FULL"], 1))
    register(IdentityRecord("xi2-full-p1", xi_full_1,
                            prod_(mono(Fraction(1, 4)), nahm([[Fraction(1, 2)]], [Fraction(-1, 2)], dens=[(1, [1], 0)])),
                            R1, "level-two full series with P_1"))
    register(IdentityRecord("xi2-full-p1-eta", xi_full_1,
                            prod_(mono(Fraction(1, 4) - Fraction(1, 24), 2), eta_f(2), eta_f(1, -1)), R1,
                            "level-two full series with P_1, eta quotient"))

    # level three, atomic classes
    for u, v, w in iproduct((0, 1), repeat=3):
        r = (u + v + w) % 2
        key = f"{u}{v}{w}"
        lhs = prod_(xi_f("A1", _xi3_classes(u, v, w), r))
        rhs = prod_(nahm([[Fraction(1, 2), Fraction(-1, 2)], [0, Fraction(1, 2)]], [0, Fraction(-r, 2)],
                         Fraction(r * r, 4), dens=[(1, [1, 0], 0), (1, [0, 1], 0)],
                         cong=[([1, 0], 2, u), ([0, 1], 2, u + v)]))
        register(IdentityRecord(f"xi3-{key}", lhs, rhs, R1, "level-three rank-one double sum"))
        register(IdentityRecord(f"xi3-{key}-chain", lhs, prod_(xi_f("A1", _xi3_classes(u, v, w), r, "multisum")),
                                R1, "level-three rank-one chain sum"))
    for key, (e, rhs) in _XI3_SPLIT.items():
        u, v, w = (int(ch) for ch in key)
        r = (u + v + w) % 2
        register(IdentityRecord(f"xi3-split-{key}", prod_(mono(e), xi_f("A1", _xi3_classes(u, v, w), r)), rhs(),
                                R1, "level-three atomic split, theta/eta quotient"))
    # the other parse of the printed line: eta(10z) as a multiplier
    e, _ = _XI3_SPLIT["111"]
    alt = lin_(
        (1, prod_(theta5_f(Fraction(3, 2), 1), theta5_f(2, 2), eta_f(1, 3), eta_f(Fraction(1, 2), -2),
                  eta_f(2, -2), eta_f(10, 1))),
        (-1, prod_(theta5_f(1, 2), eta_f(2), eta_f(1, -2))))
    register(IdentityRecord("xi3-split-111-alt", prod_(mono(e), xi_f("A1", [[1], [1], [1]], 1)), alt, R1,
                            "level-three atomic split, eta(10z) read as a multiplier", misprint=True))

    # Rogers-Ramanujan at q^2
    rr_tail = [poch(1, 1, -1, 2)]
    register(IdentityRecord("rr-even-100", prod_(mono(Fraction(-1, 4)), xi_f("A1", [[1], [0], [0]], 1)),
                            prod_(nahm([[2]], dens=[(2, [1], 0)]), *rr_tail), R1,
                            "Rogers-Ramanujan at q^2, first"))
    register(IdentityRecord("rr-even-100-theta", prod_(mono(Fraction(-1, 4)), xi_f("A1", [[1], [0], [0]], 1)),
                            prod_(mono(Fraction(-1, 20)), theta5_f(1, 2), eta_f(2), eta_f(1, -2)), R1,
                            "Rogers-Ramanujan at q^2, first, theta quotient"))
    register(IdentityRecord("rr-even-110", prod_(mono(Fraction(-1, 2)), xi_f("A1", [[1], [1], [0]], 0)),
                            prod_(nahm([[2]], [2], dens=[(2, [1], 0)]), *rr_tail), R1,
                            "Rogers-Ramanujan at q^2, second"))
    register(IdentityRecord("rr-even-110-theta", prod_(mono(Fraction(-1, 2)), xi_f("A1", [[1], [1], [0]], 0)),
                            prod_(mono(Fraction(-9, 20)), theta5_f(2, 2), eta_f(2), eta_f(1, -2)), R1,
                            "Rogers-Ramanujan at q^2, second, theta quotient"))
    register(IdentityRecord("rr-classical-G", prod_(nahm([[1]], dens=[(1, [1], 0)])),
                            prod_(mono(Fraction(1, 60)), theta5_f(1, 1), eta_f(1, -1)), R1,
                            "classical Rogers-Ramanujan G"))
    register(IdentityRecord("rr-classical-H", prod_(nahm([[1]], [1], dens=[(1, [1], 0)])),
                            prod_(mono(Fraction(-11, 60)), theta5_f(2, 1), eta_f(1, -1)), R1,
                            "classical Rogers-Ramanujan H"))

    # the introductory triple equality, k = 0 and 1
    for k in (0, 1):
        ct = {"type": "ct", "rs": "A1", "thetas": [[1], [0], [k]], "measure": True}
        if k == 0:
            ct["orbit"] = [1]
        lhs = prod_(ct, mono(-Fraction(1 + k, 4)), qinf(power=-2))
        s1 = prod_(nahm([[2, -2], [0, 2]], [k, 1], dens=[(1, [2, 0], 1), (1, [0, 2], 1)]))
        s2 = prod_(nahm([[2, -2], [0, 2]], [2 * k, -1], dens=[(1, [2, 0], k), (1, [0, 2], 0)]))
        single = prod_(nahm([[2]], [2 * k], dens=[(2, [1], 0)]), poch(1, 1, -1, 2))
        register(IdentityRecord(f"triple-k{k}-ct", lhs, s1, R1, "introductory example, constant term vs first double sum"))
        register(IdentityRecord(f"triple-k{k}-double", s1, s2, R1, "introductory example, the two double sums"))
        register(IdentityRecord(f"triple-k{k}-single", s2, single, R1, "introductory example, single-sum reduction"))
        lhs2 = prod_(ct, mono(-Fraction(1 + k, 4)), qinf(2, -2))
        register(IdentityRecord(f"triple-k{k}-rr", lhs2, prod_(nahm([[2]], [2 * k], dens=[(2, [1], 0)])), R1,
                                "introductory example, Rogers-Ramanujan series at q^2"))

    # A_2 at level two
    R2 = RANK2_ORDER
    odot = prod_(xi_f("A2", [[0], [0]], 0))
    otimes = prod_(xi_f("A2", [[1], [2]], 0))
    total = prod_(xi_f("A2", ["FULL", "FULL"], 0))
    register(IdentityRecord("a2-level2-total", total, lin_((1, odot), (2, otimes)), R2,
                            "A2 level two, full as even plus twice mixed"))
    register(IdentityRecord("a2-level2-even-chain", odot, prod_(xi_f("A2", [[0], [0]], 0, "multisum")), R2,
                            "A2 level two, even collection, chain sum"))
    register(IdentityRecord("a2-level2-mixed-chain", otimes, prod_(xi_f("A2", [[1], [2]], 0, "multisum")), R2,
                            "A2 level two, mixed collection, chain sum"))
    register(IdentityRecord("a2-level2-mixed-swap", otimes, prod_(xi_f("A2", [[2], [1]], 0)), R2,
                            "A2 level two, mixed collection, swapped order"))
    th = lambda s: lattice(Fraction(15, 2), s, alt=True)
    register(IdentityRecord("a2-level2-total-theta", prod_(mono(Fraction(-1, 30)), xi_f("A2", ["FULL", "FULL"], 0)),
                            lin_((2, prod_(th(Fraction(3, 10)), eta_f(1, -1))),
                                 (1, prod_(th(Fraction(1, 30)), eta_f(1, -1))),
                                 (-1, prod_(th(Fraction(11, 30)), eta_f(1, -1)))), R2,
                            "A2 level two, full series, theta over eta"))
    register(IdentityRecord("a2-level2-even-theta", prod_(mono(Fraction(-1, 30)), xi_f("A2", [[0], [0]], 0)),
                            lin_((1, prod_(th(Fraction(1, 30)), eta_f(1, -1))),
                                 (-1, prod_(th(Fraction(11, 30)), eta_f(1, -1)))), R2,
                            "A2 level two, even collection, theta over eta"))
    register(IdentityRecord("a2-level2-mixed-theta", prod_(mono(Fraction(-1, 30)), xi_f("A2", [[1], [2]], 0)),
                            prod_(th(Fraction(3, 10)), eta_f(1, -1)), R2,
                            "A2 level two, mixed collection, theta over eta"))
    string_product = prod_({"type": "mod_product", "step": "1/3", "exclude": [[5, [1, 4]]]})
    diff = lin_((1, odot), (-1, otimes))
    register(IdentityRecord("a2-string-difference",
                            {"terms": [{"coeff": t["coeff"], "factors": t["factors"] + [
                                mono(Fraction(-1, 120) - Fraction(1, 30)), eta_f(1)]} for t in diff["terms"]]},
                            string_product, R2, "string-function difference, product form",
                            "eta multiplies the difference after the -1/30 normalization"))
    register(IdentityRecord("a2-string-difference-literal",
                            {"terms": [{"coeff": t["coeff"], "factors": t["factors"] + [
                                mono(Fraction(-1, 120)), eta_f(1, -1)]} for t in diff["terms"]]},
                            string_product, R2, "string-function difference as printed", misprint=True))
    register(IdentityRecord("a2-string-theta",
                            lin_((1, prod_(mono(Fraction(-1, 120)), th(Fraction(1, 30)))),
                                 (-1, prod_(mono(Fraction(-1, 120)), th(Fraction(11, 30)))),
                                 (-1, prod_(mono(Fraction(-1, 120)), th(Fraction(3, 10))))),
                            string_product, R2, "string-function difference, theta side"))

    # B_n, C_n level two and Warnaar's companions
    for n in (1, 2, 3):
        b_sum = _ordered_sum(n, 2, (1, 2), 2)
        b_prod = prod_(poch(2 * n + 1, 4 * n + 4, -1), poch(2 * n + 3, 4 * n + 4, -1), qinf(4 * n + 4), qinf(2, -1))
        register(IdentityRecord(f"b-level2-product-n{n}", b_sum, b_prod, LEVEL2_ORDER,
                                "level-two B_n series, product form"))
        c_sum = _ordered_sum(n, 1, (2, 1), 1)
        c_prod = prod_(poch(n + 1, 2 * n + 2, 1, 2), qinf(2 * n + 2), qinf(1, -1))
        register(IdentityRecord(f"c-level2-product-n{n}", c_sum, c_prod, LEVEL2_ORDER,
                                "level-two C_n series, product form"))
    for n in (1, 2):
        register(IdentityRecord(f"b-level2-xi-n{n}", prod_(xi_f(f"B{n}" if n > 1 else "A1", [[0], [0]], 0, "multisum")),
                                _ordered_sum(n, 2, (1, 2), 2), LEVEL2_ORDER,
                                "level-two B_n chain sum in ordered coordinates"))
        register(IdentityRecord(f"c-level2-xi-n{n}", prod_(xi_f(f"C{n}" if n > 1 else "A1", ["FULL", "FULL"], 0, "multisum")),
                                _ordered_sum(n, 1, (2, 1), 1) if n > 1 else prod_(nahm([[Fraction(1, 2)]], dens=[(1, [1], 0)])),
                                LEVEL2_ORDER, "level-two C_n chain sum in ordered coordinates",
                                "C_1 is compared in its A_1 form, i.e. after q^2 -> q"))
    register(IdentityRecord("b2-level2-product", _ordered_sum(2, 2, (1, 2), 2),
                            prod_(poch(5, 12, -1), poch(7, 12, -1), qinf(12), qinf(2, -1)), LEVEL2_ORDER,
                            "level-two B_2 series, product form"))
    for n in (1, 2):
        w_sum = _ordered_sum(n, 1, (1, 2), 2)
        w_prod = prod_({"type": "mod_product", "step": 1, "exclude": [[4, [2]], [8 * n + 12, [0, 4 * (n + 1), -4 * (n + 1)]]],
                        "power": -1})
        register(IdentityRecord(f"warnaar-b-n{n}", w_sum, w_prod, WARNAAR_ORDER, "Warnaar B-type companion"))
        h_sum = _ordered_sum(n, Fraction(1, 2), (2, 1), 1)
        base = Fraction(2 * n + 3, 2)
        h_prod = prod_(poch(Fraction(n + 1, 2), base), poch(Fraction(n + 2, 2), base), poch(base, base),
                       poch(1, 1, -1, -1), qinf(Fraction(1, 2), -1))
        register(IdentityRecord(f"warnaar-c-n{n}", h_sum, h_prod, WARNAAR_ORDER, "Warnaar C-type companion"))


def _ensure_registry():
    if not _REGISTRY:
        _build_registry()


def lookup(identity_id: str) -> IdentityRecord:
    _ensure_registry()
    rec = _REGISTRY.get(identity_id)
    if rec is None and identity_id.startswith("durfee(") and identity_id.endswith(")"):
        rec = _durfee(int(identity_id[7:-1]))
    if rec is None:
        raise KeyError(f"unknown identity {identity_id!r}")
    return rec


def identity_ids() -> List[str]:
    _ensure_registry()
    return list(_REGISTRY)


def verify_record(rec: IdentityRecord, order=None) -> Report:
    order = rec.order if order is None else order
    start = time.perf_counter()
    lhs = evaluate(rec.lhs, order)
    rhs = evaluate(rec.rhs, order)
    mismatch = lhs.first_mismatch(rhs)
    # both sides must be known to the requested order
    if mismatch is None and min(lhs.order, rhs.order) < order:
        raise ArithmeticError(f"{rec.id}: evaluated only to order {min(lhs.order, rhs.order)}")
    elapsed = (time.perf_counter() - start) * 1000
    return Report(rec.id, rec.paper_eq, int(order), "PASS" if mismatch is None else "FAIL", mismatch, elapsed,
                  rec.misprint)


def verify_identity(identity_id: str, order=None) -> Report:
    return verify_record(lookup(identity_id), order)


# --- manifests ----------------------------------------------------------

def load_manifest(path) -> List[IdentityRecord]:
    """Read identities from a JSON file: a list of {id, lhs, rhs, order, paper_eq[, note]}."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("identities", [])
    out = []
    for item in data:
        missing = {"id", "lhs", "rhs"} - set(item)
        if missing:
            raise ValueError(f"manifest entry lacks {sorted(missing)}")
        out.append(IdentityRecord(item["id"], item["lhs"], item["rhs"], int(item.get("order", RANK1_ORDER)),
                                  item.get("paper_eq", ""), item.get("note", ""), bool(item.get("misprint", False))))
    return out


def dump_registry() -> List[dict]:
    _ensure_registry()
    return [{"id": r.id, "lhs": r.lhs, "rhs": r.rhs, "order": r.order, "paper_eq": r.paper_eq, "note": r.note,
             "misprint": r.misprint} for r in _REGISTRY.values()]


# --- small utilities ----------------------------------------------------

def exponent_classes(s: QSeries) -> set:
    """Fractional parts of the exponents carrying nonzero coefficients."""
    return {e - math.floor(e) for e, c in s.items() if c}


def ramond_character(order: int, first_at_most_one: bool = False) -> QSeries:
    """Generating function of sequences 0 <= a_i < 4 where a_i > 1 forces both neighbours <= 1.

    Weight is sum i * a_i. Transfer over positions with the state "previous
    entry exceeds 1". ``first_at_most_one`` additionally caps a_1 at 1.
    """
    order = int(order)
    # dp[state] = list of coefficients by weight
    dp = {False: [0] * (order + 1), True: [0] * (order + 1)}
    dp[False][0] = 1
    for i in range(1, order + 1):
        new = {False: [0] * (order + 1), True: [0] * (order + 1)}
        for big_prev, row in dp.items():
            for w, c in enumerate(row):
                if not c:
                    continue
                for a in range(4):
                    if a > 1 and (big_prev or (first_at_most_one and i == 1)):
                        continue
                    nw = w + a * i
                    if nw > order:
                        break
                    new[a > 1][nw] += c
        dp = new
    coeffs = [dp[False][w] + dp[True][w] for w in range(order + 1)]
    return QSeries.from_coefficients(coeffs, order=order)


def ramond_target(order) -> QSeries:
    """prod (1 + q^j) * sum q^{2n^2 + 2n} / (q^2; q^2)_n."""
    return evaluate(prod_(poch(1, 1, -1), nahm([[2]], [2], dens=[(2, [1], 0)])), order)


def ramond_neighbour(order) -> QSeries:
    """prod (1 + q^j) * sum q^{2n^2} / (q^2; q^2)_n."""
    return evaluate(prod_(poch(1, 1, -1), nahm([[2]], dens=[(2, [1], 0)])), order)


def flat_summands(rs: RootSystem, b: Sequence[int], order) -> Tuple[QSeries, QSeries]:
    """The level-three summand at b_1 = b_2 = b and the squared-denominator summand at b."""
    from .theta import _denominator
    order = Fraction(order)
    b = tuple(b)
    # chain exponent (b_1^2 + (b_2 - b_1)^2 + b_2^2)/2 at b_1 = b_2 = b, ending at 0
    e3 = (rootsys.half_norm(rs, b) + rootsys.half_norm(rs, rootsys.sub(b, b)) + rootsys.half_norm(rs, b))
    d = _denominator(rs, b, order)
    level3 = (QSeries.monomial(e3, order=order) * d * d).truncate(order)
    flat = QSeries.monomial(2 * rootsys.half_norm(rs, b), order=order)
    for j in range(rs.rank):
        k = -rootsys.coroot_pairing(rs, b, j + 1)
        if k:
            flat = flat * (qpoch_inv(k, order, base=rs.nu[j]) ** 2)
    return level3, flat.truncate(order)


# --- the constant-term theorem matrix -------------------------------------

@dataclass(frozen=True)
class CoreCase:
    system: str
    classes: Tuple[ClassSet, ...]
    r: int
    order: int

    @property
    def id(self) -> str:
        def fmt(c):
            return "full" if c == FULL else "|".join(str(k) for k in c)
        return f"core:{self.system}:{','.join(fmt(c) for c in self.classes)}:r={self.r}"


def core_cases(order: int = 12) -> List[CoreCase]:
    """A1 at levels 2 and 3 over all class choices; A2 level 2; B2, C2, G2 level 2."""
    out = []
    choices = ([0], [1], FULL)
    for p in (2, 3):
        for combo in iproduct(choices, repeat=p):
            if all(c != FULL for c in combo):
                rs = rootsys.build("A", 1)
                rs_r = [atomic_r(rs, [frozenset(c) for c in combo])]
            else:
                rs_r = [0, 1]
            for r in rs_r:
                out.append(CoreCase("A1", tuple(combo), r, order))
    for combo in (([0], [0]), ([1], [2]), (FULL, FULL)):
        out.append(CoreCase("A2", combo, 0, order))
    for name in ("B2", "C2", "G2"):
        for combo in (([0], [0]), (FULL, FULL)):
            out.append(CoreCase(name, combo, 0, order))
    return out


def core_check(case: CoreCase, order=None) -> Report:
    order = case.order if order is None else order
    start = time.perf_counter()
    rs = rootsys.parse_id(case.system)
    spec = XiSpec.make(rs, list(case.classes), case.r)
    a = xi_ct(spec, order)
    b = xi_multisum(spec, order)
    mismatch = a.first_mismatch(b)
    elapsed = (time.perf_counter() - start) * 1000
    return Report(case.id, "constant term equals chain sum", int(order), "PASS" if mismatch is None else "FAIL",
                  mismatch, elapsed)
