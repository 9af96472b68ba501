"""Level-one theta functions on P/Q classes and their q-Hermite expansions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from . import rootsys
from .hermite import q_hermite
from .qseries import QSeries, XPoly, ct_pair, mu, mu_norm, mu_norm_inverse, qpoch_inv
from .rootsys import RootSystem, Weight

FULL = "FULL"


@dataclass(frozen=True)
class ThetaSpec:
    rs: RootSystem
    classes: FrozenSet[int]

    def __post_init__(self):
        if not self.classes:
            raise ValueError("a theta function needs a nonempty set of classes")
        allowed = set(rootsys.classes(self.rs))
        if not set(self.classes) <= allowed:
            raise ValueError(f"classes {sorted(self.classes)} not in {sorted(allowed)}")

    @classmethod
    def of(cls, rs: RootSystem, classes: Union[str, Iterable[int]]) -> "ThetaSpec":
        if classes == FULL:
            return cls(rs, frozenset(rootsys.classes(rs)))
        return cls(rs, frozenset(classes))

    @classmethod
    def full(cls, rs: RootSystem) -> "ThetaSpec":
        return cls.of(rs, FULL)

    @property
    def atomic(self) -> bool:
        return len(self.classes) == 1

    @property
    def is_full(self) -> bool:
        return self.classes == frozenset(rootsys.classes(self.rs))

    def admits(self, b: Sequence[int]) -> bool:
        return rootsys.class_of(self.rs, b) in self.classes


def theta(spec: ThetaSpec, order) -> XPoly:
    """Sum of q^{(b,b)/2} X_b over b in the chosen classes with (b,b)/2 <= order."""
    return _theta(spec.rs.name, spec.classes, Fraction(order))


@lru_cache(maxsize=128)
def _theta(name: str, classes: FrozenSet[int], order: Fraction) -> XPoly:
    rs = rootsys.parse_id(name)
    terms = {}
    for b in rootsys.weights_up_to(rs, order):
        if rootsys.class_of(rs, b) in classes:
            terms[b] = QSeries.monomial(rootsys.half_norm(rs, b), order=order)
    return XPoly(rs, terms, order)


def _a1() -> RootSystem:
    return rootsys.build("A", 1)


def theta_full(order) -> XPoly:
    """Rank one: sum q^{n^2/4} X^n."""
    return theta(ThetaSpec.full(_a1()), order)


def theta_check(order) -> XPoly:
    """Rank one, even class: sum q^{n^2} X^{2n}."""
    return theta(ThetaSpec.of(_a1(), [0]), order)


def theta_hat(order) -> XPoly:
    """Rank one, odd class."""
    return theta(ThetaSpec.of(_a1(), [1]), order)


def _binomial(rs, b, exp, order) -> XPoly:
    return XPoly(rs, {rs.zero: 1, b: QSeries.monomial(exp)}, order)


def theta_product_form(kind: str, order) -> XPoly:
    """Triple-product side for kind in {"full", "check"}."""
    rs = _a1()
    order = Fraction(order)
    out = XPoly.one(rs, order)
    j = 1
    if kind == "full":
        while Fraction(2 * j - 1, 4) <= order:
            out = out * (XPoly.one(rs, order) - XPoly.monomial(rs, (0,), QSeries.monomial(Fraction(j, 2)), order))
            out = out * _binomial(rs, (1,), Fraction(2 * j - 1, 4), order)
            out = out * _binomial(rs, (-1,), Fraction(2 * j - 1, 4), order)
            j += 1
    elif kind == "check":
        while 2 * j - 1 <= order:
            out = out * (XPoly.one(rs, order) - XPoly.monomial(rs, (0,), QSeries.monomial(2 * j), order))
            out = out * _binomial(rs, (2,), 2 * j - 1, order)
            out = out * _binomial(rs, (-2,), 2 * j - 1, order)
            j += 1
    else:
        raise ValueError(f"unknown theta kind {kind!r}")
    return out.truncate(order)


def theta_triple_check(kind: str, order) -> bool:
    series = theta_full(order) if kind == "full" else theta_check(order) if kind == "check" else None
    if series is None:
        raise ValueError(f"unknown theta kind {kind!r}")
    return series == theta_product_form(kind, order)


def theta_mu_rank1(kind: str, order) -> XPoly:
    """Direct product theta * mu in rank one."""
    rs = _a1()
    t = theta_full(order) if kind == "full" else theta_check(order)
    return (t * mu(rs, order)).truncate(order)


def theta_mu_rank1_closed(kind: str, order, signs: str = "alternating") -> XPoly:
    """sum_n s(n) q^{e(n)} (X^{a(n)} - X^{-a'(n)}) over the allowed residues.

    With ``signs="plus"`` every s(n) is 1. With ``"alternating"`` the signs
    are the ones direct multiplication produces: (-1)^{floor(n/3) + 1} for
    the full theta, and -1 for n = 0 mod 3, +1 for n = 2 mod 3 for the even one.

    full:  e = n(n+2)/12, X^{n+2} - X^{-n}, n != 2 mod 3
    check: e = n(n+1)/3,  X^{2n+2} - X^{-2n}, n != 1 mod 3
    """
    rs = _a1()
    order = Fraction(order)
    terms: Dict[Weight, QSeries] = {}

    def put(w, e, c):
        s = terms.get(w, QSeries.zero())
        terms[w] = s + QSeries.monomial(e, c)

    n = 0
    while True:
        if kind == "full":
            e, skip, up, down = Fraction(n * (n + 2), 12), n % 3 == 2, n + 2, -n
        else:
            e, skip, up, down = Fraction(n * (n + 1), 3), n % 3 == 1, 2 * n + 2, -2 * n
        if e > order:
            break
        if not skip:
            if signs == "plus":
                sign = 1
            elif kind == "full":
                sign = (-1) ** (n // 3 + 1)
            else:
                sign = -1 if n % 3 == 0 else 1
            put((up,), e, sign)
            put((down,), e, -sign)
        n += 1
    return XPoly(rs, terms, order)


def _mu_circ_pairing(rs: RootSystem, f: XPoly, g: XPoly, order) -> QSeries:
    """<f g mu> / <mu>."""
    prod = (g * mu(rs, order)).truncate(order)
    return (ct_pair(f, prod) * mu_norm_inverse(rs, order)).truncate(order)


@dataclass(frozen=True)
class InnerCheck:
    value: QSeries
    expected: QSeries

    @property
    def ok(self) -> bool:
        return self.value == self.expected


def theta_mu_norm(spec: ThetaSpec, order) -> InnerCheck:
    """<theta mu / <mu>> against prod prod (1 - q_i^j) when 0 is a chosen class."""
    rs = spec.rs
    value = _mu_circ_pairing(rs, XPoly.one(rs), theta(spec, order), order)
    expected = mu_norm_inverse(rs, order) if 0 in spec.classes else QSeries.zero(order)
    return InnerCheck(value, expected)


def theta_mu_inner(rs: RootSystem, classes, b: Sequence[int], c: Sequence[int], order) -> InnerCheck:
    """<P_b P_{c'} theta mu / <mu>> with c' = -w_0(c).

    Expected: q^{(b-c,b-c)/2} prod prod (1 - q_i^j) when class(c - b) is
    chosen, and 0 otherwise. The product factor is used whether or not 0 is
    a chosen class.
    """
    spec = classes if isinstance(classes, ThetaSpec) else ThetaSpec.of(rs, classes)
    b, c = tuple(b), tuple(c)
    pb = q_hermite(rs, b).poly
    pc = q_hermite(rs, rootsys.dual_label(rs, c)).poly
    tm = (theta(spec, order) * mu(rs, order)).truncate(order)
    value = (ct_pair(pb, (pc * tm).truncate(order)) * mu_norm_inverse(rs, order)).truncate(order)
    d = rootsys.sub(c, b)
    if spec.admits(d):
        expected = (mu_norm_inverse(rs, order).shift(rootsys.half_norm(rs, d))).truncate(order)
    else:
        expected = QSeries.zero(order)
    return InnerCheck(value, expected)


def _denominator(rs: RootSystem, b: Sequence[int], order) -> QSeries:
    """1 / prod_j (q_j; q_j)_{-(alpha_j^vee, b)}."""
    out = QSeries.one(order)
    for j in range(rs.rank):
        k = -rootsys.coroot_pairing(rs, b, j + 1)
        if k:
            out = out * qpoch_inv(k, order, base=rs.nu[j])
    return out.truncate(order)


def _chains(specs: Sequence[ThetaSpec], order, antidominant: bool):
    """Yield (chain, exponent) with exponent = (b_1^2 + sum (b_i - b_{i-1})^2)/2 <= order."""
    rs = specs[0].rs
    for s in specs:
        if s.rs is not rs:
            raise ValueError("theta specs over different root systems")
    order = Fraction(order)
    p = len(specs)

    def rec(prefix: List[Weight], spent: Fraction):
        i = len(prefix)
        if i == p:
            yield tuple(prefix), spent
            return
        last = prefix[-1] if prefix else rs.zero
        for d in rootsys.weights_up_to(rs, order - spent):
            if not specs[i].admits(d):
                continue
            nb = rootsys.add(last, d)
            if antidominant and not rootsys.is_antidominant(nb):
                continue
            yield from rec(prefix + [nb], spent + rootsys.half_norm(rs, d))

    yield from rec([], Fraction(0))


def expand_product(rs: RootSystem, specs: Sequence[ThetaSpec], order) -> Dict[Weight, QSeries]:
    """Coefficients of <mu>^p prod theta_i in the basis P_b, to q-order ``order``."""
    order = Fraction(order)
    out: Dict[Weight, QSeries] = {}
    dens: Dict[Weight, QSeries] = {}
    for chain, e in _chains(specs, order, antidominant=True):
        term = QSeries.monomial(e, order=order)
        for b in chain:
            d = dens.get(b)
            if d is None:
                d = dens[b] = _denominator(rs, b, order)
            term = (term * d).truncate(order)
        key = chain[-1]
        s = out.get(key)
        out[key] = term if s is None else s + term
    return {b: s for b, s in sorted(out.items(), key=lambda kv: (rootsys.norm_int(rs, kv[0]), kv[0])) if not s.is_zero()}


def reconstruct(rs: RootSystem, coefficients: Dict[Weight, QSeries], order) -> XPoly:
    """sum_b coefficient(b) P_b."""
    out = XPoly(rs, {}, order)
    for b, s in coefficients.items():
        out = out + (q_hermite(rs, b).poly * s).truncate(order)
    return out.truncate(order)


def theta_product(specs: Sequence[ThetaSpec], order) -> XPoly:
    rs = specs[0].rs
    out = XPoly.one(rs, order)
    for s in specs:
        out = (out * theta(s, order)).truncate(order)
    return out


def free_chain_sum(specs: Sequence[ThetaSpec], order) -> XPoly:
    """Unrestricted chain sum over b_i in P with monomial X_{b_p}."""
    rs = specs[0].rs
    terms: Dict[Weight, QSeries] = {}
    for chain, e in _chains(specs, order, antidominant=False):
        key = chain[-1]
        s = terms.get(key, QSeries.zero(order))
        terms[key] = s + QSeries.monomial(e, order=order)
    return XPoly(rs, terms, order)


def xi_sum(rs: RootSystem, specs: Sequence[ThetaSpec], c: Sequence[int], order) -> QSeries:
    """Chain sum for <mu>^p <prod theta_i P_{c'} mu/<mu>>: b_1..b_{p-1} free in P_-, b_p = c."""
    c = tuple(c)
    order = Fraction(order)
    total = QSeries.zero(order)
    dens: Dict[Weight, QSeries] = {}
    for chain, e in _chains(specs, order, antidominant=True):
        if chain[-1] != c:
            continue
        term = QSeries.monomial(e, order=order)
        for b in chain[:-1]:
            d = dens.get(b)
            if d is None:
                d = dens[b] = _denominator(rs, b, order)
            term = (term * d).truncate(order)
        total = total + term
    return total
