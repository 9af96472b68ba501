"""Symmetric q-Hermite polynomials P_b, built by orthogonalization.

The rank-one closed formula and the raising operator give two independent
routes for A_1. Demazure operators T_i act on Laurent polynomials in X.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, inf
from typing import Dict, List, Optional, Sequence, Tuple

from . import rootsys
from .qseries import QSeries, XPoly, ct_pair, mu, mu_norm_inverse
from .rootsys import RootSystem, Weight


class SingularSystemError(ArithmeticError):
    """A pivot of the triangular system was not a unit."""


class InexactDivisionError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class HermitePoly:
    b: Weight
    poly: XPoly
    order: object
    coefficients: Dict[Weight, QSeries]

    @property
    def rs(self) -> RootSystem:
        return self.poly.rs


def default_order(rs: RootSystem, b: Sequence[int]) -> int:
    """q-degree that is safe for every correction coefficient of P_b."""
    return max(1, ceil(rootsys.half_norm(rs, b)))


def higher_labels(rs: RootSystem, b: Sequence[int]) -> List[Weight]:
    """Antidominant b' != b with b' - b a nonnegative combination of simple roots.

    Such b' have strictly smaller norm, so the enumeration is finite.
    """
    b = tuple(b)
    found = rootsys.enumerate_antidominant(rs, rootsys.half_norm(rs, b))
    return [c for c in found if c != b and rootsys.in_root_cone(rs, rootsys.sub(c, b))]


def _gram_entry(rs, measure, orbit, target) -> QSeries:
    # CT(M_orbit * X_{-target} * mu) = sum over d in orbit of mu[target - d]
    total = QSeries.zero(measure.order)
    for d in orbit:
        s = measure.terms.get(rootsys.sub(target, d))
        if s is not None:
            total = total + s
    return total


def _solve(matrix: List[List[QSeries]], rhs: List[QSeries], order) -> List[QSeries]:
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for k in range(n):
        pivot = a[k][k]
        if pivot.truncate(0)[0] == 0:
            raise SingularSystemError(f"pivot {k} vanishes at q = 0")
        inv = pivot.inverse(order)
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            f = (a[i][k] * inv).truncate(order)
            for j in range(k, n + 1):
                if not a[k][j].is_zero():
                    a[i][j] = (a[i][j] - f * a[k][j]).truncate(order)
    x: List[Optional[QSeries]] = [None] * n
    for k in reversed(range(n)):
        acc = a[k][n]
        for j in range(k + 1, n):
            if not a[k][j].is_zero():
                acc = acc - a[k][j] * x[j]
        x[k] = (acc * a[k][k].inverse(order)).truncate(order)
    return x


def _exactify(s: QSeries, order) -> QSeries:
    """Drop the truncation marker: the coefficients are polynomials of degree < order."""
    if s.terms and max(s.terms) / s.den >= order:
        raise ArithmeticError("coefficient reaches the truncation order; raise Ord")
    return QSeries(dict(s.items()))


def q_hermite(rs: RootSystem, b: Sequence[int], order=None, labels: Optional[Sequence[Weight]] = None) -> HermitePoly:
    """P_b = M_b + sum c_{b'} M_{b'} orthogonal to X_{-b'} for every b' above b.

    ``labels`` only fixes the processing order of the correction set (it
    must be a permutation of ``higher_labels``); the result does not depend
    on it.
    """
    b = tuple(b)
    if not rootsys.is_antidominant(b):
        raise ValueError(f"{b} is not antidominant")
    if order is None:
        order = default_order(rs, b)
    return _q_hermite(rs.name, b, Fraction(order), tuple(labels) if labels is not None else None)


@lru_cache(maxsize=512)
def _q_hermite(name: str, b: Weight, order: Fraction, labels) -> HermitePoly:
    rs = rootsys.parse_id(name)
    higher = higher_labels(rs, b)
    if labels is not None:
        if sorted(labels) != sorted(higher):
            raise ValueError("labels must be a permutation of the correction set")
        higher = list(labels)
    else:
        higher.sort(key=lambda c: (rootsys.norm_int(rs, c), c))
    # a little headroom keeps the top coefficient away from the truncation edge
    work = order + 1
    measure = mu(rs, work)
    orbits = {c: rootsys.weyl_orbit(rs, c) for c in higher + [b]}
    matrix = [[_gram_entry(rs, measure, orbits[col], row) for col in higher] for row in higher]
    rhs = [-_gram_entry(rs, measure, orbits[b], row) for row in higher]
    sol = _solve(matrix, rhs, work) if higher else []
    coefficients = {c: _exactify(s.truncate(order), work) for c, s in zip(higher, sol)}
    coefficients = {c: s for c, s in coefficients.items() if not s.is_zero()}
    terms: Dict[Weight, QSeries] = {w: QSeries.one() for w in orbits[b]}
    for c, s in coefficients.items():
        for w in orbits[c]:
            terms[w] = s
    return HermitePoly(b, XPoly(rs, terms), order, coefficients)


def orthogonality_defects(h: HermitePoly, full_orbits: bool = True) -> List[Tuple[Weight, Fraction]]:
    """Pairings <P_b X_{-w} mu> that fail to vanish, as (w, lowest exponent).

    With ``full_orbits`` every w in the W-orbit of each b' is tested, which
    is the overdetermined form of the conditions.
    """
    rs = h.rs
    measure = mu(rs, h.order)
    bad = []
    for c in higher_labels(rs, h.b):
        targets = rootsys.weyl_orbit(rs, c) if full_orbits else [c]
        for w in sorted(targets):
            val = ct_pair(h.poly.truncate(h.order), measure.shift_weight(rootsys.neg(w)))
            if not val.is_zero():
                bad.append((w, val.valuation()))
    return bad


def gaussian_binomial(n: int, k: int) -> QSeries:
    """[n choose k]_q as an exact polynomial, via the q-Pascal rule."""
    return _gauss_binom(n, k)


@lru_cache(maxsize=None)
def _gauss_binom(n: int, k: int) -> QSeries:
    if k < 0 or k > n:
        return QSeries.zero()
    if k == 0 or k == n:
        return QSeries.one()
    return _gauss_binom(n - 1, k - 1) + _gauss_binom(n - 1, k).shift(k)


def _a1() -> RootSystem:
    return rootsys.build("A", 1)


def q_hermite_rank1(n: int, order=inf) -> HermitePoly:
    """Closed form: P_n = sum_j [n choose j]_q M_{n-2j}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rs = _a1()
    terms: Dict[Weight, QSeries] = {}
    coefficients = {}
    for j in range(n // 2 + 1):
        c = gaussian_binomial(n, j).truncate(order)
        k = n - 2 * j
        terms[(k,)] = c
        terms[(-k,)] = c
        if j:
            coefficients[(-k,)] = c
    return HermitePoly((-n,), XPoly(rs, terms, order), order, coefficients)


def _laurent_div_by_x_minus_xinv(num: Dict[int, QSeries]) -> Dict[int, QSeries]:
    """Quotient of sum num_k X^k by (X - X^{-1}); raises when not exact."""
    if not num:
        return {}
    top, bottom = max(num), min(num)
    zero = QSeries.zero()
    quo: Dict[int, QSeries] = {}
    # n_k = r_{k-1} - r_{k+1}, solved downward from the top degree
    for k in range(top, bottom + 1, -1):
        r = num.get(k, zero) + quo.get(k + 1, zero)
        if not r.is_zero():
            quo[k - 1] = r
    for k in (bottom + 1, bottom):
        rest = num.get(k, zero) - quo.get(k - 1, zero) + quo.get(k + 1, zero)
        if not rest.is_zero():
            raise InexactDivisionError("numerator is not divisible by X - X^{-1}")
    return quo


def raising_apply(f: XPoly, order=inf) -> XPoly:
    """R(f) = (X^2 G^{-1} - X^{-2} G)(f) / (X - X^{-1}) where G(X) = q^{1/2} X."""
    if f.rs.rank != 1:
        raise ValueError("the raising operator is defined in rank one")
    num: Dict[int, QSeries] = {}
    for (k,), s in f.terms.items():
        for deg, s2 in ((k + 2, s.shift(Fraction(-k, 2))), (k - 2, -s.shift(Fraction(k, 2)))):
            t = num.get(deg)
            num[deg] = s2 if t is None else t + s2
    num = {k: s for k, s in num.items() if not s.is_zero()}
    quo = _laurent_div_by_x_minus_xinv(num)
    return XPoly(f.rs, {(k,): s for k, s in quo.items()}, order)


def raise_n(n: int) -> XPoly:
    """P_n obtained from 1 by n applications of q^{k/2} R."""
    p = XPoly.one(_a1())
    for k in range(n):
        p = raising_apply(p) * QSeries.monomial(Fraction(k, 2))
    return p


def _string_key(b: Weight, step: Weight) -> Tuple[Weight, int]:
    j = next(i for i, a in enumerate(step) if a)
    k = b[j] // step[j]
    return tuple(x - k * a for x, a in zip(b, step)), k


def demazure(rs: RootSystem, i: int, f: XPoly, order=None) -> XPoly:
    """T_i = (1 - X_{alpha_i})^{-1} (s_i - 1), with X_0 = q X_theta^{-1}.

    s_0 lowers q-degrees, so T_0 applied to a truncated input is only known
    to a lower order; pass exact input and use ``order`` to cut the result.
    """
    if not 0 <= i <= rs.rank:
        raise IndexError(f"index {i} outside 0..{rs.rank}")
    if i == 0:
        theta = rs.theta
        step = rootsys.neg(theta)
        qstep = 1

        def s_i(b):
            k = int(rootsys.inner(rs, b, theta))
            return rootsys.sub(b, tuple(k * t for t in theta)), k
    else:
        step = rs.root_coords[i - 1]
        qstep = 0

        def s_i(b):
            return rootsys.reflect(rs, b, i - 1), 0

    g: Dict[Weight, QSeries] = {}
    for b, s in f.terms.items():
        nb, k = s_i(b)
        for w, v in ((nb, s.shift(k) if k else s), (b, -s)):
            t = g.get(w)
            g[w] = v if t is None else t + v
    # divide by (1 - Y) with Y = q^qstep X_step, one string at a time
    strings: Dict[Weight, Dict[int, QSeries]] = {}
    for w, s in g.items():
        if s.is_zero():
            continue
        base, k = _string_key(w, step)
        strings.setdefault(base, {})[k] = s.shift(-qstep * k) if qstep else s
    out: Dict[Weight, QSeries] = {}
    for base, poly in strings.items():
        acc = QSeries.zero()
        lo, hi = min(poly), max(poly)
        for k in range(lo, hi + 1):
            acc = acc + poly.get(k, QSeries.zero())
            if k == hi:
                if not acc.truncate(order if order is not None else inf).is_zero():
                    raise InexactDivisionError("(s_i - 1) f is not divisible by 1 - X_alpha")
                break
            if not acc.is_zero():
                w = tuple(x + k * a for x, a in zip(base, step))
                out[w] = acc.shift(qstep * k) if qstep else acc
    return XPoly(rs, out, f.order if order is None else min(order, f.order))


def norm(rs: RootSystem, b: Sequence[int], order=None, c: Optional[Sequence[int]] = None) -> QSeries:
    """<P_b P_{c'} mu / <mu>> with c' = -w_0(c); c defaults to b."""
    b = tuple(b)
    c = b if c is None else tuple(c)
    if order is None:
        order = max(default_order(rs, b), default_order(rs, c))
    pb = q_hermite(rs, b).poly
    pc = q_hermite(rs, rootsys.dual_label(rs, c)).poly
    measure = mu(rs, order)
    prod = (pc * measure).truncate(order)
    return (ct_pair(pb, prod) * mu_norm_inverse(rs, order)).truncate(order)


def norm_formula(rs: RootSystem, b: Sequence[int], order=inf) -> QSeries:
    """prod_i prod_{j=1}^{-(alpha_i^vee, b)} (1 - q_i^j)."""
    out = QSeries.one()
    for i in range(rs.rank):
        nu = rs.nu[i]
        for j in range(1, -rootsys.coroot_pairing(rs, b, i + 1) + 1):
            out = out * (QSeries.one() - QSeries.monomial(nu * j))
    return out.truncate(order)
