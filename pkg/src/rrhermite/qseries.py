"""Truncated q-series with rational exponents, and Laurent polynomials in X.

A QSeries knows its coefficients exactly up to ``order``; everything above
is unknown. Exponents are stored internally as integers over a per-series
denominator so that the inner loops run on machine integers.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from heapq import heappop, heappush
from math import floor, gcd, inf
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from . import rootsys
from .rootsys import RootSystem, Weight

def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


def _coeff(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _limit(order, den: int):
    """Largest integer k with k/den <= order (None when unbounded)."""
    if order == inf:
        return None
    return floor(order * den)


class QSeries:
    """Exact series sum c_e q^e known up to ``order`` (``math.inf`` means exact)."""

    __slots__ = ("den", "terms", "order")

    def __init__(self, terms: Optional[Mapping] = None, order=inf):
        order = inf if order == inf else _frac(order)
        den = 1
        items = []
        for e, c in (terms or {}).items():
            e = _frac(e)
            if c and (order == inf or e <= order):
                den = _lcm(den, e.denominator)
                items.append((e, c))
        raw: Dict[int, object] = {}
        for e, c in items:
            k = e.numerator * (den // e.denominator)
            v = raw.get(k, 0) + c
            if v:
                raw[k] = _coeff(v)
            else:
                raw.pop(k, None)
        self.den = den
        self.terms = raw
        self.order = order
        self._normalize()

    @classmethod
    def _raw(cls, den: int, terms: Dict[int, object], order) -> "QSeries":
        obj = cls.__new__(cls)
        obj.den = den
        obj.terms = terms
        obj.order = order
        obj._normalize()
        return obj

    def _normalize(self) -> None:
        if self.den == 1:
            return
        g = self.den
        for k in self.terms:
            g = gcd(g, k)
            if g == 1:
                return
        if g > 1:
            self.terms = {k // g: c for k, c in self.terms.items()}
            self.den //= g

    # construction helpers
    @classmethod
    def zero(cls, order=inf) -> "QSeries":
        return cls({}, order)

    @classmethod
    def one(cls, order=inf) -> "QSeries":
        return cls({0: 1}, order)

    @classmethod
    def monomial(cls, exp=0, coeff=1, order=inf) -> "QSeries":
        return cls({exp: coeff}, order)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable, order=None, step=1) -> "QSeries":
        """Series sum coeffs[k] q^(k*step); the order defaults to the last index."""
        coeffs = list(coeffs)
        step = _frac(step)
        if order is None:
            order = (len(coeffs) - 1) * step
        return cls({k * step: c for k, c in enumerate(coeffs) if c}, order)

    # inspection
    def items(self) -> List[Tuple[Fraction, object]]:
        d = self.den
        return [(Fraction(k, d), c) for k, c in sorted(self.terms.items())]

    def exponents(self) -> List[Fraction]:
        return [e for e, _ in self.items()]

    def __getitem__(self, e) -> object:
        e = _frac(e)
        if self.order != inf and e > self.order:
            raise KeyError(f"coefficient of q^{e} is beyond the truncation order {self.order}")
        if (e * self.den).denominator != 1:
            return 0
        return self.terms.get(int(e * self.den), 0)

    coeff = __getitem__

    def valuation(self):
        """Lowest exponent present; for a zero series the truncation order."""
        if not self.terms:
            return self.order
        return Fraction(min(self.terms), self.den)

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return self.order == inf

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def _at(self, den: int) -> Dict[int, object]:
        if den == self.den:
            return self.terms
        f = den // self.den
        return {k * f: c for k, c in self.terms.items()}

    # arithmetic
    def truncate(self, order) -> "QSeries":
        order = inf if order == inf else _frac(order)
        if order >= self.order:
            return self
        lim = _limit(order, self.den)
        return QSeries._raw(self.den, {k: c for k, c in self.terms.items() if k <= lim}, order)

    def __neg__(self) -> "QSeries":
        return QSeries._raw(self.den, {k: -c for k, c in self.terms.items()}, self.order)

    def __add__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            if isinstance(other, (int, Rational)):
                other = QSeries({0: other})
            else:
                return NotImplemented
        order = min(self.order, other.order)
        den = _lcm(self.den, other.den)
        lim = _limit(order, den)
        out = dict(self._at(den))
        for k, c in other._at(den).items():
            v = out.get(k, 0) + c
            if v:
                out[k] = _coeff(v)
            else:
                del out[k]
        if lim is not None:
            out = {k: c for k, c in out.items() if k <= lim}
        return QSeries._raw(den, out, order)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (int, Rational)):
            other = QSeries({0: other})
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Rational)):
            if not other:
                return QSeries._raw(1, {}, self.order)
            return QSeries._raw(self.den, {k: _coeff(c * other) for k, c in self.terms.items()},
                                self.order)
        if not isinstance(other, QSeries):
            return NotImplemented
        order = min(self.order + other.valuation(), other.order + self.valuation())
        den = _lcm(self.den, other.den)
        lim = _limit(order, den)
        return QSeries._raw(den, _mul_raw(self._at(den), other._at(den), lim), order)

    __rmul__ = __mul__

    def shift(self, e) -> "QSeries":
        """Multiply by q^e."""
        e = _frac(e)
        den = _lcm(self.den, e.denominator)
        s = e.numerator * (den // e.denominator)
        order = self.order + e if self.order != inf else inf
        return QSeries._raw(den, {k + s: c for k, c in self._at(den).items()}, order)

    mul_monomial = shift

    def scale(self, factor) -> "QSeries":
        """Substitute q -> q^factor (factor > 0)."""
        factor = _frac(factor)
        if factor <= 0:
            raise ValueError("exponent scale must be positive")
        den = self.den * factor.denominator
        order = self.order * factor if self.order != inf else inf
        return QSeries._raw(den, {k * factor.numerator: c for k, c in self.terms.items()}, order)

    def inverse(self, order=None) -> "QSeries":
        """1/self. Exact polynomials that are not monomials need an explicit order."""
        if not self.terms:
            raise ZeroDivisionError("inverse of a zero series")
        den = self.den
        v = min(self.terms)
        lead = self.terms[v]
        inv_lead = Fraction(1) / lead if not (lead in (1, -1)) else lead
        if len(self.terms) == 1:
            out_order = inf if self.order == inf else self.order - 2 * Fraction(v, den)
            return QSeries._raw(den, {-v: _coeff(inv_lead)}, out_order)
        rel = None if self.order == inf else self.order - Fraction(v, den)
        if order is not None:
            target_rel = _frac(order) + Fraction(v, den)
            rel = target_rel if rel is None else min(rel, target_rel)
        if rel is None:
            raise ValueError("an explicit order is needed to invert an exact non-monomial series")
        lim = floor(rel * den)
        u = sorted((k - v, _coeff(c * inv_lead)) for k, c in self.terms.items() if k != v)
        r = _inverse_one_plus(u, lim)
        shifted = {k - v: _coeff(c * inv_lead) for k, c in r.items()}
        return QSeries._raw(den, shifted, rel - Fraction(v, den))

    def __truediv__(self, other) -> "QSeries":
        if isinstance(other, (int, Rational)):
            return self * (Fraction(1) / other)
        if not isinstance(other, QSeries):
            return NotImplemented
        if other.is_exact() and len(other.terms) > 1:
            if self.order == inf:
                raise ValueError("dividing exact series by a non-monomial needs an order")
            return self * other.inverse(order=self.order - other.valuation())
        return self * other.inverse()

    def __rtruediv__(self, other) -> "QSeries":
        if isinstance(other, (int, Rational)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int) -> "QSeries":
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QSeries.one()
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # comparison
    def first_mismatch(self, other: "QSeries") -> Optional[Fraction]:
        """Lowest exponent up to the common order where the coefficients differ."""
        diff = (self - other)
        if not diff.terms:
            return None
        return Fraction(min(diff.terms), diff.den)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Rational)):
            other = QSeries({0: other})
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.first_mismatch(other) is None

    __hash__ = None

    def identical(self, other: "QSeries") -> bool:
        """Same order and same stored terms."""
        return self.order == other.order and self.items() == other.items()

    # serialization
    def to_tuples(self) -> List[Tuple[int, int, int, int]]:
        out = []
        for e, c in self.items():
            c = Fraction(c)
            out.append((e.numerator, e.denominator, c.numerator, c.denominator))
        return out

    def to_json(self) -> dict:
        order = None if self.order == inf else [self.order.numerator, self.order.denominator]
        return {"order": order, "terms": [list(t) for t in self.to_tuples()]}

    @classmethod
    def from_json(cls, data: dict) -> "QSeries":
        order = inf if data.get("order") is None else Fraction(*data["order"])
        return cls({Fraction(a, b): Fraction(c, d) for a, b, c, d in data["terms"]}, order)

    def __repr__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e, c in self.items()[:12]:
                parts.append(f"{c}" if e == 0 else f"{c}*q^{e}")
            if len(self.terms) > 12:
                parts.append("...")
            body = " + ".join(parts)
        tail = "" if self.order == inf else f" + O(q^{self.order}+)"
        return f"QSeries({body}{tail})"


def _mul_raw(a: Dict[int, object], b: Dict[int, object], lim: Optional[int]) -> Dict[int, object]:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    bi = sorted(b.items())
    out: Dict[int, object] = {}
    get = out.get
    for ka, ca in a.items():
        if lim is None:
            for kb, cb in bi:
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        else:
            top = lim - ka
            for kb, cb in bi:
                if kb > top:
                    break
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    return {k: _coeff(c) for k, c in out.items() if c}


def _inverse_one_plus(u: List[Tuple[int, object]], lim: int) -> Dict[int, object]:
    """Coefficients of 1/(1 + sum u_k q^k) for positive k, up to k <= lim."""
    r: Dict[int, object] = {}
    heap = [0]
    seen = {0}
    while heap:
        e = heappop(heap)
        if e == 0:
            val = 1
        else:
            val = 0
            for k, c in u:
                if k > e:
                    break
                prev = r.get(e - k)
                if prev:
                    val -= c * prev
        if val:
            r[e] = _coeff(val)
            for k, _ in u:
                t = e + k
                if t > lim:
                    break
                if t not in seen:
                    seen.add(t)
                    heappush(heap, t)
    return r


# --- standard series -----------------------------------------------------

def _mul_binomial(terms: Dict[int, object], coeff, shift: int, lim: Optional[int]) -> Dict[int, object]:
    """terms * (1 - coeff q^shift) in raw form."""
    out = dict(terms)
    for k, c in terms.items():
        t = k + shift
        if lim is not None and t > lim:
            continue
        v = out.get(t, 0) - coeff * c
        if v:
            out[t] = _coeff(v)
        else:
            out.pop(t, None)
    return out


@lru_cache(maxsize=4096)
def _pochhammer(a_exp: Fraction, base_exp: Fraction, n, order, coeff) -> QSeries:
    if n != inf and n < 0:
        raise ValueError("negative length")
    if n == inf:
        if base_exp <= 0:
            raise ValueError("infinite product whose factors do not tend to 1")
        if order == inf:
            raise ValueError("infinite product needs a finite order")
    if a_exp < 0 or (base_exp < 0 and n != 0):
        raise ValueError("factors with negative q-exponents are not supported")
    den = _lcm(a_exp.denominator, base_exp.denominator)
    if order != inf:
        den = _lcm(den, order.denominator)
    lim = _limit(order, den)
    a = int(a_exp * den)
    b = int(base_exp * den)
    terms: Dict[int, object] = {0: 1}
    j = 0
    while n == inf or j < n:
        e = a + j * b
        if lim is not None and e > lim:
            break
        terms = _mul_binomial(terms, coeff, e, lim)
        j += 1
    return QSeries._raw(den, terms, order)


def pochhammer(a_exp, base_exp, n, order=inf, coeff=1) -> QSeries:
    """(A q^a; q^base)_n = prod_{j<n} (1 - A q^(a + j base)), truncated at ``order``.

    ``n`` may be ``math.inf``; ``coeff`` is the scalar A (use -1 for (-q^a; q^base)).
    """
    order = inf if order == inf else _frac(order)
    return _pochhammer(_frac(a_exp), _frac(base_exp), n, order, coeff)


def qpoch(n, order=inf, base=1) -> QSeries:
    """(q^base; q^base)_n."""
    return pochhammer(base, base, n, order)


@lru_cache(maxsize=8192)
def _qpoch_inv(n: int, order: Fraction, base: Fraction) -> QSeries:
    return pochhammer(base, base, n, order).inverse(order=order)


def qpoch_inv(n, order, base=1) -> QSeries:
    """1/(q^base; q^base)_n truncated at ``order``; zero for negative n."""
    if n != inf and n < 0:
        return QSeries.zero(order)
    if n == 0:
        return QSeries.one(order)
    return _qpoch_inv(n, _frac(order), _frac(base))


def eta(order, scale=1) -> QSeries:
    """Dedekind eta at scale*z: q^(scale/24) (q^scale; q^scale)_inf."""
    scale = _frac(scale)
    order = _frac(order)
    shift = scale / 24
    return pochhammer(scale, scale, inf, order - shift).shift(shift)


def theta5(m, scale=1, order=0) -> QSeries:
    """Sum over n in 2m-1+10Z of (-1)^floor(n/10) q^(scale n^2/40)."""
    m = _frac(m)
    scale = _frac(scale)
    order = _frac(order)
    start = 2 * m - 1
    terms: Dict[Fraction, int] = {}
    k = 0
    # n = start + 10k for k in Z, both directions until the exponent passes order
    for direction in (1, -1):
        k = 0 if direction == 1 else -1
        while True:
            n = start + 10 * k
            e = scale * n * n / 40
            if e > order and (direction * n) > 0:
                break
            if e <= order:
                sign = -1 if floor(n / 10) % 2 else 1
                terms[e] = terms.get(e, 0) + sign
            k += direction
    return QSeries(terms, order)


# --- Laurent polynomials in X -------------------------------------------

class XPoly:
    """Finite sum of X_b * (q-series) over weights b of a root system.

    Every coefficient is known up to the common ``order``.
    """

    __slots__ = ("rs", "terms", "order")

    def __init__(self, rs: RootSystem, terms: Optional[Mapping[Weight, QSeries]] = None, order=inf):
        self.rs = rs
        self.order = inf if order == inf else _frac(order)
        out = {}
        for b, s in (terms or {}).items():
            if not isinstance(s, QSeries):
                s = QSeries({0: s})
            s = s.truncate(self.order)
            if s.terms:
                out[tuple(b)] = s
        self.terms: Dict[Weight, QSeries] = out

    @classmethod
    def _raw(cls, rs, terms, order) -> "XPoly":
        obj = cls.__new__(cls)
        obj.rs = rs
        obj.terms = terms
        obj.order = order
        return obj

    @classmethod
    def monomial(cls, rs: RootSystem, b, coeff=1, order=inf) -> "XPoly":
        return cls(rs, {tuple(b): coeff}, order)

    @classmethod
    def one(cls, rs: RootSystem, order=inf) -> "XPoly":
        return cls(rs, {rs.zero: 1}, order)

    @classmethod
    def orbit_sum(cls, rs: RootSystem, b, order=inf) -> "XPoly":
        """M_b: the sum of X_c over the W-orbit of b."""
        return cls(rs, {c: 1 for c in rootsys.weyl_orbit(rs, b)}, order)

    def __getitem__(self, b) -> QSeries:
        s = self.terms.get(tuple(b))
        return s if s is not None else QSeries.zero(self.order)

    coeff = __getitem__

    def support(self) -> List[Weight]:
        return sorted(self.terms)

    def valuation(self):
        if not self.terms:
            return self.order
        return min(s.valuation() for s in self.terms.values())

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, order) -> "XPoly":
        order = inf if order == inf else _frac(order)
        if order >= self.order:
            return self
        out = {}
        for b, s in self.terms.items():
            s = s.truncate(order)
            if s.terms:
                out[b] = s
        return XPoly._raw(self.rs, out, order)

    def __neg__(self) -> "XPoly":
        return XPoly._raw(self.rs, {b: -s for b, s in self.terms.items()}, self.order)

    def __add__(self, other) -> "XPoly":
        if not isinstance(other, XPoly):
            return NotImplemented
        order = min(self.order, other.order)
        out = {b: s.truncate(order) for b, s in self.terms.items()}
        for b, s in other.terms.items():
            t = out.get(b)
            t = s.truncate(order) if t is None else t + s
            if t.terms:
                out[b] = t
            else:
                out.pop(b, None)
        out = {b: s for b, s in out.items() if s.terms}
        return XPoly._raw(self.rs, out, order)

    def __sub__(self, other) -> "XPoly":
        return self + (-other)

    def __mul__(self, other) -> "XPoly":
        if isinstance(other, (int, Rational)):
            if not other:
                return XPoly._raw(self.rs, {}, self.order)
            return XPoly._raw(self.rs, {b: s * other for b, s in self.terms.items()}, self.order)
        if isinstance(other, QSeries):
            order = min(self.order + other.valuation(), other.order + self.valuation())
            out = {}
            for b, s in self.terms.items():
                t = (s * other).truncate(order)
                if t.terms:
                    out[b] = t
            return XPoly._raw(self.rs, out, order)
        if not isinstance(other, XPoly):
            return NotImplemented
        return _xmul(self, other)

    __rmul__ = __mul__

    def shift_weight(self, c) -> "XPoly":
        """Multiply by X_c."""
        c = tuple(c)
        return XPoly._raw(self.rs, {rootsys.add(b, c): s for b, s in self.terms.items()}, self.order)

    def map_weights(self, fn) -> "XPoly":
        out: Dict[Weight, QSeries] = {}
        for b, s in self.terms.items():
            nb = tuple(fn(b))
            t = out.get(nb)
            t = s if t is None else t + s
            if t.terms:
                out[nb] = t
            else:
                out.pop(nb, None)
        return XPoly._raw(self.rs, out, self.order)

    def reflect(self, i: int) -> "XPoly":
        """Apply s_i (0-based) to the X-variables."""
        return self.map_weights(lambda b: rootsys.reflect(self.rs, b, i))

    def invert_variables(self) -> "XPoly":
        """X_b -> X_{-b}."""
        return self.map_weights(rootsys.neg)

    def is_symmetric(self) -> bool:
        return all(self.reflect(i) == self for i in range(self.rs.rank))

    def constant_term(self) -> QSeries:
        return self[self.rs.zero]

    def __eq__(self, other) -> bool:
        if not isinstance(other, XPoly):
            return NotImplemented
        return self.first_mismatch(other) is None

    __hash__ = None

    def first_mismatch(self, other: "XPoly"):
        """(weight, exponent) of the lowest-exponent disagreement, or None."""
        order = min(self.order, other.order)
        worst = None
        for b in set(self.terms) | set(other.terms):
            a = self[b].truncate(order)
            c = other[b].truncate(order)
            e = a.first_mismatch(c)
            if e is not None and (worst is None or (e, b) < worst):
                worst = (e, b)
        return None if worst is None else (worst[1], worst[0])

    def __repr__(self) -> str:
        parts = [f"X{list(b)}*{s!r}" for b, s in sorted(self.terms.items())[:6]]
        more = " + ..." if len(self.terms) > 6 else ""
        return f"XPoly({self.rs.name}: " + " + ".join(parts) + more + ")"


def _xmul(f: XPoly, g: XPoly) -> XPoly:
    if f.rs is not g.rs:
        raise ValueError("X-polynomials over different root systems")
    order = min(f.order + g.valuation(), g.order + f.valuation())
    den = 1
    for s in list(f.terms.values()) + list(g.terms.values()):
        den = _lcm(den, s.den)
    if order != inf:
        den = _lcm(den, order.denominator)
    lim = _limit(order, den)
    fa = [(b, s._at(den)) for b, s in f.terms.items()]
    ga = [(b, sorted(s._at(den).items())) for b, s in g.terms.items()]
    acc: Dict[Weight, Dict[int, object]] = {}
    for b1, s1 in fa:
        lo1 = min(s1)
        for b2, s2 in ga:
            if lim is not None and lo1 + s2[0][0] > lim:
                continue
            w = tuple(x + y for x, y in zip(b1, b2))
            d = acc.get(w)
            if d is None:
                d = acc[w] = {}
            get = d.get
            for ka, ca in s1.items():
                if lim is None:
                    for kb, cb in s2:
                        k = ka + kb
                        d[k] = get(k, 0) + ca * cb
                else:
                    top = lim - ka
                    for kb, cb in s2:
                        if kb > top:
                            break
                        k = ka + kb
                        d[k] = get(k, 0) + ca * cb
    out = {}
    for w, d in acc.items():
        d = {k: _coeff(c) for k, c in d.items() if c}
        if d:
            out[w] = QSeries._raw(den, d, order)
    return XPoly._raw(f.rs, out, order)


def ct_pair(f: XPoly, g: XPoly) -> QSeries:
    """Constant term of f*g without forming the product."""
    order = min(f.order + g.valuation(), g.order + f.valuation())
    total = QSeries.zero(order)
    small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    for b, s in small.terms.items():
        t = big.terms.get(rootsys.neg(b))
        if t is not None:
            total = total + (s * t).truncate(order)
    return total.truncate(order)


def constant_term(f: XPoly) -> QSeries:
    return f.constant_term()


# --- the measure --------------------------------------------------------

def _mu_flat(rs: RootSystem, order: int) -> Dict[Tuple[Weight, int], int]:
    """Raw (weight, q-degree) -> coefficient of the truncated product."""
    terms: Dict[Tuple[Weight, int], int] = {(rs.zero, 0): 1}

    def times(terms, alpha, e):
        out = dict(terms)
        for (w, k), c in terms.items():
            t = k + e
            if t > order:
                continue
            key = (tuple(x + y for x, y in zip(w, alpha)), t)
            v = out.get(key, 0) - c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return out

    roots = list(zip(rs.positive_roots, rs.positive_root_nu))
    for alpha, _ in roots:
        terms = times(terms, alpha, 0)
    for alpha, nu in roots:
        neg_alpha = rootsys.neg(alpha)
        j = 1
        while nu * j <= order:
            terms = times(terms, alpha, nu * j)
            terms = times(terms, neg_alpha, nu * j)
            j += 1
    return terms


@lru_cache(maxsize=64)
def _mu(name: str, order: int) -> XPoly:
    rs = rootsys.parse_id(name)
    flat = _mu_flat(rs, order)
    grouped: Dict[Weight, Dict[int, int]] = {}
    for (w, k), c in flat.items():
        grouped.setdefault(w, {})[k] = c
    terms = {w: QSeries._raw(1, d, Fraction(order)) for w, d in grouped.items()}
    return XPoly._raw(rs, terms, Fraction(order))


def mu(rs: RootSystem, order) -> XPoly:
    """The truncated product over positive roots of
    (1 - X_a q_a^j)(1 - X_a^{-1} q_a^{j+1}), j >= 0, with q_a = q^{nu_a}."""
    if order == inf:
        raise ValueError("the measure needs a finite order")
    order = _frac(order)
    k = floor(order)
    m = _mu(rs.name, k)
    if k != order:
        m = XPoly._raw(rs, {b: QSeries._raw(s.den, s.terms, order) for b, s in m.terms.items()}, order)
    return m


def mu_norm(rs: RootSystem, order) -> QSeries:
    """Constant term of the measure: prod_i prod_j 1/(1 - q_i^j)."""
    order = _frac(order)
    out = QSeries.one(order)
    for nu in rs.nu:
        out = out * qpoch_inv(inf, order, base=nu)
    return out.truncate(order)


def mu_norm_inverse(rs: RootSystem, order) -> QSeries:
    order = _frac(order)
    out = QSeries.one(order)
    for nu in rs.nu:
        out = out * qpoch(inf, order, base=nu)
    return out.truncate(order)
