"""Root systems with short roots of squared length 2.

Weights are integer tuples in the basis of fundamental weights, so the
pairing with the i-th simple coroot is just the i-th coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Sequence, Tuple

Weight = Tuple[int, ...]
Matrix = List[List[Fraction]]

FAMILIES = "ABCDEFG"


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def mat_inverse(m: Sequence[Sequence]) -> Matrix:
    """Exact inverse of a square rational matrix by Gauss-Jordan."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def hermite_rows(rows: Iterable[Sequence[int]], n: int) -> List[List[int]]:
    """Row-style Hermite normal form of the lattice spanned by integer rows.

    The result is upper triangular with positive pivots and entries above
    each pivot reduced into [0, pivot). Only full-rank lattices are used here.
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    basis: List[List[int]] = []
    for col in range(n):
        live = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                f = r[col] // p[col]
                r = [x - f * y for x, y in zip(r, p)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        if not live:
            raise ValueError("lattice is not of full rank")
        p = live[0]
        if p[col] < 0:
            p = [-x for x in p]
        basis.append(p)
        work = rest
    for i in range(n):
        piv = basis[i][i]
        for k in range(i):
            f = basis[k][i] // piv
            if f:
                basis[k] = [x - f * y for x, y in zip(basis[k], basis[i])]
    return basis


def reduce_mod(v: Sequence[int], hnf: List[List[int]]) -> Weight:
    """Canonical representative of v modulo an HNF lattice: 0 <= v_i < pivot_i."""
    v = list(v)
    for i, row in enumerate(hnf):
        f = v[i] // row[i]
        if f:
            v = [x - f * y for x, y in zip(v, row)]
    return tuple(v)


def _ambient(family: str, n: int) -> Tuple[List[List[Fraction]], int]:
    """Bourbaki simple roots and the scale that makes short roots have length 2."""
    F = Fraction

    def e(i, dim, c=1):
        v = [F(0)] * dim
        v[i] = F(c)
        return v

    def diff(i, j, dim):
        v = e(i, dim)
        v[j] -= 1
        return v

    if family == "A":
        return [diff(i, i + 1, n + 1) for i in range(n)], 1
    if family == "B":
        return [diff(i, i + 1, n) for i in range(n - 1)] + [e(n - 1, n)], 2
    if family == "C":
        return [diff(i, i + 1, n) for i in range(n - 1)] + [e(n - 1, n, 2)], 1
    if family == "D":
        last = e(n - 2, n)
        last[n - 1] = F(1)
        return [diff(i, i + 1, n) for i in range(n - 1)] + [last], 1
    if family == "E":
        h = F(1, 2)
        roots = [[h, -h, -h, -h, -h, -h, -h, h], e(0, 8)]
        roots[1][1] = F(1)
        roots.append(diff(1, 0, 8))
        for k in range(2, 7):
            roots.append(diff(k, k - 1, 8))
        return roots[:n], 1
    if family == "F":
        h = F(1, 2)
        return [diff(1, 2, 4), diff(2, 3, 4), e(3, 4), [h, -h, -h, -h]], 2
    if family == "G":
        return [[F(1), F(-1), F(0)], [F(-2), F(1), F(1)]], 1
    raise ValueError(f"unknown family {family!r}")


def check_id(family: str, rank: int) -> None:
    ok = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }.get(family)
    if not ok:
        raise ValueError(f"invalid root system {family}{rank}")


WEYL_ORDER = {
    "E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "G2": 12,
}


@dataclass(frozen=True, eq=False)
class RootSystem:
    family: str
    rank: int
    simple_roots: Tuple[Tuple[Fraction, ...], ...]
    simple_coroots: Tuple[Tuple[Fraction, ...], ...]
    fundamental_weights: Tuple[Tuple[Fraction, ...], ...]
    gram_P: Tuple[Tuple[Fraction, ...], ...]
    nu: Tuple[int, ...]
    coxeter_h: int
    m: int
    pq_order: int
    minuscule: Tuple[int, ...]
    # simple roots in fundamental-weight coordinates (rows of the Cartan matrix)
    root_coords: Tuple[Weight, ...]
    positive_roots: Tuple[Weight, ...]
    positive_root_nu: Tuple[int, ...]
    theta: Weight
    pq_invariants: Tuple[int, ...]
    _gram_int: Tuple[Tuple[int, ...], ...] = field(repr=False)
    _q_hnf: Tuple[Tuple[int, ...], ...] = field(repr=False)
    _class_table: Dict[Weight, int] = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def __repr__(self) -> str:
        return f"RootSystem({self.name})"

    @property
    def weyl_order(self) -> int:
        n, f = self.rank, self.family
        if f == "A":
            return _factorial(n + 1)
        if f in "BC":
            return 2 ** n * _factorial(n)
        if f == "D":
            return 2 ** (n - 1) * _factorial(n)
        return WEYL_ORDER[self.name]

    @property
    def zero(self) -> Weight:
        return (0,) * self.rank

    def omega(self, i: int) -> Weight:
        """Fundamental weight, 1-based index; omega(0) is the zero weight."""
        return tuple(int(k == i - 1) for k in range(self.rank))


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


@lru_cache(maxsize=None)
def build(family: str, rank: int) -> RootSystem:
    """Build root-system data for the given family and rank."""
    family = family.upper()
    check_id(family, rank)
    roots, scale = _ambient(family, rank)

    def dot(x, y):
        return scale * sum(a * b for a, b in zip(x, y))

    n = rank
    coroots = [[2 * a / dot(r, r) for a in r] for r in roots]
    K = [[dot(roots[k], coroots[j]) for j in range(n)] for k in range(n)]
    Kinv = mat_inverse(K)
    dim = len(roots[0])
    omegas = [[sum(Kinv[i][k] * roots[k][c] for k in range(n)) for c in range(dim)]
              for i in range(n)]
    gram = [[dot(omegas[i], omegas[j]) for j in range(n)] for i in range(n)]
    nu = tuple(int(dot(r, r) / 2) for r in roots)
    root_coords = tuple(tuple(int(x) for x in row) for row in K)

    denom = 1
    for row in gram:
        for x in row:
            denom = _lcm(denom, x.denominator)
    g = 0
    for row in gram:
        for x in row:
            g = gcd(g, int(x * denom))
    m = denom // g
    gram_int = tuple(tuple(int(x * m) for x in row) for row in gram)

    # all roots by closure under simple reflections
    seen = set(root_coords)
    frontier = list(root_coords)
    while frontier:
        new = []
        for b in frontier:
            for i in range(n):
                if b[i]:
                    c = tuple(x - b[i] * y for x, y in zip(b, root_coords[i]))
                    if c not in seen:
                        seen.add(c)
                        new.append(c)
        frontier = new

    def alpha_coords(b):
        return [sum(b[j] * Kinv[j][k] for j in range(n)) for k in range(n)]

    positive = []
    for b in seen:
        a = alpha_coords(b)
        if all(x >= 0 for x in a):
            positive.append((sum(a), b))
    positive.sort(key=lambda t: (t[0], tuple(-x for x in t[1])))
    positive_roots = tuple(b for _, b in positive)

    def norm_int(b):
        return sum(b[i] * gram_int[i][j] * b[j] for i in range(n) for j in range(n))

    pos_nu = tuple(norm_int(b) // (2 * m) for b in positive_roots)
    short = [(h, b) for (h, b), v in zip(positive, pos_nu) if v == 1]
    theta = max(short, key=lambda t: t[0])[1]
    rho_theta = Fraction(sum(gram_int[i][j] * theta[j] for i in range(n) for j in range(n)), m)
    h = rho_theta + 1
    assert h.denominator == 1

    q_hnf = hermite_rows(root_coords, n)
    pq_order = 1
    for i in range(n):
        pq_order *= q_hnf[i][i]

    minuscule = tuple(
        i + 1 for i in range(n)
        if Fraction(sum(gram_int[i][j] * theta[j] for j in range(n)), m) == 1
    )
    zero = (0,) * n
    table = {reduce_mod(zero, q_hnf): 0}
    for r in minuscule:
        table[reduce_mod(tuple(int(k == r - 1) for k in range(n)), q_hnf)] = r
    if len(table) != pq_order:
        raise AssertionError(f"{family}{rank}: minuscule weights do not cover P/Q")

    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form
    snf = smith_normal_form(Matrix(K).applyfunc(int), domain=ZZ)
    invariants = tuple(sorted(abs(int(snf[i, i])) for i in range(n) if abs(int(snf[i, i])) > 1))

    return RootSystem(
        family=family,
        rank=n,
        simple_roots=tuple(tuple(r) for r in roots),
        simple_coroots=tuple(tuple(r) for r in coroots),
        fundamental_weights=tuple(tuple(w) for w in omegas),
        gram_P=tuple(tuple(r) for r in gram),
        nu=nu,
        coxeter_h=int(h),
        m=m,
        pq_order=pq_order,
        minuscule=minuscule,
        root_coords=root_coords,
        positive_roots=positive_roots,
        positive_root_nu=pos_nu,
        theta=theta,
        pq_invariants=invariants,
        _gram_int=gram_int,
        _q_hnf=tuple(map(tuple, q_hnf)),
        _class_table=table,
    )


def parse_id(text: str) -> RootSystem:
    """'A2', 'b3', 'E8' -> RootSystem."""
    text = text.strip().upper()
    if len(text) < 2 or text[0] not in FAMILIES or not text[1:].isdigit():
        raise ValueError(f"cannot parse root system {text!r}")
    return build(text[0], int(text[1:]))


# --- bilinear data -------------------------------------------------------

def norm_int(rs: RootSystem, b: Sequence[int]) -> int:
    """m·(b,b) as an integer."""
    g = rs._gram_int
    n = rs.rank
    if len(b) != n:
        raise ValueError("dimension mismatch")
    total = 0
    for i in range(n):
        if b[i]:
            row = g[i]
            total += b[i] * sum(row[j] * b[j] for j in range(n))
    return total


def inner(rs: RootSystem, b: Sequence[int], c: Sequence[int]) -> Fraction:
    if len(b) != rs.rank or len(c) != rs.rank:
        raise ValueError("dimension mismatch")
    g = rs._gram_int
    total = sum(b[i] * g[i][j] * c[j] for i in range(rs.rank) for j in range(rs.rank))
    return Fraction(total, rs.m)


def half_norm(rs: RootSystem, b: Sequence[int]) -> Fraction:
    """(b,b)/2, the q-degree of X_b in a theta function."""
    return Fraction(norm_int(rs, b), 2 * rs.m)


def coroot_pairing(rs: RootSystem, b: Sequence[int], i: int) -> int:
    """(b, alpha_i^vee) for a 1-based simple index i."""
    if not 1 <= i <= rs.rank:
        raise IndexError(f"simple index {i} out of range 1..{rs.rank}")
    return b[i - 1]


def to_ambient(rs: RootSystem, b: Sequence[int]) -> Tuple[Fraction, ...]:
    dim = len(rs.fundamental_weights[0])
    return tuple(sum(b[i] * rs.fundamental_weights[i][c] for i in range(rs.rank))
                 for c in range(dim))


def from_ambient(rs: RootSystem, v: Sequence) -> Weight:
    """Fundamental coordinates of an ambient vector; it must lie in P."""
    scale = 2 if rs.family in "BF" else 1
    coords = []
    for cor in rs.simple_coroots:
        x = scale * sum(Fraction(a) * c for a, c in zip(v, cor))
        if x.denominator != 1:
            raise ValueError("vector is not in the weight lattice")
        coords.append(int(x))
    return tuple(coords)


def add(b: Sequence[int], c: Sequence[int]) -> Weight:
    return tuple(x + y for x, y in zip(b, c))


def sub(b: Sequence[int], c: Sequence[int]) -> Weight:
    return tuple(x - y for x, y in zip(b, c))


def neg(b: Sequence[int]) -> Weight:
    return tuple(-x for x in b)


# --- Weyl group ----------------------------------------------------------

def reflect(rs: RootSystem, b: Sequence[int], i: int) -> Weight:
    """Simple reflection s_i, 0-based index."""
    k = b[i]
    if not k:
        return tuple(b)
    return tuple(x - k * y for x, y in zip(b, rs.root_coords[i]))


def weyl_orbit(rs: RootSystem, b: Sequence[int]) -> frozenset:
    b = tuple(b)
    seen = {b}
    frontier = [b]
    while frontier:
        new = []
        for c in frontier:
            for i in range(rs.rank):
                if c[i]:
                    d = reflect(rs, c, i)
                    if d not in seen:
                        seen.add(d)
                        new.append(d)
        frontier = new
    return frozenset(seen)


def to_antidominant(rs: RootSystem, b: Sequence[int]) -> Weight:
    b = tuple(b)
    while True:
        i = next((k for k in range(rs.rank) if b[k] > 0), None)
        if i is None:
            return b
        b = reflect(rs, b, i)


def to_dominant(rs: RootSystem, b: Sequence[int]) -> Weight:
    b = tuple(b)
    while True:
        i = next((k for k in range(rs.rank) if b[k] < 0), None)
        if i is None:
            return b
        b = reflect(rs, b, i)


def is_antidominant(b: Sequence[int]) -> bool:
    return all(x <= 0 for x in b)


def dual_label(rs: RootSystem, c: Sequence[int]) -> Weight:
    """c' = -w_0(c): the antidominant weight in the orbit of -c."""
    return to_antidominant(rs, neg(c))


def in_root_cone(rs: RootSystem, a: Sequence[int]) -> bool:
    """True when a lies in Q_+ (nonnegative integer combination of simple roots)."""
    Kinv = _kinv(rs)
    n = rs.rank
    for k in range(n):
        x = sum(a[j] * Kinv[j][k] for j in range(n))
        if x < 0 or x.denominator != 1:
            return False
    return True


@lru_cache(maxsize=None)
def _kinv_cached(name: str) -> Tuple[Tuple[Fraction, ...], ...]:
    rs = parse_id(name)
    return tuple(map(tuple, mat_inverse(rs.root_coords)))


def _kinv(rs: RootSystem):
    return _kinv_cached(rs.name)


# --- enumeration ---------------------------------------------------------

def enumerate_antidominant(rs: RootSystem, qdeg_bound) -> List[Weight]:
    """All b in P_- with (b,b)/2 <= qdeg_bound, sorted by norm then lexicographically.

    The fundamental-weight Gram matrix has nonnegative entries, so the norm
    grows along every coordinate direction of P_- and the search prunes there.
    """
    bound = Fraction(qdeg_bound)
    if bound < 0:
        return []
    limit = bound * 2 * rs.m  # compare against m(b,b)
    n = rs.rank
    out: List[Weight] = []

    def rec(prefix: List[int], i: int) -> None:
        if i == n:
            out.append(tuple(-x for x in prefix))
            return
        k = 0
        while True:
            trial = prefix + [k] + [0] * (n - i - 1)
            if norm_int(rs, trial) > limit:
                break
            rec(prefix + [k], i + 1)
            k += 1

    rec([], 0)
    out.sort(key=lambda b: (norm_int(rs, b), b))
    return out


@lru_cache(maxsize=256)
def _weights_up_to(name: str, bound: Fraction) -> Tuple[Weight, ...]:
    rs = parse_id(name)
    pts = set()
    for b in enumerate_antidominant(rs, bound):
        pts.update(weyl_orbit(rs, b))
    return tuple(sorted(pts, key=lambda b: (norm_int(rs, b), b)))


def weights_up_to(rs: RootSystem, bound) -> Tuple[Weight, ...]:
    """All of P with (b,b)/2 <= bound."""
    return _weights_up_to(rs.name, Fraction(bound))


# --- classes -------------------------------------------------------------

def class_of(rs: RootSystem, b: Sequence[int]) -> int:
    """Class of b in P/Q, labelled by the index r with omega_r in that class (0 = Q)."""
    return rs._class_table[reduce_mod(b, rs._q_hnf)]


def class_add(rs: RootSystem, r: int, s: int) -> int:
    return class_of(rs, add(rs.omega(r), rs.omega(s)))


def class_neg(rs: RootSystem, r: int) -> int:
    return class_of(rs, neg(rs.omega(r)))


def classes(rs: RootSystem) -> Tuple[int, ...]:
    return (0,) + rs.minuscule


def expected_pq(family: str, rank: int) -> Tuple[int, ...]:
    """Invariant factors of P/Q from the classification."""
    if family == "A":
        return (rank + 1,) if rank >= 1 else ()
    if family in "BC":
        return (2,)
    if family == "D":
        return (4,) if rank % 2 else (2, 2)
    return {"E6": (3,), "E7": (2,), "E8": (), "F4": (), "G2": ()}[f"{family}{rank}"]


def expected_m(rs: RootSystem) -> int:
    if rs.family == "D" and rs.rank % 2 == 0:
        return 2
    if (rs.family == "B" and rs.rank % 2 == 0) or rs.family == "C":
        return 1
    return rs.pq_order


# --- P[N] = P ∩ N Q^vee ---------------------------------------------------

@dataclass(frozen=True)
class Sublattice:
    N: int
    basis: Tuple[Weight, ...]  # HNF rows in fundamental coordinates
    index: int

    def reduce(self, b: Sequence[int]) -> Weight:
        return reduce_mod(b, [list(r) for r in self.basis])

    def contains(self, b: Sequence[int]) -> bool:
        return not any(self.reduce(b))


def _coroot_coords(rs: RootSystem) -> List[List[Fraction]]:
    # (alpha_j^vee, alpha_i^vee) in the fundamental basis: alpha_j / nu_j
    return [[Fraction(x, rs.nu[j]) for x in rs.root_coords[j]] for j in range(rs.rank)]


def _lattice(rows: List[Sequence[int]], n: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(map(tuple, hermite_rows(rows, n)))


@lru_cache(maxsize=None)
def _sublattice(name: str, N: int) -> Sublattice:
    rs = parse_id(name)
    n = rs.rank
    gens = [[N * x for x in row] for row in rs.root_coords]
    cor = _coroot_coords(rs)
    ranges = [range(v) for v in rs.nu]

    def combos(i):
        if i == n:
            yield []
            return
        for c in ranges[i]:
            for rest in combos(i + 1):
                yield [c] + rest

    for c in combos(0):
        v = [N * sum(c[j] * cor[j][i] for j in range(n)) for i in range(n)]
        if all(x.denominator == 1 for x in v) and any(v):
            gens.append([int(x) for x in v])
    basis = _lattice(gens, n)
    index = 1
    for i in range(n):
        index *= basis[i][i]
    return Sublattice(N, basis, index)


def sublattice_PN(rs: RootSystem, N: int) -> Sublattice:
    if N < 1:
        raise ValueError("N must be positive")
    return _sublattice(rs.name, N)


def lattice_equal(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], n: int) -> bool:
    return _lattice(list(a), n) == _lattice(list(b), n)


def pn_coincidences(rs: RootSystem, N: int) -> Dict[str, bool]:
    """Which of N·Q, N·P, N·Q^vee (when inside P) the computed P[N] equals."""
    n = rs.rank
    pn = sublattice_PN(rs, N).basis
    nq = [[N * x for x in row] for row in rs.root_coords]
    np_ = [[N * int(i == j) for j in range(n)] for i in range(n)]
    cor = _coroot_coords(rs)
    nqv = [[N * x for x in row] for row in cor]
    out = {"NQ": lattice_equal(pn, nq, n), "NP": lattice_equal(pn, np_, n)}
    if all(x.denominator == 1 for row in nqv for x in row):
        out["NQv"] = lattice_equal(pn, [[int(x) for x in row] for row in nqv], n)
    else:
        out["NQv"] = False
    return out


def lemma_predicts_nq(rs: RootSystem, N: int) -> bool:
    """Stated criterion: P[N] differs from NQ exactly for odd N in C_n and G_2 with 3|N,
    and for even N in B_n, C_n, F_4."""
    f = rs.family
    if f == "C" and N % 2 == 1:
        return False
    if f == "G" and N % 3 == 0:
        return False
    if f in "BCF" and N % 2 == 0:
        return False
    return True
