"""Gaussian sums and the projective SL(2,Z) action on functions on P/P[N]."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import rootsys
from .rootsys import RootSystem, Weight

RHO = cmath.exp(1j * math.pi / 4)


class IllDefinedExponent(ValueError):
    """The quadratic exponent b^2/2 is not well defined modulo N on P/P[N]."""


@dataclass
class FiniteModule:
    rs: RootSystem
    N: int
    residues: List[Weight]
    index: int
    prescribed: bool
    position: Dict[Weight, int] = field(repr=False)
    half_norms: np.ndarray = field(repr=False)

    @property
    def zeta(self) -> complex:
        return cmath.exp(2j * math.pi / self.N)

    def locate(self, b: Sequence[int]) -> int:
        return self.position[rootsys.sublattice_PN(self.rs, self.N).reduce(b)]

    def pairing_matrix(self) -> np.ndarray:
        """[zeta^{(a,b)}] over residues; symmetric."""
        R = np.array(self.residues, dtype=np.int64)
        G = np.array(self.rs._gram_int, dtype=np.int64)
        ip = (R @ G @ R.T) % (self.N * self.rs.m)
        return np.exp(2j * math.pi * ip / (self.N * self.rs.m))

    def quadratic_phases(self) -> np.ndarray:
        """zeta^{a^2/2} on the chosen representatives."""
        return np.exp(2j * math.pi * self.half_norms / self.N)


def exponent_well_defined(rs: RootSystem, N: int) -> bool:
    """Whether (b + l)^2/2 - b^2/2 lies in N Z for all b in P, l in P[N]."""
    sub = rootsys.sublattice_PN(rs, N)
    m = rs.m
    for lam in sub.basis:
        half = Fraction(rootsys.norm_int(rs, lam), 2 * m)
        if (half / N).denominator != 1:
            return False
        for i in range(rs.rank):
            if (rootsys.inner(rs, rs.omega(i + 1), lam) / N).denominator != 1:
                return False
    return True


def prescribed_case(rs: RootSystem, N: int) -> bool:
    """Odd N for C_n (n >= 2) and 3 | N for G_2, where fixed representatives are used."""
    return (rs.family == "C" and rs.rank >= 2 and N % 2 == 1) or (rs.name == "G2" and N % 3 == 0)


def _prescribed_residues(rs: RootSystem, N: int) -> List[Weight]:
    if rs.family == "C":
        return [tuple(c) for c in iproduct(range(N), repeat=rs.rank)]
    # G_2: c_1 alpha_short + c_2 alpha_long, 0 <= c_1 < N, 0 <= c_2 < N/3
    short = rs.nu.index(1)
    long_ = 1 - short
    out = []
    for c1, c2 in iproduct(range(N), range(N // 3)):
        out.append(tuple(c1 * x + c2 * y for x, y in zip(rs.root_coords[short], rs.root_coords[long_])))
    return out


@lru_cache(maxsize=64)
def _module(name: str, N: int) -> FiniteModule:
    rs = rootsys.parse_id(name)
    sub = rootsys.sublattice_PN(rs, N)
    well = exponent_well_defined(rs, N)
    if well:
        reps = [tuple(v) for v in iproduct(*[range(sub.basis[i][i]) for i in range(rs.rank)])]
        prescribed = False
    elif prescribed_case(rs, N):
        reps = _prescribed_residues(rs, N)
        prescribed = True
    else:
        raise IllDefinedExponent(f"{name}, N = {N}: b^2/2 is not defined mod N and no representatives are prescribed")
    position = {}
    for k, b in enumerate(reps):
        key = sub.reduce(b)
        if key in position:
            raise AssertionError(f"{name}, N = {N}: representatives are not distinct mod P[N]")
        position[key] = k
    if len(reps) != sub.index:
        raise AssertionError(f"{name}, N = {N}: {len(reps)} representatives for index {sub.index}")
    R = np.array(reps, dtype=np.int64)
    G = np.array(rs._gram_int, dtype=np.int64)
    norms = np.einsum("ij,jk,ik->i", R, G, R)
    # b^2/2 mod N as a float in [0, N)
    half = np.mod(norms, 2 * rs.m * N) / (2 * rs.m)
    return FiniteModule(rs, N, reps, sub.index, prescribed, position, half)


def finite_module(rs: RootSystem, N: int) -> FiniteModule:
    if N < 1:
        raise ValueError("N must be positive")
    return _module(rs.name, N)


def gamma(rs: RootSystem, N: int) -> complex:
    """sum over P/P[N] of zeta^{b^2/2}, divided by sqrt of the index."""
    mod = finite_module(rs, N)
    return complex(mod.quadratic_phases().sum() / math.sqrt(mod.index))


def gamma_formula(rs: RootSystem, N: int) -> Optional[complex]:
    """Closed form for the families where one is stated; None otherwise."""
    f, n = rs.family, rs.rank
    if f in "ADE":
        return RHO ** n
    if rs.name == "F4":
        return complex((-1) ** (N - 1))
    if rs.name == "G2":
        return [1j, 1, -1][N % 3]
    if f == "C" and n >= 2:
        psi = 0
        if N % 4 == 1:
            psi = n
        elif N % 4 == 3 and n % 2 == 1:
            psi = 1
        return RHO ** (n - psi)
    if f == "B" and n >= 3:
        psi = 4 if N % 2 == 1 else 0
        return RHO ** (n - psi)
    return None


@dataclass(frozen=True)
class GammaRow:
    system: str
    N: int
    index: int
    computed: complex
    formula: Optional[complex]
    prescribed: bool

    @property
    def diff(self) -> Optional[float]:
        return None if self.formula is None else abs(self.computed - self.formula)

    def to_json(self) -> dict:
        return {
            "system": self.system, "N": self.N, "index": self.index,
            "gamma": [self.computed.real, self.computed.imag],
            "formula": None if self.formula is None else [self.formula.real, self.formula.imag],
            "diff": self.diff, "prescribed_representatives": self.prescribed,
        }


def gamma_row(rs: RootSystem, N: int) -> GammaRow:
    mod = finite_module(rs, N)
    return GammaRow(rs.name, N, mod.index, gamma(rs, N), gamma_formula(rs, N), mod.prescribed)


def gamma_table(systems: Sequence[str], Ns: Sequence[int]) -> List[GammaRow]:
    rows = []
    for name in systems:
        rs = rootsys.parse_id(name)
        for N in Ns:
            try:
                rows.append(gamma_row(rs, N))
            except IllDefinedExponent:
                continue
    return rows


# --- the projective action ----------------------------------------------

@dataclass
class Action:
    module: FiniteModule
    xi: complex
    tau_plus: np.ndarray   # diagonal entries
    fourier: np.ndarray    # F[c, a] = zeta^{(a, c)}: X_a = sum_c F[c, a] delta_c
    gamma: complex

    @property
    def size(self) -> int:
        return self.module.index

    # operators act on vectors or on blocks of column vectors
    @staticmethod
    def _diag(d, v):
        return d * v if v.ndim == 1 else d[:, None] * v

    def apply_tau_plus(self, v, power: int = 1) -> np.ndarray:
        return self._diag(self.tau_plus ** power, v)

    def apply_tau_minus(self, v, power: int = 1) -> np.ndarray:
        # diagonal in the X basis with entries xi * zeta^{-a^2/2}
        diag = (self.xi * np.conj(self.module.quadratic_phases())) ** power
        coords = self.fourier.conj().T @ v / self.size
        return self.fourier @ self._diag(diag, coords)

    def apply_sigma(self, v) -> np.ndarray:
        """Fourier transform normalized by gamma / (xi^3 sqrt(index))."""
        return self.gamma / self.xi ** 3 / math.sqrt(self.size) * (self.fourier @ v)

    def matrix(self, which: str) -> np.ndarray:
        fn = {"tau_plus": self.apply_tau_plus, "tau_minus": self.apply_tau_minus, "sigma": self.apply_sigma}[which]
        return fn(np.eye(self.size, dtype=complex))


def build_action(rs: RootSystem, N: int, xi_choice: int = 0, sign: int = 1) -> Action:
    """tau_+, tau_-, sigma with xi^3 = sign * i * gamma; xi_choice picks the cube root."""
    mod = finite_module(rs, N)
    g = gamma(rs, N)
    target = sign * 1j * g
    xi = abs(target) ** (1 / 3) * cmath.exp(1j * (cmath.phase(target) + 2 * math.pi * xi_choice) / 3)
    return Action(mod, xi, mod.quadratic_phases() / xi, mod.pairing_matrix(), g)


@dataclass(frozen=True)
class RelationReport:
    system: str
    N: int
    index: int
    steinberg: float
    sigma_matches_fourier: float
    sigma_squared_inversion: float
    sigma_conjugation: float
    sigma_tau_cube: float
    skew_dimension: int
    skew_preserved: float

    def worst(self) -> float:
        return max(self.steinberg, self.sigma_matches_fourier, self.sigma_squared_inversion,
                   self.sigma_conjugation, self.sigma_tau_cube, self.skew_preserved)


def _probes(size: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if size <= count:
        return np.eye(size, dtype=complex)
    v = rng.standard_normal((size, count)) + 1j * rng.standard_normal((size, count))
    return v / np.linalg.norm(v, axis=0)


def check_relations(rs: RootSystem, N: int, probes: int = 64, seed: int = 0) -> RelationReport:
    """Relation defects, measured on the full basis for small index and on random unit vectors otherwise."""
    act = build_action(rs, N)
    V = _probes(act.size, probes, seed)
    tp = lambda v, k=1: act.apply_tau_plus(v, k)
    tm = lambda v, k=1: act.apply_tau_minus(v, k)
    sg = act.apply_sigma

    def chain(*ops):
        def run(v):
            for op in reversed(ops):
                v = op(v)
            return v
        return run

    def defect(f, g):
        A, B = f(V), g(V)
        return float(np.max(np.linalg.norm(A - B, axis=0)))

    tp_inv = lambda v: tp(v, -1)
    tm_inv = lambda v: tm(v, -1)
    steinberg = defect(chain(tp, tm_inv, tp), chain(tm_inv, tp, tm_inv))
    sig_def = defect(chain(tp, tm_inv, tp), sg)
    neg = np.array([act.module.locate(rootsys.neg(a)) for a in act.module.residues])

    def inversion(v):
        out = np.empty_like(v)
        out[neg] = -v
        return out

    sq = defect(chain(sg, sg), inversion)
    # sigma tau_+ sigma^{-1} = tau_-^{-1}, written as sigma tau_+ = tau_-^{-1} sigma
    conj = defect(chain(sg, tp), chain(tm_inv, sg))
    cube = defect(chain(sg, tp_inv, sg, tp_inv, sg, tp_inv), chain(sg, sg))
    basis = skew_subspace(rs, N)
    preserved = 0.0
    if basis.shape[1]:
        for op in (sg, tp, tm):
            W = op(basis)
            preserved = max(preserved, _skew_defect(rs, N, W))
    return RelationReport(rs.name, N, act.size, steinberg, sig_def, sq, conj, cube, basis.shape[1], preserved)


# --- W-action and skew-symmetric functions -------------------------------

@lru_cache(maxsize=64)
def _reflection_perms(name: str, N: int) -> Tuple[Tuple[int, ...], ...]:
    rs = rootsys.parse_id(name)
    mod = finite_module(rs, N)
    return tuple(tuple(mod.locate(rootsys.reflect(rs, a, i)) for a in mod.residues) for i in range(rs.rank))


def skew_subspace(rs: RootSystem, N: int) -> np.ndarray:
    """Orthonormal basis (columns) of {f : s_i f = -f for all simple reflections}.

    Functions transform by (w f)(a) = f(w^{-1} a). Orbits are walked with a
    sign; an orbit reached with both signs carries no skew function.
    """
    perms = _reflection_perms(rs.name, N)
    size = finite_module(rs, N).index
    sign = [0] * size
    cols = []
    for start in range(size):
        if sign[start]:
            continue
        sign[start] = 1
        orbit = [start]
        stack = [start]
        ok = True
        while stack:
            a = stack.pop()
            for p in perms:
                b = p[a]
                want = -sign[a]
                if sign[b] == 0:
                    sign[b] = want
                    orbit.append(b)
                    stack.append(b)
                elif sign[b] != want:
                    ok = False
        if ok:
            v = np.zeros(size, dtype=complex)
            for a in orbit:
                v[a] = sign[a]
            cols.append(v / math.sqrt(len(orbit)))
    if not cols:
        return np.zeros((size, 0), dtype=complex)
    return np.column_stack(cols)


def _skew_defect(rs: RootSystem, N: int, W: np.ndarray) -> float:
    worst = 0.0
    for p in _reflection_perms(rs.name, N):
        p = np.array(p)
        reflected = np.empty_like(W)
        reflected[p] = W
        worst = max(worst, float(np.max(np.abs(reflected + W))))
    return worst


def antisymmetrizer(rs: RootSystem, N: int) -> np.ndarray:
    """sum_w sgn(w) w as a matrix on residues (small Weyl groups only)."""
    perms = [np.array(p) for p in _reflection_perms(rs.name, N)]
    size = finite_module(rs, N).index
    ident = tuple(range(size))
    group = {ident: 1}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for p in perms:
                h = tuple(p[list(g)])
                if h not in group:
                    group[h] = -group[g]
                    nxt.append(h)
        frontier = nxt
    A = np.zeros((size, size))
    for g, s in group.items():
        A[list(g), list(range(size))] += s
    return A


# --- sublattice case analysis ----------------------------------------------

def lemma_checks(rs: RootSystem, N: int) -> Dict[str, Optional[bool]]:
    """Each stated assertion about P[N], evaluated against the computed lattice.

    Values are True (holds), False (fails) or None (hypothesis not met).
    """
    co = rootsys.pn_coincidences(rs, N)
    nu_lng = max(rs.nu)
    out: Dict[str, Optional[bool]] = {
        "differs_from_NQ_iff_listed": co["NQ"] == rootsys.lemma_predicts_nq(rs, N),
    }
    out["equals_NQv"] = co["NQv"] if (N % nu_lng == 0 or N % 2 == 0) else None
    np_case = rs.family in "CFG" or (rs.family == "B" and rs.rank % 2 == 0)
    out["equals_NP"] = co["NP"] if (np_case and math.gcd(N, nu_lng) == 1) else None
    return out
