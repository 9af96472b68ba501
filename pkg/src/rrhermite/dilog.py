"""Q-systems, Rogers dilogarithm sums and effective central charges."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import rootsys
from .rootsys import RootSystem

PI2_6 = math.pi ** 2 / 6


# --- dilogarithm -----------------------------------------------------------

def li2(z: float) -> float:
    """Real dilogarithm for 0 <= z <= 1."""
    if not 0.0 <= z <= 1.0:
        raise ValueError("li2 is implemented on [0, 1]")
    if z == 1.0:
        return PI2_6
    if z > 0.5:
        # reflection: Li2(z) + Li2(1 - z) = pi^2/6 - log z log(1 - z)
        return PI2_6 - math.log(z) * math.log1p(-z) - li2(1.0 - z)
    total, term, k = 0.0, z, 1
    while True:
        add = term / (k * k)
        total += add
        if add < 1e-17 * max(total, 1e-300):
            return total
        k += 1
        term *= z


def rogers_L(z: float) -> float:
    """Li2(z) + log(z) log(1 - z) / 2 on (0, 1)."""
    if not 0.0 < z < 1.0:
        if z in (0.0, 1.0):
            return 0.0 if z == 0.0 else PI2_6
        raise ValueError("rogers_L is defined on (0, 1)")
    if z > 0.5:
        return PI2_6 - rogers_L(1.0 - z)
    return li2(z) + 0.5 * math.log(z) * math.log1p(-z)


# --- systems ----------------------------------------------------------------

@dataclass(frozen=True)
class QSystemSpec:
    """(1 - Q_i)^{nu_i} = prod_j Q_j^{A_ij} (nu all ones for the plain form)."""
    A: Tuple[Tuple[Fraction, ...], ...]
    nu: Tuple[Fraction, ...]
    weights: Tuple[Fraction, ...]
    label: str = ""
    # the variant system has A_ij / nu_j, which is not symmetric
    symmetric: bool = True

    def __post_init__(self):
        n = len(self.A)
        if any(len(r) != n for r in self.A) or len(self.nu) != n or len(self.weights) != n:
            raise ValueError("inconsistent dimensions")
        M = self.matrix()
        if not self.symmetric:
            return
        if not np.allclose(M, M.T):
            raise ValueError("A must be symmetric")
        if np.linalg.eigvalsh(M).min() <= 0:
            raise ValueError("A must be positive definite")

    @property
    def lhs_uses_nu(self) -> bool:
        return any(v != 1 for v in self.nu)

    def matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.A])

    @property
    def size(self) -> int:
        return len(self.A)


@dataclass
class QSystemSolution:
    spec: QSystemSpec
    Q: np.ndarray
    residual: float
    iterations: int
    L: float
    recognized: Optional[Fraction] = None

    def recognize(self, max_den: int = 1000, tol: float = 1e-9) -> Optional[Fraction]:
        self.recognized = recognize_rational(self.L, max_den, tol)
        return self.recognized


class ConvergenceError(RuntimeError):
    pass


def recognize_rational(x: float, max_den: int = 1000, tol: float = 1e-9) -> Optional[Fraction]:
    f = Fraction(x).limit_denominator(max_den)
    return f if abs(float(f) - x) < tol else None


def a_matrix(rs: RootSystem, flat: bool = False) -> List[List[Fraction]]:
    """2 (omega_i, omega_j), or (omega_i, omega_j) for the flat variant."""
    k = 1 if flat else 2
    return [[k * x for x in row] for row in rs.gram_P]


def tadpole_matrix(n: int, flat: bool = False) -> List[List[Fraction]]:
    k = 1 if flat else 2
    return [[Fraction(k * min(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]


def _spec(A, nu, weights, label, symmetric=True) -> QSystemSpec:
    return QSystemSpec(tuple(tuple(Fraction(x) for x in r) for r in A), tuple(Fraction(v) for v in nu),
                       tuple(Fraction(w) for w in weights), label, symmetric)


def system_spec(name: str, flat: bool = False) -> QSystemSpec:
    """The defining Q-system for a root system id (e.g. 'B3') or a tadpole 'T<n>'."""
    name = name.strip().upper()
    if name.startswith("T"):
        n = int(name[1:])
        return _spec(tadpole_matrix(n, flat), [1] * n, [1] * n, name + ("b" if flat else ""))
    rs = rootsys.parse_id(name)
    return _spec(a_matrix(rs, flat), rs.nu, rs.nu, rs.name + ("b" if flat else ""))


def variant_spec(name: str, flat: bool = False) -> QSystemSpec:
    """1 - Q_i = prod_j Q_j^{A_ij / nu_j} with weights nu_lng / nu_i."""
    rs = rootsys.parse_id(name)
    A = a_matrix(rs, flat)
    nl = max(rs.nu)
    n = rs.rank
    B = [[A[i][j] / rs.nu[j] for j in range(n)] for i in range(n)]
    return _spec(B, [1] * n, [Fraction(nl, v) for v in rs.nu], rs.name + ("b~" if flat else "~"), symmetric=False)


def residual(spec: QSystemSpec, Q: np.ndarray) -> float:
    M = spec.matrix()
    nu = np.array([float(v) for v in spec.nu])
    return float(np.max(np.abs((1 - Q) ** nu - np.exp(M @ np.log(Q)))))


def _L(spec: QSystemSpec, Q: np.ndarray) -> float:
    return sum(float(w) * rogers_L(float(q)) for w, q in zip(spec.weights, Q)) / PI2_6


def _softplus(x):
    return np.logaddexp(0.0, x)


def solve(spec: QSystemSpec, tol: float = 1e-13, method: str = "newton", start=None,
          damping: float = 0.5, max_iter: int = 1_000_000) -> QSystemSolution:
    """Solve in (0,1)^n. Newton works in logit coordinates x = log(Q/(1-Q)).

    In those coordinates the equations read
    nu_i log(1 - Q_i) = sum_j A_ij log Q_j, i.e.
    F(x) = -nu * softplus(x) + A softplus(-x) = 0.
    """
    M = spec.matrix()
    nu = np.array([float(v) for v in spec.nu])
    n = spec.size
    Q0 = np.full(n, 0.5) if start is None else np.asarray(start, dtype=float)
    if method == "newton":
        x = np.log(Q0 / (1 - Q0))

        def F(x):
            return -nu * _softplus(x) + M @ _softplus(-x)

        f = F(x)
        it = 0
        while np.max(np.abs(f)) > tol * 1e-2 and it < 200:
            Q = 1 / (1 + np.exp(-x))
            J = -(np.diag(nu * Q) + M * (1 - Q)[None, :])
            step = np.linalg.solve(J, -f)
            t = 1.0
            while True:
                xn = x + t * step
                fn = F(xn)
                if np.max(np.abs(fn)) < np.max(np.abs(f)) or t < 1e-10:
                    break
                t *= 0.5
            x, f = xn, fn
            it += 1
        Q = 1 / (1 + np.exp(-x))
    elif method == "fixed_point":
        Q = Q0.copy()
        eps = 1e-12
        it = 0
        while it < max_iter:
            target = 1 - np.exp(M @ np.log(Q) / nu)
            new = (1 - damping) * Q + damping * target
            new = np.clip(new, eps, 1 - eps)
            it += 1
            if np.max(np.abs(new - Q)) < tol * 1e-2:
                Q = new
                break
            Q = new
    else:
        raise ValueError(f"unknown method {method!r}")
    res = residual(spec, Q)
    if not np.all((Q > 0) & (Q < 1)) or res > max(tol, 1e-12) * 100:
        raise ConvergenceError(f"{spec.label}: residual {res:.3e} after {it} iterations")
    return QSystemSolution(spec, Q, res, it, _L(spec, Q))


# --- table ----------------------------------------------------------------------

def coxeter(name: str) -> int:
    name = name.upper()
    if name.startswith("T"):
        return 2 * int(name[1:]) + 1
    return rootsys.parse_id(name).coxeter_h


def closed_form(name: str, flat: bool) -> Fraction:
    """L (or flat L) as tabulated."""
    name = name.upper()
    fam, n = name[0], int(name[1:])
    F = Fraction
    if not flat:
        table = {"A": F(n * (n + 1), n + 3), "B": F(n * (2 * n - 1), n + 1), "C": F(n), "D": F(n - 1),
                 "T": F(n * (2 * n + 1), 2 * n + 3)}
        special = {"E6": F(36, 7), "E7": F(63, 10), "E8": F(15, 2), "F4": F(36, 7), "G2": F(3)}
    else:
        table = {"A": F(n * (n + 1), n + 4), "B": F(2 * n * (2 * n - 1), 2 * n + 3), "C": F(2 * n * (n + 1), 2 * n + 3),
                 "D": F(2 * (n - 1) * n, 2 * n + 1), "T": F(n * (2 * n + 1), 2 * n + 4)}
        special = {"E6": F(24, 5), "E7": F(6), "E8": F(80, 11), "F4": F(24, 5), "G2": F(8, 3)}
    return special[name] if name in special else table[fam]


def closed_ceff(name: str, flat: bool) -> Fraction:
    name = name.upper()
    fam, n = name[0], int(name[1:])
    F = Fraction
    if not flat:
        table = {"A": F(2 * n, n + 3), "B": F(2 * n - 1, n + 1), "C": F(1), "D": F(1), "T": F(2 * n, 2 * n + 3)}
        special = {"E6": F(6, 7), "E7": F(7, 10), "E8": F(1, 2), "F4": F(6, 7), "G2": F(1)}
    else:
        table = {"A": F(n, n + 4), "B": F(2 * n - 1, 2 * n + 3), "C": F(n + 1, 2 * n + 3), "D": F(n, 2 * n + 1),
                 "T": F(n, 2 * n + 4)}
        special = {"E6": F(2, 5), "E7": F(1, 3), "E8": F(8, 33), "F4": F(2, 5), "G2": F(4, 9)}
    return special[name] if name in special else table[fam]


def c_eff(L: float, h: int, flat: bool) -> float:
    """2L/h without the flat reduction, L/h with it."""
    return (L if flat else 2 * L) / h


@dataclass
class TableRow:
    system: str
    L: float
    c_eff: float
    L_flat: float
    c_eff_flat: float
    L_rational: Optional[Fraction]
    L_flat_rational: Optional[Fraction]
    L_closed: Fraction
    L_flat_closed: Fraction
    c_eff_closed: Fraction
    c_eff_flat_closed: Fraction

    @property
    def residual(self) -> float:
        return max(abs(self.L - float(self.L_closed)), abs(self.L_flat - float(self.L_flat_closed)))

    @property
    def ceff_residual(self) -> float:
        return max(abs(self.c_eff - float(self.c_eff_closed)), abs(self.c_eff_flat - float(self.c_eff_flat_closed)))

    @property
    def flagged(self) -> bool:
        return self.L_rational is None or self.L_flat_rational is None

    def to_json(self) -> dict:
        return {
            "system": self.system, "L": self.L, "c_eff": self.c_eff, "L_flat": self.L_flat,
            "c_eff_flat": self.c_eff_flat,
            "L_rational": None if self.L_rational is None else str(self.L_rational),
            "L_flat_rational": None if self.L_flat_rational is None else str(self.L_flat_rational),
            "L_closed": str(self.L_closed), "L_flat_closed": str(self.L_flat_closed),
            "c_eff_closed": str(self.c_eff_closed), "c_eff_flat_closed": str(self.c_eff_flat_closed),
            "residual": self.residual,
        }


def table_row(name: str, tol: float = 1e-13) -> TableRow:
    name = name.upper()
    h = coxeter(name)
    s = solve(system_spec(name, False), tol)
    sf = solve(system_spec(name, True), tol)
    return TableRow(name, s.L, c_eff(s.L, h, False), sf.L, c_eff(sf.L, h, True),
                    recognize_rational(s.L, 1000), recognize_rational(sf.L, 1000),
                    closed_form(name, False), closed_form(name, True),
                    closed_ceff(name, False), closed_ceff(name, True))


def table_systems(max_rank: int) -> List[str]:
    out = [f"A{n}" for n in range(1, max_rank + 1)]
    out += [f"B{n}" for n in range(2, max_rank + 1)]
    out += [f"C{n}" for n in range(2, max_rank + 1)]
    out += [f"D{n}" for n in range(4, max_rank + 1)]
    out += [e for e in ("E6", "E7", "E8") if int(e[1]) <= max(max_rank, 8)]
    out += ["F4", "G2"]
    out += [f"T{n}" for n in range(1, max_rank + 1)]
    return out


def table1(max_rank: int = 8, tol: float = 1e-13) -> List[TableRow]:
    if max_rank < 1:
        raise ValueError("max_rank must be at least 1")
    return [table_row(name, tol) for name in table_systems(max_rank)]


# --- checks ------------------------------------------------------------------

def duality_check(name: str, flat: bool = False, tol: float = 1e-13) -> Tuple[float, float]:
    """(L~ for R, L for the dual system)."""
    rs = rootsys.parse_id(name)
    dual = {"B": "C", "C": "B"}.get(rs.family, rs.family)
    dual_name = f"{dual}{rs.rank}"
    vt = solve(variant_spec(name, flat), tol)
    d = solve(system_spec(dual_name, flat), tol)
    return vt.L, d.L


def tadpole_symmetry(n: int, flat: bool = False, tol: float = 1e-13) -> Dict[str, float]:
    """A_{2n} solution is palindromic and its first half solves the T_n system."""
    a = solve(system_spec(f"A{2 * n}", flat), tol)
    t = solve(system_spec(f"T{n}", flat), tol)
    # rootsys labels A_{2n} nodes 1..2n along the chain
    pal = float(np.max(np.abs(a.Q - a.Q[::-1])))
    first = a.Q[:n][::-1] if abs(a.Q[0] - t.Q[0]) > abs(a.Q[n - 1] - t.Q[0]) else a.Q[:n]
    return {"palindrome": pal, "half_vs_tadpole": float(np.max(np.abs(first - t.Q))),
            "tadpole_residual_at_half": residual(t.spec, first)}


def uniqueness_check(spec: QSystemSpec, starts: int = 10, seed: int = 0, tol: float = 1e-13) -> float:
    """Max spread of solutions from random interior starting points."""
    rng = np.random.default_rng(seed)
    ref = solve(spec, tol).Q
    worst = 0.0
    for _ in range(starts):
        s = solve(spec, tol, start=rng.uniform(0.05, 0.95, spec.size))
        worst = max(worst, float(np.max(np.abs(s.Q - ref))))
    return worst


def flat_ceff(name: str) -> float:
    name = name.upper()
    if name == "D2":
        # A_1 x A_1 with Coxeter number 2
        return 2 * solve(system_spec("A1", True)).L / 2
    return c_eff(solve(system_spec(name, True)).L, coxeter(name), True)


def coincidences(max_n: int = 6) -> List[Tuple[str, str, float, float]]:
    """Pairs whose flat effective central charges are stated to agree."""
    pairs = []
    for n in range(2, max_n + 1):
        if n + 1 >= 4:
            pairs.append((f"D{n + 1}", f"C{n}"))
        pairs.append((f"B{n}", f"A{2 * n - 1}"))
    pairs += [("E6", "F4"), ("F4", "D2"), ("G2", "D4"), ("E7", "A2")]
    out = [(a, b, flat_ceff(a), flat_ceff(b)) for a, b in pairs]
    out.append(("2*E8", "D16", 2 * flat_ceff("E8"), flat_ceff("D16")))
    return out


def find_integer_polynomial(x: float, degree: int, bound: int = 3, tol: float = 1e-9) -> Optional[Tuple[int, ...]]:
    """Monic integer polynomial of the given degree with coefficients in [-bound, bound] vanishing at x.

    Coefficients are returned highest degree first, leading 1 included.
    """
    for coeffs in iproduct(range(-bound, bound + 1), repeat=degree):
        val = x ** degree + sum(c * x ** (degree - 1 - k) for k, c in enumerate(coeffs))
        if abs(val) < tol:
            return (1,) + coeffs
    return None
