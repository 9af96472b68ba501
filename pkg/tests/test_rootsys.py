from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rrhermite import rootsys
from rrhermite.rootsys import build, parse_id

SYSTEMS = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "E6", "E7", "E8", "F4", "G2"]

# Coxeter numbers and |W| from the standard tables
COXETER = {"A1": 2, "A2": 3, "A3": 4, "A4": 5, "B2": 4, "B3": 6, "B4": 8, "C2": 4, "C3": 6, "C4": 8, "D4": 6,
           "D5": 8, "E6": 12, "E7": 18, "E8": 30, "F4": 12, "G2": 6}
WEYL_ORDER = {"A1": 2, "A2": 6, "A3": 24, "A4": 120, "B2": 8, "B3": 48, "B4": 384, "C2": 8, "C3": 48, "C4": 384,
              "D4": 192, "D5": 1920, "E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152, "G2": 12}


def test_a1_basic_data():
    rs = build("A", 1)
    assert rs.gram_P == ((Fraction(1, 2),),)
    assert rs.m == 2
    assert rs.coxeter_h == 2


def test_c3_and_b3():
    assert build("C", 3).m == 1
    b3 = build("B", 3)
    assert b3.coxeter_h == 6
    # short simple root last; long roots have nu = 2
    assert b3.nu == (2, 2, 1)
    assert build("C", 3).nu == (1, 1, 2)


@pytest.mark.parametrize("family,rank", [("D", 3), ("D", 2), ("E", 5), ("E", 9), ("F", 3), ("G", 3), ("B", 1),
                                         ("C", 1), ("A", 0), ("T", 3), ("X", 2)])
def test_invalid_ids_rejected(family, rank):
    with pytest.raises(ValueError):
        build(family, rank)


@pytest.mark.parametrize("name", SYSTEMS)
def test_structure(name):
    rs = parse_id(name)
    n = rs.rank
    assert rs.coxeter_h == COXETER[name]
    assert rs.weyl_order == WEYL_ORDER[name]
    # short roots have squared length 2
    assert min(rs.nu) == 1
    for i in range(n):
        for j in range(n):
            assert rs.gram_P[i][j] == rs.gram_P[j][i]
            # (omega_i, alpha_j^vee) = delta_ij
            assert rootsys.coroot_pairing(rs, rs.zero[:i] + (1,) + rs.zero[i + 1:], j + 1) == int(i == j)
    assert rs.m == rootsys.expected_m(rs)
    assert rs.pq_order == len(rootsys.classes(rs))


@pytest.mark.parametrize("name", SYSTEMS)
def test_gram_positive_definite(name):
    import sympy
    rs = parse_id(name)
    assert sympy.Matrix(rs.gram_P).is_positive_definite


@pytest.mark.parametrize("family,rank", [("A", 1), ("A", 2), ("A", 3), ("A", 5), ("B", 2), ("B", 3), ("B", 4),
                                         ("C", 2), ("C", 3), ("D", 4), ("D", 5), ("D", 6), ("E", 6), ("E", 7),
                                         ("E", 8), ("F", 4), ("G", 2)])
def test_pq_against_table(family, rank):
    rs = build(family, rank)
    assert tuple(rs.pq_invariants) == rootsys.expected_pq(family, rank)


def test_inner_examples():
    a2 = build("A", 2)
    assert rootsys.inner(a2, (1, 0), (1, 0)) == Fraction(2, 3)
    for name in SYSTEMS:
        rs = parse_id(name)
        assert rootsys.inner(rs, rs.zero, rs.zero) == 0
    with pytest.raises(ValueError):
        rootsys.inner(a2, (1,), (1, 0))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bc_quadratic_forms(n):
    # in epsilon coordinates B_n gives 2 sum u_i^2 and C_n gives sum u_i^2
    for family, scale in (("B", 2), ("C", 1)):
        rs = build(family, n)
        for u in [(1,) + (0,) * (n - 1), (2, -1) + (0,) * (n - 2), tuple(range(1, n + 1))]:
            b = rootsys.from_ambient(rs, [Fraction(x) for x in u]) if family == "C" else None
            if family == "B":
                # epsilon_i has squared length 2 in this normalization
                b = rootsys.from_ambient(rs, [Fraction(x) for x in u])
            assert rootsys.inner(rs, b, b) == scale * sum(x * x for x in u)


def test_bc_coroot_pairing_last():
    n = 3
    u = (3, -1, 2)
    b = rootsys.from_ambient(build("C", n), u)
    assert rootsys.coroot_pairing(build("C", n), b, n) == u[-1]
    b = rootsys.from_ambient(build("B", n), u)
    assert rootsys.coroot_pairing(build("B", n), b, n) == 2 * u[-1]


def test_orbits():
    a1, a2 = build("A", 1), build("A", 2)
    assert rootsys.weyl_orbit(a1, (-1,)) == {(-1,), (1,)}
    assert len(rootsys.weyl_orbit(a2, (-1, 0))) == 3
    for name in SYSTEMS[:12]:
        rs = parse_id(name)
        assert rootsys.weyl_orbit(rs, rs.zero) == {rs.zero}


@pytest.mark.parametrize("name", ["A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4"])
def test_orbit_sizes_divide_weyl_order(name):
    rs = parse_id(name)
    for b in rootsys.enumerate_antidominant(rs, 3):
        orbit = rootsys.weyl_orbit(rs, b)
        assert rs.weyl_order % len(orbit) == 0
        assert all(rootsys.norm_int(rs, w) == rootsys.norm_int(rs, b) for w in orbit)


def test_enumerate_antidominant_examples():
    assert rootsys.enumerate_antidominant(build("A", 1), Fraction(1, 4)) == [(0,), (-1,)]
    assert rootsys.enumerate_antidominant(build("A", 2), Fraction(1, 3)) == [(0, 0), (-1, 0), (0, -1)]
    assert rootsys.enumerate_antidominant(build("B", 3), 0) == [(0, 0, 0)]


@pytest.mark.parametrize("name", ["A2", "B2", "C3", "G2", "D4"])
def test_enumerate_antidominant_complete(name):
    # brute force over a coordinate box that contains the ellipsoid
    import itertools
    rs = parse_id(name)
    bound = Fraction(2)
    got = set(rootsys.enumerate_antidominant(rs, bound))
    box = range(-8, 1)
    brute = {b for b in itertools.product(box, repeat=rs.rank) if rootsys.half_norm(rs, b) <= bound}
    assert got == brute
    listed = rootsys.enumerate_antidominant(rs, bound)
    keys = [(rootsys.norm_int(rs, b), b) for b in listed]
    assert keys == sorted(keys)


@pytest.mark.parametrize("name", SYSTEMS[:14])
def test_simple_roots_in_trivial_class(name):
    rs = parse_id(name)
    for row in rs.root_coords:
        assert rootsys.class_of(rs, row) == 0


@st.composite
def system_and_weights(draw):
    name = draw(st.sampled_from(["A1", "A3", "B3", "C2", "D4", "G2", "F4", "E6"]))
    rs = parse_id(name)
    b = tuple(draw(st.lists(st.integers(-5, 5), min_size=rs.rank, max_size=rs.rank)))
    c = tuple(draw(st.lists(st.integers(-5, 5), min_size=rs.rank, max_size=rs.rank)))
    i = draw(st.integers(0, rs.rank - 1))
    return rs, b, c, i


@settings(max_examples=80, deadline=None)
@given(system_and_weights())
def test_reflection_involution_and_isometry(data):
    rs, b, c, i = data
    sb = rootsys.reflect(rs, b, i)
    assert rootsys.reflect(rs, sb, i) == b
    assert rootsys.inner(rs, sb, rootsys.reflect(rs, c, i)) == rootsys.inner(rs, b, c)


@settings(max_examples=80, deadline=None)
@given(system_and_weights())
def test_class_of_is_homomorphism(data):
    rs, b, c, _ = data
    assert rootsys.class_of(rs, rootsys.add(b, c)) == rootsys.class_add(rs, rootsys.class_of(rs, b),
                                                                        rootsys.class_of(rs, c))
    assert rootsys.class_add(rs, rootsys.class_of(rs, b), rootsys.class_neg(rs, rootsys.class_of(rs, b))) == 0


@settings(max_examples=60, deadline=None)
@given(system_and_weights())
def test_inner_products_in_lattice_of_m(data):
    rs, b, c, _ = data
    assert (rootsys.inner(rs, b, c) * rs.m).denominator == 1


def test_sublattice_examples():
    assert rootsys.sublattice_PN(build("A", 1), 4).index == 8
    assert rootsys.sublattice_PN(build("A", 1), 3).index == 6
    for N in (3, 5, 7):
        assert rootsys.pn_coincidences(build("C", 3), N)["NP"]
    for name in ("A2", "A3", "D4", "E6"):
        for N in range(2, 7):
            assert rootsys.pn_coincidences(parse_id(name), N)["NQ"]


# Named exception to the case list: B_{2k} at odd N has P[N] = NP != NQ.
LEMMA_EXCEPTIONS = {(name, N) for name in ("B2", "B4") for N in (1, 3, 5, 7, 9, 11)}


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "F4", "G2"])
def test_lemma_case_analysis(name):
    rs = parse_id(name)
    for N in range(1, 13):
        equals_nq = rootsys.pn_coincidences(rs, N)["NQ"]
        agrees = equals_nq == rootsys.lemma_predicts_nq(rs, N)
        assert agrees != ((name, N) in LEMMA_EXCEPTIONS), (name, N)


def test_lemma_b_even_rank_is_np():
    # the lattice really is NP in the exceptional B cases
    for name in ("B2", "B4"):
        for N in (3, 5, 7):
            assert rootsys.pn_coincidences(parse_id(name), N)["NP"]
