import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from hessloci.apolar import random_smooth_cubic
from hessloci.fields import GF, QQ
from hessloci.groebner import (Ideal, Limits, LimitsExceeded, buchberger, degree, krull_dimension,
                               projective_dimension, projective_points, solve_zero_dim, solve_zero_dim_Fp,
                               zero_dim_degree)
from hessloci.hessian import HessianData
from hessloci.linalg import LinearChange
from hessloci.poly import MPoly, change_of_vars, parse_poly

from conftest import from_sympy, sym_vars, to_sympy

F7 = GF(7)


def V(n, F=QQ):
    return [MPoly.var(F, n, i) for i in range(n)]


def ideal(texts, n, F=QQ):
    return Ideal([parse_poly(t, n, F) for t in texts], n, F)


def test_trivial_basis():
    x0, x1 = V(2)
    G = buchberger(Ideal([x0, x1]))
    assert sorted(G.basis, key=str) == [x0, x1]


def test_hand_reduced_example():
    # S(x0^2 - x1, x1^2) reduces to zero: the pair already is the reduced basis
    x0, x1 = V(2)
    G = buchberger(Ideal([x0 * x0 - x1, x1 * x1]))
    assert set(map(str, G.basis)) == {"x0^2 - x1", "x1^2"}
    assert G.contains(x0 ** 4)
    assert not G.contains(x0 ** 3)


def test_fermat_jacobian():
    f = parse_poly("x0^3 + x1^3 + x2^3")
    G = buchberger(Ideal(f.gradient()))
    assert set(map(str, G.basis)) == {"x0^2", "x1^2", "x2^2"}
    assert krull_dimension(G) == 0 and projective_dimension(G) == -1
    assert zero_dim_degree(G) == 8


def test_dimension_examples():
    G = buchberger(ideal(["x0", "x1"], 3))
    assert krull_dimension(G) == 1 and projective_dimension(G) == 0
    assert zero_dim_degree(G) == 1


def test_generic_2x3_minors_point():
    rng = random.Random(5)
    M = [[MPoly.linear_form(QQ, [rng.randint(-4, 4) for _ in range(3)]) for _ in range(3)] for _ in range(2)]
    gens = [M[0][a] * M[1][b] - M[0][b] * M[1][a] for a, b in ((0, 1), (0, 2), (1, 2))]
    G = buchberger(Ideal(gens))
    assert projective_dimension(G) == 0
    # independent sampling oracle: the three points cut out are where M drops rank
    pts, _ = projective_points(Ideal(gens), seed=1)
    for P in pts:
        assert all(g.evaluate(P.coords) == 0 for g in gens)


def test_zero_and_unit_ideal():
    assert krull_dimension(buchberger(Ideal([], 4, QQ))) == 4
    G = buchberger(ideal(["x0 - 1", "x0"], 2))
    assert G.is_unit() and krull_dimension(G) == -1


def test_limits_in_band():
    f = random_smooth_cubic(4, seed=3)
    hd = HessianData(f.to_field(GF(1_000_003)))
    G = buchberger(hd.minors_ideal(2), Limits(max_pairs=5))
    assert G.limits_hit
    with pytest.raises(LimitsExceeded):
        krull_dimension(G)


def test_solve_examples():
    r = solve_zero_dim_Fp(ideal(["x0 - 1", "x1 - 2"], 2, F7), 7)
    assert r.points == [(1, 2)]
    r = solve_zero_dim_Fp(ideal(["x0^2 - 1", "x1"], 2, F7), 7)
    assert r.points == [(1, 0), (6, 0)]
    r = solve_zero_dim(ideal(["x0^2 + 1", "x1"], 2, F7))
    assert r.points == [] and r.needs_extension == 2
    with pytest.raises(ValueError):
        solve_zero_dim(ideal(["x0"], 2))


def test_ten_nodes_jacobian_degree():
    g = random_smooth_cubic(4, seed=20240)
    for p in (1_000_003, 2_147_483_647):
        hd = HessianData(g.to_field(GF(p)))
        G = buchberger(Ideal(hd.h.gradient()))
        assert projective_dimension(G) == 0
        assert zero_dim_degree(G) == 10


@pytest.mark.parametrize("seed", range(4))
def test_against_sympy_groebner(seed):
    rng = random.Random(seed)
    n = 3
    gens = []
    for _ in range(3):
        terms = {tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(-3, 3) for _ in range(3)}
        gens.append(MPoly(QQ, n, terms))
    I = Ideal(gens, n, QQ)
    ours = buchberger(I)
    theirs = sympy.groebner([to_sympy(g) for g in I.gens], *sym_vars(n), order="grevlex")
    expect = {str(from_sympy(b, n).monic()) for b in theirs.exprs}
    assert {str(b) for b in ours.basis} == expect


def _fixed_zero_dim_ideal(F=QQ):
    return ideal(["x0^2 - x1*x2 + 1", "x1^2 - 2*x0", "x2^2 - x0*x1 - 3"], 3, F)


@pytest.mark.parametrize("seed", range(10))
def test_zero_dim_degree_invariant_under_change(seed):
    I = _fixed_zero_dim_ideal()
    base = zero_dim_degree(buchberger(I))
    rng = random.Random(seed)
    while True:
        try:
            L = LinearChange(QQ, [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
            break
        except ValueError:
            pass
    J = Ideal([change_of_vars(g, L) for g in I.gens], 3, QQ)
    assert zero_dim_degree(buchberger(J)) == base == 8


def test_generators_reduce_to_zero():
    I = _fixed_zero_dim_ideal()
    G = buchberger(I)
    assert all(G.contains(g) for g in I.gens)
    lead = G.leading_exponents()
    for i, a in enumerate(lead):
        for j, b in enumerate(lead):
            if i != j:
                assert not all(x <= y for x, y in zip(a, b))


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(*[st.integers(0, 4)] * 3), st.integers(-5, 5), max_size=5),
       st.dictionaries(st.tuples(*[st.integers(0, 4)] * 3), st.integers(-5, 5), max_size=5))
def test_normal_form_linear_idempotent(ta, tb):
    G = buchberger(_fixed_zero_dim_ideal())
    a, b = MPoly(QQ, 3, ta), MPoly(QQ, 3, tb)
    na, nb = G.normal_form(a), G.normal_form(b)
    assert G.normal_form(na) == na
    assert G.normal_form(a + b) == G.normal_form(na + nb)


@pytest.mark.parametrize("p", [10007, 1_000_003])
def test_solutions_annihilate_generators(p):
    F = GF(p)
    I = _fixed_zero_dim_ideal(F)
    r = solve_zero_dim(I, seed=3)
    assert r.multiplicity_total == 8
    assert len(r.points) + r.needs_extension == r.distinct_total
    for pt in r.points:
        assert all(g.evaluate(pt) == 0 for g in I.gens)


def test_hilbert_degree_of_twisted_cubic():
    # twisted cubic: degree 3, projective dimension 1
    G = buchberger(ideal(["x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"], 4))
    assert projective_dimension(G) == 1 and degree(G) == 3
