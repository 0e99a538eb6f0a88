import random

import pytest
import sympy

from hessloci.apolar import (ApolarRing, annihilator_graded, build_apolar_ring, catalecticant, is_cone,
                             is_smooth, random_cubic, random_smooth_cubic, singular_points)
from hessloci.fields import GF, QQ
from hessloci.hessian import hessian_matrix
from hessloci.linalg import ProjPoint, rank
from hessloci.poly import MPoly, parse_poly
from hessloci.regression import CORPUS, example_fourfold

FERMAT2 = parse_poly("x0^3 + x1^3 + x2^3")
FERMAT3 = parse_poly("x0^3 + x1^3 + x2^3 + x3^3")
D5 = parse_poly(CORPUS["d5_surface"])


def e(i, n):
    return [1 if t == i else 0 for t in range(n)]


def test_annihilator_examples():
    assert annihilator_graded(FERMAT2, 1) == []
    ann2 = annihilator_graded(FERMAT2, 2)
    assert {str(a) for a in ann2} == {"x0*x1", "x0*x2", "x1*x2"}
    cone = parse_poly("x0^3", nvars_hint=3)
    assert {str(a) for a in annihilator_graded(cone, 1)} == {"x1", "x2"}


def test_catalecticant_shape():
    C = catalecticant(D5, 1)
    assert C.shape == (10, 4)
    with pytest.raises(ValueError):
        catalecticant(D5, 4)
    with pytest.raises(ValueError):
        annihilator_graded(parse_poly("x0^3 + x1"), 1)


def test_is_cone_examples():
    assert not is_cone(FERMAT2)
    assert is_cone(parse_poly("x0^3", nvars_hint=3))
    # 4x4 catalecticant rank oracle
    M = sympy.Matrix([list(r) for r in catalecticant(D5, 1).matrix])
    assert M.rank() == 4
    assert not is_cone(D5)


def test_smooth_examples():
    assert is_smooth(FERMAT3)
    assert is_smooth(FERMAT3, backend="apolar")
    assert not is_smooth(D5) and not is_smooth(D5, backend="apolar")
    pts, info = singular_points(D5)
    assert [str(P) for P in pts] == ["(1:0:0:0)"]
    assert info["projective_dim"] == 0
    assert is_smooth(parse_poly(CORPUS["quartic"]))


def test_fermat_ring():
    R = build_apolar_ring(FERMAT2)
    assert R.dims == (1, 3, 3, 1)
    for i in range(3):
        for j in range(3):
            assert any(R.mult(e(i, 3), e(j, 3))) == (i == j)
    q = R.square(e(0, 3))
    assert R.pairing(e(0, 3), q) == 6
    R3 = build_apolar_ring(FERMAT3)
    assert not any(R3.mult(e(0, 4), e(1, 4)))
    assert any(R3.square(e(0, 4)))


def test_cone_rejected():
    with pytest.raises(ValueError):
        ApolarRing(parse_poly("x0^3 + x1^3", nvars_hint=3))


def test_random_quinary_ring():
    f = random_smooth_cubic(5, seed=7)
    R = build_apolar_ring(f)
    assert R.dims == (1, 5, 5, 1)
    assert R.is_gorenstein_nondegenerate()
    # oracle: catalecticant ranks from sympy
    for k, expect in ((1, 5), (2, 5)):
        assert sympy.Matrix([list(r) for r in catalecticant(f, k).matrix]).rank() == expect


def test_fourfold_blocks_multiply_to_zero():
    R = build_apolar_ring(example_fourfold())
    rng = random.Random(0)
    for _ in range(20):
        u = [rng.randint(-5, 5) for _ in range(3)] + [0, 0, 0]
        v = [0, 0, 0] + [rng.randint(-5, 5) for _ in range(3)]
        assert not any(R.mult(u, v))


def test_kernel_identity_examples():
    R = build_apolar_ring(FERMAT3)
    ok, _ = R.hessian_kernel_identity_check(e(0, 4))
    assert ok and R.annihilator_of(e(0, 4)) == [e(1, 4), e(2, 4), e(3, 4)]
    g = parse_poly(CORPUS["g1"])
    f = MPoly.var(QQ, 4, 0) ** 3 + g.embed(4, [1, 2, 3])
    Rf = build_apolar_ring(f)
    ok, _ = Rf.hessian_kernel_identity_check(e(0, 4))
    assert ok and Rf.annihilator_of(e(0, 4)) == [e(1, 4), e(2, 4), e(3, 4)]


def test_kernel_identity_witness_on_mismatch():
    R = build_apolar_ring(FERMAT2)
    wrong = hessian_matrix(parse_poly("x0^3 + x1^3 + x0*x2^2"))
    ok, witness = R.hessian_kernel_identity_check(e(2, 3), H=wrong)
    assert not ok and witness


@pytest.mark.parametrize("seed", range(10))
def test_ring_invariants_random(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 3, 4, 5])
    f = random_smooth_cubic(n + 1, seed=seed)
    R = build_apolar_ring(f)
    assert not annihilator_graded(f, 1)
    assert R.dims == (1, n + 1, n + 1, 1)
    assert R.is_gorenstein_nondegenerate()
    H = hessian_matrix(f)
    for _ in range(20):
        a = [rng.randint(-9, 9) for _ in range(n + 1)]
        b = [rng.randint(-9, 9) for _ in range(n + 1)]
        assert R.mult(a, b) == R.mult(b, a)
        if any(a):
            assert R.hessian_kernel_identity_check(a, H)[0]


def _engineered_singular(rng, nvars):
    # drop every monomial of degree >= 2 in x0, so (1:0:...:0) is singular
    f = random_cubic(nvars, rng, bound=4)
    return MPoly(QQ, nvars, {m: c for m, c in f.terms.items() if m[0] <= 1})


@pytest.mark.parametrize("seed", range(50))
def test_backend_agreement(seed):
    rng = random.Random(seed)
    nvars = rng.choice([3, 4])
    while True:
        f = _engineered_singular(rng, nvars) if seed % 3 == 0 else random_cubic(nvars, rng, bound=3, density=0.5)
        if not f.is_zero() and f.degree() == 3 and not is_cone(f):
            break
    jac = is_smooth(f, seed=seed)
    apo = is_smooth(f, backend="apolar")
    assert jac == apo
    if seed % 3 == 0:
        assert not jac


def test_smooth_over_prime_field():
    assert is_smooth(FERMAT3.to_field(GF(1_000_003)))
    # characteristic 3 kills the Fermat partials
    assert not is_smooth(FERMAT3.to_field(GF(3)))
