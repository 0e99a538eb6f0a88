import random

import pytest

from hessloci.apolar import build_apolar_ring, random_smooth_cubic
from hessloci.fields import GF, QQ
from hessloci.linalg import LinearChange, is_scalar_matrix
from hessloci.poly import MPoly, change_of_vars, parse_poly
from hessloci.regression import cyclic_extension, example_fourfold
from hessloci.ts import (INCONCLUSIVE, NOT_TS, TS, PreconditionError, TSCertificate, detect_ts, is_cyclic,
                         random_ts_cubic, splitting_operator_space, verify_split, _idempotent_split, _try_split)

FERMAT2 = parse_poly("x0^3 + x1^3 + x2^3")


def test_fermat_z_is_diagonal():
    Z = splitting_operator_space(build_apolar_ring(FERMAT2))
    assert Z.dim == 3
    # pairs i <= j, three A2 coordinates each, nine unknowns
    assert Z.system_shape == (18, 9)
    for B in Z.basis:
        assert all(B[i][j] == 0 for i in range(3) for j in range(3) if i != j)


def test_random_quinary_z_scalar():
    Z = splitting_operator_space(build_apolar_ring(random_smooth_cubic(5, seed=0)))
    assert Z.dim == 1 and is_scalar_matrix(Z.basis[0])


def test_cyclic_z_contains_projection():
    g = random_smooth_cubic(4, seed=2)
    R = build_apolar_ring(cyclic_extension(g))
    Z = splitting_operator_space(R)
    assert Z.dim == 2
    # the projection onto e0 satisfies the identity because e0 * e_j = 0 for j > 0
    for j in range(1, 5):
        assert not any(R.mult([1, 0, 0, 0, 0], [1 if t == j else 0 for t in range(5)]))


def test_fermat_full_split():
    f = parse_poly("x0^3 + x1^3 + x2^3 + x3^3")
    cert = detect_ts(f)
    assert cert.verdict == TS and cert.block_sizes == [1, 1, 1, 1]
    assert verify_split(f, cert) == (True, None)


def test_fourfold_blocks():
    f = example_fourfold()
    cert = detect_ts(f)
    assert cert.verdict == TS and cert.block_sizes == [3, 3]
    assert cert.blocks == [[0, 1, 2], [3, 4, 5]]
    assert verify_split(f, cert)[0]
    assert not is_cyclic(f)


def test_scrambled_fourfold_round_trip():
    f0 = example_fourfold()
    rng = random.Random(4)
    while True:
        try:
            A = LinearChange(QQ, [[rng.randint(-2, 2) for _ in range(6)] for _ in range(6)])
            break
        except ValueError:
            pass
    f = change_of_vars(f0, A)
    cert = detect_ts(f, seed=1)
    assert cert.verdict == TS and cert.block_sizes == [3, 3]
    total = MPoly.zero(QQ, 6)
    for c in cert.components:
        total = total + c
    assert change_of_vars(f, cert.change) == total
    assert verify_split(f, cert)[0]


def test_corrupted_certificate_fails():
    f = example_fourfold()
    cert = detect_ts(f)
    M = [list(r) for r in cert.change.matrix]
    M[0][4] += 1
    bad = TSCertificate(TS, cert.field, LinearChange(QQ, M), cert.block_sizes, cert.components, cert.z_dim)
    ok, which = verify_split(f, bad)
    assert not ok and which == "i"


def test_cyclic_examples():
    assert is_cyclic(cyclic_extension(random_smooth_cubic(4, seed=3)))
    assert not is_cyclic(random_smooth_cubic(4, seed=3))


def test_preconditions():
    with pytest.raises(PreconditionError):
        detect_ts(parse_poly("x0*x1^2 + x1*x2^2 + x2*x3^2"))
    with pytest.raises(PreconditionError):
        detect_ts(parse_poly("x0^3 + x1^3", nvars_hint=3))
    with pytest.raises(PreconditionError):
        detect_ts(parse_poly("x0^4 + x1^4"))


@pytest.mark.parametrize("n,blocks", [(3, (1, 3)), (5, (3, 3)), (2, (1, 1, 1))])
def test_generator_examples(n, blocks):
    f, L = random_ts_cubic(n, blocks, seed=n)
    g = change_of_vars(f, L)
    starts = [sum(blocks[:t]) for t in range(len(blocks))]
    for e in g.terms:
        touched = {i for i, a in enumerate(e) if a}
        owners = {t for t in range(len(blocks)) for i in touched if starts[t] <= i < starts[t] + blocks[t]}
        assert len(owners) == 1
    cert = detect_ts(f, seed=n)
    assert cert.verdict == TS and sorted(cert.block_sizes) == sorted(blocks)


@pytest.mark.parametrize("seed", range(5))
def test_split_kernels_orthogonal(seed):
    f, _ = random_ts_cubic(4, (2, 3), seed=seed)
    R = build_apolar_ring(f)
    Z = splitting_operator_space(R)
    (U, V), reason = _try_split(R, Z, random.Random(seed), 8)
    assert reason is None and len(U) + len(V) == 5
    assert all(not any(R.mult(u, v)) for u in U for v in V)


def test_generator_rejects_bad_sizes():
    with pytest.raises(ValueError):
        random_ts_cubic(3, (2, 3))


def test_prime_field_input():
    f = example_fourfold(GF(1_000_003))
    cert = detect_ts(f)
    assert cert.verdict == TS and cert.field.p == 1_000_003
    assert verify_split(f, cert)[0]


@pytest.mark.parametrize("seed", range(8))
def test_not_ts_soundness(seed):
    f = random_smooth_cubic(4 + seed % 2, seed=500 + seed)
    cert = detect_ts(f, seed=seed)
    assert cert.verdict == NOT_TS and cert.z_dim == 1
    assert all(is_scalar_matrix(B) for B in cert.z_basis)


def test_certificate_json():
    d = detect_ts(example_fourfold()).to_json()
    assert d["verdict"] == TS and d["blocks"] == [3, 3] and len(d["change"]) == 6
    d = detect_ts(random_smooth_cubic(4, seed=1)).to_json()
    assert d == {"verdict": NOT_TS, "field": "q", "z_dim": 1, "evidence": "dim Z = 1"}
    assert INCONCLUSIVE == "INCONCLUSIVE"


def test_rational_idempotent_split_of_two_binary_blocks():
    # x^3+y^3 style binary blocks have Z = Q(sqrt a) x Q(sqrt b): no rational eigenvalues,
    # but the block projections are rational idempotents
    f, _ = random_ts_cubic(3, (2, 2), seed=8003)
    R = build_apolar_ring(f)
    Z = splitting_operator_space(R)
    found = _idempotent_split(R, Z, random.Random(1))
    assert found is not None
    U, V = found
    assert sorted((len(U), len(V))) == [2, 2]
    assert all(not any(R.mult(u, v)) for u in U for v in V)
    cert = detect_ts(f, seed=1)
    assert cert.block_sizes == [2, 2]
    assert verify_split(f, cert, seed=1) == (True, None)
