import numpy as np
import pytest

from rankone import seqcore as sc
from rankone.operators import (
    Adjoint,
    Compose,
    Diagonal,
    Identity,
    RankOne,
    Scale,
    ShiftPow,
    Sum,
    adjoint,
    apply,
    basis_map,
    isometry_check,
    power,
    rank_one_compose,
    rank_one_norm,
)
from rankone.perturbation import nakamura_perturbation
from rankone.seqcore import DiagonalSymbol

e = sc.basis


def random_operator(rng, depth=2):
    leaf = int(rng.integers(0, 4))
    if depth == 0 or rng.random() < 0.3:
        if leaf == 0:
            return ShiftPow(int(rng.integers(0, 4)))
        if leaf == 1:
            ratio = 0.9 * np.exp(2j * np.pi * rng.random()) if rng.random() < 0.5 else 1
            return Diagonal(DiagonalSymbol(tuple(sc.random_complex(rng, 2)), sc.random_complex(rng), ratio))
        if leaf == 2:
            return RankOne(sc.random_vector(rng), sc.random_vector(rng))
        return Identity()
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return Scale(sc.random_complex(rng), random_operator(rng, depth - 1))
    if kind == 1:
        return Sum((random_operator(rng, depth - 1), random_operator(rng, depth - 1)))
    if kind == 2:
        return Compose(random_operator(rng, depth - 1), random_operator(rng, depth - 1))
    return Adjoint(random_operator(rng, depth - 1))


def close(u, v, tol=1e-13):
    return sc.distance(u, v) <= tol * max(1.0, sc.norm(u), sc.norm(v))


def test_apply_examples():
    assert apply(RankOne(e(1), e(0)), e(0)) == e(1)
    assert apply(Sum((ShiftPow(1), RankOne(e(2), e(0)))), e(0)) == e(1) + e(2)
    assert apply(Adjoint(ShiftPow(1)), e(0)) == sc.zero()


def test_operator_sugar():
    T = ShiftPow(1) + RankOne(e(2), e(0))
    assert T(e(0)) == e(1) + e(2)
    assert (2 * T)(e(0)) == 2 * (e(1) + e(2))
    assert (T @ T)(e(0)) == apply(T, apply(T, e(0)))
    assert sc.norm_sq((T - T)(e(3))) == 0
    assert T.H(e(1)) == e(0)


def test_adjoint_rank_one_rewrite(rng):
    f, g = sc.random_vector(rng), sc.random_vector(rng)
    assert adjoint(RankOne(f, g)) == RankOne(g, f)


def test_adjoint_of_compose_reverses(rng):
    for _ in range(20):
        A, B = random_operator(rng), random_operator(rng)
        h = sc.random_vector(rng)
        assert close(apply(adjoint(Compose(A, B)), h), apply(Compose(adjoint(B), adjoint(A)), h))


def test_adjoint_is_involution(rng):
    for _ in range(30):
        A = random_operator(rng)
        h = sc.random_vector(rng)
        assert close(apply(adjoint(adjoint(A)), h), apply(A, h))


def test_adjoint_correctness(rng):
    for _ in range(60):
        A = random_operator(rng, depth=3)
        u, v = sc.random_vector(rng), sc.random_vector(rng)
        lhs = sc.inner_product(apply(A, u), v)
        rhs = sc.inner_product(u, apply(adjoint(A), v))
        scale = max(1.0, sc.norm(apply(A, u)) * sc.norm(v), sc.norm(u) * sc.norm(apply(adjoint(A), v)))
        assert abs(lhs - rhs) <= 1e-13 * scale


def test_apply_is_linear(rng):
    for _ in range(40):
        A = random_operator(rng, depth=3)
        u, v = sc.random_vector(rng), sc.random_vector(rng)
        a, b = sc.random_complex(rng), sc.random_complex(rng)
        assert close(apply(A, a * u + b * v), a * apply(A, u) + b * apply(A, v))


def test_adjoint_against_dense_matrices(rng):
    # finite sections of finitely supported operators: adjoint is the conjugate transpose
    for _ in range(10):
        f, g = sc.random_vector(rng, finite=True), sc.random_vector(rng, finite=True)
        A = Sum((ShiftPow(2), RankOne(f, g), Diagonal(DiagonalSymbol((2, 1j), 3, 1))))
        N = 24
        M = np.array([sc.coordinates(apply(A, e(j)), N + 4) for j in range(N)]).T
        Mh = np.array([sc.coordinates(apply(adjoint(A), e(j)), N + 4) for j in range(N + 4)]).T
        assert np.allclose(Mh[:N, :], M.conj().T, atol=1e-14)


@pytest.mark.parametrize("p", [0, 1, 2, 5])
def test_shift_power_adjoint_is_left_inverse(rng, p):
    for _ in range(10):
        h = sc.random_vector(rng)
        assert apply(Adjoint(ShiftPow(p)), apply(ShiftPow(p), h)) == h


def test_rank_one_compose_examples(rng):
    lam, op = rank_one_compose(e(0), e(1), e(2), e(3))
    assert lam == 0
    lam, op = rank_one_compose(e(0), e(0), e(0), e(0))
    assert lam == 1 and op == RankOne(e(0), e(0))
    for _ in range(10):
        f, g, f1, g1 = (sc.random_vector(rng) for _ in range(4))
        lam, op = rank_one_compose(f, g, f1, g1)
        for _ in range(10):
            h = sc.random_vector(rng)
            assert close(apply(Scale(lam, op), h), apply(Compose(RankOne(f, g), RankOne(f1, g1)), h), 1e-12)


def test_rank_one_norm_examples():
    assert rank_one_norm(e(0), e(0)) == 1
    assert rank_one_norm(sc.zero(), e(4)) == 0
    assert rank_one_norm(sc.geometric(1, 0.5), e(3)) == pytest.approx(np.sqrt(4 / 3), abs=1e-15)


def test_isometry_check_examples():
    assert isometry_check(ShiftPow(2))
    assert not isometry_check(Diagonal(DiagonalSymbol.constant(2)))
    _, _, T = nakamura_perturbation(ShiftPow(1), sc.basis(1), 1j)
    assert isometry_check(T)


def test_power_and_basis_map():
    T = ShiftPow(1) + RankOne(e(2), e(0))
    assert apply(power(T, 0), e(0)) == e(0)
    assert apply(power(T, 2), e(0)) == apply(T, apply(T, e(0)))
    U = basis_map([e(5)], shift_after=1)
    assert apply(U, e(0)) == e(5)
    assert sc.distance(apply(U, e(3)), e(4)) == 0
