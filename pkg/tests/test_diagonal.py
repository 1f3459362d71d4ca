import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone import seqcore as sc
from rankone.diagonal import (
    DiagonalVerdict,
    basis_range_criterion,
    bounded_below_checks,
    invertibility_verdict,
    kernel_criterion,
    perturbed,
    r_value,
    solve,
    square_summable,
    standing_assumption,
)
from rankone.errors import Divergent, SingularD, StandingAssumptionViolated, ZeroR
from rankone.operators import apply
from rankone.seqcore import DiagonalSymbol

from _instances import random_diagonal_config, unit

seeds = st.integers(0, 2**32 - 1)
ID = DiagonalSymbol.identity()


def partial_r(D, f, g, N=10_000):
    a, b, alpha = sc.coordinates(f, N), sc.coordinates(g, N), D.entries(N)
    return 1 + np.sum(a * np.conj(b) / alpha)


def test_identity_examples():
    f = sc.geometric(1, 0.5)
    g = sc.geometric(-0.75, 0.5)
    assert r_value(ID, f, g) == pytest.approx(0, abs=1e-15)
    d = invertibility_verdict(ID, f, g)
    assert d.verdict is DiagonalVerdict.NOT_INJECTIVE
    assert sc.norm(apply(perturbed(ID, f, g), d.kernelWitness)) <= 1e-15
    g2 = sc.geometric(0.3, 0.5)
    assert r_value(ID, f, g2) == pytest.approx(1.4, abs=1e-15)
    assert invertibility_verdict(ID, f, g2).verdict is DiagonalVerdict.INVERTIBLE


def test_r_with_unimodular_tail():
    D = DiagonalSymbol((2, -1j), 1.5, np.exp(0.7j))
    f, g = sc.GeomTailSeq((1, 2), (sc.GeomTail(1, 0.5j),)), sc.GeomTailSeq((3,), (sc.GeomTail(-1, 0.4),))
    assert r_value(D, f, g) == pytest.approx(partial_r(D, f, g), abs=1e-12)


def test_compact_diagonal_is_not_left_invertible():
    D = DiagonalSymbol((), 1, 0.5)
    f, g = sc.geometric(1, 0.3), sc.geometric(1, 0.3)
    assert not D.invertible
    d = invertibility_verdict(D, f, g)
    assert d.verdict is DiagonalVerdict.NOT_LEFT_INVERTIBLE
    assert not d.dInvertible
    # a_n / alpha_n = 0.6^n is still square summable here
    assert d.squareSummable
    assert not square_summable(D, sc.geometric(1, 0.6))
    with pytest.raises(SingularD):
        solve(D, f, g, sc.basis(0))
    rep = bounded_below_checks(D, f, g)
    assert not rep.dBoundedBelow and not rep.leftInvertible


def test_divergent_r_is_reported():
    D = DiagonalSymbol((), 1, 0.2)
    f, g = sc.geometric(1, 0.5), sc.geometric(1, 0.5)
    with pytest.raises(Divergent):
        r_value(D, f, g)
    assert invertibility_verdict(D, f, g).r is None


def test_standing_assumption():
    f, g = sc.geometric(1, 0.5), sc.geometric(1, 0.5)
    assert standing_assumption(ID, f, g)
    assert not standing_assumption(ID, sc.basis(0), g)
    assert not standing_assumption(DiagonalSymbol((0,), 1, 1), f, g)
    with pytest.raises(StandingAssumptionViolated):
        invertibility_verdict(ID, sc.GeomTailSeq((1, 0), (sc.GeomTail(1, 0.5),)), g)
    with pytest.raises(StandingAssumptionViolated):
        kernel_criterion(ID, f, sc.basis(2))


def test_solve_needs_no_standing_assumption():
    x = solve(ID, sc.basis(0), sc.basis(1), sc.basis(1))
    # (I + e0 (x) e1) x = e1  gives  x = e1 - e0 / 1
    assert sc.distance(x, sc.basis(1) - sc.basis(0)) <= 1e-15
    with pytest.raises(ZeroR):
        solve(ID, sc.basis(0), -sc.basis(0), sc.basis(1))


def test_basis_preimages_on_identity():
    f, g = sc.geometric(1, 0.5), sc.geometric(0.3, 0.5)
    T = perturbed(ID, f, g)
    for j in (0, 1, 2, 5, 10):
        ok, y = basis_range_criterion(ID, f, g, j)
        assert ok
        assert sc.distance(apply(T, y), sc.basis(j)) <= 1e-14
    ok, y = basis_range_criterion(ID, f, sc.geometric(-0.75, 0.5), 3)
    assert not ok and y is None


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_r_matches_partial_sums(seed):
    D, f, g = random_diagonal_config(np.random.default_rng(seed))
    r = r_value(D, f, g)
    assert abs(r - partial_r(D, f, g)) <= 1e-10 * max(1, abs(r))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_solve_inverts(seed):
    rng = np.random.default_rng(seed)
    D, f, g = random_diagonal_config(rng)
    d = invertibility_verdict(D, f, g)
    assert abs(d.ionascu - d.r) <= 1e-13 * max(1, abs(d.r))
    if d.verdict is not DiagonalVerdict.INVERTIBLE or abs(d.r) < 1e-3:
        return
    T = perturbed(D, f, g)
    y = unit(sc.random_vector(rng))
    x = solve(D, f, g, y)
    scale = max(1, sc.norm(x)) * max(1, sc.norm(f) * sc.norm(g))
    assert sc.distance(apply(T, x), y) <= 1e-13 * scale
    rep = bounded_below_checks(D, f, g)
    assert rep.leftInvertible and rep.tInjective


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_forced_zero_r_has_kernel(seed):
    # rescale g so that r = 0 exactly in exact arithmetic
    rng = np.random.default_rng(seed)
    D, f, g = random_diagonal_config(rng)
    s = r_value(D, f, g) - 1
    g = sc.scale(g, (-1 / s).conjugate())
    has_kernel, w = kernel_criterion(D, f, g)
    assert has_kernel
    assert sc.norm(apply(perturbed(D, f, g), w)) <= 1e-12 * max(1, sc.norm(w)) * max(1, sc.norm(f) * sc.norm(g))
    assert invertibility_verdict(D, f, g).verdict is DiagonalVerdict.NOT_INJECTIVE


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_non_invertible_diagonals(seed):
    D, f, g = random_diagonal_config(np.random.default_rng(seed), invertible=False)
    assert invertibility_verdict(D, f, g).verdict is DiagonalVerdict.NOT_LEFT_INVERTIBLE
