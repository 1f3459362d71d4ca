"""Lazy operator expressions acting exactly on :class:`GeomTailSeq` vectors.

Expressions are small immutable trees (shift powers, diagonals, rank-one
operators, scalar multiples, sums, products, adjoints).  Nothing is ever
materialized; :func:`apply` walks the tree.  Dense truncations live in
:mod:`rankone.oracle`.

    >>> from rankone.seqcore import basis
    >>> T = ShiftPow(1) + RankOne(basis(2), basis(0))
    >>> apply(T, basis(0)) == basis(1) + basis(2)
    True
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import seqcore as sc
from .seqcore import DiagonalSymbol, GeomTailSeq

ISOMETRY_TOL = 1e-12


class OperatorExpr:
    """Base class; supports ``A + B``, ``A - B``, ``A @ B``, ``lam * A`` and ``A(h)``."""

    def __call__(self, h: GeomTailSeq) -> GeomTailSeq:
        return apply(self, h)

    def __add__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Sum((self, other))

    def __sub__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Sum((self, Scale(-1, other)))

    def __neg__(self):
        return Scale(-1, self)

    def __matmul__(self, other):
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Compose(self, other)

    def __mul__(self, lam):
        if isinstance(lam, OperatorExpr):
            return NotImplemented
        return Scale(lam, self)

    __rmul__ = __mul__

    @property
    def H(self) -> "OperatorExpr":
        return adjoint(self)


@dataclass(frozen=True)
class Identity(OperatorExpr):
    pass


@dataclass(frozen=True)
class ShiftPow(OperatorExpr):
    """``S**p`` where ``S e_n = e_{n+1}``."""

    p: int = 1

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("shift power must be nonnegative")


@dataclass(frozen=True)
class Diagonal(OperatorExpr):
    d: DiagonalSymbol

    def __post_init__(self):
        if not self.d.bounded:
            raise sc.Unbounded(f"diagonal tail ratio {self.d.ratio} has modulus > 1")


@dataclass(frozen=True)
class RankOne(OperatorExpr):
    """``(f (x) g) h = <h, g> f``."""

    f: GeomTailSeq
    g: GeomTailSeq

    def __post_init__(self):
        if not (self.f.is_l2 and self.g.is_l2):
            raise sc.Divergent("rank-one factors must be l2 vectors")


@dataclass(frozen=True)
class Scale(OperatorExpr):
    lam: complex
    inner: OperatorExpr

    def __post_init__(self):
        object.__setattr__(self, "lam", sc._as_complex(self.lam, "operator scalar"))


@dataclass(frozen=True)
class Sum(OperatorExpr):
    terms: tuple[OperatorExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Compose(OperatorExpr):
    """``left @ right``: apply ``right`` first."""

    left: OperatorExpr
    right: OperatorExpr


@dataclass(frozen=True)
class Adjoint(OperatorExpr):
    inner: OperatorExpr


def adjoint(op: OperatorExpr) -> OperatorExpr:
    """Structural adjoint. Only shift powers keep an explicit :class:`Adjoint` node."""
    if isinstance(op, Identity):
        return op
    if isinstance(op, ShiftPow):
        return Adjoint(op)
    if isinstance(op, Adjoint):
        return op.inner
    if isinstance(op, Diagonal):
        return Diagonal(op.d.conj())
    if isinstance(op, RankOne):
        return RankOne(op.g, op.f)
    if isinstance(op, Scale):
        return Scale(op.lam.conjugate(), adjoint(op.inner))
    if isinstance(op, Sum):
        return Sum(tuple(adjoint(t) for t in op.terms))
    if isinstance(op, Compose):
        return Compose(adjoint(op.right), adjoint(op.left))
    raise TypeError(f"not an operator expression: {op!r}")


def apply(op: OperatorExpr, h: GeomTailSeq) -> GeomTailSeq:
    if isinstance(op, Identity):
        return h
    if isinstance(op, ShiftPow):
        return sc.shift_right(h, op.p)
    if isinstance(op, Diagonal):
        return sc.pointwise_diagonal(op.d, h)
    if isinstance(op, RankOne):
        return sc.scale(op.f, sc.inner_product(h, op.g))
    if isinstance(op, Scale):
        return sc.scale(apply(op.inner, h), op.lam)
    if isinstance(op, Sum):
        out = sc.zero()
        for t in op.terms:
            out = sc.add(out, apply(t, h))
        return out
    if isinstance(op, Compose):
        return apply(op.left, apply(op.right, h))
    if isinstance(op, Adjoint):
        if isinstance(op.inner, ShiftPow):
            return sc.shift_left(h, op.inner.p)
        return apply(adjoint(op.inner), h)
    raise TypeError(f"not an operator expression: {op!r}")


def power(op: OperatorExpr, k: int) -> OperatorExpr:
    """``op**k`` as a right-nested composition (``Identity`` for ``k == 0``)."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    out: OperatorExpr = Identity()
    for _ in range(k):
        out = op if isinstance(out, Identity) else Compose(op, out)
    return out


def max_shift(op: OperatorExpr) -> int:
    """Upper bound on how far ``op`` can push a finitely supported vector down."""
    if isinstance(op, ShiftPow):
        return op.p
    if isinstance(op, Scale):
        return max_shift(op.inner)
    if isinstance(op, Sum):
        return max((max_shift(t) for t in op.terms), default=0)
    if isinstance(op, Compose):
        return max_shift(op.left) + max_shift(op.right)
    if isinstance(op, RankOne):
        return op.f.support_bound if op.f.is_finite else 0
    return 0


def rank_one_compose(f, g, f1, g1) -> tuple[complex, RankOne]:
    """``(f (x) g)(f1 (x) g1) = <f1, g> f (x) g1``; returns the scalar and the rank-one."""
    return sc.inner_product(f1, g), RankOne(f, g1)


def rank_one_norm(f: GeomTailSeq, g: GeomTailSeq) -> float:
    return float(np.sqrt(sc.norm_sq(f) * sc.norm_sq(g)))


def random_probes(rng: np.random.Generator, count: int, **kw) -> list[GeomTailSeq]:
    return [sc.random_vector(rng, **kw) for _ in range(count)]


def isometry_check(op: OperatorExpr, probes: int = 20, seed: int = 0) -> bool:
    """Necessary-condition test: ``||op h||^2 == ||h||^2`` on random probes.

    Passing does not prove ``op`` is an isometry.
    """
    rng = np.random.default_rng(seed)
    for h in random_probes(rng, probes):
        n0 = sc.norm_sq(h)
        if abs(sc.norm_sq(apply(op, h)) - n0) > ISOMETRY_TOL * max(1.0, n0):
            return False
    return True


def basis_map(images: Sequence[GeomTailSeq], shift_after: int) -> OperatorExpr:
    """Operator sending ``e_i -> images[i]`` for ``i < k`` and ``e_n -> e_{n+shift_after}`` for ``n >= k``.

    Built from existing leaves: ``S**s (I - P_k) + sum_i images[i] (x) e_i``.
    """
    k = len(images)
    head = Sum(tuple(RankOne(sc.basis(i), sc.basis(i)) for i in range(k)))
    rest: OperatorExpr = Compose(ShiftPow(shift_after), Sum((Identity(), Scale(-1, head)))) if k else ShiftPow(shift_after)
    return Sum((rest,) + tuple(RankOne(img, sc.basis(i)) for i, img in enumerate(images)))
