"""Left-invertibility of rank-one perturbations ``T = V + f (x) g`` of shift isometries.

With ``u = V* f`` and ``beta = <u, g>``, the constant

    c(V; f, g) = (||f||^2 - ||u||^2) ||g||^2 + |1 + beta|^2

is nonnegative, and ``T`` is left-invertible exactly when ``c > 0``.  In that
case ``L = X T*`` is an explicit left inverse, where

    X = I + (1/c) (||g||^2 u (x) u + (||u||^2 - ||f||^2) g (x) g - R - R*),
    R = (1 + <g, u>) u (x) g.

``V`` is restricted to shift powers ``S**p`` so that it is an isometry by
construction.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import seqcore as sc
from .errors import (
    ConsistencyError,
    NotAnIsometry,
    NotLeftInvertibleError,
    NotUnimodular,
    NotUnitVector,
)
from .operators import Compose, Identity, OperatorExpr, RankOne, Scale, ShiftPow, Sum, adjoint
from .seqcore import GeomTailSeq

DEFAULT_TOL = 1e-10
FORMULA_AGREEMENT = 1e-12
NEGATIVE_SLACK = 1e-13
UNIT_TOL = 1e-12


class Verdict(str, enum.Enum):
    LEFT_INVERTIBLE = "LeftInvertible"
    NOT_LEFT_INVERTIBLE = "NotLeftInvertible"


@dataclass(frozen=True)
class PerturbationDiagnostics:
    c: float
    beta: complex
    normF2: float
    normVstarF2: float
    normG2: float
    verdict: Verdict
    # (||V*f|| == ||f||, <V*f, g> == -1)
    witness: tuple[bool, bool]
    a: tuple[complex, complex, complex, complex] | None = None
    residual: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def left_invertible(self) -> bool:
        return self.verdict is Verdict.LEFT_INVERTIBLE


def shift_order(V: OperatorExpr) -> int:
    if not isinstance(V, ShiftPow):
        raise NotAnIsometry(f"V must be a structural shift power, got {type(V).__name__}")
    return V.p


@dataclass(frozen=True)
class _Parts:
    nf: float
    nu: float
    ng: float
    beta: complex
    u: GeomTailSeq


def _parts(V, f, g) -> _Parts:
    p = shift_order(V)
    u = sc.shift_left(f, p)
    return _Parts(sc.norm_sq(f), sc.norm_sq(u), sc.norm_sq(g), sc.inner_product(u, g), u)


def _c_from_parts(q: _Parts) -> float:
    c_def = (q.nf - q.nu) * q.ng + abs(1 + q.beta) ** 2
    c_exp = 1 + q.nf * q.ng + 2 * q.beta.real + abs(q.beta) ** 2 - q.nu * q.ng
    size = max(1.0, q.nf * q.ng, abs(q.beta) ** 2)
    if abs(c_def - c_exp) > FORMULA_AGREEMENT * size:
        raise ConsistencyError(f"c formulas disagree: {c_def!r} vs expanded {c_exp!r}")
    if c_def < -NEGATIVE_SLACK * size:
        raise ConsistencyError(f"c is negative beyond rounding: {c_def!r}")
    return max(c_def, 0.0)


def c_value(V: OperatorExpr, f: GeomTailSeq, g: GeomTailSeq) -> float:
    """The left-invertibility constant, cross-checked against its expanded form."""
    return _c_from_parts(_parts(V, f, g))


def _coefficients(q: _Parts, c: float) -> tuple[complex, complex, complex, complex]:
    # Coefficients of g(x)g, u(x)g, g(x)u, u(x)u in X T*T - I, left unsimplified.
    nf, nu, ng, b = q.nf, q.nu, q.ng, q.beta
    bb = b.conjugate()
    a1 = nf + (-(1 + b) * (nu + bb * nf) + (nu - nf) * ((1 + b) + nf * ng)) / c
    a2 = 1 + (ng * (nu + bb * nf) - (1 + bb) * ((1 + b) + nf * ng)) / c
    a3 = 1 + (-(1 + b) * bb - (1 + b) + (nu - nf) * ng) / c
    a4 = -(ng * (1 + bb) - (1 + bb) * ng) / c
    return complex(a1), complex(a2), complex(a3), complex(a4)


def verification_coefficients(V, f, g, tol: float = DEFAULT_TOL):
    q = _parts(V, f, g)
    c = _c_from_parts(q)
    if c <= tol:
        raise NotLeftInvertibleError(f"c = {c:.3e} <= {tol:g}")
    return _coefficients(q, c)


def verdict(V: OperatorExpr, f: GeomTailSeq, g: GeomTailSeq, tol: float = DEFAULT_TOL) -> PerturbationDiagnostics:
    q = _parts(V, f, g)
    c = _c_from_parts(q)
    same_norm = q.nf - q.nu <= tol * max(1.0, q.nf)
    beta_is_minus_one = abs(1 + q.beta) ** 2 <= tol
    witness = (same_norm, beta_is_minus_one)
    if c > tol:
        return PerturbationDiagnostics(
            c, q.beta, q.nf, q.nu, q.ng, Verdict.LEFT_INVERTIBLE, witness, _coefficients(q, c)
        )
    if not all(witness):
        raise ConsistencyError(f"c = {c:.3e} <= tol but the c = 0 witnesses are {witness}")
    return PerturbationDiagnostics(c, q.beta, q.nf, q.nu, q.ng, Verdict.NOT_LEFT_INVERTIBLE, witness)


def perturbed(V: OperatorExpr, f: GeomTailSeq, g: GeomTailSeq) -> OperatorExpr:
    """``V + f (x) g``."""
    return Sum((V, RankOne(f, g)))


def left_inverse(V: OperatorExpr, f: GeomTailSeq, g: GeomTailSeq, tol: float = DEFAULT_TOL) -> OperatorExpr:
    """Explicit left inverse ``X (V + f (x) g)*``; raises when ``c <= tol``."""
    q = _parts(V, f, g)
    c = _c_from_parts(q)
    if c <= tol:
        raise NotLeftInvertibleError(f"c = {c:.3e} <= {tol:g}: V + f (x) g has no left inverse")
    u = q.u
    # R + R* = (1 + conj(beta)) u (x) g + (1 + beta) g (x) u
    inner = Sum(
        (
            Scale(q.ng, RankOne(u, u)),
            Scale(q.nu - q.nf, RankOne(g, g)),
            Scale(-(1 + q.beta.conjugate()), RankOne(u, g)),
            Scale(-(1 + q.beta), RankOne(g, u)),
        )
    )
    X = Sum((Identity(), Scale(1 / c, inner)))
    return Compose(X, adjoint(perturbed(V, f, g)))


def nakamura_perturbation(V: OperatorExpr, h: GeomTailSeq, alpha: complex):
    """Isometric rank-one perturbation ``V + (alpha - 1) h (x) V* h``.

    Returns ``(f, g, T)`` with ``f = (alpha - 1) h`` and ``g = V* h``.
    """
    p = shift_order(V)
    alpha = complex(alpha)
    if abs(sc.norm_sq(h) - 1) > UNIT_TOL:
        raise NotUnitVector(f"||h||^2 = {sc.norm_sq(h)!r}, expected 1")
    if abs(abs(alpha) - 1) > UNIT_TOL:
        raise NotUnimodular(f"|alpha| = {abs(alpha)!r}, expected 1")
    f = sc.scale(h, alpha - 1)
    g = sc.shift_left(h, p)
    return f, g, perturbed(V, f, g)


def normalized(v: GeomTailSeq) -> GeomTailSeq:
    return sc.scale(v, 1 / math.sqrt(sc.norm_sq(v)))
