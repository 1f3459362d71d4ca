"""The family ``T_{alpha,beta} = S^2 + (alpha z + (beta - 1) z^2) (x) 1`` on H^2.

Its matrix has first column ``(0, alpha, beta, 0, ...)`` and sends ``e_j`` to
``e_{j+2}`` for ``j >= 1``.  For ``|alpha|^2 + |beta|^2 = 1`` it is unitarily
equivalent to ``S^2`` restricted to the span of ``alpha + beta z, z^2, z^3, ...``
through ``U: e_0 -> alpha e_0 + beta e_1, e_n -> e_{n+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import seqcore as sc
from .errors import ConsistencyError, NotIsometricParameters
from .operators import OperatorExpr, RankOne, ShiftPow, Sum, apply, basis_map, isometry_check, random_probes
from .perturbation import c_value
from .seqcore import GeomTailSeq

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class TAlphaBeta:
    alpha: complex
    beta: complex
    f: GeomTailSeq
    g: GeomTailSeq
    op: OperatorExpr


def make_t_alpha_beta(alpha: complex, beta: complex) -> TAlphaBeta:
    alpha, beta = complex(alpha), complex(beta)
    f = sc.from_coefficients([0, alpha, beta - 1])
    g = sc.basis(0)
    return TAlphaBeta(alpha, beta, f, g, Sum((ShiftPow(2), RankOne(f, g))))


def c_identity_check(alpha: complex, beta: complex) -> tuple[float, float]:
    """``(c(S^2; f, 1), |alpha|^2 + |beta|^2)``; the two agree."""
    t = make_t_alpha_beta(alpha, beta)
    return c_value(ShiftPow(2), t.f, t.g), abs(t.alpha) ** 2 + abs(t.beta) ** 2


def isometry_condition(alpha: complex, beta: complex, probes: int = 20, seed: int = 0) -> bool:
    ok = abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) <= IDENTITY_TOL
    if ok and not isometry_check(make_t_alpha_beta(alpha, beta).op, probes, seed):
        raise ConsistencyError("unit parameters but T_{alpha,beta} fails the isometry probe")
    return ok


def intertwiner_u(alpha: complex, beta: complex, probes: int = 20, seed: int = 0):
    """Build ``U`` and verify ``U T = S^2 U`` and that ``U`` is isometric.

    Returns ``(U, report)``.
    """
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > IDENTITY_TOL:
        raise NotIsometricParameters(f"|alpha|^2 + |beta|^2 = {abs(alpha)**2 + abs(beta)**2!r}")
    U = basis_map([sc.from_coefficients([alpha, beta])], shift_after=1)
    T = make_t_alpha_beta(alpha, beta).op
    S2 = ShiftPow(2)
    rng = np.random.default_rng(seed)
    hs = [sc.basis(i) for i in range(8)] + random_probes(rng, probes)
    resid = max(sc.norm(apply(U, apply(T, h)) - apply(S2, apply(U, h))) / sc.norm(h) for h in hs)
    report = {
        "intertwiningResidual": resid,
        "uIsometric": isometry_check(U, probes, seed),
        "probes": len(hs),
    }
    return U, report
