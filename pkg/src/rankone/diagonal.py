"""Rank-one perturbations ``T = D + f (x) g`` of diagonal operators.

With ``D = diag(alpha_n)``, ``f = sum a_n e_n`` and ``g = sum b_n e_n``, everything
is governed by

    r = 1 + sum_n a_n conj(b_n) / alpha_n

together with square-summability of ``a_n / alpha_n``.  Under the standing
assumption that no ``alpha_n``, ``a_n`` or ``b_n`` vanishes, ``T`` is
left-invertible iff it is invertible, which happens iff ``D`` is invertible
and ``r != 0``.  The inverse is explicit:

    x = D^{-1} y - (1/r) <D^{-1} y, g> D^{-1} f.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from . import seqcore as sc
from .errors import (
    ConsistencyError,
    Divergent,
    SingularD,
    StandingAssumptionViolated,
    ZeroR,
)
from .operators import Diagonal, OperatorExpr, RankOne, Sum, apply
from .seqcore import DiagonalSymbol, GeomTailSeq

R_ZERO_TOL = 1e-12
CROSS_TOL = 1e-13


class DiagonalVerdict(str, enum.Enum):
    INVERTIBLE = "Invertible"
    NOT_INJECTIVE = "NotInjective"
    NOT_LEFT_INVERTIBLE = "NotLeftInvertible"


@dataclass(frozen=True)
class DiagonalDiagnostics:
    r: complex | None
    squareSummable: bool
    dInvertible: bool
    standingAssumption: bool
    verdict: DiagonalVerdict
    kernelWitness: GeomTailSeq | None = None
    ionascu: complex | None = None


def perturbed(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq) -> OperatorExpr:
    return Sum((Diagonal(D), RankOne(f, g)))


def _nonzero_coefficients(v: GeomTailSeq) -> bool:
    # every coordinate nonzero: nonzero prefix and one nonvanishing geometric tail
    if any(x == 0 for x in v.prefix):
        return False
    return len(v.tails) == 1 and v.tails[0].scale != 0 and v.tails[0].ratio != 0


def standing_assumption(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq) -> bool:
    return D.all_nonzero and _nonzero_coefficients(f) and _nonzero_coefficients(g)


def _require_standing(D, f, g):
    if not D.all_nonzero:
        raise StandingAssumptionViolated("D has a zero diagonal entry")
    if not _nonzero_coefficients(f):
        raise StandingAssumptionViolated("f has a zero Fourier coefficient")
    if not _nonzero_coefficients(g):
        raise StandingAssumptionViolated("g has a zero Fourier coefficient")


def r_value(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq) -> complex:
    """``1 + sum a_n conj(b_n) / alpha_n`` summed in closed form."""
    L = max(len(D.prefix), len(f.prefix), len(g.prefix))
    f, g = f.rebased(L), g.rebased(L)
    total = 1 + 0j
    for n in range(L):
        term = f.prefix[n] * g.prefix[n].conjugate()
        if term != 0:
            alpha = D.entry(n)
            if alpha == 0:
                raise Divergent(f"alpha_{n} = 0 against a nonzero a_n conj(b_n)")
            total += term / alpha
    sigma, s = D.entry(L), D.ratio
    for ta in f.tails:
        for tb in g.tails:
            num = ta.scale * tb.scale.conjugate()
            if num == 0:
                continue
            if sigma == 0 or s == 0:
                raise Divergent("diagonal tail vanishes under a nonzero a_n conj(b_n) tail")
            q = ta.ratio * tb.ratio.conjugate() / s
            if abs(q) >= 1:
                raise Divergent(f"series for r has geometric ratio of modulus {abs(q):.6g} >= 1")
            total += num / sigma / (1 - q)
    return total


def inverse_image(D: DiagonalSymbol, f: GeomTailSeq) -> GeomTailSeq:
    """``sum (a_n / alpha_n) e_n``; not necessarily in l2."""
    try:
        return sc.diagonal_inverse_apply(D, f)
    except ZeroDivisionError as exc:
        raise Divergent(str(exc)) from exc


def square_summable(D: DiagonalSymbol, f: GeomTailSeq) -> bool:
    """Whether ``{a_n / alpha_n}`` is in l2 (sufficient test: all tail ratios inside the disc)."""
    return inverse_image(D, f).is_l2


def kernel_criterion(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq):
    """``T`` has zero as an eigenvalue iff ``r = 0`` and ``a_n / alpha_n`` is square summable.

    Returns ``(has_kernel, witness)`` with ``witness = D^{-1} f`` when the kernel is nontrivial.
    """
    _require_standing(D, f, g)
    r = r_value(D, f, g)
    x = inverse_image(D, f)
    if abs(r) <= R_ZERO_TOL and x.is_l2:
        return True, x
    return False, None


def basis_range_criterion(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq, j: int):
    """Whether ``e_j`` is in the range of ``T``, with the explicit preimage when it is."""
    _require_standing(D, f, g)
    r = r_value(D, f, g)
    x = inverse_image(D, f)
    if abs(r) <= R_ZERO_TOL or not x.is_l2:
        return False, None
    alpha_j = D.entry(j)
    b_j = sc.coordinate(g, j)
    y = sc.scale(x, -b_j.conjugate() / (r * alpha_j)) + sc.scale(sc.basis(j), 1 / alpha_j)
    return True, y


def invertibility_verdict(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq) -> DiagonalDiagnostics:
    _require_standing(D, f, g)
    try:
        r = r_value(D, f, g)
    except Divergent:
        r = None
    ss = square_summable(D, f)
    if not D.invertible:
        return DiagonalDiagnostics(r, ss, False, True, DiagonalVerdict.NOT_LEFT_INVERTIBLE)
    # D invertible: D^{-1} f is in l2 and r is the convergent pairing
    x = inverse_image(D, f)
    ionascu = 1 + sc.inner_product(x, g)
    if abs(ionascu - r) > CROSS_TOL * max(1.0, abs(r)):
        raise ConsistencyError(f"r = {r!r} but 1 + <D^-1 f, g> = {ionascu!r}")
    if abs(r) <= R_ZERO_TOL:
        out = DiagonalDiagnostics(r, ss, True, True, DiagonalVerdict.NOT_INJECTIVE, x, ionascu)
    else:
        out = DiagonalDiagnostics(r, ss, True, True, DiagonalVerdict.INVERTIBLE, None, ionascu)
    if (out.verdict is DiagonalVerdict.INVERTIBLE) != (abs(ionascu) > R_ZERO_TOL):
        raise ConsistencyError("verdict disagrees with the 1 + <D^-1 f, g> != 0 criterion")
    return out


def solve(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq, y: GeomTailSeq) -> GeomTailSeq:
    """Solve ``(D + f (x) g) x = y``. Needs only ``D`` invertible and ``r != 0``."""
    if not D.invertible:
        raise SingularD("D is not invertible (inf |alpha_n| = 0 or unbounded)")
    Dinv_f = inverse_image(D, f)
    r = 1 + sc.inner_product(Dinv_f, g)
    if abs(r) <= R_ZERO_TOL:
        raise ZeroR(f"r = {r!r}; D + f (x) g is singular")
    Dinv_y = inverse_image(D, y)
    return Dinv_y - sc.scale(Dinv_f, sc.inner_product(Dinv_y, g) / r)


@dataclass(frozen=True)
class BoundedBelowReport:
    dBoundedBelow: bool
    tInjective: bool | None
    leftInvertible: bool
    tClosedRange: bool | None


def bounded_below_checks(D: DiagonalSymbol, f: GeomTailSeq, g: GeomTailSeq) -> BoundedBelowReport:
    """Finite rendering of: D bounded below and T injective => T left-invertible.

    The implication is checked against the invertibility verdict rather than proved.
    """
    diag = invertibility_verdict(D, f, g)
    d_bb = D.invertible
    if not d_bb:
        return BoundedBelowReport(False, None, False, None)
    has_kernel, witness = kernel_criterion(D, f, g)
    injective = not has_kernel
    if has_kernel and sc.norm(apply(perturbed(D, f, g), witness)) > 1e-12 * max(1.0, sc.norm(witness)):
        raise ConsistencyError("kernel witness is not annihilated by T")
    left_inv = injective
    if left_inv != (diag.verdict is DiagonalVerdict.INVERTIBLE):
        raise ConsistencyError("bounded-below chain disagrees with the invertibility verdict")
    # D has closed range here, so T does too
    return BoundedBelowReport(True, injective, left_inv, True)
