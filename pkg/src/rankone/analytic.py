"""Powers and analyticity checks for ``S = V + V^m f0 (x) V^n f0`` and friends.

For ``f0`` in ``ker V*`` write ``f_t = V^t f0`` (``t >= 0``) and ``f_t = 0`` for
``t < 0``.  When ``m > n`` the powers collapse to

    S^{k+1} = V^{k+1} + sum_{j=0}^{k} f_{m+j} (x) f_{n-k+j}.

Analyticity (``cap_k S^k H = {0}``) cannot be decided from finite data; this
module certifies the known sufficient conditions and runs coordinate-vanishing
probes that can only refute.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import seqcore as sc
from .errors import ConsistencyError, PreconditionViolated
from .operators import OperatorExpr, RankOne, ShiftPow, Sum, apply, random_probes
from .perturbation import c_value, shift_order
from .seqcore import GeomTailSeq

KERNEL_TOL = 1e-12
LEAK_TOL = 1e-12


class Classification(str, enum.Enum):
    ANALYTIC = "Analytic"
    SHIFT = "Shift"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ShiftedFamily:
    """``f_t = V^t f0`` for ``t >= 0`` and ``V*^{-t} f0`` for ``t < 0``."""

    base: GeomTailSeq
    p: int = 1

    def __getitem__(self, t: int) -> GeomTailSeq:
        if t >= 0:
            return sc.shift_right(self.base, self.p * t)
        return sc.shift_left(self.base, -self.p * t)


def in_kernel_of_adjoint(f0: GeomTailSeq, p: int = 1) -> bool:
    return sc.norm_sq(sc.shift_left(f0, p)) == 0


def _check_kernel(f0, p):
    if not in_kernel_of_adjoint(f0, p):
        raise PreconditionViolated(f"f0 is not in ker (S^{p})*: it has mass beyond coordinate {p - 1}")


def vm_vn_operator(m: int, n: int, f0: GeomTailSeq, p: int = 1) -> OperatorExpr:
    """``V + V^m f0 (x) V^n f0`` with ``V = S**p``."""
    fam = ShiftedFamily(f0, p)
    return Sum((ShiftPow(p), RankOne(fam[m], fam[n])))


def perturbed_power(m: int, n: int, f0: GeomTailSeq, k: int, p: int = 1) -> OperatorExpr:
    """Closed form of ``(V + f_m (x) f_n)^{k+1}`` for ``m > n`` and ``f0 in ker V*``."""
    _check_kernel(f0, p)
    if m <= n:
        raise PreconditionViolated(f"need m > n, got m={m}, n={n}")
    if k < 0 or n < 0:
        raise PreconditionViolated("k and n must be nonnegative")
    fam = ShiftedFamily(f0, p)
    terms = [RankOne(fam[m + j], fam[n - k + j]) for j in range(k + 1)]
    return Sum((ShiftPow(p * (k + 1)), *terms))


def classify_vm_vn(m: int, n: int, f0: GeomTailSeq, p: int = 1) -> tuple[Classification, float]:
    """Classify ``V + V^m f0 (x) V^n f0``; also returns its constant ``c``.

    ``m > n + 1`` gives a shift, and then ``c`` must equal 1.
    """
    _check_kernel(f0, p)
    if sc.norm_sq(f0) == 0:
        raise PreconditionViolated("f0 must be nonzero")
    if m < 0 or n < 0:
        raise PreconditionViolated("m and n must be nonnegative")
    fam = ShiftedFamily(f0, p)
    c = c_value(ShiftPow(p), fam[m], fam[n])
    if m > n + 1:
        if abs(c - 1) > 1e-12:
            raise ConsistencyError(f"shift case must have c = 1, computed {c!r}")
        return Classification.SHIFT, c
    if m == n + 1:
        return Classification.ANALYTIC, c
    return Classification.UNKNOWN, c


def kernel_condition_residual(V: OperatorExpr, f: GeomTailSeq, g: GeomTailSeq) -> float:
    """``||V* g + <g, f> g||``."""
    p = shift_order(V)
    r = sc.shift_left(g, p) + sc.inner_product(g, f) * g
    return sc.norm(r)


def kernel_condition_check(V: OperatorExpr, f: GeomTailSeq, g: GeomTailSeq, tol: float = KERNEL_TOL) -> bool:
    """True when ``V* g + <g, f> g = 0``, which makes ``V + f (x) g`` analytic."""
    return kernel_condition_residual(V, f, g) <= tol


def square_identity_residual(V, f, g, probes: int = 10, seed: int = 0) -> float:
    """Max over probes of ``||S(S h) - V(S h)||`` for ``S = V + f (x) g``."""
    S = Sum((V, RankOne(f, g)))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for h in random_probes(rng, probes):
        Sh = apply(S, h)
        worst = max(worst, sc.norm(apply(S, Sh) - apply(V, Sh)))
    return worst


@dataclass(frozen=True)
class ProbeRow:
    power: int
    max_leakage: float


@dataclass(frozen=True)
class ProbeReport:
    rows: tuple[ProbeRow, ...]

    @property
    def max_leakage(self) -> float:
        return max((r.max_leakage for r in self.rows), default=0.0)

    @property
    def clean(self) -> bool:
        return self.max_leakage <= LEAK_TOL

    def to_dict(self):
        return [{"power": r.power, "maxLeakage": r.max_leakage} for r in self.rows]


def analyticity_probe(
    S: OperatorExpr, shift_order_: int, nval: int, depth: int, probes: int = 10, seed: int = 0
) -> ProbeReport:
    """Check that ``S^{n+j+1} h`` vanishes on coordinates below ``p (n+j+1)``, ``j = 1..depth``.

    This is the range inclusion ``S^{n+j+1} H ⊆ V^{n+j+1} H`` tested on random probes; it is a
    necessary condition only.
    """
    rng = np.random.default_rng(seed)
    hs = random_probes(rng, probes)
    top = nval + depth + 1
    images = list(hs)
    leak = {}
    for power in range(1, top + 1):
        images = [apply(S, x) for x in images]
        if power >= nval + 2:
            cut = shift_order_ * power
            leak[power] = max(
                float(np.linalg.norm(sc.coordinates(x, cut))) / sc.norm(h) for x, h in zip(images, hs)
            )
    return ProbeReport(tuple(ProbeRow(k, v) for k, v in sorted(leak.items())))
