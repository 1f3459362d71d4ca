"""Dense-truncation ground truth.

Operators are materialized as ``m x n`` matrices (images of ``e_0 .. e_{n-1}``
cut to ``m`` rows) and their smallest singular value is taken from a plain
dense SVD.  The SVD sees only raw matrix entries, never the closed-form inner
products used by the verdict code, so the two routes are independent.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import seqcore as sc
from .operators import (
    Adjoint,
    Diagonal,
    Identity,
    OperatorExpr,
    RankOne,
    Scale,
    ShiftPow,
    Sum,
    adjoint,
    apply,
    max_shift,
)

DEFAULT_DIMS = (64, 128, 256)
DRIFT_TOL = 0.05
SINGULAR_TOL = 0.05
EXACT_KERNEL_TOL = 1e-12
NONZERO_FLOOR = 1e-10


@dataclass(frozen=True)
class DenseTruncation:
    entries: np.ndarray
    tailError: float

    @property
    def shape(self):
        return self.entries.shape


def default_rows(op: OperatorExpr, n: int) -> int:
    return n + max_shift(op) + 8


def _structural(op: OperatorExpr, n: int, m: int):
    # (m x n block, [(coeffs over columns, tail vector beyond row m)]) or None
    if isinstance(op, Identity):
        return np.eye(m, n, dtype=complex), []
    if isinstance(op, ShiftPow):
        if m < n + op.p:
            return None
        return np.eye(m, n, k=-op.p, dtype=complex), []
    if isinstance(op, Adjoint):
        if isinstance(op.inner, ShiftPow):
            return np.eye(m, n, k=op.inner.p, dtype=complex), []
        return _structural(adjoint(op.inner), n, m)
    if isinstance(op, Diagonal):
        return np.eye(m, n, dtype=complex) * op.d.entries(n), []
    if isinstance(op, RankOne):
        gc = np.conj(sc.coordinates(op.g, n))
        w = sc.shift_left(op.f, m)
        tails = [(gc, w)] if w != sc.zero() else []
        return np.outer(sc.coordinates(op.f, m), gc), tails
    if isinstance(op, Scale):
        inner = _structural(op.inner, n, m)
        if inner is None:
            return None
        block, tails = inner
        return op.lam * block, [(op.lam * c, w) for c, w in tails]
    if isinstance(op, Sum):
        block = np.zeros((m, n), dtype=complex)
        tails = []
        for t in op.terms:
            part = _structural(t, n, m)
            if part is None:
                return None
            block += part[0]
            tails += part[1]
        return block, tails
    return None


def _tail_norms(tails, n: int) -> np.ndarray:
    if not tails:
        return np.zeros(n)
    C = np.array([c for c, _ in tails]).T
    W = [w for _, w in tails]
    G = np.array([[sc.inner_product(a, b) for b in W] for a in W])
    sq = np.einsum("jr,rs,js->j", C, G, C.conj()).real
    return np.sqrt(np.maximum(sq, 0.0))


def densify(op: OperatorExpr, n: int, m: int | None = None, structural: bool = True) -> DenseTruncation:
    """Column ``j`` holds the first ``m`` coordinates of ``op e_j``.

    ``tailError`` is the largest exact l2 norm of a column below row ``m``.
    Sums of leaves are assembled blockwise; anything else goes column by column
    through :func:`apply`.
    """
    if m is None:
        m = default_rows(op, n)
    if m < n:
        raise ValueError(f"need m >= n, got m={m}, n={n}")
    part = _structural(op, n, m) if structural else None
    if part is not None:
        block, tails = part
        return DenseTruncation(block, float(_tail_norms(tails, n).max(initial=0.0)))
    cols = np.zeros((m, n), dtype=complex)
    tail = 0.0
    for j in range(n):
        col = apply(op, sc.basis(j))
        cols[:, j] = sc.coordinates(col, m)
        tail = max(tail, sc.norm(sc.shift_left(col, m)))
    return DenseTruncation(cols, tail)


def smallest_singular_value(t: DenseTruncation | np.ndarray) -> float:
    a = t.entries if isinstance(t, DenseTruncation) else np.asarray(t)
    return float(np.linalg.svd(a, compute_uv=False).min())


def residual_sweep(L: OperatorExpr, T: OperatorExpr, probes: int = 20, seed: int = 0) -> float:
    """``max_h ||L(T h) - h|| / ||h||`` over random probes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        h = sc.random_vector(rng)
        worst = max(worst, sc.norm(apply(L, apply(T, h)) - h) / sc.norm(h))
    return worst


def sigma_sweep(op: OperatorExpr, dims, workers: int | None = None) -> dict[int, float]:
    """``{N: sigma_min(densify(op, N))}``; dimensions are independent and may run in parallel."""
    def one(n):
        return n, smallest_singular_value(densify(op, n))

    dims = list(dims)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            pairs = list(ex.map(one, dims))
    else:
        pairs = [one(n) for n in dims]
    return dict(sorted(pairs))


def verdict_cross_check(
    op: OperatorExpr,
    left_invertible: bool,
    dims=DEFAULT_DIMS,
    c: float | None = None,
    exact_kernel: bool = False,
) -> dict:
    """Compare a closed-form verdict with the behavior of ``sigma_min`` over truncations.

    Left-invertible: ``sigma_min`` positive at every size with relative drift <= 5%.
    Not left-invertible: ``sigma_min`` non-increasing and <= 0.05 at the largest size
    (<= 1e-12 everywhere when a finitely supported kernel vector exists).
    The ``0.5 sqrt(c)`` floor is reported only; it is a heuristic, not a proven bound.
    """
    sig = sigma_sweep(op, dims)
    vals = np.array(list(sig.values()))
    top = vals.max()
    drift = float((top - vals.min()) / top) if top > 0 else float("inf")
    report = {"sigmaMin": {str(k): v for k, v in sig.items()}, "drift": drift}
    if left_invertible:
        passed = bool(vals.min() > NONZERO_FLOOR and drift <= DRIFT_TOL)
        if c is not None:
            report["heuristicFloor"] = 0.5 * float(np.sqrt(c))
            report["aboveHeuristicFloor"] = bool(vals.min() >= 0.5 * np.sqrt(c))
    else:
        monotone = bool(np.all(np.diff(vals) <= 1e-12))
        if exact_kernel:
            passed = bool(np.all(vals <= EXACT_KERNEL_TOL))
        else:
            passed = monotone and bool(vals[-1] <= SINGULAR_TOL)
        report["nonIncreasing"] = monotone
    report["passed"] = passed
    return report
