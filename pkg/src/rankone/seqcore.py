"""Exact arithmetic on eventually-geometric complex sequences.

A vector is stored as a finite prefix ``v_0 .. v_{L-1}`` followed by a finite
sum of geometric tails: for ``n >= L`` the coordinate is
``sum_i scale_i * ratio_i ** (n - L)``.  Every series the library needs
(inner products, norms, diagonal sums) is geometric and is summed in closed
form, so identities such as ``||S v|| = ||v||`` hold to rounding error instead
of truncation error.

Instances are immutable and always canonical: tails sharing a ratio are
merged and zero-scale tails are dropped.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import Divergent, OutOfDisc, TailCapExceeded, Unbounded

DEFAULT_TAIL_CAP = 64
_tail_cap = contextvars.ContextVar("tail_cap", default=DEFAULT_TAIL_CAP)

# slack on |ratio| <= 1 for diagonal symbols built from unimodular floats
UNIT_SLACK = 1e-12
RATIO_MERGE_ULPS = 16
_EPS = sys.float_info.epsilon


@contextlib.contextmanager
def tail_cap(limit: int):
    """Temporarily change the maximum number of tails a sequence may carry."""
    token = _tail_cap.set(int(limit))
    try:
        yield
    finally:
        _tail_cap.reset(token)


def _as_complex(x, what="value") -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must be finite, got {z!r}")
    return z


@dataclass(frozen=True)
class GeomTail:
    """The sequence ``scale * ratio**t`` for ``t = 0, 1, ...``."""

    scale: complex
    ratio: complex

    def __post_init__(self):
        object.__setattr__(self, "scale", _as_complex(self.scale, "tail scale"))
        object.__setattr__(self, "ratio", _as_complex(self.ratio, "tail ratio"))

    def at(self, t: int) -> complex:
        return self.scale * self.ratio**t

    def advanced(self, k: int) -> "GeomTail":
        """The same tail started ``k`` steps later."""
        return GeomTail(self.at(k), self.ratio)


def _canonical_tails(tails: Iterable[GeomTail]) -> tuple[GeomTail, ...]:
    # ratios that differ only by rounding (e.g. (q / s) * s) are the same tail; left
    # apart, their cancellation is invisible to the closed-form norm
    ratios: list[complex] = []
    scales: list[complex] = []
    for t in tails:
        for i, q in enumerate(ratios):
            if abs(t.ratio - q) <= RATIO_MERGE_ULPS * _EPS * max(abs(q), abs(t.ratio)):
                scales[i] += t.scale
                break
        else:
            ratios.append(t.ratio)
            scales.append(t.scale)
    out = tuple(GeomTail(s, q) for q, s in zip(ratios, scales) if s != 0)
    cap = _tail_cap.get()
    if len(out) > cap:
        raise TailCapExceeded(f"sequence needs {len(out)} geometric tails, cap is {cap}")
    return out


@dataclass(frozen=True)
class GeomTailSeq:
    prefix: tuple[complex, ...] = ()
    tails: tuple[GeomTail, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "prefix", tuple(_as_complex(x, "prefix entry") for x in self.prefix)
        )
        object.__setattr__(self, "tails", _canonical_tails(self.tails))

    @property
    def is_l2(self) -> bool:
        return all(abs(t.ratio) < 1 for t in self.tails)

    @property
    def is_finite(self) -> bool:
        """True if only finitely many coordinates are nonzero."""
        return all(t.ratio == 0 for t in self.tails)

    @property
    def support_bound(self) -> int:
        """Index past the last possibly-nonzero coordinate (finite support only)."""
        return len(self.prefix) + (1 if self.tails else 0)

    def __getitem__(self, n: int) -> complex:
        return coordinate(self, n)

    def __add__(self, other):
        if not isinstance(other, GeomTailSeq):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, GeomTailSeq):
            return NotImplemented
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, lam):
        if isinstance(lam, GeomTailSeq):
            return NotImplemented
        return scale(self, lam)

    __rmul__ = __mul__

    def __truediv__(self, lam):
        return scale(self, 1 / complex(lam))

    def conj(self) -> "GeomTailSeq":
        return GeomTailSeq(
            tuple(x.conjugate() for x in self.prefix),
            tuple(GeomTail(t.scale.conjugate(), t.ratio.conjugate()) for t in self.tails),
        )

    def rebased(self, length: int) -> "GeomTailSeq":
        """Same vector with the prefix extended to at least ``length`` entries."""
        L0 = len(self.prefix)
        if length <= L0:
            return self
        extra = [sum(t.at(k) for t in self.tails) for k in range(length - L0)]
        return GeomTailSeq(self.prefix + tuple(extra), tuple(t.advanced(length - L0) for t in self.tails))


def canonical(v: GeomTailSeq) -> GeomTailSeq:
    """Canonical form of ``v``. Construction already canonicalizes, so this is a re-wrap."""
    return GeomTailSeq(v.prefix, v.tails)


# -- constructors -----------------------------------------------------------


def zero() -> GeomTailSeq:
    return GeomTailSeq()


def basis(n: int) -> GeomTailSeq:
    """The standard basis vector e_n (the monomial z**n in H^2)."""
    if n < 0:
        raise ValueError("basis index must be nonnegative")
    return GeomTailSeq((0,) * n + (1,))


def from_coefficients(coeffs: Sequence[complex]) -> GeomTailSeq:
    return GeomTailSeq(tuple(coeffs))


def geometric(scale_: complex, ratio: complex, start: int = 0) -> GeomTailSeq:
    """``scale * ratio**(n - start)`` for ``n >= start``, zero before."""
    return GeomTailSeq((0,) * start, (GeomTail(scale_, ratio),))


def szego_kernel_vector(w: complex) -> GeomTailSeq:
    """Coefficients of the Szego kernel ``(1 - z conj(w))**-1``, i.e. ``conj(w)**n``."""
    w = _as_complex(w, "w")
    if abs(w) >= 1:
        raise OutOfDisc(f"|w| must be < 1, got {abs(w)}")
    return geometric(1, w.conjugate())


# -- arithmetic ---------------------------------------------------------------


def coordinate(v: GeomTailSeq, n: int) -> complex:
    if n < 0:
        raise IndexError("coordinate index must be nonnegative")
    L = len(v.prefix)
    if n < L:
        return v.prefix[n]
    return sum((t.at(n - L) for t in v.tails), 0j)


def coordinates(v: GeomTailSeq, n: int) -> np.ndarray:
    """First ``n`` coordinates as a complex array."""
    out = np.zeros(n, dtype=complex)
    L = min(len(v.prefix), n)
    out[:L] = v.prefix[:L]
    if n > len(v.prefix):
        t = np.arange(n - len(v.prefix))
        for tail in v.tails:
            if tail.ratio == 0:
                out[len(v.prefix)] += tail.scale
            else:
                out[len(v.prefix):] += tail.scale * tail.ratio**t
    return out


def scale(v: GeomTailSeq, lam: complex) -> GeomTailSeq:
    lam = _as_complex(lam, "scalar")
    return GeomTailSeq(
        tuple(lam * x for x in v.prefix),
        tuple(GeomTail(lam * t.scale, t.ratio) for t in v.tails),
    )


def add(u: GeomTailSeq, v: GeomTailSeq) -> GeomTailSeq:
    L = max(len(u.prefix), len(v.prefix))
    u, v = u.rebased(L), v.rebased(L)
    return GeomTailSeq(tuple(a + b for a, b in zip(u.prefix, v.prefix)), u.tails + v.tails)


def linear_combination(coeffs: Sequence[complex], vectors: Sequence[GeomTailSeq]) -> GeomTailSeq:
    out = zero()
    for c, v in zip(coeffs, vectors):
        out = add(out, scale(v, c))
    return out


def _pairing(u: GeomTailSeq, v: GeomTailSeq) -> complex:
    # sum_n u_n conj(v_n); only the pairwise tail products need to converge
    L = max(len(u.prefix), len(v.prefix))
    u, v = u.rebased(L), v.rebased(L)
    total = sum((a * b.conjugate() for a, b in zip(u.prefix, v.prefix)), 0j)
    for s in u.tails:
        for t in v.tails:
            q = s.ratio * t.ratio.conjugate()
            if abs(q) >= 1:
                raise Divergent(f"tail pair with ratio product of modulus {abs(q):.6g} >= 1")
            total += s.scale * t.scale.conjugate() / (1 - q)
    return total


def inner_product(u: GeomTailSeq, v: GeomTailSeq) -> complex:
    """``<u, v> = sum_n u_n conj(v_n)``, linear in the first slot."""
    if not (u.is_l2 and v.is_l2):
        raise Divergent("inner product needs both arguments in l2")
    return _pairing(u, v)


def norm_sq(v: GeomTailSeq) -> float:
    return max(inner_product(v, v).real, 0.0)


def norm(v: GeomTailSeq) -> float:
    return math.sqrt(norm_sq(v))


def shift_right(v: GeomTailSeq, p: int = 1) -> GeomTailSeq:
    """Unilateral shift: coordinate n of the result is ``v_{n-p}``."""
    if p < 0:
        raise ValueError("shift order must be nonnegative")
    return GeomTailSeq((0,) * p + v.prefix, v.tails)


def shift_left(v: GeomTailSeq, p: int = 1) -> GeomTailSeq:
    """Backward shift (adjoint of :func:`shift_right`): coordinate n is ``v_{n+p}``."""
    if p < 0:
        raise ValueError("shift order must be nonnegative")
    L = len(v.prefix)
    if p <= L:
        return GeomTailSeq(v.prefix[p:], v.tails)
    return GeomTailSeq((), tuple(t.advanced(p - L) for t in v.tails))


def distance(u: GeomTailSeq, v: GeomTailSeq) -> float:
    return norm(u - v)


# -- diagonal symbols ---------------------------------------------------------


@dataclass(frozen=True)
class DiagonalSymbol:
    """Diagonal entries: a finite prefix, then ``scale * ratio**(n - L)``.

    A constant tail is ``ratio == 1``.
    """

    prefix: tuple[complex, ...] = ()
    scale: complex = 1
    ratio: complex = 1

    def __post_init__(self):
        object.__setattr__(
            self, "prefix", tuple(_as_complex(x, "diagonal entry") for x in self.prefix)
        )
        object.__setattr__(self, "scale", _as_complex(self.scale, "diagonal scale"))
        object.__setattr__(self, "ratio", _as_complex(self.ratio, "diagonal ratio"))

    @classmethod
    def constant(cls, c: complex) -> "DiagonalSymbol":
        return cls((), c, 1)

    @classmethod
    def identity(cls) -> "DiagonalSymbol":
        return cls((), 1, 1)

    def entry(self, n: int) -> complex:
        L = len(self.prefix)
        if n < L:
            return self.prefix[n]
        return self.scale * self.ratio ** (n - L)

    def entries(self, n: int) -> np.ndarray:
        return coordinates(self.as_sequence(), n)

    def as_sequence(self) -> GeomTailSeq:
        return GeomTailSeq(self.prefix, (GeomTail(self.scale, self.ratio),))

    @property
    def bounded(self) -> bool:
        return self.scale == 0 or abs(self.ratio) <= 1 + UNIT_SLACK

    @property
    def tail_unimodular(self) -> bool:
        return abs(abs(self.ratio) - 1) <= UNIT_SLACK

    @property
    def all_nonzero(self) -> bool:
        return all(x != 0 for x in self.prefix) and self.scale != 0 and self.ratio != 0

    def inf_modulus(self) -> float:
        """``inf_n |alpha_n|``, exactly: the tail contributes its limit."""
        if self.scale == 0 or self.ratio == 0:
            tail_inf = 0.0
        elif abs(self.ratio) < 1 - UNIT_SLACK:
            tail_inf = 0.0
        else:
            tail_inf = abs(self.scale)
        return min([abs(x) for x in self.prefix] + [tail_inf])

    @property
    def invertible(self) -> bool:
        return self.bounded and self.inf_modulus() > 0

    def conj(self) -> "DiagonalSymbol":
        return DiagonalSymbol(
            tuple(x.conjugate() for x in self.prefix), self.scale.conjugate(), self.ratio.conjugate()
        )

    def reciprocal(self) -> "DiagonalSymbol":
        """Entrywise ``1 / alpha_n``; may be unbounded."""
        if not self.all_nonzero:
            raise ZeroDivisionError("diagonal symbol has a zero entry")
        return DiagonalSymbol(tuple(1 / x for x in self.prefix), 1 / self.scale, 1 / self.ratio)


def _pointwise(d: DiagonalSymbol, v: GeomTailSeq) -> GeomTailSeq:
    L = max(len(d.prefix), len(v.prefix))
    v = v.rebased(L)
    dp = tuple(d.entry(n) for n in range(L))
    ds, dq = d.entry(L), d.ratio
    return GeomTailSeq(
        tuple(a * x for a, x in zip(dp, v.prefix)),
        tuple(GeomTail(ds * t.scale, dq * t.ratio) for t in v.tails),
    )


def pointwise_diagonal(d: DiagonalSymbol, v: GeomTailSeq) -> GeomTailSeq:
    """Apply the diagonal operator ``diag(alpha_n)`` to ``v``."""
    if not d.bounded:
        raise Unbounded(f"diagonal tail ratio {d.ratio} has modulus > 1")
    return _pointwise(d, v)


def diagonal_inverse_apply(d: DiagonalSymbol, v: GeomTailSeq) -> GeomTailSeq:
    """``D^{-1} v`` for a symbol without zero entries. The result may leave l2."""
    return _pointwise(d.reciprocal(), v)


# -- random vectors -----------------------------------------------------------


def random_complex(rng: np.random.Generator, size=None):
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2)


def random_vector(
    rng: np.random.Generator,
    max_prefix: int = 6,
    max_tails: int = 2,
    max_ratio: float = 0.8,
    finite: bool | None = None,
) -> GeomTailSeq:
    """A random l2 vector: gaussian prefix plus up to ``max_tails`` geometric tails."""
    L = int(rng.integers(0, max_prefix + 1))
    prefix = tuple(complex(x) for x in np.atleast_1d(random_complex(rng, L))) if L else ()
    if finite is None:
        finite = rng.random() < 0.3
    k = 0 if finite else int(rng.integers(1, max_tails + 1))
    tails = []
    for _ in range(k):
        r = max_ratio * math.sqrt(rng.random())
        q = r * complex(np.exp(2j * math.pi * rng.random()))
        tails.append(GeomTail(complex(random_complex(rng)), q))
    v = GeomTailSeq(prefix, tuple(tails))
    if v == zero():
        return basis(0)
    return v
