"""Random instance generators shared by the test modules."""

import numpy as np

from rankone import seqcore as sc
from rankone.operators import ShiftPow

ACCEPTANCE_LINES = []


def unit(v):
    return sc.scale(v, 1 / sc.norm(v))


def random_pair(rng, **kw):
    return sc.random_vector(rng, **kw), sc.random_vector(rng, **kw)


def c_zero_instance(rng, p, finite_kernel):
    """f = V u and g with <u, g> = -1, so c = 0 and T u = 0."""
    u = sc.random_vector(rng, finite=finite_kernel)
    if finite_kernel:
        u = sc.GeomTailSeq(u.prefix[:6] or (1,))
    f = sc.shift_right(u, p)
    g0 = sc.random_vector(rng)
    b0 = sc.inner_product(u, g0)
    t = ((-1 - b0) / sc.norm_sq(u)).conjugate()
    g = g0 + sc.scale(u, t)
    return ShiftPow(p), f, g, u


def record(label, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
    assert ok, f"{label}: {detail}"


def partial_inner(u, v, n):
    a, b = sc.coordinates(u, n), sc.coordinates(v, n)
    return complex(np.sum(a * np.conj(b)))




def _nonzero_prefix(rng, n):
    return tuple(complex(z) for z in np.atleast_1d(sc.random_complex(rng, n))) if n else ()


def nonvanishing_vector(rng, max_prefix=5):
    """Every coordinate nonzero: a nonzero prefix followed by one geometric tail."""
    L = int(rng.integers(0, max_prefix + 1))
    q = (0.2 + 0.6 * rng.random()) * np.exp(2j * np.pi * rng.random())
    return sc.GeomTailSeq(_nonzero_prefix(rng, L), (sc.GeomTail(complex(sc.random_complex(rng)), complex(q)),))


def random_diagonal(rng, invertible=True, max_prefix=4):
    L = int(rng.integers(0, max_prefix + 1))
    pre = tuple(z + 0.5 * z / abs(z) for z in _nonzero_prefix(rng, L))
    theta = 2 * np.pi * rng.random()
    modulus = 1.0 if invertible else 0.3 + 0.6 * rng.random()
    scale = (0.5 + rng.random()) * np.exp(2j * np.pi * rng.random())
    return sc.DiagonalSymbol(pre, complex(scale), complex(modulus * np.exp(1j * theta)))


def random_diagonal_config(rng, invertible=True):
    return random_diagonal(rng, invertible), nonvanishing_vector(rng), nonvanishing_vector(rng)
