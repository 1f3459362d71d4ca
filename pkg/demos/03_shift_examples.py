"""Perturbations of M_z on H^2 that are again analytic.

With g the Szego kernel at w and f = -z^n / w^(n-1), the perturbation satisfies
S* g + <g, f> g = 0, which makes S^2 = V S and keeps every power inside ran V.
"""
# %%
from rankone import seqcore as sc
from rankone.analytic import (
    analyticity_probe,
    classify_vm_vn,
    kernel_condition_residual,
    perturbed_power,
    vm_vn_operator,
)
from rankone.operators import RankOne, ShiftPow, Sum, apply, power
from rankone.perturbation import c_value

S = ShiftPow(1)
w, n = 0.4 + 0.3j, 3
g = sc.szego_kernel_vector(w)

f = sc.scale(sc.basis(n), -1 / w ** (n - 1))
print("kernel condition residual:", kernel_condition_residual(S, f, g))

# Conjugating w in the exponent only works when w is real.
f_bar = sc.scale(sc.basis(n), -1 / w.conjugate() ** (n - 1))
print("with conj(w) instead     :", kernel_condition_residual(S, f_bar, g))

# %%
# These operators are analytic but not bounded below: c is zero.
print("c =", c_value(S, f, g))
T = Sum((S, RankOne(f, g)))
print("probe leakage:", analyticity_probe(T, 1, nval=n, depth=4).max_leakage)

# %%
# Small monomial cases.
print("\nc(S; z, 1)  =", c_value(S, sc.basis(1), sc.basis(0)))
print("c(S; z, -1) =", c_value(S, sc.basis(1), -sc.basis(0)))

# %%
# V + V^m f0 (x) V^n f0 has closed-form powers when m > n, and is a shift when m > n + 1.
f0 = sc.basis(0)
T = vm_vn_operator(3, 1, f0)
h = sc.geometric(1, -0.6)
for k in range(4):
    gap = sc.distance(apply(perturbed_power(3, 1, f0, k), h), apply(power(T, k + 1), h))
    print(f"k={k}: closed form vs iterated gap {gap:.1e}")
for m, nn in [(3, 1), (2, 1), (1, 1)]:
    cls, c = classify_vm_vn(m, nn, f0)
    print(f"m={m} n={nn}: {cls.value:9s} c={c:g}")
