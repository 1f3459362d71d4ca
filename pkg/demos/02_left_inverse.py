"""When is V + f (x) g left-invertible, and what is a left inverse?

The answer depends on one real number c. This script walks through a
left-invertible case, a degenerate one, and checks both against dense SVDs.
"""
# %%
from rankone import seqcore as sc
from rankone.operators import ShiftPow, apply
from rankone.oracle import residual_sweep, verdict_cross_check
from rankone.perturbation import c_value, left_inverse, perturbed, verdict

S = ShiftPow(1)
f = sc.basis(2) + sc.geometric(0.5, -0.4)
g = sc.geometric(1, 0.3j)

d = verdict(S, f, g)
print(f"c = {d.c:.6f}   verdict = {d.verdict.value}")
print("  ||f||^2, ||S*f||^2, ||g||^2 =", d.normF2, d.normVstarF2, d.normG2)

# %%
# The explicit left inverse L = X T* really is one: L T h = h on random probes.
T = perturbed(S, f, g)
L = left_inverse(S, f, g)
print("max ||L T h - h|| / ||h|| over 20 probes:", residual_sweep(L, T, probes=20))

# A wrong candidate (S* alone) is far off.
print("same for L = S*:", residual_sweep(S.H, T, probes=20))

# %%
# Degenerate case: f = S u with <u, g> = -1 makes T u = 0, so c must vanish.
u = sc.geometric(1, 0.5)
f0 = sc.shift_right(u, 1)
g0 = sc.scale(u, -1 / sc.norm_sq(u))
print("\nc =", c_value(S, f0, g0))
print("||T u|| =", sc.norm(apply(perturbed(S, f0, g0), u)))

# %%
# The dense oracle agrees: sigma_min is stable for c > 0 and collapses for c = 0.
print("\nc > 0:", verdict_cross_check(T, True)["sigmaMin"])
rep = verdict_cross_check(perturbed(S, f0, g0), False, dims=(64, 128, 256, 512))
print("c = 0:", rep["sigmaMin"])
