"""The family T = S^2 + (alpha z + (beta - 1) z^2) (x) 1.

It sends 1 to alpha z + beta z^2 and z^n to z^(n+2).  Its c-value is
|alpha|^2 + |beta|^2, and on the unit sphere it is unitarily a piece of S^2.
"""
# %%
import cmath

from rankone import seqcore as sc
from rankone.hardy import c_identity_check, intertwiner_u, isometry_condition, make_t_alpha_beta
from rankone.operators import apply

for a, b in [(3, 4), (1, 0), (0, 0), (1j, 2 - 1j)]:
    c, s = c_identity_check(a, b)
    print(f"alpha={a!s:6} beta={b!s:8}  c={c:8.4f}  |a|^2+|b|^2={s:8.4f}")

# %%
t = make_t_alpha_beta(0.6, 0.8j)
print("\nT e0 =", sc.coordinates(apply(t.op, sc.basis(0)), 4))
print("isometric:", isometry_condition(0.6, 0.8j))

# %%
a = cmath.exp(0.4j) / 2**0.5
b = cmath.exp(-1.1j) / 2**0.5
U, report = intertwiner_u(a, b)
print("U T = S^2 U residual:", report["intertwiningResidual"])
print("U isometric:", report["uIsometric"])
