"""Diagonal plus rank-one: invertible exactly when D is and r != 0."""
# %%
import numpy as np

from rankone import seqcore as sc
from rankone.diagonal import (
    basis_range_criterion,
    invertibility_verdict,
    kernel_criterion,
    perturbed,
    r_value,
    solve,
)
from rankone.operators import apply
from rankone.seqcore import DiagonalSymbol

D = DiagonalSymbol((2, -1j), 1.5, np.exp(0.7j))  # eventually unimodular, so invertible
f = sc.GeomTailSeq((1, 2), (sc.GeomTail(1, 0.5j),))
g = sc.GeomTailSeq((3,), (sc.GeomTail(-1, 0.4),))

d = invertibility_verdict(D, f, g)
print("r =", d.r, " verdict:", d.verdict.value)
print("1 + <D^-1 f, g> =", d.ionascu)

# %%
T = perturbed(D, f, g)
y = sc.geometric(1, -0.3)
x = solve(D, f, g, y)
print("solve residual ||T x - y|| =", sc.distance(apply(T, x), y))

for j in (0, 4):
    ok, pre = basis_range_criterion(D, f, g, j)
    print(f"e_{j} has a preimage: {ok}, residual {sc.distance(apply(T, pre), sc.basis(j)):.1e}")

# %%
# Forcing r = 0 produces a kernel vector D^-1 f.
I = DiagonalSymbol.identity()
f1, g1 = sc.geometric(1, 0.5), sc.geometric(-0.75, 0.5)
print("\nr =", r_value(I, f1, g1))
has_kernel, w = kernel_criterion(I, f1, g1)
print("kernel:", has_kernel, " ||T w|| =", sc.norm(apply(perturbed(I, f1, g1), w)))

# %%
# A compact diagonal can never be perturbed into a left-invertible operator.
C = DiagonalSymbol((), 1, 0.5)
print("compact D:", invertibility_verdict(C, sc.geometric(1, 0.3), sc.geometric(1, 0.3)).verdict.value)
