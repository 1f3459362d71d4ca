"""Exact l2 vectors as a finite prefix plus geometric tails.

Run with ``python demos/01_sequences.py``.
"""
# %%
from rankone import seqcore as sc

e0, e1 = sc.basis(0), sc.basis(1)
half = sc.geometric(1, 0.5)  # 1, 1/2, 1/4, ...
print("e0 + e1      =", e0 + e1)
print("first coords =", sc.coordinates(half, 6).real)

# %%
# Inner products of geometric tails are summed in closed form, no truncation.
print("||half||^2 =", sc.norm_sq(half), " (exactly 4/3)")

# Compare with partial sums, which only creep up to the limit.
for n in (5, 10, 20):
    coords = sc.coordinates(half, n)
    print(f"  partial sum to {n:2d}: {abs(coords @ coords.conj()):.15f}")

# %%
# The Szego kernel at w has coefficients conj(w)^n, so <h, k_w> = h(w).
w = 0.3 + 0.4j
k = sc.szego_kernel_vector(w)
h = sc.from_coefficients([2, 0, 1])  # 2 + z^2
print("<h, k_w> =", sc.inner_product(h, k), " h(w) =", 2 + w**2)

# %%
# Shifts move the prefix and keep the tails; the backward shift is exact too.
v = sc.shift_right(half, 2)
print("S^2 half     :", sc.coordinates(v, 5).real)
print("S*^2 S^2 half == half:", sc.shift_left(v, 2) == half)
