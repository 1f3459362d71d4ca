"""The dense-SVD oracle and the command line, side by side."""
# %%
import json
import subprocess
import sys

from rankone import seqcore as sc
from rankone.oracle import densify, sigma_sweep
from rankone.perturbation import nakamura_perturbation
from rankone.operators import ShiftPow

# An isometric perturbation: every truncation has sigma_min = 1.
h = sc.scale(sc.basis(0) + sc.basis(3), 2**-0.5)
_, _, T = nakamura_perturbation(ShiftPow(2), h, 1j)
print("sigma_min:", sigma_sweep(T, (16, 64, 256)))

block = densify(T, 6)
print("top-left block of T:\n", block.entries[:8, :6].round(3))

# %%
# The CLI runs the bundled regression corpus; verdicts never depend on --seed.
out = subprocess.run(
    [sys.executable, "-m", "rankone", "corpus", "--format", "text"], capture_output=True, text=True
)
print(out.stdout)

report = json.loads(
    subprocess.run(
        [sys.executable, "-m", "rankone", "corpus", "--problem", "c_of_z_and_1", "--no-timing"],
        capture_output=True,
        text=True,
    ).stdout
)
p = report["problems"][0]
print(p["id"], "c =", p["c"], "|", p["note"])
