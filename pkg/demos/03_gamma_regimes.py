"""Adiabatic-index regimes recovered by brute force.

The weighted-energy machinery needs a pair (r1, sigma1) satisfying one of
three nested strict constraint chains.  Scanning the (r1, sigma1) rectangle
cell by cell reproduces the admissible gamma-windows
I0 = (7/6, inf), I1 = (7/6, 7/3), I2 = (11/9, 5/3) without any interval
algebra, and yields an explicit witness pair for each feasible gamma.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from vacuumflow import compute_index_set, feasible_window, regime

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

gammas = np.linspace(1.02, 3.0, 300)
feas = np.zeros((3, gammas.size), dtype=bool)
for j, g in enumerate(gammas):
    for case in (1, 2, 3):
        feas[case - 1, j] = feasible_window(g, case, 200)[0]

fig, ax = plt.subplots(figsize=(8, 2.8))
for row, (case, label) in enumerate([(1, "case 1 (global existence)"),
                                     (2, "case 2 (interior bounded q)"),
                                     (3, "case 3 (uniformly bounded q)")]):
    on = gammas[feas[case - 1]]
    ax.plot(on, np.full_like(on, 3 - row), "|", ms=10, label=label)
for b in (7 / 6, 11 / 9, 5 / 3, 7 / 3):
    ax.axvline(b, color="k", lw=0.6, alpha=0.5)
ax.set_yticks([])
ax.set_xlabel("gamma")
ax.legend(fontsize=8, loc="center right")
fig.tight_layout()
fig.savefig(OUT / "regimes.png", dpi=130)
print(f"figure -> {OUT / 'regimes.png'}")

print(f"{'gamma':>6} {'I0':>5} {'I1':>5} {'I2':>5}   witness (r1, sigma1)")
for g in (1.15, 1.2, 1.3, 1.5, 1.7, 2.0, 2.5):
    reg = regime(g)
    witness = None
    for case in (3, 2, 1):
        ok, wit = feasible_window(g, case, 200)
        if ok:
            witness = (case, wit)
            break
    wtxt = "-" if witness is None else (f"case {witness[0]}: "
                                        f"({witness[1][0]:.4f}, {witness[1][1]:.4f})")
    print(f"{g:>6.3f} {str('I0' in reg):>5} {str('I1' in reg):>5} "
          f"{str('I2' in reg):>5}   {wtxt}")

idx = compute_index_set(1.5, 1.8, 0.875)
print("\nderived exponents at gamma=1.5, (r1, sigma1) = (1.8, 0.875):")
print(f"  l1={idx.l1:g} r2={idx.r2:g} l2={idx.l2:g} l3={idx.l3:g} "
      f"r4={idx.r4:g} l4={idx.l4:g} a={idx.frak_a:g} b={idx.frak_b:g}")
print(f"  cases: 1={idx.case1} 2={idx.case2} 3={idx.case3}")
