import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "solution.csv")) as f:
    rows = list(csv.DictReader(f))
x = [float(r["x"]) for r in rows]

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, key, label in ((axes[0], "rho", "mass density rho"), (axes[1], "j", "mass flux j")):
    ax.plot(x, [float(r[key + "_oracle"]) for r in rows], "k:", label="direct")
    ax.plot(x, [float(r[key + "_schr"]) for r in rows], "o", mfc="none", label="Schrodingerization")
    ax.set_xlabel("x")
    ax.set_title(label)
    ax.legend()
fig.suptitle("custom, steady, eps = 0.0001, t = 0.0545455")
fig.tight_layout()
fig.savefig(os.path.join(here, "solution.png"), dpi=150)
