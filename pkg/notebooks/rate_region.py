# %% [markdown]
# # Achievable rate regions on a fixed 4-antenna channel
#
# Every scheme is solved on one grid of PU targets up to the ideal
# scheme's largest PU rate. Points a scheme cannot serve count as zero.

# %%
import numpy as np

from cogcoop import (Scheme, ideal_max_pu_rate, ideal_solve_optimal, ps_baseline_no_energy,
                     ps_solve_optimal, ps_solve_zf, ts_solve_optimal, ts_solve_zf)
from cogcoop.presets import get_preset

p = get_preset("fig6")
cfg, ch = p.config, p.channel
r_max = ideal_max_pu_rate(cfg, ch).rate
grid = np.linspace(0.0, r_max, 12)
print(f"largest PU rate with ideal cooperation: {r_max:.4f} bps/Hz")

# %%
solvers = {
    Scheme.IDEAL: ideal_solve_optimal,
    Scheme.POWER_SPLIT: ps_solve_optimal,
    Scheme.POWER_SPLIT_ZF: ps_solve_zf,
    Scheme.TIME_SPLIT: ts_solve_optimal,
    Scheme.TIME_SPLIT_ZF: ts_solve_zf,
    Scheme.BASELINE_NO_ENERGY: ps_baseline_no_energy,
}
region = {}
for scheme, solve in solvers.items():
    sols = [solve(cfg, ch, float(r)) for r in grid]
    region[scheme] = np.array([s.rate_su if s.feasible else 0.0 for s in sols])

print("r_p     " + "  ".join(f"{s.value:>16}" for s in solvers))
for i, r in enumerate(grid):
    print(f"{r:6.3f}  " + "  ".join(f"{region[s][i]:16.4f}" for s in solvers))

# %% [markdown]
# Ideal cooperation bounds everything else, and splitting the received
# power beats splitting time at every target.

# %%
assert np.all(region[Scheme.IDEAL] >= region[Scheme.POWER_SPLIT] - 1e-9)
assert np.all(region[Scheme.POWER_SPLIT] >= region[Scheme.TIME_SPLIT] - 1e-9)

# %%
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots()
    for scheme, rates in region.items():
        ax.plot(grid, rates, marker=".", label=scheme.value)
    ax.set_xlabel("PU rate (bps/Hz)")
    ax.set_ylabel("SU rate (bps/Hz)")
    ax.legend()
    fig.savefig("rate_region.png", dpi=120)
