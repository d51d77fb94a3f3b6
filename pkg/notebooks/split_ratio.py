# %% [markdown]
# # SU rate against the power-splitting ratio
#
# Fixed 3-antenna channel. At the stock target of 2.6 bps/Hz no split
# ratio lets the relay meet the PU, so the curve is drawn at a target the
# channel can support.

# %%
import numpy as np

from cogcoop import ps_feasible_rho_range, ps_max_pu_rate
from cogcoop.power_split import ps_solve_at_rho, ps_solve_zf_at_rho, ps_zf_rho_range
from cogcoop.presets import get_preset

p = get_preset("fig5")
cfg, ch = p.config, p.channel
print(f"largest PU rate with power splitting: {ps_max_pu_rate(cfg, ch)[0]:.3f} bps/Hz")
print("feasible ratios at the stock target:", ps_feasible_rho_range(cfg, ch, p.r_p))

# %%
r_p = 1.7
print("optimal beams:", ps_feasible_rho_range(cfg, ch, r_p))
print("ZF beams:     ", ps_zf_rho_range(cfg, ch, r_p))
rho = np.linspace(0.0, 1.0, 201)
opt = np.array([ps_solve_at_rho(cfg, ch, r_p, float(x)) for x in rho])
zf = np.array([ps_solve_zf_at_rho(cfg, ch, r_p, float(x)) for x in rho])
r_opt = np.array([s.rate_su if s.feasible else np.nan for s in opt])
r_zf = np.array([s.rate_su if s.feasible else np.nan for s in zf])
i, j = np.nanargmax(r_opt), np.nanargmax(r_zf)
print(f"best ratio {rho[i]:.3f}: {r_opt[i]:.4f} bps/Hz (ZF {rho[j]:.3f}: {r_zf[j]:.4f})")

# %%
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots()
    ax.plot(rho, r_opt, label="optimal beams")
    ax.plot(rho, r_zf, label="ZF beams")
    ax.set_xlabel("power-splitting ratio")
    ax.set_ylabel("SU rate (bps/Hz)")
    ax.legend()
    fig.savefig("split_ratio.png", dpi=120)
