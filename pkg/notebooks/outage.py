# %% [markdown]
# # Monte Carlo: SU outage and average rate
#
# Small trial counts keep this quick; the CLI runs the full sweeps.

# %%
from cogcoop import Scheme
from cogcoop.config import Experiment, ExperimentConfig
from cogcoop.experiments import run_experiment

base = ExperimentConfig(trials=200, seed=11, sweep_points=5)
outage = run_experiment(base.replace(experiment=Experiment.OUTAGE))
print(outage.to_csv())

# %% [markdown]
# Average SU rate for a few harvesting efficiencies. Without harvested
# energy the power-splitting scheme falls back to the baseline.

# %%
sweep = run_experiment(base.replace(
    experiment=Experiment.SU_SWEEP, eta_list=(1.0, 0.5, 0.0),
    schemes=(Scheme.POWER_SPLIT, Scheme.BASELINE_NO_ENERGY)))
print(sweep.to_csv())
