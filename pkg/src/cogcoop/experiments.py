"""Experiment runners behind the command line.

Monte Carlo trials draw their channels from
``SeedSequence([seed, trial])``, so trial ``k`` sees the same channel for
every scheme, efficiency and power point, and for any worker count.
Per-trial results are stored by index and reduced only after all trials
finish.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import ExperimentConfig, Experiment
from .core import (ChannelSet, InputError, InvariantViolation, Scheme, SchemeSolution,
                   SolverSettings, SystemConfig, random_channel_set)
from .ideal import ideal_max_pu_rate, ideal_solve_optimal, ideal_solve_zf
from .power_split import (ps_baseline_no_energy, ps_solve_at_rho, ps_solve_optimal,
                          ps_solve_zf, ps_solve_zf_at_rho)
from .presets import get_preset
from .time_split import ts_solve_at_alpha, ts_solve_optimal, ts_solve_zf


class AllInfeasible(Exception):
    """Every requested solve came back infeasible; ``table`` still holds the zeros."""

    def __init__(self, table: "Table"):
        super().__init__("no scheme was feasible at any point")
        self.table = table


def no_cooperation(cfg: SystemConfig, ch: ChannelSet, r_p: float) -> SchemeSolution:
    """PT talks to the PU alone; the SU never gets the band."""
    rate_pu = math.log2(1.0 + cfg.P_p * abs(ch.h_p) ** 2 / cfg.N_tilde0)
    if rate_pu < r_p:
        return SchemeSolution.infeasible(Scheme.NO_COOPERATION)
    zero = np.zeros(ch.N, dtype=complex)
    return SchemeSolution(Scheme.NO_COOPERATION, True, None, zero, zero, rate_pu, 0.0)


def solve(scheme: Scheme, cfg: SystemConfig, ch: ChannelSet, r_p: float,
          settings: SolverSettings) -> SchemeSolution:
    if scheme is Scheme.IDEAL:
        return ideal_solve_optimal(cfg, ch, r_p, settings)
    if scheme is Scheme.IDEAL_ZF:
        return ideal_solve_zf(cfg, ch, r_p)
    if scheme is Scheme.POWER_SPLIT:
        return ps_solve_optimal(cfg, ch, r_p, settings)
    if scheme is Scheme.POWER_SPLIT_ZF:
        return ps_solve_zf(cfg, ch, r_p)
    if scheme is Scheme.TIME_SPLIT:
        return ts_solve_optimal(cfg, ch, r_p, settings)
    if scheme is Scheme.TIME_SPLIT_ZF:
        return ts_solve_zf(cfg, ch, r_p, settings)
    if scheme is Scheme.BASELINE_NO_ENERGY:
        return ps_baseline_no_energy(cfg, ch, r_p, settings)
    if scheme is Scheme.NO_COOPERATION:
        return no_cooperation(cfg, ch, r_p)
    raise InputError(f"no solver for {scheme}")


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(v) for v in row) + "\n")
        return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, Scheme):
        return v.value
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return "%.9g" % v
    return str(v)


def trial_channel(exp: ExperimentConfig, trial: int) -> ChannelSet:
    rng = np.random.default_rng(np.random.SeedSequence([exp.seed, trial]))
    return random_channel_set(exp.n_antennas, rng, st_distance_m=exp.st_to_all_m,
                              pt_pu_distance_m=exp.pt_to_pu_m, exponent=exp.exponent)


def fixed_setup(exp: ExperimentConfig) -> tuple[SystemConfig, ChannelSet]:
    """Preset channel and settings, or trial 0 of the seeded generator."""
    if exp.preset:
        p = get_preset(exp.preset)
        cfg = p.config
        if exp.eta_list is not None:
            cfg = cfg.replace(eta=exp.eta_list[0])
        return cfg, p.channel
    return exp.system(exp.etas[0]), trial_channel(exp, 0)


def sweep_values(exp: ExperimentConfig) -> np.ndarray:
    return np.linspace(exp.sweep_start, exp.sweep_stop, exp.sweep_points)


def _monotone(rates: Sequence[float], scheme: Scheme, tol: float) -> None:
    rs = np.asarray(rates, dtype=float)
    jumps = np.diff(rs) - tol * np.maximum(1.0, rs[:-1])
    if np.any(jumps > 0):
        i = int(np.argmax(jumps))
        raise InvariantViolation(f"{scheme.value} SU rate rises with the PU target at sample {i}: "
                                 f"{rs[i]:.12g} -> {rs[i + 1]:.12g}")


def run_rate_region(exp: ExperimentConfig) -> Table:
    cfg, ch = fixed_setup(exp)
    settings = exp.settings()
    r_max = ideal_max_pu_rate(cfg, ch).rate
    grid = np.linspace(0.0, r_max, exp.region_points)
    rows, any_ok = [], False
    for scheme in exp.scheme_list:
        rates = []
        for r in grid:
            sol = solve(scheme, cfg, ch, float(r), settings)
            any_ok |= sol.feasible
            rates.append(sol.rate_su if sol.feasible else 0.0)
        _monotone(rates, scheme, 1e-6)
        rows.extend((scheme, float(r), s) for r, s in zip(grid, rates))
    if not any_ok:
        raise AllInfeasible(Table(("scheme", "r_p", "r_s_max"), rows))
    return Table(("scheme", "r_p", "r_s_max"), rows)


def run_param_curve(exp: ExperimentConfig) -> Table:
    cfg, ch = fixed_setup(exp)
    settings = exp.settings()
    r_p = cfg.r_p if exp.preset else exp.r_p
    if exp.experiment is Experiment.ALPHA_CURVE:
        name, lo, hi = "alpha", 0.0, 0.999
    else:
        name, lo, hi = "rho", 0.0, 1.0
    if exp.sweep_variable == name:
        values = np.clip(sweep_values(exp), lo, hi)
    else:
        values = np.linspace(lo, hi, 101)
    rows, any_ok = [], False
    for scheme in exp.scheme_list:
        for v in values:
            sol = _param_solve(scheme, cfg, ch, r_p, float(v), settings)
            any_ok |= sol.feasible
            rows.append((float(v), scheme, sol.rate_su if sol.feasible else 0.0, sol.feasible))
    table = Table((name, "scheme", "rate_su", "feasible"), rows)
    if not any_ok:
        raise AllInfeasible(table)
    return table


def _param_solve(scheme, cfg, ch, r_p, v, settings) -> SchemeSolution:
    if scheme is Scheme.POWER_SPLIT:
        return ps_solve_at_rho(cfg, ch, r_p, v, settings)
    if scheme is Scheme.POWER_SPLIT_ZF:
        return ps_solve_zf_at_rho(cfg, ch, r_p, v)
    if scheme is Scheme.TIME_SPLIT:
        return ts_solve_at_alpha(cfg, ch, r_p, v, settings)
    if scheme is Scheme.TIME_SPLIT_ZF:
        return ts_solve_at_alpha(cfg, ch, r_p, v, settings, zf=True)
    raise InputError(f"{scheme.value} has no split parameter to sweep")


def _power_points(exp: ExperimentConfig) -> np.ndarray:
    if exp.sweep_variable != "p_s0_db":
        raise InputError("Monte Carlo experiments sweep p_s0_db")
    return sweep_values(exp)


def _trial_rates(args) -> np.ndarray:
    """Rates for one trial, shape (powers, etas, schemes); NaN marks infeasible."""
    exp, trial = args
    ch = trial_channel(exp, trial)
    settings = exp.settings()
    powers = _power_points(exp)
    schemes = exp.scheme_list
    out = np.full((powers.size, len(exp.etas), len(schemes)), np.nan)
    for i, p in enumerate(powers):
        for j, eta in enumerate(exp.etas):
            cfg = exp.system(eta, float(p))
            for k, scheme in enumerate(schemes):
                if j > 0 and scheme in (Scheme.NO_COOPERATION, Scheme.BASELINE_NO_ENERGY):
                    out[i, j, k] = out[i, 0, k]   # eta plays no part
                    continue
                sol = solve(scheme, cfg, ch, exp.r_p, settings)
                if sol.feasible:
                    out[i, j, k] = sol.rate_su
    return out


def monte_carlo(exp: ExperimentConfig, workers: int = 1) -> np.ndarray:
    """Per-trial rates stacked by trial index: shape (trials, powers, etas, schemes)."""
    jobs = [(exp, t) for t in range(exp.trials)]
    if workers <= 1:
        results = [_trial_rates(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_rates, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return np.stack(results)


def run_su_sweep(exp: ExperimentConfig, workers: int = 1) -> Table:
    rates = monte_carlo(exp, workers)
    powers = _power_points(exp)
    mean = np.nan_to_num(rates, nan=0.0).mean(axis=0)
    rows = [(float(p), float(eta), scheme, float(mean[i, j, k]))
            for i, p in enumerate(powers) for j, eta in enumerate(exp.etas)
            for k, scheme in enumerate(exp.scheme_list)]
    table = Table(("p_s0_db", "eta", "scheme", "mean_rate_su"), rows)
    if np.all(np.isnan(rates)):
        raise AllInfeasible(table)
    return table


@dataclass(frozen=True)
class OutageRecord:
    p_s0_db: float
    scheme: Scheme
    outage_prob: float


def run_outage(exp: ExperimentConfig, workers: int = 1) -> Table:
    rates = monte_carlo(exp, workers)
    powers = _power_points(exp)
    # infeasible (NaN) compares False, so it counts as an outage
    served = rates >= exp.r_s
    prob = 1.0 - served.mean(axis=0)
    multi_eta = len(exp.etas) > 1
    rows = []
    for i, p in enumerate(powers):
        for j, eta in enumerate(exp.etas):
            for k, scheme in enumerate(exp.scheme_list):
                rec = OutageRecord(float(p), scheme, float(prob[i, j, k]))
                rows.append((rec.p_s0_db, float(eta), rec.scheme, rec.outage_prob))
    cols = ("p_s0_db", "eta", "scheme", "outage_prob")
    if not multi_eta:
        rows = [(r[0], r[2], r[3]) for r in rows]
        cols = ("p_s0_db", "scheme", "outage_prob")
    table = Table(cols, rows)
    if np.all(np.isnan(rates)):
        raise AllInfeasible(table)
    return table


def run_feasibility(exp: ExperimentConfig, workers: int = 1) -> Table:
    rates = monte_carlo(exp, workers)
    powers = _power_points(exp)
    frac = (~np.isnan(rates)).mean(axis=0)
    rows = [(float(p), float(eta), scheme, float(frac[i, j, k]))
            for i, p in enumerate(powers) for j, eta in enumerate(exp.etas)
            for k, scheme in enumerate(exp.scheme_list)]
    table = Table(("p_s0_db", "eta", "scheme", "feasible_fraction"), rows)
    if np.all(np.isnan(rates)):
        raise AllInfeasible(table)
    return table


RUNNERS: dict[Experiment, Callable[..., Table]] = {
    Experiment.RATE_REGION: lambda exp, workers=1: run_rate_region(exp),
    Experiment.SU_SWEEP: run_su_sweep,
    Experiment.OUTAGE: run_outage,
    Experiment.RHO_CURVE: lambda exp, workers=1: run_param_curve(exp),
    Experiment.ALPHA_CURVE: lambda exp, workers=1: run_param_curve(exp),
    Experiment.FEASIBILITY: run_feasibility,
}


def run_experiment(exp: ExperimentConfig, workers: int = 1) -> Table:
    return RUNNERS[exp.experiment](exp, workers=workers)
