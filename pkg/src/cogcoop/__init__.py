"""Energy and information cooperation between a primary link and a multi-antenna
secondary transmitter: ideal, power-splitting and time-splitting schemes."""

from .core import (ChannelSet, DegenerateGeometryError, FeasibilityError, InputError,
                   InvariantViolation, Scheme, SchemeSolution, SolverSettings, SystemConfig,
                   UnsupportedConfigurationError, db_to_linear, generate_channel,
                   linear_to_db, random_channel_set)
from .dual import DualProblem, DualSolution, dual_feasible, gamma2_batch, solve_dual
from .ideal import (IdealSplit, RateRegionCurve, ideal_max_pu_rate, ideal_rate_region,
                    ideal_solve_optimal, ideal_solve_zf)
from .power_split import (PowerSplitState, ps_baseline_no_energy, ps_feasible_rho_range,
                          ps_gamma_p_prime, ps_max_pu_rate, ps_solve_optimal, ps_solve_zf)
from .time_split import (TimeSplitState, ts_gamma_p_prime, ts_phase2_power, ts_solve_optimal,
                         ts_solve_zf)
from .oracle import SpanGrid, oracle_best_su_rate, oracle_ideal

__all__ = [
    "ChannelSet", "DegenerateGeometryError", "FeasibilityError", "InputError",
    "InvariantViolation", "Scheme", "SchemeSolution", "SolverSettings", "SystemConfig",
    "UnsupportedConfigurationError", "db_to_linear", "generate_channel", "linear_to_db",
    "random_channel_set", "DualProblem", "DualSolution", "dual_feasible", "gamma2_batch",
    "solve_dual", "IdealSplit", "RateRegionCurve", "ideal_max_pu_rate", "ideal_rate_region",
    "ideal_solve_optimal", "ideal_solve_zf", "PowerSplitState", "ps_baseline_no_energy",
    "ps_feasible_rho_range", "ps_gamma_p_prime", "ps_max_pu_rate", "ps_solve_optimal",
    "ps_solve_zf", "TimeSplitState", "ts_gamma_p_prime", "ts_phase2_power",
    "ts_solve_optimal", "ts_solve_zf", "SpanGrid", "oracle_best_su_rate", "oracle_ideal",
]
