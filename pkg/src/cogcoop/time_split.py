"""Three-phase time-splitting cooperation.

A slot of length ``alpha`` carries energy (and PU data, at power
``P_p1``) from the PT; the remaining ``1 - alpha`` is split evenly into a
listen phase (PT at ``P_p2``) and a forward phase in which the ST relays
and serves the SU. The PU combines the two slots it hears by MRC.

Phase-I power is searched as ``P_p1 = u * min(P_max, P_p / alpha)`` with
``u`` in (0, 1], which keeps every grid point inside the energy budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (ChannelSet, FeasibilityError, InputError, Scheme, SchemeSolution,
                   SolverSettings, SystemConfig, alignment_cos2, norm2,
                   require_nondegenerate, require_zf_capable, zf_direction)
from .dual import DualProblem, gamma2_batch, solve_dual
from .search import grid_golden_max_1d, nested_grid_max_2d

ALPHA_MAX = 1.0 - 1e-3
U_MIN = 1e-6


@dataclass(frozen=True)
class TimeSplitState:
    alpha: float
    P_p1: float
    P_p2: float
    E_EH: float
    P_C: float
    gamma_p_prime_ts: float


def ts_phase2_power(cfg: SystemConfig, alpha, P_p1):
    """PT power in the listen phase: what the energy budget leaves, capped at ``P_max``."""
    a = np.asarray(alpha, dtype=float)
    p = np.asarray(P_p1, dtype=float)
    if np.any((a < 0) | (a >= 1)):
        raise InputError("alpha must lie in [0, 1)")
    if np.any(a * p > cfg.P_p * (1.0 + 1e-12)):
        raise InputError("alpha * P_p1 exceeds the PT energy budget")
    out = np.minimum(cfg.P_max, 2.0 * np.maximum(cfg.P_p - a * p, 0.0) / (1.0 - a))
    return float(out) if out.ndim == 0 else out


def _phase1_rate(cfg: SystemConfig, ch: ChannelSet, alpha, P_p1):
    return alpha * np.log2(1.0 + P_p1 * abs(ch.h_p) ** 2 / cfg.N_tilde0)


def ts_gamma_p_prime(cfg: SystemConfig, ch: ChannelSet, r_p: float, alpha, P_p1):
    """Residual relay SNR per unit of ``P_p2``; non-positive once the direct link suffices."""
    a = np.asarray(alpha, dtype=float)
    p = np.asarray(P_p1, dtype=float)
    P_p2 = np.asarray(ts_phase2_power(cfg, a, p), dtype=float)
    hp2 = abs(ch.h_p) ** 2 / cfg.N_tilde0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        need = np.expm1(2.0 * (r_p - _phase1_rate(cfg, ch, a, p)) / (1.0 - a) * math.log(2.0))
        out = np.where(P_p2 > 0, need / np.where(P_p2 > 0, P_p2, 1.0) - hp2,
                       np.where(need <= 0, -hp2, np.inf))
    return float(out) if out.ndim == 0 else out


def ts_budget(cfg: SystemConfig, ch: ChannelSet, alpha, P_p1):
    """Compact-form ST budget in the forward phase."""
    a = np.asarray(alpha, dtype=float)
    harvest = a * cfg.eta * (np.asarray(P_p1, dtype=float) * norm2(ch.g) + cfg.N0)
    return 2.0 * (harvest + cfg.P_s0) / (1.0 - a)


def _relay_target(cfg: SystemConfig, ch: ChannelSet, gp, P_p2):
    """Compact PU SINR target; ``inf`` where no relay power reaches it."""
    G, Nt = norm2(ch.g), cfg.N_tilde0
    den = G - gp * Nt
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(den > 0, (P_p2 * G + Nt) * gp / np.where(den > 0, den, 1.0), np.inf)


def _p1_cap(cfg: SystemConfig, alpha):
    a = np.asarray(alpha, dtype=float)
    return np.minimum(cfg.P_max, cfg.P_p / np.maximum(a, cfg.P_p / cfg.P_max))


def _su_sinr(cfg: SystemConfig, ch: ChannelSet, r_p: float, alpha, P_p1, zf: bool):
    """Best compact-form SU SINR at each (alpha, P_p1); ``-inf`` where infeasible."""
    Nt = cfg.N_tilde0
    P_p2 = np.asarray(ts_phase2_power(cfg, alpha, P_p1), dtype=float)
    gp = np.asarray(ts_gamma_p_prime(cfg, ch, r_p, alpha, P_p1), dtype=float)
    P_C = ts_budget(cfg, ch, alpha, P_p1)
    n1, n2 = norm2(ch.h_sp), norm2(ch.h_s)
    zeta2 = alignment_cos2(ch.h_sp, ch.h_s)
    relay = gp > 0
    g1 = np.where(relay, _relay_target(cfg, ch, np.where(relay, gp, 0.0), P_p2), 0.0)
    if zf:
        z = 1.0 - zeta2
        if z <= 1e-14:
            return np.where(relay, -np.inf, 0.0)
        with np.errstate(invalid="ignore"):
            q_s = P_C - g1 * Nt / (n1 * z)
        return np.where(q_s >= 0, np.maximum(q_s, 0.0) * n2 * z / Nt, -np.inf)
    g2 = gamma2_batch(g1, P_C, n1, n2, zeta2, Nt)
    return np.where(relay, g2, P_C * n2 / Nt)


def _su_rate(alpha, sinr):
    with np.errstate(invalid="ignore"):
        return np.where(np.isfinite(sinr), 0.5 * (1.0 - alpha) * np.log2(1.0 + np.maximum(sinr, 0.0)),
                        -np.inf)


def _objective(cfg, ch, r_p, zf):
    def f(alpha, u):
        P_p1 = np.maximum(u, U_MIN) * _p1_cap(cfg, alpha)
        return _su_rate(alpha, _su_sinr(cfg, ch, r_p, alpha, P_p1, zf))
    return f


def _state(cfg, ch, r_p, alpha, P_p1) -> TimeSplitState:
    return TimeSplitState(
        alpha, P_p1, ts_phase2_power(cfg, alpha, P_p1),
        alpha * cfg.eta * (P_p1 * norm2(ch.g) + cfg.N0),
        float(ts_budget(cfg, ch, alpha, P_p1)),
        ts_gamma_p_prime(cfg, ch, r_p, alpha, P_p1))


def _assemble(cfg, ch, scheme, state: TimeSplitState, w_s, w_c) -> SchemeSolution:
    Nt, G = cfg.N_tilde0, norm2(ch.g)
    a, P_p2 = state.alpha, state.P_p2
    K = P_p2 * G * G + G * Nt
    w_p = w_c / math.sqrt(K)
    relay = abs(np.vdot(ch.h_sp, w_p)) ** 2
    snr2 = (P_p2 * abs(ch.h_p) ** 2 / Nt
            + relay * P_p2 * G * G / (relay * G * Nt + abs(np.vdot(ch.h_sp, w_s)) ** 2 + Nt))
    rate_pu = float(_phase1_rate(cfg, ch, a, state.P_p1)) + 0.5 * (1 - a) * math.log2(1 + snr2)
    sinr_su = abs(np.vdot(ch.h_s, w_s)) ** 2 / (abs(np.vdot(ch.h_s, w_c)) ** 2 + Nt)
    return SchemeSolution(scheme, True, state, w_s, w_p, rate_pu,
                          0.5 * (1 - a) * math.log2(1 + sinr_su))


def ts_solve_at(cfg: SystemConfig, ch: ChannelSet, r_p: float, alpha: float, P_p1: float,
                settings: SolverSettings | None = None, *, zf: bool = False) -> SchemeSolution:
    """Beams for fixed (alpha, P_p1)."""
    require_nondegenerate(ch)
    if zf:
        require_zf_capable(ch)
    scheme = Scheme.TIME_SPLIT_ZF if zf else Scheme.TIME_SPLIT
    state = _state(cfg, ch, r_p, alpha, P_p1)
    Nt, gp = cfg.N_tilde0, state.gamma_p_prime_ts
    zero = np.zeros(ch.N, dtype=complex)
    if gp <= 0:
        d = zf_direction(ch.h_s, ch.h_sp) if zf else ch.h_s / math.sqrt(norm2(ch.h_s))
        return _assemble(cfg, ch, scheme, state, math.sqrt(state.P_C) * d, zero)
    g1 = float(_relay_target(cfg, ch, gp, state.P_p2))
    if not np.isfinite(g1):
        return SchemeSolution.infeasible(scheme, state)
    if zf:
        z = 1.0 - alignment_cos2(ch.h_sp, ch.h_s)
        if z <= 1e-14:
            return SchemeSolution.infeasible(scheme, state)
        q_p = g1 * Nt / (norm2(ch.h_sp) * z)
        q_s = state.P_C - q_p
        if q_s < -1e-12 * max(1.0, state.P_C):
            return SchemeSolution.infeasible(scheme, state)
        w_c = math.sqrt(q_p) * zf_direction(ch.h_sp, ch.h_s)
        w_s = math.sqrt(max(q_s, 0.0)) * zf_direction(ch.h_s, ch.h_sp)
        return _assemble(cfg, ch, scheme, state, w_s, w_c)
    try:
        sol = solve_dual(DualProblem(ch.h_sp, ch.h_s, Nt, g1, state.P_C), settings)
    except FeasibilityError:
        return SchemeSolution.infeasible(scheme, state)
    return _assemble(cfg, ch, scheme, state, sol.w2, sol.w1)


def _search(cfg, ch, r_p, settings, zf, seeds):
    return nested_grid_max_2d(_objective(cfg, ch, r_p, zf), (0.0, ALPHA_MAX), (0.0, 1.0),
                              settings.grid_coarse, settings.refine_rounds, settings.rel_tol,
                              seeds=[(0.0, 1.0), *seeds])


def _solve(cfg, ch, r_p, settings, zf) -> SchemeSolution:
    settings = settings or SolverSettings()
    require_nondegenerate(ch)
    if zf:
        require_zf_capable(ch)
    scheme = Scheme.TIME_SPLIT_ZF if zf else Scheme.TIME_SPLIT
    seeds = []
    if not zf and ch.N >= 2:
        # the ZF optimum is feasible here too, so the search never ends below it
        zres = _search(cfg, ch, r_p, settings, True, [])
        if zres is not None:
            seeds.append((zres.x, zres.y))
    res = _search(cfg, ch, r_p, settings, zf, seeds)
    if res is None:
        return SchemeSolution.infeasible(scheme)
    P_p1 = max(res.y, U_MIN) * float(_p1_cap(cfg, res.x))
    return ts_solve_at(cfg, ch, r_p, res.x, P_p1, settings, zf=zf)


def ts_solve_optimal(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                     settings: SolverSettings | None = None) -> SchemeSolution:
    """Refined 2-D grid over (alpha, P_p1) with the closed-form inner beamforming optimum."""
    return _solve(cfg, ch, r_p, settings, zf=False)


def ts_solve_zf(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                settings: SolverSettings | None = None) -> SchemeSolution:
    """As :func:`ts_solve_optimal` with mutually nulling relay and secondary beams."""
    return _solve(cfg, ch, r_p, settings, zf=True)


def ts_solve_at_alpha(cfg: SystemConfig, ch: ChannelSet, r_p: float, alpha: float,
                      settings: SolverSettings | None = None, *,
                      zf: bool = False) -> SchemeSolution:
    """Best P_p1 for a fixed EH slot length."""
    settings = settings or SolverSettings()
    scheme = Scheme.TIME_SPLIT_ZF if zf else Scheme.TIME_SPLIT
    cap = float(_p1_cap(cfg, alpha))

    def f(u):
        P_p1 = np.maximum(u, U_MIN) * cap
        return _su_rate(alpha, _su_sinr(cfg, ch, r_p, alpha, P_p1, zf))

    found = grid_golden_max_1d(f, 0.0, 1.0, settings.grid_coarse, settings.refine_rounds)
    if found is None:
        return SchemeSolution.infeasible(scheme)
    return ts_solve_at(cfg, ch, r_p, alpha, max(found[0], U_MIN) * cap, settings, zf=zf)
