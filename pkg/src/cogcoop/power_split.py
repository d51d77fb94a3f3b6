"""Two-phase power-splitting cooperation.

Phase I: the PT sends at ``2 P_p``; the ST splits what it receives, a
fraction ``rho`` to an amplify-and-forward path and ``1 - rho`` to the
energy harvester. Phase II: the ST spends ``2 P_s0`` plus twice the
harvested power on a relay beam for the PU and a beam for the SU. Rates
carry a 1/2 pre-log.

Internally the relay beam is written in compact form ``w_c = sqrt(K) w_p``
with ``K = E|g^H y_info|^2``; the problem then has the shape handled by
:mod:`cogcoop.dual`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (ChannelSet, FeasibilityError, InvariantViolation, Scheme,
                   SchemeSolution, SolverSettings, SystemConfig, alignment_cos2,
                   norm2, require_nondegenerate, require_zf_capable, zf_direction)
from .dual import DualProblem, gamma2_batch, solve_dual
from .search import grid_golden_max_1d

Interval = tuple[float, float]


@dataclass(frozen=True)
class PowerSplitState:
    rho: float
    gamma_p_prime: float
    gamma_p_dprime: float
    P_EH: float
    P_C: float


def ps_gamma_p_prime(cfg: SystemConfig, r_p: float, h_p: complex = 0.0) -> float:
    """Phase-II SNR the relay must add, per unit of ``2 P_p``; negative if the direct link suffices."""
    return (2.0 ** (2.0 * r_p) - 1.0) / (2.0 * cfg.P_p) - abs(h_p) ** 2 / cfg.N_tilde0


def _a1(cfg: SystemConfig, ch: ChannelSet) -> float:
    return 2.0 * cfg.P_p * norm2(ch.g) + cfg.N0


def ps_budget(cfg: SystemConfig, ch: ChannelSet, rho):
    """Compact-form ST budget ``P_C(rho)``."""
    return 2.0 * cfg.P_s0 + cfg.eta * (1.0 - np.asarray(rho, dtype=float)) * _a1(cfg, ch)


def ps_harvested(cfg: SystemConfig, ch: ChannelSet, rho):
    return 0.5 * cfg.eta * (1.0 - np.asarray(rho, dtype=float)) * _a1(cfg, ch)


def ps_gamma_p_dprime(cfg: SystemConfig, ch: ChannelSet, gp: float, rho):
    """Compact PU SINR target; ``inf`` where the forwarded noise alone breaks the target."""
    rho = np.asarray(rho, dtype=float)
    G = norm2(ch.g)
    den = rho * G - gp * (rho * cfg.N0 + cfg.NC)
    num = (2.0 * cfg.P_p * rho * G + rho * cfg.N0 + cfg.NC) * gp
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def _forward_gain(cfg: SystemConfig, ch: ChannelSet, rho: float) -> float:
    G = norm2(ch.g)
    return 2.0 * cfg.P_p * rho * G * G + rho * G * cfg.N0 + G * cfg.NC


def ps_max_pu_rate(cfg: SystemConfig, ch: ChannelSet) -> tuple[float, float]:
    """Largest PU rate (all ST power relays) and the split ratio achieving it."""
    require_nondegenerate(ch)
    Nt, NC, N0 = cfg.N_tilde0, cfg.NC, cfg.N0
    direct = 2.0 * cfg.P_p * abs(ch.h_p) ** 2 / Nt
    a1, b1, c1 = _a1(cfg, ch), 2.0 * cfg.P_s0, norm2(ch.h_sp)
    eta = cfg.eta
    E = b1 + a1 * eta
    if E == 0.0:
        return 0.5 * math.log2(1.0 + direct), 1.0
    if NC == 0.0:
        # no conversion noise: shrinking the information branch costs nothing
        rho = 0.0
    elif eta == 0.0:
        # flat budget, so the full information branch wins (C1/B1 -> inf)
        rho = 1.0
    else:
        A1 = a1 * a1 * eta * Nt / NC - (a1 * eta) ** 2 * c1
        B1 = 2.0 * a1 * eta * Nt + 2.0 * E * a1 * eta * c1
        C1 = Nt * E + c1 * E * E
        disc = B1 * B1 + 4.0 * A1 * C1
        if not disc > 0:
            raise InvariantViolation(f"split-ratio discriminant not positive: {disc:.6g}")
        rho = min(2.0 * C1 / (B1 + math.sqrt(disc)), 1.0)
    return 0.5 * math.log2(1.0 + direct + _relay_snr(cfg, ch, rho)), rho


def _relay_snr(cfg: SystemConfig, ch: ChannelSet, rho: float) -> float:
    """Phase-II PU SNR with the whole ST budget on the matched relay beam."""
    if rho <= 0.0 and cfg.NC > 0.0:
        return 0.0
    a1, c1, Nt = _a1(cfg, ch), norm2(ch.h_sp), cfg.N_tilde0
    P_C = float(ps_budget(cfg, ch, rho))
    if P_C <= 0.0:
        return 0.0
    conv = cfg.NC / rho if cfg.NC > 0.0 else 0.0
    f1 = Nt * (a1 + conv) / (c1 * P_C) + cfg.N0 + conv
    return 2.0 * cfg.P_p * norm2(ch.g) / f1


def _nonpositive_set(A: float, B: float, C: float) -> Interval | None:
    """Where ``A x^2 + B x + C <= 0`` for ``A >= 0``; ``None`` if nowhere."""
    if A > 0:
        disc = B * B - 4.0 * A * C
        if disc < 0:
            return None
        sq = math.sqrt(disc)
        q = -0.5 * (B + math.copysign(sq, B))
        r1 = q / A
        r2 = C / q if q != 0 else r1
        return (min(r1, r2), max(r1, r2))
    if B > 0:
        return (-math.inf, -C / B)
    if B < 0:
        return (-C / B, math.inf)
    return (-math.inf, math.inf) if C <= 0 else None


def _rho_interval(cfg: SystemConfig, ch: ChannelSet, gp: float, c: float) -> list[Interval]:
    a1 = _a1(cfg, ch)
    a = cfg.eta * a1
    G = norm2(ch.g)
    NC, Ps2 = cfg.NC, 2.0 * cfg.P_s0
    b = G - gp * cfg.N0
    if b <= 0:
        return []
    A = a * b
    B = -a * gp * NC - b * (Ps2 + a) + c * a1
    C = NC * (gp * (Ps2 + a) + c)
    hit = _nonpositive_set(A, B, C)
    if hit is None:
        return []
    lo = max(hit[0], gp * NC / b, 0.0)
    hi = min(hit[1], 1.0)
    if hi < lo or hi <= 0.0:
        return []
    return [(lo, hi)]


def ps_feasible_rho_range(cfg: SystemConfig, ch: ChannelSet, r_p: float) -> list[Interval]:
    """Split ratios at which full-power relaying meets the PU target."""
    require_nondegenerate(ch)
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    if gp <= 0:
        return [(0.0, 1.0)]
    return _rho_interval(cfg, ch, gp, gp * cfg.N_tilde0 / norm2(ch.h_sp))


def ps_zf_rho_range(cfg: SystemConfig, ch: ChannelSet, r_p: float) -> list[Interval]:
    """Feasible split ratios when the relay beam must also null the SU."""
    require_zf_capable(ch)
    require_nondegenerate(ch)
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    if gp <= 0:
        return [(0.0, 1.0)]
    z = 1.0 - alignment_cos2(ch.h_sp, ch.h_s)
    if z <= 0:
        return []
    return _rho_interval(cfg, ch, gp, gp * cfg.N_tilde0 / (norm2(ch.h_sp) * z))


def _state(cfg, ch, gp, rho) -> PowerSplitState:
    gpp = float(ps_gamma_p_dprime(cfg, ch, gp, rho)) if gp > 0 else 0.0
    return PowerSplitState(rho, gp, gpp, float(ps_harvested(cfg, ch, rho)),
                           float(ps_budget(cfg, ch, rho)))


def _assemble(cfg: SystemConfig, ch: ChannelSet, scheme: Scheme, state: PowerSplitState,
              w_s: np.ndarray, w_c: np.ndarray) -> SchemeSolution:
    """Physical beams and achieved rates from compact-form beams."""
    rho, Nt = state.rho, cfg.N_tilde0
    K = _forward_gain(cfg, ch, rho)
    w_p = w_c / math.sqrt(K) if K > 0 else np.zeros_like(w_c)
    G = norm2(ch.g)
    relay = abs(np.vdot(ch.h_sp, w_p)) ** 2
    sig = relay * 2.0 * cfg.P_p * rho * G * G
    fwd_noise = relay * G * (rho * cfg.N0 + cfg.NC)
    intf_pu = abs(np.vdot(ch.h_sp, w_s)) ** 2
    snr_pu = 2.0 * cfg.P_p * abs(ch.h_p) ** 2 / Nt + sig / (fwd_noise + intf_pu + Nt)
    sinr_su = abs(np.vdot(ch.h_s, w_s)) ** 2 / (abs(np.vdot(ch.h_s, w_c)) ** 2 + Nt)
    return SchemeSolution(scheme, True, state, w_s, w_p,
                          0.5 * math.log2(1.0 + snr_pu), 0.5 * math.log2(1.0 + sinr_su))


def _direct_only(cfg, ch, scheme, rho, gp, zf: bool) -> SchemeSolution:
    # PU served by the direct link: no relay, every watt to the SU
    state = _state(cfg, ch, gp, rho)
    d = zf_direction(ch.h_s, ch.h_sp) if zf else ch.h_s / math.sqrt(norm2(ch.h_s))
    w_s = math.sqrt(max(state.P_C, 0.0)) * d
    return _assemble(cfg, ch, scheme, state, w_s, np.zeros(ch.N, dtype=complex))


def ps_solve_at_rho(cfg: SystemConfig, ch: ChannelSet, r_p: float, rho: float,
                    settings: SolverSettings | None = None, *,
                    P_C: float | None = None,
                    scheme: Scheme = Scheme.POWER_SPLIT) -> SchemeSolution:
    """Optimal beams for a fixed split ratio; ``P_C`` overrides the budget."""
    require_nondegenerate(ch)
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    state = _state(cfg, ch, gp, rho)
    if P_C is not None:
        state = PowerSplitState(rho, state.gamma_p_prime, state.gamma_p_dprime,
                                0.5 * (P_C - 2.0 * cfg.P_s0), P_C)
    if gp <= 0:
        w_s = math.sqrt(max(state.P_C, 0.0)) * ch.h_s / math.sqrt(norm2(ch.h_s))
        return _assemble(cfg, ch, scheme, state, w_s, np.zeros(ch.N, dtype=complex))
    if not np.isfinite(state.gamma_p_dprime) or state.P_C <= 0:
        return SchemeSolution.infeasible(scheme, state)
    prob = DualProblem(ch.h_sp, ch.h_s, cfg.N_tilde0, state.gamma_p_dprime, state.P_C)
    try:
        sol = solve_dual(prob, settings)
    except FeasibilityError:
        return SchemeSolution.infeasible(scheme, state)
    return _assemble(cfg, ch, scheme, state, sol.w2, sol.w1)


def ps_solve_optimal(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                     settings: SolverSettings | None = None) -> SchemeSolution:
    """Best split ratio by grid plus golden-section search on the closed-form inner optimum."""
    settings = settings or SolverSettings()
    require_nondegenerate(ch)
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    if gp <= 0:
        return _direct_only(cfg, ch, Scheme.POWER_SPLIT, 0.0, gp, zf=False)
    ranges = ps_feasible_rho_range(cfg, ch, r_p)
    if not ranges:
        return SchemeSolution.infeasible(Scheme.POWER_SPLIT)
    n1, n2 = norm2(ch.h_sp), norm2(ch.h_s)
    zeta2 = alignment_cos2(ch.h_sp, ch.h_s)

    def objective(rho):
        return gamma2_batch(ps_gamma_p_dprime(cfg, ch, gp, rho), ps_budget(cfg, ch, rho),
                            n1, n2, zeta2, cfg.N_tilde0)

    best = None
    for lo, hi in ranges:
        found = grid_golden_max_1d(objective, lo, hi, settings.grid_coarse,
                                   settings.refine_rounds)
        if found is not None and (best is None or found[1] > best[1]):
            best = found
    if best is None:
        return SchemeSolution.infeasible(Scheme.POWER_SPLIT)
    return ps_solve_at_rho(cfg, ch, r_p, best[0], settings)


def ps_zf_rho(cfg: SystemConfig, ch: ChannelSet, gp: float) -> float:
    """Split ratio maximizing the ZF secondary power (clamped to [0, 1])."""
    if gp <= 0:
        return 0.0
    a1 = _a1(cfg, ch)
    a = cfg.eta * a1
    b = norm2(ch.g) - gp * cfg.N0
    if a == 0.0 or b <= 0:
        return 1.0
    z = 1.0 - alignment_cos2(ch.h_sp, ch.h_s)
    c_zf = gp * cfg.N_tilde0 / (norm2(ch.h_sp) * z)
    rho = (math.sqrt((gp * a1 + b) * cfg.NC * c_zf / a) + gp * cfg.NC) / b
    return min(max(rho, 0.0), 1.0)


def ps_solve_zf_at_rho(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                       rho: float) -> SchemeSolution:
    """ZF beams for a fixed split ratio."""
    require_zf_capable(ch)
    require_nondegenerate(ch)
    scheme = Scheme.POWER_SPLIT_ZF
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    if gp <= 0:
        return _direct_only(cfg, ch, scheme, rho, gp, zf=True)
    z = 1.0 - alignment_cos2(ch.h_sp, ch.h_s)
    state = _state(cfg, ch, gp, rho)
    if z <= 1e-14:
        return SchemeSolution.infeasible(scheme, state)
    q_p = state.gamma_p_dprime * cfg.N_tilde0 / (norm2(ch.h_sp) * z)
    q_s = state.P_C - q_p
    if not np.isfinite(q_p) or q_s < -1e-12 * max(1.0, state.P_C):
        return SchemeSolution.infeasible(scheme, state)
    w_c = math.sqrt(q_p) * zf_direction(ch.h_sp, ch.h_s)
    w_s = math.sqrt(max(q_s, 0.0)) * zf_direction(ch.h_s, ch.h_sp)
    return _assemble(cfg, ch, scheme, state, w_s, w_c)


def ps_solve_zf(cfg: SystemConfig, ch: ChannelSet, r_p: float) -> SchemeSolution:
    """Closed-form split ratio with the relay and secondary beams nulling each other's receiver."""
    require_zf_capable(ch)
    require_nondegenerate(ch)
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    if gp <= 0:
        return _direct_only(cfg, ch, Scheme.POWER_SPLIT_ZF, 0.0, gp, zf=True)
    if not ps_zf_rho_range(cfg, ch, r_p):
        return SchemeSolution.infeasible(Scheme.POWER_SPLIT_ZF)
    return ps_solve_zf_at_rho(cfg, ch, r_p, ps_zf_rho(cfg, ch, gp))


def ps_baseline_no_energy(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                          settings: SolverSettings | None = None) -> SchemeSolution:
    """Same two-phase relaying with every received watt forwarded and nothing harvested."""
    scheme = Scheme.BASELINE_NO_ENERGY
    gp = ps_gamma_p_prime(cfg, r_p, ch.h_p)
    if gp > 0 and cfg.P_s0 == 0.0:
        return SchemeSolution.infeasible(scheme)
    return ps_solve_at_rho(cfg, ch, r_p, 1.0, settings, P_C=2.0 * cfg.P_s0, scheme=scheme)
