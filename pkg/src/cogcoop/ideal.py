"""Ideal cooperation: the ST knows the primary message non-causally and gets
``eta * beta * P_p`` of the PT's energy over a lossless backhaul.

The SU sees no primary interference (dirty-paper coding is modeled as
interference-free reception). The PU combines the direct signal and the
ST's coherent relay beam ``w_p`` and suffers interference from ``w_s``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import (ChannelSet, InvariantViolation, Scheme, SchemeSolution,
                   SolverSettings, SystemConfig, alignment_cos2, norm2,
                   project_pair, require_nondegenerate, require_zf_capable,
                   zf_direction)
from .search import nested_grid_max_2d, profile_max_2d


@dataclass(frozen=True)
class IdealSplit:
    beta: float
    q_p: float
    q_s: float
    lam: float


class PuRateBound(NamedTuple):
    rate: float
    beta: float


@dataclass(frozen=True)
class RateRegionCurve:
    scheme: Scheme
    r_p: np.ndarray
    rate_su: np.ndarray
    feasible: np.ndarray


class DegenerateLinkWarning(UserWarning):
    pass


def ideal_max_pu_rate(cfg: SystemConfig, ch: ChannelSet) -> PuRateBound:
    """Largest supportable PU rate and the energy-transfer fraction achieving it."""
    Pp, Ps0, eta, Nt = cfg.P_p, cfg.P_s0, cfg.eta, cfg.N_tilde0
    hp2 = abs(ch.h_p) ** 2
    H = norm2(ch.h_sp)
    if eta == 0.0 and Ps0 == 0.0 and hp2 == 0.0:
        warnings.warn("no power can reach the PU", DegenerateLinkWarning, stacklevel=2)
        return PuRateBound(0.0, 0.0)
    if eta == 0.0 or Pp * eta ** 2 * H < Ps0 * hp2:
        amp = math.sqrt(Pp * hp2) + math.sqrt(Ps0 * H)
        return PuRateBound(math.log2(1.0 + amp ** 2 / Nt), 0.0)
    beta = (Pp * eta ** 2 * H - Ps0 * hp2) / (Pp * eta ** 2 * H + eta * Pp * hp2)
    beta = min(max(beta, 0.0), 1.0)
    snr = (Pp * eta + Ps0) / (eta ** 2 * H + eta * hp2) * (hp2 + eta * H) ** 2 / Nt
    return PuRateBound(math.log2(1.0 + snr), beta)


def _relay_beam(ch: ChannelSet, q_p: float) -> np.ndarray:
    # phase-aligned with the direct path so the two amplitudes add
    phase = np.exp(1j * np.angle(ch.h_p)) if ch.h_p != 0 else 1.0
    return math.sqrt(max(q_p, 0.0)) * ch.h_sp / math.sqrt(norm2(ch.h_sp)) * phase


def _span_basis(ch: ChannelSet) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Unit vectors along Pi(h_s) and Pi_perp(h_s) w.r.t. h_sp, and both norms."""
    par, perp = project_pair(ch.h_sp, ch.h_s)
    k_par, k_perp = math.sqrt(norm2(par)), math.sqrt(norm2(perp))
    c = np.vdot(ch.h_sp, ch.h_s)
    rot = c / abs(c) if abs(c) > 0 else 1.0
    u_par = ch.h_sp / math.sqrt(norm2(ch.h_sp)) * rot
    u_perp = perp / k_perp if k_perp > 1e-14 * math.sqrt(norm2(ch.h_s)) else np.zeros_like(perp)
    return u_par, u_perp, k_par, k_perp


def _rates(cfg: SystemConfig, ch: ChannelSet, beta: float, w_s: np.ndarray,
           w_p: np.ndarray) -> tuple[float, float]:
    Nt = cfg.N_tilde0
    direct = math.sqrt(max(1.0 - beta, 0.0) * cfg.P_p) * ch.h_p
    sig = abs(direct + np.vdot(ch.h_sp, w_p)) ** 2
    intf = abs(np.vdot(ch.h_sp, w_s)) ** 2
    rate_pu = math.log2(1.0 + sig / (intf + Nt))
    rate_su = math.log2(1.0 + abs(np.vdot(ch.h_s, w_s)) ** 2 / Nt)
    return rate_pu, rate_su


def _build(cfg: SystemConfig, ch: ChannelSet, scheme: Scheme, beta: float, q_p: float,
           q_s: float, lam: float) -> SchemeSolution:
    u_par, u_perp, _, k_perp = _span_basis(ch)
    if k_perp == 0.0:
        lam = 1.0
    w_s = math.sqrt(max(q_s, 0.0)) * (math.sqrt(lam) * u_par + math.sqrt(1.0 - lam) * u_perp)
    w_p = _relay_beam(ch, q_p)
    rate_pu, rate_su = _rates(cfg, ch, beta, w_s, w_p)
    return SchemeSolution(scheme, True, IdealSplit(beta, q_p, q_s, lam), w_s, w_p,
                          rate_pu, rate_su)


def _boundary_solution(cfg, ch, scheme, beta_star) -> SchemeSolution:
    """All ST power relays the primary signal; the SU gets nothing."""
    q_p = cfg.P_s0 + beta_star * cfg.eta * cfg.P_p
    w_p = _relay_beam(ch, q_p)
    w_s = np.zeros(ch.N, dtype=complex)
    rate_pu, rate_su = _rates(cfg, ch, beta_star, w_s, w_p)
    return SchemeSolution(scheme, True, IdealSplit(beta_star, q_p, 0.0, 0.0), w_s, w_p,
                          rate_pu, rate_su)


def _beyond(r_p: float, r_max: float) -> bool:
    return r_p > r_max + 1e-12 * max(1.0, r_max)


def _at_boundary(r_p: float, r_max: float) -> bool:
    return r_p >= r_max - 1e-12 * max(1.0, r_max)


def ideal_solve_optimal(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                        settings: SolverSettings | None = None) -> SchemeSolution:
    """Maximize the SU rate over (beta, q_p) with the PU and power constraints active.

    For fixed (beta, q_p) the secondary beam lives in span{h_s, h_sp}; the
    PU constraint fixes how much of its power leaks along h_sp, which
    leaves a two-variable objective searched by a refined grid. For each
    beta, q_p is searched as a fraction of its feasible interval, which is
    a thin sliver of the (beta, q_p) box at high targets.
    """
    settings = settings or SolverSettings()
    require_nondegenerate(ch)
    r_max, beta_star = ideal_max_pu_rate(cfg, ch)
    if _beyond(r_p, r_max):
        return SchemeSolution.infeasible(Scheme.IDEAL)
    if _at_boundary(r_p, r_max):
        return _boundary_solution(cfg, ch, Scheme.IDEAL, beta_star)

    Pp, Ps0, eta, Nt = cfg.P_p, cfg.P_s0, cfg.eta, cfg.N_tilde0
    gamma = 2.0 ** r_p - 1.0
    if gamma == 0.0:
        beta = 1.0 if eta > 0 else 0.0
        q_s = Ps0 + beta * eta * Pp
        return _build(cfg, ch, Scheme.IDEAL, beta, 0.0, q_s,
                      alignment_cos2(ch.h_sp, ch.h_s))

    H = norm2(ch.h_sp)
    hp = abs(ch.h_p)
    _, _, k_par, k_perp = _span_basis(ch)

    def leak_and_power(beta, q_p):
        amp = np.sqrt(np.maximum(1.0 - beta, 0.0) * Pp) * hp + np.sqrt(np.maximum(q_p, 0.0) * H)
        leak = (amp ** 2 / gamma - Nt) / H   # lambda * q_s
        q_s = Ps0 + beta * eta * Pp - q_p
        return leak, q_s

    def qp_range(beta):
        # q_p between zero leakage and zero power left for the SU beam
        a = np.sqrt(np.maximum(1.0 - beta, 0.0) * Pp) * hp
        budget = Ps0 + beta * eta * Pp
        lo = np.maximum(np.sqrt(gamma * Nt) - a, 0.0) ** 2 / H
        qa = 1.0 / gamma + 1.0
        qb = 2.0 * a / (gamma * math.sqrt(H))
        qc = a * a / (gamma * H) - Nt / H - budget
        root = (-qb + np.sqrt(np.maximum(qb * qb - 4.0 * qa * qc, 0.0))) / (2.0 * qa)
        hi = np.where(qc <= 0, np.maximum(root, 0.0) ** 2, -1.0)
        return lo, hi

    def to_qp(beta, t):
        lo, hi = qp_range(beta)
        return lo + t * (hi - lo), hi >= lo

    def objective(beta, t):
        q_p, ok_range = to_qp(beta, t)
        leak, q_s = leak_and_power(beta, q_p)
        leak = np.clip(leak, 0.0, None)
        rest = q_s - leak
        ok = ok_range & (rest >= -1e-12 * (Ps0 + eta * Pp))
        rest = np.maximum(rest, 0.0)
        val = np.sqrt(leak) * k_par + np.sqrt(rest) * k_perp
        return np.where(ok, val, -np.inf)

    seeds = [(beta_star, 1.0)]
    if ch.N >= 2:
        zf = ideal_solve_zf(cfg, ch, r_p)
        if zf.feasible:
            seeds.append((zf.split.beta, 0.0))
    res = nested_grid_max_2d(objective, (0.0, 1.0), (0.0, 1.0), settings.grid_coarse,
                             settings.refine_rounds, settings.rel_tol, seeds)
    # the peak rides a thin (beta, t) ridge; a profile search in beta follows it
    prof = profile_max_2d(objective, (0.0, 1.0), (0.0, 1.0), settings.grid_coarse,
                          settings.refine_rounds, [b for b, _ in seeds])
    if res is None or (prof is not None and prof.value > res.value):
        res = prof
    if res is None or res.value <= 0.0:
        return _boundary_solution(cfg, ch, Scheme.IDEAL, beta_star)
    beta = res.x
    q_p = float(to_qp(np.array(beta), np.array(res.y))[0])
    leak, q_s = (float(v) for v in leak_and_power(np.array(beta), np.array(q_p)))
    q_s = max(q_s, 0.0)
    lam = min(max(leak / q_s, 0.0), 1.0) if q_s > 0 else 0.0
    return _build(cfg, ch, Scheme.IDEAL, beta, q_p, q_s, lam)


def ideal_solve_zf(cfg: SystemConfig, ch: ChannelSet, r_p: float) -> SchemeSolution:
    """Closed-form solution with the secondary beam nulled at the PU."""
    require_zf_capable(ch)
    require_nondegenerate(ch)
    Pp, Ps0, eta, Nt = cfg.P_p, cfg.P_s0, cfg.eta, cfg.N_tilde0
    gamma = 2.0 ** r_p - 1.0
    H = norm2(ch.h_sp)
    hp = abs(ch.h_p)
    if hp == 0.0:
        beta = 1.0
    else:
        beta = 1.0 - gamma * Nt / (Pp * (hp + eta * H / hp) ** 2)
        beta = min(max(beta, 0.0), 1.0)
    short = math.sqrt(gamma * Nt) - math.sqrt((1.0 - beta) * Pp) * hp
    q_p = max(0.0, short) ** 2 / H
    q_s = Ps0 + beta * eta * Pp - q_p
    split = IdealSplit(beta, q_p, q_s, 0.0)
    if q_s < -1e-12 * max(1.0, Ps0 + eta * Pp):
        return SchemeSolution.infeasible(Scheme.IDEAL_ZF, split)
    q_s = max(q_s, 0.0)
    w_s = math.sqrt(q_s) * zf_direction(ch.h_s, ch.h_sp)
    w_p = _relay_beam(ch, q_p)
    rate_pu, rate_su = _rates(cfg, ch, beta, w_s, w_p)
    return SchemeSolution(Scheme.IDEAL_ZF, True, split, w_s, w_p, rate_pu, rate_su)


def ideal_zf_secondary_power(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                             beta: np.ndarray) -> np.ndarray:
    """Secondary power left after the ZF relay meets ``r_p``, as a function of beta."""
    gamma = 2.0 ** r_p - 1.0
    H = norm2(ch.h_sp)
    short = np.sqrt(gamma * cfg.N_tilde0) - np.sqrt((1.0 - beta) * cfg.P_p) * abs(ch.h_p)
    return cfg.P_s0 + beta * cfg.eta * cfg.P_p - np.maximum(short, 0.0) ** 2 / H


def check_conic_constraints(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                            sol: SchemeSolution) -> tuple[float, float]:
    """Slacks of the equivalent second-order-cone constraints at a solution.

    Uses ``v = [sqrt(1-beta), sqrt(q_p)]``, ``g = [sqrt(P_p)|h_p|, ||h_sp||]``
    and ``D = diag(eta*P_p, 1)``. Returns ``(cone_slack, power_slack)``;
    both are non-negative for a feasible point and zero when active.
    """
    beta, q_p = sol.split.beta, sol.split.q_p
    v = np.array([math.sqrt(max(1.0 - beta, 0.0)), math.sqrt(q_p)])
    g = np.array([math.sqrt(cfg.P_p) * abs(ch.h_p), math.sqrt(norm2(ch.h_sp))])
    gamma = 2.0 ** r_p - 1.0
    cone = float(g @ v) ** 2 - gamma * (abs(np.vdot(ch.h_sp, sol.w_s)) ** 2 + cfg.N_tilde0)
    power = cfg.P_s0 + cfg.eta * cfg.P_p - (norm2(sol.w_s) + cfg.eta * cfg.P_p * v[0] ** 2
                                            + v[1] ** 2)
    return cone, power


def _check_monotone(curve_rates: np.ndarray, tol: float, scheme: Scheme) -> None:
    rs = np.asarray(curve_rates)
    jumps = np.diff(rs) - tol * np.maximum(1.0, rs[:-1])
    if np.any(jumps > 0):
        i = int(np.argmax(jumps))
        raise InvariantViolation(
            f"{scheme.value} SU rate increases along the region boundary at sample {i}: "
            f"{rs[i]:.12g} -> {rs[i + 1]:.12g}")


def ideal_rate_region(cfg: SystemConfig, ch: ChannelSet, n_points: int,
                      settings: SolverSettings | None = None,
                      solver: Callable[..., SchemeSolution] | None = None) -> RateRegionCurve:
    """Boundary of the (PU rate, SU rate) region for r_p in [0, R_p_max]."""
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    settings = settings or SolverSettings()
    r_max = ideal_max_pu_rate(cfg, ch).rate
    grid = np.linspace(0.0, r_max, n_points)
    if solver is None or solver is ideal_solve_optimal:
        sols = [ideal_solve_optimal(cfg, ch, float(r), settings) for r in grid]
        scheme = Scheme.IDEAL
    else:
        sols = [solver(cfg, ch, float(r)) for r in grid]
        scheme = sols[0].scheme
    su = np.array([s.rate_su if s.feasible else 0.0 for s in sols])
    feas = np.array([s.feasible for s in sols])
    _check_monotone(su, settings.rel_tol, scheme)
    return RateRegionCurve(scheme, grid, su, feas)
