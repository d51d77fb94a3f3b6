"""Brute-force reference maximizers for tests. Production solvers never call these.

Dual problem: any component of ``w1`` or ``w2`` outside span{h1, h2}
changes no inner product in either SINR and only costs power, so both
beams are searched inside that 2-D span. Pick the orthonormal basis
``e1 = h1/||h1||`` and ``e2`` with phases chosen so that ``h1 = ||h1|| (1, 0)``
and ``h2 = ||h2|| (c, s)`` with real ``c, s >= 0``. A unit beam is
``(cos t, sin t * exp(j phi))`` up to a free global phase, and then

* the gain toward ``h1`` depends on ``t`` only,
* ``phi`` of ``w1`` only changes the leak into user 2 (minimize it),
* ``phi`` of ``w2`` only changes the gain toward user 2 (maximize it).

For fixed directions the best split of ``P_C`` gives user 1 exactly the
power its target needs, which is a scalar linear equation. What remains
is a grid over ``(t1, t2)`` plus independent phase grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ChannelSet, FeasibilityError, InputError, SystemConfig, norm2, project_pair
from .dual import DualProblem, dual_feasible
from .ideal import ideal_max_pu_rate


@dataclass(frozen=True)
class SpanGrid:
    """``n_mag`` intervals per angle/magnitude axis, ``n_phase`` points per phase axis.

    Grids nest when a count is doubled. ``refine_rounds`` zooms 4x around
    the incumbent per round; use 0 for a pure grid.
    """

    n_mag: int = 64
    n_phase: int = 64
    refine_rounds: int = 4

    def __post_init__(self):
        if self.n_mag < 16 or self.n_phase < 16:
            raise InputError("SpanGrid needs n_mag >= 16 and n_phase >= 16")
        if self.refine_rounds < 0:
            raise InputError("refine_rounds must be non-negative")


def _span_coords(prob: DualProblem) -> tuple[float, float, float, float]:
    n1, n2 = norm2(prob.h1), norm2(prob.h2)
    par, perp = project_pair(prob.h1, prob.h2)
    c = math.sqrt(norm2(par) / n2)
    s = math.sqrt(norm2(perp) / n2)
    return math.sqrt(n1), math.sqrt(n2), c, s


def _leak(t, phi, k2, c, s):
    """``|h2^H u|^2`` for ``u = (cos t, sin t e^{j phi})``; broadcasts."""
    return k2 * k2 * np.abs(c * np.cos(t) + s * np.sin(t) * np.exp(1j * phi)) ** 2


def _dual_value(prob, k1, k2, c, s, t1, t2, phi1, phi2):
    """Best user-2 SINR over the (t1, t2) mesh, phases chosen per angle."""
    sig, g1, P = prob.sigma2, prob.gamma1, prob.P_C
    a21_all = _leak(t1[:, None], phi1[None, :], k2, c, s)
    j1 = a21_all.argmin(axis=1)
    a21 = a21_all[np.arange(t1.size), j1]
    a22_all = _leak(t2[:, None], phi2[None, :], k2, c, s)
    j2 = a22_all.argmax(axis=1)
    a22 = a22_all[np.arange(t2.size), j2]
    a11 = (k1 * np.cos(t1)) ** 2
    a12 = (k1 * np.cos(t2)) ** 2
    A11, A12 = a11[:, None], a12[None, :]
    A21, A22 = a21[:, None], a22[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        p1 = np.where(g1 > 0, g1 * (sig + A12 * P) / (A11 + g1 * A12), 0.0)
        p2 = P - p1
        val = np.where(((p1 <= P) & (A11 > 0)) | (g1 == 0), A22 * p2 / (sig + A21 * p1), -np.inf)
    val = np.where(np.isfinite(val) & (p2 >= 0), val, -np.inf)
    k = int(np.argmax(val))
    i, j = np.unravel_index(k, val.shape)
    return float(val[i, j]), t1[i], t2[j], phi1[j1[i]], phi2[j2[j]]


def _zoom(center, width, lo, hi, n):
    a, b = max(lo, center - width / 2), min(hi, center + width / 2)
    return np.linspace(a, b, n + 1)


def oracle_best_su_rate(prob: DualProblem, grid: SpanGrid | None = None) -> float:
    """Largest user-2 SINR found on the span grid (a lower bound on the optimum)."""
    grid = grid or SpanGrid()
    if not dual_feasible(prob):
        raise FeasibilityError("user-1 target unreachable")
    k1, k2, c, s = _span_coords(prob)
    half = math.pi / 2
    t = np.linspace(0.0, half, grid.n_mag + 1)
    phi = np.arange(grid.n_phase) * (2 * math.pi / grid.n_phase)
    best, bt1, bt2, bp1, bp2 = _dual_value(prob, k1, k2, c, s, t, t, phi, phi)
    w_t, w_p = half / grid.n_mag * 2, 2 * math.pi / grid.n_phase * 2
    for _ in range(grid.refine_rounds):
        if not np.isfinite(best):
            break
        t1 = _zoom(bt1, w_t, 0.0, half, grid.n_mag)
        t2 = _zoom(bt2, w_t, 0.0, half, grid.n_mag)
        f1 = _zoom(bp1, w_p, bp1 - math.pi, bp1 + math.pi, grid.n_phase)
        f2 = _zoom(bp2, w_p, bp2 - math.pi, bp2 + math.pi, grid.n_phase)
        v, a1, a2, q1, q2 = _dual_value(prob, k1, k2, c, s, t1, t2, f1, f2)
        if v > best:
            best, bt1, bt2, bp1, bp2 = v, a1, a2, q1, q2
        w_t, w_p = w_t / 4, w_p / 4
    if not np.isfinite(best):
        raise FeasibilityError("no feasible grid point")
    return best


def oracle_ideal(cfg: SystemConfig, ch: ChannelSet, r_p: float,
                 grid: SpanGrid | None = None) -> float:
    """Largest ``|h_s^H w_s|`` on a (beta, q_p, lambda) grid meeting the PU target.

    ``w_s`` is searched as ``sqrt(q_s)(sqrt(lam) u_par + sqrt(1-lam) u_perp)``,
    ``u_par`` along the part of ``h_s`` parallel to ``h_sp``; every grid point
    spends the whole budget.
    """
    grid = grid or SpanGrid()
    r_max = ideal_max_pu_rate(cfg, ch).rate
    if r_p > r_max * (1 + 1e-12) + 1e-12:
        raise FeasibilityError(f"r_p={r_p:.6g} exceeds the maximum PU rate {r_max:.6g}")
    gamma = 2.0 ** r_p - 1.0
    par, perp = project_pair(ch.h_sp, ch.h_s)
    k_par, k_perp = math.sqrt(norm2(par)), math.sqrt(norm2(perp))
    H, hp, Nt = norm2(ch.h_sp), abs(ch.h_p), cfg.N_tilde0
    Pp, budget0, ePp = cfg.P_p, cfg.P_s0, cfg.eta * cfg.P_p
    q_hi = budget0 + ePp

    def evaluate(betas, qs_, lams):
        B, Q, L = np.meshgrid(betas, qs_, lams, indexing="ij")
        q_s = budget0 + B * ePp - Q
        amp = np.sqrt(np.maximum(1 - B, 0) * Pp) * hp + np.sqrt(Q * H)
        ok = (q_s >= 0) & (amp ** 2 >= gamma * (np.maximum(q_s, 0) * L * H + Nt) * (1 - 1e-12))
        val = np.sqrt(np.maximum(q_s, 0)) * (np.sqrt(L) * k_par + np.sqrt(1 - L) * k_perp)
        val = np.where(ok, val, -np.inf)
        k = int(np.argmax(val))
        i, j, m = np.unravel_index(k, val.shape)
        return float(val[i, j, m]), betas[i], qs_[j], lams[m]

    n = grid.n_mag
    lam_n = grid.n_phase
    best, b, q, l = evaluate(np.linspace(0, 1, n + 1), np.linspace(0, q_hi, n + 1),
                             np.linspace(0, 1, lam_n + 1))
    wb, wq, wl = 2.0 / n, 2.0 * q_hi / n, 2.0 / lam_n
    for _ in range(grid.refine_rounds):
        if not np.isfinite(best):
            break
        v, b2, q2, l2 = evaluate(_zoom(b, wb, 0, 1, n), _zoom(q, wq, 0, q_hi, n),
                                 _zoom(l, wl, 0, 1, lam_n))
        if v > best:
            best, b, q, l = v, b2, q2, l2
        wb, wq, wl = wb / 4, wq / 4, wl / 4
    return best if np.isfinite(best) else 0.0
