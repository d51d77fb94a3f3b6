"""Two-user SINR maximization through uplink-downlink duality.

Problem: maximize ``|h2^H w2|^2 / (sigma2 + |h2^H w1|^2)`` subject to
``|h1^H w1|^2 / (sigma2 + |h1^H w2|^2) >= gamma1`` and
``||w1||^2 + ||w2||^2 <= P_C``.

The optimum is characterized by two dual (virtual uplink) powers
``lambda1 + lambda2 = P_C``; ``lambda1`` is a nondecreasing function of
``lambda2`` fixed by the user-1 target, so ``lambda2`` is found by
bisection. The receive filters of the dual uplink are the downlink beam
directions, and the downlink powers follow from a 2x2 linear system.

``gamma2_batch`` evaluates only the optimal objective for many
``(gamma1, P_C)`` pairs at once. It solves the same scalar equation,
which clears to a quadratic in ``lambda2``, by its closed-form root; the
search loops of the power- and time-splitting solvers call it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (DegenerateGeometryError, FeasibilityError, InputError,
                   InvariantViolation, SolverSettings, norm2)


@dataclass(frozen=True)
class DualProblem:
    h1: np.ndarray
    h2: np.ndarray
    sigma2: float
    gamma1: float
    P_C: float

    def __post_init__(self):
        h1 = np.asarray(self.h1, dtype=np.complex128).reshape(-1)
        h2 = np.asarray(self.h2, dtype=np.complex128).reshape(-1)
        if h1.shape != h2.shape:
            raise InputError("h1 and h2 must have the same length")
        if norm2(h1) == 0.0 or norm2(h2) == 0.0:
            raise InputError("h1 and h2 must be nonzero")
        if not self.gamma1 >= 0:
            raise InputError("gamma1 must be non-negative")
        if not self.P_C > 0:
            raise InputError("P_C must be positive")
        if not self.sigma2 > 0:
            raise InputError("sigma2 must be positive")
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)

    @property
    def zeta2(self) -> float:
        n1, n2 = norm2(self.h1), norm2(self.h2)
        return float(min(1.0, abs(np.vdot(self.h1, self.h2)) ** 2 / (n1 * n2)))


@dataclass(frozen=True)
class DualSolution:
    lambda1: float
    lambda2: float
    gamma2: float
    w1: np.ndarray
    w2: np.ndarray
    p1: float
    p2: float
    residual: float = 0.0


def dual_feasible(prob: DualProblem) -> bool:
    """True when sending all power to user 1 meets its target."""
    return prob.P_C * norm2(prob.h1) / prob.sigma2 >= prob.gamma1


def rank_one_solve(sigma2: float, lam: float, h: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply ``(sigma2*I + lam*h h^H)^-1`` to ``x`` (Sherman-Morrison)."""
    h = np.asarray(h, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    coef = lam * np.vdot(h, x) / (sigma2 + lam * norm2(h))
    return (x - coef * h) / sigma2


def _lambda1(lam2, gamma1, n1, n2, z, s):
    return gamma1 * s * (s + lam2 * n2) / (n1 * (s + lam2 * n2 * z))


def _gamma2(lam1, lam2, n1, n2, z, s):
    return lam2 * n2 * (s + lam1 * n1 * z) / (s * (s + lam1 * n1))


def _bisect_lambda2(gamma1, P_C, n1, n2, z, s, tol):
    def resid(x):
        return _lambda1(x, gamma1, n1, n2, z, s) + x - P_C

    lo, hi = 0.0, P_C
    r_lo, r_hi = resid(lo), resid(hi)
    # float resolution near P_C bounds what any bracket can deliver
    tol = max(tol, 4.0 * np.finfo(float).eps * P_C)
    if r_lo > tol or r_hi < -tol:
        raise InvariantViolation(
            f"lambda2 bracket failed: residuals {r_lo:.3e}, {r_hi:.3e}")
    if r_lo >= 0:
        # target needs the whole budget: rounding may put the root a hair below 0
        return lo, abs(r_lo)
    max_iter = min(400, math.ceil(math.log2(max(P_C / tol, 2.0))) + 60)
    x, r = hi, r_hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        r_mid = resid(mid)
        if abs(r_mid) < abs(r):
            x, r = mid, r_mid
        if abs(r_mid) <= tol:
            break
        if r_mid < 0:
            lo = mid
        else:
            hi = mid
    return x, abs(r)


def solve_dual(prob: DualProblem, settings: SolverSettings | None = None) -> DualSolution:
    settings = settings or SolverSettings()
    if not dual_feasible(prob):
        raise FeasibilityError(
            f"target gamma1={prob.gamma1:.6g} unreachable with P_C={prob.P_C:.6g}")
    h1, h2, s = prob.h1, prob.h2, prob.sigma2
    n1, n2 = norm2(h1), norm2(h2)
    z = 1.0 - prob.zeta2

    lam2, residual = _bisect_lambda2(prob.gamma1, prob.P_C, n1, n2, z, s,
                                     settings.bisect_tol)
    lam1 = _lambda1(lam2, prob.gamma1, n1, n2, z, s)
    gamma2 = _gamma2(lam1, lam2, n1, n2, z, s)

    d1 = rank_one_solve(s, lam2, h2, h1)
    d2 = rank_one_solve(s, lam1, h1, h2)
    u1 = d1 / np.sqrt(norm2(d1))
    u2 = d2 / np.sqrt(norm2(d2))

    a11 = abs(np.vdot(h1, u1)) ** 2
    a12 = abs(np.vdot(h1, u2)) ** 2
    a21 = abs(np.vdot(h2, u1)) ** 2
    a22 = abs(np.vdot(h2, u2)) ** 2
    g1 = prob.gamma1
    M = np.array([[a11, -g1 * a12], [-gamma2 * a21, a22]])
    det = a11 * a22 - g1 * gamma2 * a12 * a21
    if abs(det) <= 1e-12 * a11 * a22:
        raise DegenerateGeometryError(
            "downlink power system is singular (collinear channels with "
            "incompatible SINR targets)")
    p1, p2 = np.linalg.solve(M, np.array([g1 * s, gamma2 * s]))
    if p1 < -1e-9 * prob.P_C or p2 < -1e-9 * prob.P_C:
        raise DegenerateGeometryError(f"negative downlink power ({p1:.3e}, {p2:.3e})")
    p1, p2 = max(float(p1), 0.0), max(float(p2), 0.0)
    return DualSolution(lambda1=float(lam1), lambda2=float(lam2), gamma2=float(gamma2),
                        w1=np.sqrt(p1) * u1, w2=np.sqrt(p2) * u2, p1=p1, p2=p2,
                        residual=float(residual))


def lambda2_closed_form(gamma1, P_C, n1, n2, zeta2, sigma2):
    """Root in ``[0, P_C]`` of ``lambda1(lambda2) + lambda2 = P_C``, vectorized.

    Clearing denominators gives ``A x^2 + B x + C = 0`` with ``A >= 0`` and
    ``C <= 0`` on feasible inputs; the stable root form also covers ``A = 0``.
    """
    g1 = np.asarray(gamma1, dtype=float)
    pc = np.asarray(P_C, dtype=float)
    z = 1.0 - zeta2
    s = sigma2
    A = n1 * n2 * z
    B = g1 * s * n2 - n1 * (pc * n2 * z - s)
    C = s * (g1 * s - n1 * pc)
    disc = np.sqrt(np.maximum(B * B - 4.0 * A * C, 0.0))
    den = B + disc
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(C < 0, -2.0 * C / np.where(den > 0, den, 1.0), 0.0)
    return np.clip(x, 0.0, pc)


def gamma2_batch(gamma1, P_C, n1: float, n2: float, zeta2: float,
                 sigma2: float) -> np.ndarray:
    """Optimal user-2 SINR for arrays of targets/budgets; ``-inf`` where infeasible.

    ``n1``, ``n2`` are squared channel norms and ``zeta2`` their squared
    alignment cosine.
    """
    g1 = np.asarray(gamma1, dtype=float)
    pc = np.asarray(P_C, dtype=float)
    g1, pc = np.broadcast_arrays(g1, pc)
    ok = np.isfinite(g1) & (g1 >= 0) & (pc > 0) & (pc * n1 / sigma2 >= g1)
    g1s = np.where(ok, g1, 0.0)
    pcs = np.where(ok, pc, 1.0)
    lam2 = lambda2_closed_form(g1s, pcs, n1, n2, zeta2, sigma2)
    lam1 = pcs - lam2
    g2 = _gamma2(lam1, lam2, n1, n2, 1.0 - zeta2, sigma2)
    return np.where(ok, np.maximum(g2, 0.0), -np.inf)
