"""Shared random-instance builders for the tests."""

import numpy as np

from cogcoop import ChannelSet, DualProblem, SystemConfig


def cvec(rng, n, scale=1.0):
    return scale * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)


def random_dual(rng, n=None, *, feasible=True):
    n = n or int(rng.integers(2, 5))
    h1, h2 = cvec(rng, n), cvec(rng, n)
    sigma2 = float(rng.uniform(0.5, 2.0))
    P_C = float(10 ** rng.uniform(-0.5, 2))
    cap = P_C * np.vdot(h1, h1).real / sigma2
    gamma1 = float(rng.uniform(0.0, 0.95) * cap) if feasible else float(1.1 * cap)
    return DualProblem(h1, h2, sigma2, gamma1, P_C)


def random_system(rng, n=None):
    n = n or int(rng.integers(2, 5))
    ch = ChannelSet(complex(cvec(rng, 1, 0.3)[0]), cvec(rng, n), cvec(rng, n), cvec(rng, n))
    cfg = SystemConfig(P_p=float(10 ** rng.uniform(0.5, 2)), P_s0=float(10 ** rng.uniform(-1, 1)),
                       eta=float(rng.uniform(0.05, 1.0)), N0=float(rng.uniform(0.5, 1.5)),
                       NC=float(rng.uniform(0.3, 1.5)), P_max=1000.0, N=n)
    return cfg, ch


def sinrs(prob, w1, w2):
    s = prob.sigma2
    g1 = abs(np.vdot(prob.h1, w1)) ** 2 / (s + abs(np.vdot(prob.h1, w2)) ** 2)
    g2 = abs(np.vdot(prob.h2, w2)) ** 2 / (s + abs(np.vdot(prob.h2, w1)) ** 2)
    return g1, g2
