import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogcoop import (ChannelSet, SolverSettings, SystemConfig, UnsupportedConfigurationError,
                     ideal_max_pu_rate, ideal_rate_region, ideal_solve_optimal, ideal_solve_zf,
                     oracle_ideal, ps_solve_optimal, ts_solve_optimal)
from cogcoop.core import norm2, project_pair
from cogcoop.ideal import DegenerateLinkWarning, check_conic_constraints
from cogcoop.presets import get_preset

from helpers import random_system

seeds = st.integers(0, 2 ** 32 - 1)


def _setup(h_p, hsp_norm, n=2, **cfg):
    h_sp = np.zeros(n, complex)
    h_sp[0] = hsp_norm
    h_s = np.ones(n, complex)
    ch = ChannelSet(h_p, np.ones(n), h_s, h_sp)
    base = dict(N0=0.5, NC=0.5, P_max=1e4, N=n)
    base.update(cfg)
    return SystemConfig(**base), ch


def _grid_max_rate(cfg, ch):
    b = np.linspace(0, 1, 10_001)
    amp = np.sqrt((1 - b) * cfg.P_p) * abs(ch.h_p) + np.sqrt(cfg.P_s0 + b * cfg.eta * cfg.P_p) \
        * math.sqrt(norm2(ch.h_sp))
    return np.log2(1 + amp ** 2 / cfg.N_tilde0).max()


def test_no_transfer_example():
    cfg, ch = _setup(1.0, 1.0, P_p=4.0, P_s0=1.0, eta=0.0)
    bound = ideal_max_pu_rate(cfg, ch)
    assert bound.beta == 0.0
    assert bound.rate == pytest.approx(math.log2(10.0))
    assert bound.rate == pytest.approx(_grid_max_rate(cfg, ch), rel=1e-4)


def test_relay_only_example():
    cfg, ch = _setup(0.0, 1.3, P_p=10.0, P_s0=0.0, eta=0.6)
    bound = ideal_max_pu_rate(cfg, ch)
    assert bound.beta == 1.0
    assert bound.rate == pytest.approx(math.log2(1 + 0.6 * 10.0 * 1.3 ** 2 / 1.0))


def test_generic_example():
    cfg, ch = _setup(0.5, 1.2, P_p=10.0, P_s0=2.0, eta=0.8)
    bound = ideal_max_pu_rate(cfg, ch)
    assert 0.0 < bound.beta < 1.0
    assert bound.rate == pytest.approx(_grid_max_rate(cfg, ch), rel=1e-4)


def test_degenerate_link_warns():
    cfg, ch = _setup(0.0, 1.0, P_p=10.0, P_s0=0.0, eta=0.0)
    with pytest.warns(DegenerateLinkWarning):
        bound = ideal_max_pu_rate(cfg, ch)
    assert bound == (0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_max_rate_never_below_grid(seed):
    cfg, ch = random_system(np.random.default_rng(seed))
    got = ideal_max_pu_rate(cfg, ch).rate
    ref = _grid_max_rate(cfg, ch)
    assert got >= ref * (1 - 1e-12)
    assert got == pytest.approx(ref, rel=1e-4)


def test_zero_target_spends_everything_on_su():
    cfg, ch = random_system(np.random.default_rng(5))
    sol = ideal_solve_optimal(cfg, ch, 0.0)
    assert sol.split.beta == 1.0
    expect = math.log2(1 + (cfg.P_s0 + cfg.eta * cfg.P_p) * norm2(ch.h_s) / cfg.N_tilde0)
    assert sol.rate_su == pytest.approx(expect, rel=1e-9)


def test_boundary_target_leaves_nothing():
    cfg, ch = random_system(np.random.default_rng(6))
    r_max = ideal_max_pu_rate(cfg, ch).rate
    sol = ideal_solve_optimal(cfg, ch, r_max)
    assert sol.feasible and sol.rate_su == 0.0
    assert np.linalg.norm(sol.w_s) == 0.0
    assert sol.rate_pu == pytest.approx(r_max, rel=1e-9)


def test_beyond_boundary_is_infeasible():
    cfg, ch = random_system(np.random.default_rng(7))
    r_max = ideal_max_pu_rate(cfg, ch).rate
    for solver in (ideal_solve_optimal, ideal_solve_zf):
        sol = solver(cfg, ch, r_max * 1.01)
        assert not sol.feasible and sol.rate_su == 0.0 and sol.w_s.size == 0


def test_preset_channel_against_oracle():
    p = get_preset("fig2")
    sol = ideal_solve_optimal(p.config, p.channel, p.r_p)
    amp = oracle_ideal(p.config, p.channel, p.r_p)
    amp_solver = math.sqrt((2 ** sol.rate_su - 1) * p.config.N_tilde0)
    assert amp <= amp_solver * (1 + 1e-9)
    assert amp == pytest.approx(amp_solver, rel=0.01)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.0, 1.0))
def test_optimal_solution_properties(seed, frac):
    cfg, ch = random_system(np.random.default_rng(seed))
    r_p = frac * ideal_max_pu_rate(cfg, ch).rate
    sol = ideal_solve_optimal(cfg, ch, r_p)
    assert sol.feasible
    sp = sol.split
    assert 0 <= sp.beta <= 1 and sp.q_p >= 0 and sp.q_s >= 0 and 0 <= sp.lam <= 1
    scale = cfg.P_s0 + cfg.eta * cfg.P_p
    assert sp.q_s + sp.q_p <= cfg.P_s0 + sp.beta * cfg.eta * cfg.P_p + 1e-7 * scale
    assert sol.rate_pu >= r_p - 1e-7 * max(1.0, r_p)
    cone, power = check_conic_constraints(cfg, ch, r_p, sol)
    assert abs(power) <= 1e-7 * scale
    assert abs(cone) <= 1e-6 * max(1.0, (2 ** r_p - 1) * cfg.N_tilde0)
    # beam stays in span{h_s, h_sp}
    basis, _ = np.linalg.qr(np.stack([ch.h_s, ch.h_sp], axis=1))
    resid = sol.w_s - basis @ (basis.conj().T @ sol.w_s)
    assert np.linalg.norm(resid) <= 1e-8 * max(np.linalg.norm(sol.w_s), 1e-300)
    zf = ideal_solve_zf(cfg, ch, r_p)
    assert zf.rate_su <= sol.rate_su * (1 + 1e-7) + 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.0, 0.99), st.floats(0, 2 * math.pi))
def test_common_phase_invariance(seed, frac, phase):
    cfg, ch = random_system(np.random.default_rng(seed))
    r_p = frac * ideal_max_pu_rate(cfg, ch).rate
    rot = ch.rotated(phase)
    for solver in (ideal_solve_optimal, ideal_solve_zf):
        a, b = solver(cfg, ch, r_p), solver(cfg, rot, r_p)
        assert a.feasible == b.feasible
        assert b.rate_su == pytest.approx(a.rate_su, abs=1e-10)
        assert b.rate_pu == pytest.approx(a.rate_pu, abs=1e-10)


def test_zf_direct_link_gone_transfers_everything():
    rng = np.random.default_rng(8)
    cfg, ch = random_system(rng)
    weak = ChannelSet(1e-9, ch.g, ch.h_s, ch.h_sp)
    sol = ideal_solve_zf(cfg, weak, 1.0)
    assert sol.split.beta == pytest.approx(1.0, abs=1e-6)


def test_zf_clamps_to_zero():
    cfg, ch = _setup(0.3, 1.0, n=2, P_p=10.0, P_s0=50.0, eta=0.1)
    r_p = 6.0
    gamma = 2 ** r_p - 1
    assert gamma * cfg.N_tilde0 >= cfg.P_p * (0.3 + cfg.eta * 1.0 / 0.3) ** 2
    assert ideal_solve_zf(cfg, ch, r_p).split.beta == 0.0


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(0.0, 1.0))
def test_zf_nulls_pu(seed, frac):
    cfg, ch = random_system(np.random.default_rng(seed))
    r_p = frac * ideal_max_pu_rate(cfg, ch).rate
    sol = ideal_solve_zf(cfg, ch, r_p)
    if not sol.feasible:
        return
    leak = abs(np.vdot(ch.h_sp, sol.w_s))
    assert leak <= 1e-10 * max(np.linalg.norm(sol.w_s) * np.linalg.norm(ch.h_sp), 1e-300)
    _, perp = project_pair(ch.h_sp, ch.h_s)
    expect = math.log2(1 + sol.split.q_s * norm2(perp) / cfg.N_tilde0)
    assert sol.rate_su == pytest.approx(expect, rel=1e-9, abs=1e-12)
    assert sol.rate_pu >= r_p - 1e-9


def test_zf_single_antenna_unsupported():
    ch = ChannelSet(0.3, [1.0], [1.0], [0.5])
    cfg = SystemConfig(P_p=10.0, P_s0=1.0, eta=0.5, N=1)
    with pytest.raises(UnsupportedConfigurationError):
        ideal_solve_zf(cfg, ch, 1.0)


def test_region_two_points():
    cfg, ch = random_system(np.random.default_rng(9))
    curve = ideal_rate_region(cfg, ch, 2)
    r_max = ideal_max_pu_rate(cfg, ch).rate
    np.testing.assert_allclose(curve.r_p, [0.0, r_max])
    r_s_max = math.log2(1 + (cfg.P_s0 + cfg.eta * cfg.P_p) * norm2(ch.h_s) / cfg.N_tilde0)
    assert curve.rate_su[0] == pytest.approx(r_s_max)
    assert curve.rate_su[1] == 0.0


def test_region_rejects_single_point():
    cfg, ch = random_system(np.random.default_rng(9))
    with pytest.raises(ValueError):
        ideal_rate_region(cfg, ch, 1)


def test_region_grows_with_efficiency():
    cfg, ch = random_system(np.random.default_rng(10))
    lo = ideal_rate_region(cfg.replace(eta=0.0), ch, 12)
    hi = ideal_rate_region(cfg.replace(eta=0.5), ch, 12)
    # evaluate the eta=0 solver on the eta=0.5 grid
    for r, s in zip(hi.r_p, hi.rate_su):
        low = ideal_solve_optimal(cfg.replace(eta=0.0), ch, float(r))
        assert (low.rate_su if low.feasible else 0.0) <= s * (1 + 1e-7) + 1e-12
    assert np.all(np.diff(lo.rate_su) <= 1e-7)


def test_preset_region_is_outer_bound():
    p = get_preset("fig6")
    settings_ = SolverSettings()
    curve = ideal_rate_region(p.config, p.channel, 10, settings_)
    for r, s in zip(curve.r_p, curve.rate_su):
        ps = ps_solve_optimal(p.config, p.channel, float(r), settings_)
        ts = ts_solve_optimal(p.config, p.channel, float(r), settings_)
        assert s >= ps.rate_su * (1 - 1e-7)
        assert ps.rate_su >= ts.rate_su * (1 - 1e-7)
