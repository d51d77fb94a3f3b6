"""Derivative-free maximizers used by the optimal solvers.

Objectives are vectorized: they take arrays of candidate points and return
an array of values, with ``-inf`` marking infeasible candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

Objective2D = Callable[[np.ndarray, np.ndarray], np.ndarray]
Objective1D = Callable[[np.ndarray], np.ndarray]


@dataclass
class SearchResult:
    x: float
    y: float
    value: float
    evaluations: int


def _window(center: float, width: float, lo: float, hi: float) -> tuple[float, float]:
    a, b = center - width / 2.0, center + width / 2.0
    if a < lo:
        a, b = lo, min(hi, lo + width)
    elif b > hi:
        a, b = max(lo, hi - width), hi
    return a, b


def _improved(new: float, old: float, rel_tol: float) -> bool:
    if not np.isfinite(old):
        return np.isfinite(new)
    return new - old > rel_tol * max(abs(old), 1e-300)


def nested_grid_max_2d(f: Objective2D, x_bounds: tuple[float, float],
                       y_bounds: tuple[float, float], n: int, rounds: int,
                       rel_tol: float,
                       seeds: Iterable[tuple[float, float]] = (),
                       patience: int = 3) -> SearchResult | None:
    """Maximize ``f`` on a box by an n-by-n grid refined around the incumbent.

    Each refinement round shrinks the window 4x in both axes and keeps the
    incumbent as a candidate; an axis whose new peak lands on the window
    edge is recentred without shrinking (at most ``4 * rounds`` windows). Stops early once ``patience`` consecutive
    rounds each improve the incumbent by less than ``rel_tol`` (relative);
    a single flat round is common while the grid is still coarser than the
    peak. Extra ``seeds`` are evaluated alongside the coarse grid. Returns
    ``None`` when no evaluated point is feasible.
    """
    (x_lo, x_hi), (y_lo, y_hi) = x_bounds, y_bounds
    xs = np.linspace(x_lo, x_hi, n)
    ys = np.linspace(y_lo, y_hi, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    seeds = list(seeds)
    if seeds:
        sx, sy = np.array(seeds, dtype=float).T
        X, Y = np.concatenate([X, sx]), np.concatenate([Y, sy])
    vals = np.asarray(f(X, Y), dtype=float)
    evals = vals.size
    k = int(np.argmax(vals))
    best = SearchResult(float(X[k]), float(Y[k]), float(vals[k]), evals)
    if not np.isfinite(best.value):
        return None

    wx, wy = (x_hi - x_lo) / 4.0, (y_hi - y_lo) / 4.0
    flat = shrinks = steps = 0
    while shrinks < rounds and steps < 4 * rounds:
        steps += 1
        ax, bx = _window(best.x, wx, x_lo, x_hi)
        ay, by = _window(best.y, wy, y_lo, y_hi)
        X, Y = np.meshgrid(np.linspace(ax, bx, n), np.linspace(ay, by, n), indexing="ij")
        X, Y = X.ravel(), Y.ravel()
        vals = np.asarray(f(X, Y), dtype=float)
        evals += vals.size
        k = int(np.argmax(vals))
        gained = _improved(float(vals[k]), best.value, rel_tol)
        slide_x = slide_y = False
        if vals[k] > best.value:
            best = SearchResult(float(X[k]), float(Y[k]), float(vals[k]), evals)
            # a peak on the window edge (inside the box) means the window
            # is chasing a ridge: recentre on that axis without shrinking
            i, j = divmod(k, n)
            slide_x = (i == 0 and ax > x_lo) or (i == n - 1 and bx < x_hi)
            slide_y = (j == 0 and ay > y_lo) or (j == n - 1 and by < y_hi)
        best.evaluations = evals
        if not slide_x:
            wx /= 4.0
        if not slide_y:
            wy /= 4.0
        if not (slide_x or slide_y):
            shrinks += 1
        flat = 0 if gained else flat + 1
        if flat >= patience:
            break
    return best


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       iterations: int) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``.

    Both interval ends are also evaluated, so a maximum sitting on the
    boundary is returned exactly.
    """
    fa, fb = f(a), f(b)
    h = b - a
    c, d = a + INV_PHI2 * h, a + INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc >= fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    fx, x = max([(fc, c), (fd, d), (fa, a), (fb, b)], key=lambda t: t[0])
    return x, fx


def grid_golden_max_1d(f: Objective1D, lo: float, hi: float, n: int,
                       rounds: int) -> tuple[float, float] | None:
    """Coarse grid over ``[lo, hi]``, then golden section inside the best cell pair.

    ``rounds`` counts 4x shrinkages; each is three golden steps.
    """
    xs = np.linspace(lo, hi, n)
    vals = np.asarray(f(xs), dtype=float)
    k = int(np.argmax(vals))
    if not np.isfinite(vals[k]):
        return None
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, n - 1)]
    if b <= a or rounds == 0:
        return float(xs[k]), float(vals[k])

    def scalar(x: float) -> float:
        return float(np.asarray(f(np.array([x])), dtype=float)[0])

    x, fx = golden_section_max(scalar, float(a), float(b), 3 * rounds)
    if not fx > vals[k]:
        return float(xs[k]), float(vals[k])
    return x, fx


def _inner_max(f: Objective2D, xs: np.ndarray, y_lo: float, y_hi: float, n: int,
               iterations: int) -> tuple[np.ndarray, np.ndarray]:
    # grid then golden section in y, vectorized across all xs at once
    ys = np.linspace(y_lo, y_hi, n)
    X = np.repeat(xs, n)
    vals = np.asarray(f(X, np.tile(ys, xs.size)), dtype=float).reshape(xs.size, n)
    k = np.argmax(vals, axis=1)
    best_v = vals[np.arange(xs.size), k]
    best_y = ys[k]
    a, b = ys[np.maximum(k - 1, 0)], ys[np.minimum(k + 1, n - 1)]
    h = b - a
    c, d = a + INV_PHI2 * h, a + INV_PHI * h
    fc, fd = np.asarray(f(xs, c), dtype=float), np.asarray(f(xs, d), dtype=float)
    for _ in range(iterations):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        h = INV_PHI * h
        nc = np.where(left, a + INV_PHI2 * h, d)
        nd = np.where(left, c, a + INV_PHI * h)
        fnew = np.asarray(f(xs, np.where(left, nc, nd)), dtype=float)
        fc, fd = np.where(left, fnew, fd), np.where(left, fc, fnew)
        c, d = nc, nd
    for y, v in ((c, fc), (d, fd)):
        up = v > best_v
        best_v, best_y = np.where(up, v, best_v), np.where(up, y, best_y)
    return best_v, best_y


def profile_max_2d(f: Objective2D, x_bounds: tuple[float, float],
                   y_bounds: tuple[float, float], n: int, rounds: int,
                   seeds: Iterable[float] = (), inner_iterations: int = 60) -> SearchResult | None:
    """Maximize ``f`` as ``max_x max_y f(x, y)``.

    The inner maximization is a grid plus golden section for every x; the
    outer one is an n-point grid refined 4x per round around the best x.
    Suited to objectives whose peak follows a thin ridge that an
    axis-aligned 2-D window cannot track. ``seeds`` are extra x values.
    """
    (x_lo, x_hi), (y_lo, y_hi) = x_bounds, y_bounds
    xs = np.concatenate([np.linspace(x_lo, x_hi, n), np.asarray(list(seeds), dtype=float)])
    vals, ys = _inner_max(f, xs, y_lo, y_hi, n, inner_iterations)
    evals = xs.size * (2 * n + inner_iterations)
    k = int(np.argmax(vals))
    if not np.isfinite(vals[k]):
        return None
    best = SearchResult(float(xs[k]), float(ys[k]), float(vals[k]), evals)
    w = x_hi - x_lo
    for _ in range(rounds):
        w /= 4.0
        a, b = _window(best.x, w, x_lo, x_hi)
        xs = np.linspace(a, b, n)
        vals, ys = _inner_max(f, xs, y_lo, y_hi, n, inner_iterations)
        evals += xs.size * (2 * n + inner_iterations)
        k = int(np.argmax(vals))
        if vals[k] > best.value:
            best = SearchResult(float(xs[k]), float(ys[k]), float(vals[k]), evals)
        best.evaluations = evals
    return best
