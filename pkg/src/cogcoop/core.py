"""Shared types and complex-vector primitives.

Everything here works in linear power units. Channels follow the
fixed-magnitude / uniform-phase model: every entry has magnitude
``distance ** (-exponent / 2)`` and an independent phase drawn uniformly
on ``[0, 2*pi)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class InputError(ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedConfigurationError(InputError):
    """The configuration is valid but a solver cannot handle it (e.g. ZF with N = 1)."""


class FeasibilityError(ValueError):
    """A problem that must be feasible for the requested operation is not."""


class DegenerateGeometryError(ArithmeticError):
    """Channel geometry makes a linear system singular."""


class InvariantViolation(RuntimeError):
    """An internal post-condition check failed."""


class Scheme(str, enum.Enum):
    IDEAL = "Ideal"
    IDEAL_ZF = "IdealZF"
    POWER_SPLIT = "PowerSplit"
    POWER_SPLIT_ZF = "PowerSplitZF"
    TIME_SPLIT = "TimeSplit"
    TIME_SPLIT_ZF = "TimeSplitZF"
    BASELINE_NO_ENERGY = "BaselineNoEnergy"
    # direct PT->PU link only, no help from the ST and no SU access
    NO_COOPERATION = "NoCooperation"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        for s in cls:
            if s.value.lower() == name.strip().lower():
                return s
        raise InputError(f"unknown scheme {name!r}; expected one of "
                         f"{', '.join(s.value for s in cls)}")


def _as_vector(x, name: str) -> np.ndarray:
    v = np.array(x, dtype=np.complex128).reshape(-1)
    if v.size == 0:
        raise InputError(f"{name} must have at least one entry")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the four links used by the solvers.

    ``h_p`` is the PT->PU scalar gain; ``g``, ``h_s`` and ``h_sp`` are the
    PT->ST, ST->SU and ST->PU vectors (one entry per ST antenna).
    """

    h_p: complex
    g: np.ndarray
    h_s: np.ndarray
    h_sp: np.ndarray

    def __post_init__(self):
        h_p = complex(self.h_p)
        if not np.isfinite(h_p):
            raise InputError("h_p must be finite")
        object.__setattr__(self, "h_p", h_p)
        for name in ("g", "h_s", "h_sp"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), name))
        if not (self.g.size == self.h_s.size == self.h_sp.size):
            raise InputError("g, h_s and h_sp must share the antenna count")

    @property
    def N(self) -> int:
        return self.h_s.size

    def rotated(self, phase: float) -> "ChannelSet":
        """All four links multiplied by the common factor ``exp(1j*phase)``."""
        r = np.exp(1j * phase)
        return ChannelSet(self.h_p * r, self.g * r, self.h_s * r, self.h_sp * r)


@dataclass(frozen=True)
class SystemConfig:
    """Powers, noise and efficiency, all linear.

    ``N0`` is the thermal noise variance, ``NC`` the RF-to-baseband
    conversion noise; receivers that see both use ``N_tilde0 = N0 + NC``.
    """

    P_p: float
    P_s0: float
    eta: float
    N0: float = 1.0
    NC: float = 1.0
    r_p: float = 3.0
    P_max: float = 1000.0
    N: int = 4

    def __post_init__(self):
        for name in ("P_p", "P_s0", "eta", "N0", "NC", "r_p", "P_max"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise InputError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "N", int(self.N))
        if self.P_p <= 0:
            raise InputError("P_p must be positive")
        if self.P_s0 < 0:
            raise InputError("P_s0 must be non-negative")
        if not 0.0 <= self.eta <= 1.0:
            raise InputError("eta must lie in [0, 1]")
        if self.N0 <= 0:
            raise InputError("N0 must be positive")
        if self.NC < 0:
            raise InputError("NC must be non-negative")
        if self.r_p < 0:
            raise InputError("r_p must be non-negative")
        if self.P_max < self.P_p:
            raise InputError("P_max must be at least P_p")
        if self.N < 1:
            raise InputError("N must be at least 1")

    @property
    def N_tilde0(self) -> float:
        return self.N0 + self.NC

    def replace(self, **changes: Any) -> "SystemConfig":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class SolverSettings:
    """Search resolution shared by the grid/golden-section solvers.

    One refinement round shrinks the search window about 4x: by exactly
    4 for the 2-D grids, by three golden-section steps (0.618**3) in 1-D.
    """

    grid_coarse: int = 32
    refine_rounds: int = 14
    rel_tol: float = 1e-7
    bisect_tol: float = 1e-12

    def __post_init__(self):
        if int(self.grid_coarse) < 8:
            raise InputError("grid_coarse must be at least 8")
        if int(self.refine_rounds) < 0:
            raise InputError("refine_rounds must be non-negative")
        if not self.rel_tol > 0 or not self.bisect_tol > 0:
            raise InputError("tolerances must be positive")


@dataclass(frozen=True)
class SchemeSolution:
    scheme: Scheme
    feasible: bool
    split: Any = None
    w_s: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    w_p: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    rate_pu: float = 0.0
    rate_su: float = 0.0

    @classmethod
    def infeasible(cls, scheme: Scheme, split: Any = None) -> "SchemeSolution":
        return cls(scheme=scheme, feasible=False, split=split)


def db_to_linear(x_db: float) -> float:
    if not np.isfinite(x_db):
        raise InputError("x_db must be finite")
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * np.log10(x)


def generate_channel(distance_m: float, exponent: float, n: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Path-loss channel with i.i.d. uniform phases, shape ``(n,)``."""
    if not distance_m > 0:
        raise InputError("distance must be positive")
    if not exponent > 0:
        raise InputError("path-loss exponent must be positive")
    if n < 1:
        raise InputError("n must be at least 1")
    mag = distance_m ** (-exponent / 2.0)
    omega = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return mag * np.exp(1j * omega)


def random_channel_set(n: int, rng: np.random.Generator, *,
                       st_distance_m: float = 1.0, pt_pu_distance_m: float = 2.0,
                       exponent: float = 3.5) -> ChannelSet:
    """Draw ``h_p``, ``g``, ``h_s``, ``h_sp`` in that order from ``rng``."""
    h_p = generate_channel(pt_pu_distance_m, exponent, 1, rng)[0]
    g = generate_channel(st_distance_m, exponent, n, rng)
    h_s = generate_channel(st_distance_m, exponent, n, rng)
    h_sp = generate_channel(st_distance_m, exponent, n, rng)
    return ChannelSet(h_p, g, h_s, h_sp)


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hermitian inner product ``a^H b``."""
    return complex(np.vdot(a, b))


def norm2(a: np.ndarray) -> float:
    return float(np.real(np.vdot(a, a)))


def project_pair(h_ref: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``h`` into its components along and orthogonal to ``h_ref``."""
    h_ref = np.asarray(h_ref, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if h_ref.shape != h.shape:
        raise InputError("vectors must have the same length")
    n_ref = norm2(h_ref)
    if n_ref == 0.0:
        raise InputError("reference vector must be nonzero")
    par = h_ref * (np.vdot(h_ref, h) / n_ref)
    return par, h - par


def alignment_cos2(h1: np.ndarray, h2: np.ndarray) -> float:
    """Squared cosine of the angle between two complex vectors."""
    h1 = np.asarray(h1, dtype=np.complex128)
    h2 = np.asarray(h2, dtype=np.complex128)
    if h1.shape != h2.shape:
        raise InputError("vectors must have the same length")
    n1, n2 = norm2(h1), norm2(h2)
    if n1 == 0.0 or n2 == 0.0:
        raise InputError("vectors must be nonzero")
    c = abs(np.vdot(h1, h2)) ** 2 / (n1 * n2)
    return float(min(max(c, 0.0), 1.0))


def zf_direction(h_target: np.ndarray, h_null: np.ndarray) -> np.ndarray:
    """Unit vector maximizing gain to ``h_target`` subject to zero gain at ``h_null``.

    Returns the zero vector when ``h_target`` is parallel to ``h_null``.
    """
    _, perp = project_pair(h_null, h_target)
    n = np.sqrt(norm2(perp))
    if n <= 1e-14 * np.sqrt(norm2(h_target)):
        return np.zeros_like(perp)
    return perp / n


def require_nondegenerate(ch: ChannelSet) -> None:
    if norm2(ch.h_sp) == 0.0:
        raise InputError("h_sp is the zero vector")
    if norm2(ch.h_s) == 0.0:
        raise InputError("h_s is the zero vector")


def require_zf_capable(ch: ChannelSet) -> None:
    if ch.N < 2:
        raise UnsupportedConfigurationError("zero-forcing needs at least two ST antennas")
