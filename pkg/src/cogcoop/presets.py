"""Fixed channel realizations together with their system settings.

Where a setting was not given alongside the channel, the value chosen
here is noted next to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ChannelSet, InputError, SystemConfig, db_to_linear


@dataclass(frozen=True)
class Preset:
    name: str
    config: SystemConfig
    channel: ChannelSet
    r_p: float


def _fig2() -> Preset:
    h_s = [-0.0823 + 1.3427j, -0.6438 - 0.4291j, 0.4338 - 0.2197j]
    h_sp = [0.5345 - 0.8716j, 0.2872 - 0.4043j, 0.0951 - 0.3264j]
    # ideal cooperation never looks at g; any nonzero vector will do
    ch = ChannelSet(-0.4692 + 0.8665j, np.ones(3), h_s, h_sp)
    # SINR target 5 with a unit total noise floor
    cfg = SystemConfig(P_p=10.0, P_s0=10.0, eta=0.8, N0=0.5, NC=0.5,
                       r_p=math.log2(6.0), P_max=1000.0, N=3)
    return Preset("fig2", cfg, ch, cfg.r_p)


def _fig5() -> Preset:
    g = [0.8113 - 1.5579j, 0.4228 - 0.4039j, -0.9060 + 0.1513j]
    h_s = [0.6664 + 0.2165j, 0.0663 - 0.8290j, -0.7936 - 0.6795j]
    h_sp = [-0.4623 - 0.6364j, -0.8693 - 0.2020j, -0.1916 - 0.3270j]
    ch = ChannelSet(math.sqrt(0.0127), g, h_s, h_sp)
    # no efficiency comes with this realization; 0.5 chosen
    cfg = SystemConfig(P_p=db_to_linear(10.0), P_s0=db_to_linear(0.0), eta=0.5,
                       N0=1.0, NC=1.0, r_p=2.6, P_max=db_to_linear(30.0), N=3)
    return Preset("fig5", cfg, ch, cfg.r_p)


def _fig6() -> Preset:
    g = [-0.9472 - 0.6334j, -0.9090 - 1.2266j, -1.1855 + 0.3370j, 0.5345 - 0.1796j]
    h_s = [-0.9215 - 0.4314j, 0.2052 - 0.2503j, 0.3109 - 0.3055j, 0.3560 + 0.1163j]
    h_sp = [0.3610 - 0.1248j, 1.1616 + 0.8211j, -0.4350 - 0.2818j, -0.4445 + 0.6564j]
    ch = ChannelSet(math.sqrt(0.0002), g, h_s, h_sp)
    cfg = SystemConfig(P_p=db_to_linear(20.0), P_s0=db_to_linear(10.0), eta=0.5,
                       N0=1.0, NC=1.0, r_p=3.0, P_max=db_to_linear(30.0), N=4)
    return Preset("fig6", cfg, ch, cfg.r_p)


PRESETS = {"fig2": _fig2, "fig5": _fig5, "fig6": _fig6}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name.strip().lower()]()
    except KeyError:
        raise InputError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}") from None
