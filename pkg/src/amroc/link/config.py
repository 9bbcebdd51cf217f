"""Experiment-point configuration and results."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..cable import CableSpec, build_cable_channel, default_grid
from ..channel import ChannelModel
from ..frontend import (FrontendSpec, Sf2sfPlan, compose_copper_section,
                        design_passive_equalizer, same_if_plan, validate_plan)
from ..phy import MCS_TABLE, numerology_for_bw

EXPLICIT = "explicit"
ABSTRACTED = "abstracted"
INTERVAL_S = 0.5


class ConfigError(ValueError):
    """A link configuration that cannot be simulated."""


@dataclass(frozen=True)
class LinkConfig:
    plan: Sf2sfPlan = field(default_factory=lambda: same_if_plan(175e6))
    cable: CableSpec = field(default_factory=CableSpec)
    frontend: FrontendSpec = field(default_factory=FrontendSpec)
    bw_hz: float = 10e6
    mcs: int = 11
    channel: ChannelModel = field(default_factory=ChannelModel)
    input_power_dbm_per_bw: float = -20.0
    rx_noise_figure_db: float = 7.0
    n_subframes: int = 2000
    seed: int = 0
    mode: str = ABSTRACTED
    eq_design_length_m: Optional[float] = None
    eq_band_hz: Optional[tuple] = None
    cable_grid_step_hz: float = 1e6
    mcs_table: tuple = MCS_TABLE

    def __post_init__(self):
        if not np.isfinite(self.input_power_dbm_per_bw):
            raise ConfigError("input_power_dbm_per_bw must be finite")
        if self.n_subframes < 1:
            raise ConfigError("n_subframes must be >= 1")
        if self.mode not in (EXPLICIT, ABSTRACTED):
            raise ConfigError(f"mode must be '{EXPLICIT}' or '{ABSTRACTED}'")
        if not 0 <= self.mcs < len(self.mcs_table):
            raise ConfigError(f"mcs {self.mcs} outside 0..{len(self.mcs_table) - 1}")

    @property
    def numerology(self):
        return numerology_for_bw(self.bw_hz)

    @property
    def mcs_entry(self):
        return self.mcs_table[self.mcs]

    def equalizer(self):
        length = self.cable.length_m if self.eq_design_length_m is None else self.eq_design_length_m
        band = self.eq_band_hz or (self.frontend.f_if_min_hz, self.cable.f_max_hz)
        return design_passive_equalizer(self.cable, length, band)


def copper_matrix(config):
    """Validated copper-section matrix ``K[k]`` (shape ``(n_sc, 2, 2)``) for a config."""
    report = validate_plan(config.plan, config.cable, config.bw_hz, config.frontend.f_if_min_hz)
    if not report.ok:
        raise ConfigError(f"invalid SF2SF plan:\n{report}")
    if len(config.plan.ports) != 2:
        raise ConfigError("the 2x2 link needs exactly two RF ports in the plan")
    cable_ch = build_cable_channel(config.cable, default_grid(config.cable, config.cable_grid_step_hz),
                                   config.seed)
    return compose_copper_section(config.plan, cable_ch, config.equalizer(), config.frontend,
                                  config.numerology)


@dataclass
class LinkResult:
    throughput_mbps: float
    bler: float
    mean_post_eq_sinr_db: float
    interval_throughput_mbps: list
    n_blocks: int
    n_block_errors: int
    peak_mbps: float
    mode: str = EXPLICIT


def assemble_result(ok, k_payload, num, peak_mbps, mean_sinr_db, mode):
    """Aggregate per-(subframe, stream) CRC outcomes into a :class:`LinkResult`."""
    ok = np.asarray(ok, dtype=bool)  # (n_subframes, n_streams)
    n_sf = ok.shape[0]
    sf_s = num.subframe_duration_s
    good_bits = ok.sum(axis=1) * k_payload
    per_interval = int(round(INTERVAL_S / sf_s))
    series = []
    for start in range(0, n_sf, per_interval):
        chunk = good_bits[start:start + per_interval]
        series.append(float(chunk.sum() / (chunk.size * sf_s) / 1e6))
    n_blocks = int(ok.size)
    n_err = int(n_blocks - ok.sum())
    return LinkResult(
        throughput_mbps=float(good_bits.sum() / (n_sf * sf_s) / 1e6),
        bler=n_err / n_blocks,
        mean_post_eq_sinr_db=float(mean_sinr_db),
        interval_throughput_mbps=series,
        n_blocks=n_blocks,
        n_block_errors=n_err,
        peak_mbps=float(peak_mbps),
        mode=mode,
    )
