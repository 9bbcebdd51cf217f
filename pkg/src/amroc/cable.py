"""Frequency-domain model of a multi-pair LAN cable.

Insertion loss, equal-level FEXT and NEXT follow the category-5e channel
limit-line forms (frequencies in MHz, losses in dB per 100 m). All
coefficients live on :class:`CableSpec` and can be overridden.
"""
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class CableSpec:
    category: str = "cat5e"
    length_m: float = 50.0
    n_pairs: int = 4
    velocity_factor: float = 0.65
    il_a: float = 1.967
    il_b: float = 0.023
    il_c: float = 0.050
    elfext_ref_db: float = 23.8
    elfext_slope_db_per_decade: float = 20.0
    next_ref_db: float = 35.3
    next_slope_db_per_decade: float = 15.0
    f_max_hz: float = 500e6

    def __post_init__(self):
        if not self.length_m > 0:
            raise ValueError("length_m must be > 0")
        if self.n_pairs < 2:
            raise ValueError("n_pairs must be >= 2")
        if not 0 < self.velocity_factor <= 1:
            raise ValueError("velocity_factor must lie in (0, 1]")
        if min(self.il_a, self.il_b, self.il_c) < 0:
            raise ValueError("insertion-loss coefficients must be >= 0")
        if not self.elfext_ref_db > 0:
            raise ValueError("elfext_ref_db must be > 0")
        if self.f_max_hz < 400e6:
            raise ValueError("f_max_hz must be >= 400 MHz")

    @property
    def delay_s(self):
        return self.length_m / (self.velocity_factor * SPEED_OF_LIGHT)


@dataclass(frozen=True)
class CableChannelMatrix:
    freq_grid_hz: np.ndarray
    matrices: np.ndarray  # (n_freq, n_pairs, n_pairs), [i, j] = pair i from pair j
    seed: int

    def __len__(self):
        return self.freq_grid_hz.size


def _check_freq(spec, f_hz):
    f = np.asarray(f_hz, dtype=np.float64)
    if np.any(f <= 0) or np.any(f > spec.f_max_hz):
        raise ValueError(f"frequency outside modeled range (0, {spec.f_max_hz / 1e6:g} MHz]")
    return f


def insertion_loss_db(spec, f_hz):
    """Direct-path attenuation in dB; linear in length."""
    f = _check_freq(spec, f_hz) / 1e6
    per_100m = spec.il_a * np.sqrt(f) + spec.il_b * f + spec.il_c / np.sqrt(f)
    return per_100m * (spec.length_m / 100.0)


def fext_coupling_db(spec, f_hz):
    """Equal-level FEXT loss in dB (positive; smaller means stronger coupling)."""
    f = _check_freq(spec, f_hz) / 1e6
    return (spec.elfext_ref_db - spec.elfext_slope_db_per_decade * np.log10(f / 100.0)
            - 10.0 * np.log10(spec.length_m / 100.0))


def next_coupling_db(spec, f_hz):
    """NEXT loss in dB. Unused by the downlink chain."""
    f = _check_freq(spec, f_hz) / 1e6
    return spec.next_ref_db - spec.next_slope_db_per_decade * np.log10(f / 100.0)


def direct_path_response(spec, f_hz):
    f = _check_freq(spec, f_hz)
    mag = 10.0 ** (-insertion_loss_db(spec, f) / 20.0)
    return mag * np.exp(-2j * np.pi * f * spec.delay_s)


def _coupling_phases(seed, n_pairs, n_freq):
    phases = np.zeros((n_freq, n_pairs, n_pairs))
    for i in range(n_pairs):
        for j in range(n_pairs):
            if i != j:
                rng = np.random.default_rng([seed, i, j])
                phases[:, i, j] = rng.uniform(0.0, 2 * np.pi, n_freq)
    return phases


def build_cable_channel(spec, freq_grid_hz, seed=0):
    """Per-frequency pair-to-pair transfer matrices.

    Crosstalk phases are i.i.d. uniform; bin ``b`` of pair ``(i, j)`` takes
    the ``b``-th draw of a generator keyed on ``(seed, i, j)``.
    """
    grid = np.asarray(freq_grid_hz, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ValueError("frequency grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("frequency grid must be strictly ascending")
    direct = direct_path_response(spec, grid)
    fext_mag = 10.0 ** (-(insertion_loss_db(spec, grid) + fext_coupling_db(spec, grid)) / 20.0)
    phases = _coupling_phases(seed, spec.n_pairs, grid.size)
    mats = fext_mag[:, None, None] * np.exp(1j * phases)
    eye = np.eye(spec.n_pairs, dtype=bool)
    mats[:, eye] = direct[:, None]
    mats.flags.writeable = False
    grid.flags.writeable = False
    return CableChannelMatrix(grid, mats, int(seed))


def default_grid(spec, step_hz=1e6):
    """1 MHz-spaced grid from ``step_hz`` up to ``f_max_hz``."""
    n = int(np.floor(spec.f_max_hz / step_hz + 1e-9))
    return step_hz * np.arange(1, n + 1)
