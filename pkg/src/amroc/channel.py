"""Emulated fader: Static 2x2 and EPA5 tapped-delay-line MIMO fading."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import constants_36101 as c3gpp

STATIC = "static"
EPA5 = "epa5"
CORRELATION_LEVELS = tuple(c3gpp.CORRELATION)


@dataclass(frozen=True)
class ChannelModel:
    kind: str = STATIC
    doppler_hz: float = c3gpp.EPA5_DOPPLER_HZ
    correlation: str = "low"
    n_sinusoids: int = 16

    def __post_init__(self):
        if self.kind not in (STATIC, EPA5):
            raise ValueError(f"unknown channel kind {self.kind!r}; expected 'static' or 'epa5'")
        if self.correlation not in CORRELATION_LEVELS:
            raise ValueError(f"unknown correlation {self.correlation!r}; expected one of {CORRELATION_LEVELS}")
        if self.kind == EPA5 and not self.doppler_hz > 0:
            raise ValueError("doppler_hz must be > 0 for EPA5")
        if self.n_sinusoids < 16:
            raise ValueError("n_sinusoids must be >= 16")

    @property
    def label(self):
        return "static" if self.kind == STATIC else f"epa5-{self.correlation}"


@dataclass(frozen=True)
class TapProfile:
    delays_ns: tuple
    powers_db: tuple

    @property
    def linear_powers(self):
        p = 10.0 ** (np.asarray(self.powers_db) / 10.0)
        return p / p.sum()


def epa_tap_profile():
    """EPA power-delay profile, normalized to unit total power."""
    p = 10.0 ** (np.asarray(c3gpp.EPA_POWERS_DB) / 10.0)
    return TapProfile(c3gpp.EPA_DELAYS_NS, tuple(10.0 * np.log10(p / p.sum())))


def correlation_matrices(level):
    """``(R_tx, R_rx)`` for a correlation level; eNodeB uses alpha, UE beta."""
    try:
        alpha, beta = c3gpp.CORRELATION[level]
    except KeyError:
        raise ValueError(f"unknown correlation {level!r}") from None
    r_tx = np.array([[1.0, alpha], [alpha, 1.0]], dtype=np.complex128)
    r_rx = np.array([[1.0, beta], [beta, 1.0]], dtype=np.complex128)
    return r_tx, r_rx


def _psd_sqrt(r):
    w, v = np.linalg.eigh(r)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


@dataclass(frozen=True)
class ChannelRealization:
    """Lazily evaluated channel ``h[t, k, rx, tx]`` on an OFDM grid.

    Evaluation is pointwise in time, so any subframe range can be produced
    independently and always yields the same values.
    """
    model: ChannelModel
    numerology: object
    n_subframes: int
    seed: int

    @property
    def n_symbols(self):
        return self.n_subframes * self.numerology.symbols_per_subframe

    def symbol_times(self, subframes=None):
        num = self.numerology
        sf = np.arange(self.n_subframes) if subframes is None else np.atleast_1d(subframes)
        sym = np.arange(num.symbols_per_subframe)
        ts = num.subframe_duration_s / num.symbols_per_subframe
        return ((sf[:, None] * num.symbols_per_subframe + sym[None, :]) * ts).ravel()

    @cached_property
    def _sos(self):
        # sum-of-sinusoids parameters per (tap, rx, tx, sinusoid)
        prof = epa_tap_profile()
        n_taps = len(prof.delays_ns)
        rng = np.random.default_rng([self.seed, 0xFADE])
        shape = (n_taps, 2, 2, self.model.n_sinusoids)
        angles = rng.uniform(0.0, 2 * np.pi, shape)
        phases = rng.uniform(0.0, 2 * np.pi, shape)
        freqs = self.model.doppler_hz * np.cos(angles)
        r_tx, r_rx = correlation_matrices(self.model.correlation)
        offsets = self.numerology.subcarrier_offsets_hz()
        delays = np.asarray(prof.delays_ns) * 1e-9
        steer = np.sqrt(prof.linear_powers)[:, None] * np.exp(
            -2j * np.pi * delays[:, None] * offsets[None, :])
        return freqs, phases, steer, _psd_sqrt(r_rx), _psd_sqrt(r_tx)

    def at_times(self, t):
        """Channel at arbitrary instants (seconds), shape ``(len(t), n_sc, 2, 2)``."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        n_sc = self.numerology.n_subcarriers
        if self.model.kind == STATIC:
            return np.broadcast_to(np.eye(2, dtype=np.complex128), (t.size, n_sc, 2, 2)).copy()
        freqs, phases, steer, rx_half, tx_half = self._sos
        n = self.model.n_sinusoids
        arg = 2 * np.pi * freqs[None] * t[:, None, None, None, None] + phases[None]
        gains = np.exp(1j * arg).sum(axis=-1) / np.sqrt(n)  # (T, taps, 2, 2)
        T, L = gains.shape[:2]
        g = gains.transpose(0, 2, 3, 1).reshape(T * 4, L)
        h_iid = (g @ steer).reshape(T, 2, 2, n_sc).transpose(0, 3, 1, 2)
        return rx_half @ h_iid @ tx_half

    def subframe(self, i):
        """Per-symbol channel of subframe ``i``, shape ``(symbols, n_sc, 2, 2)``."""
        return self.at_times(self.symbol_times([i]))

    @property
    def h(self):
        """Full realization, shape ``(n_symbols, n_sc, 2, 2)``. Memory-heavy for long runs."""
        return self.at_times(self.symbol_times())


def generate_channel(model, numerology, n_subframes, seed):
    if n_subframes < 1:
        raise ValueError("n_subframes must be >= 1")
    return ChannelRealization(model, numerology, int(n_subframes), int(seed))
