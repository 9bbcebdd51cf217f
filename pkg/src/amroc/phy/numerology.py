"""OFDM grid parameters per channel bandwidth."""
from dataclasses import dataclass

import numpy as np

SUBCARRIER_SPACING_HZ = 15e3
SYMBOLS_PER_SUBFRAME = 14
SUBFRAME_DURATION_S = 1e-3
CONTROL_SYMBOLS = 3
RS_SYMBOLS = (4, 11)

_N_RB = {5e6: 25, 10e6: 50, 20e6: 100}


@dataclass(frozen=True)
class Numerology:
    bw_hz: float
    n_rb: int
    subcarrier_spacing_hz: float = SUBCARRIER_SPACING_HZ
    symbols_per_subframe: int = SYMBOLS_PER_SUBFRAME
    subframe_duration_s: float = SUBFRAME_DURATION_S

    @property
    def n_subcarriers(self):
        return 12 * self.n_rb

    def subcarrier_offsets_hz(self):
        """Baseband offset of each subcarrier from the band centre.

        The grid is symmetric about DC (no DC null), so offsets are
        ``(k - (N-1)/2) * spacing`` and the band spans
        ``[-N/2, N/2] * spacing`` edge to edge.
        """
        n = self.n_subcarriers
        return (np.arange(n) - (n - 1) / 2.0) * self.subcarrier_spacing_hz

    def data_re_mask(self):
        """Boolean (symbols, subcarriers) mask of payload resource elements.

        Symbols 0-2 carry control; every fourth subcarrier of symbols 4 and
        11 carries reference signals. That reserves exactly 25% of the grid.
        """
        mask = np.ones((self.symbols_per_subframe, self.n_subcarriers), dtype=bool)
        mask[:CONTROL_SYMBOLS] = False
        for t in RS_SYMBOLS:
            mask[t, ::4] = False
        return mask

    def n_data_re(self):
        return int(self.data_re_mask().sum())


def numerology_for_bw(bw_hz):
    for bw, n_rb in _N_RB.items():
        if abs(bw_hz - bw) < 1.0:
            return Numerology(bw_hz=bw, n_rb=n_rb)
    supported = ", ".join(f"{bw / 1e6:g} MHz" for bw in _N_RB)
    raise ValueError(f"unsupported bandwidth {bw_hz / 1e6:g} MHz; supported: {supported}")
