"""MCS table: index -> modulation, code rate and peak rate."""
from dataclasses import dataclass

QPSK_RATES = (0.12, 0.15, 0.19, 0.25, 0.30, 0.37, 0.44, 0.52, 0.59, 0.66)
QAM16_RATES = (0.33, 0.37, 0.42, 0.48, 0.54, 0.60, 0.64, 0.75)
DEFAULT_OVERHEAD = 0.25


@dataclass(frozen=True)
class McsEntry:
    index: int
    modulation: str
    bits_per_symbol: int
    code_rate: float
    overhead_fraction: float = DEFAULT_OVERHEAD


def build_mcs_table(qpsk_rates=QPSK_RATES, qam16_rates=QAM16_RATES,
                    overhead_fraction=DEFAULT_OVERHEAD):
    entries = [McsEntry(i, "QPSK", 2, r, overhead_fraction) for i, r in enumerate(qpsk_rates)]
    entries += [McsEntry(len(qpsk_rates) + i, "16QAM", 4, r, overhead_fraction)
                for i, r in enumerate(qam16_rates)]
    for group in (qpsk_rates, qam16_rates):
        if any(b <= a for a, b in zip(group, group[1:])):
            raise ValueError("code rates must be strictly increasing within a modulation")
        if any(not 0 < r < 1 for r in group):
            raise ValueError("code rates must lie in (0, 1)")
    return tuple(entries)


MCS_TABLE = build_mcs_table()


def mcs_entry(index, table=MCS_TABLE):
    if not 0 <= index < len(table):
        raise ValueError(f"MCS index {index} outside 0..{len(table) - 1}")
    return table[index]


def payload_bits(mcs, num):
    """Transport-block payload per stream per subframe."""
    n_re = num.n_subcarriers * num.symbols_per_subframe * (1.0 - mcs.overhead_fraction)
    return int(round(n_re * mcs.bits_per_symbol * mcs.code_rate))


def peak_throughput_mbps(mcs, num, n_streams=2):
    """Error-free throughput of one MCS on the given grid."""
    if n_streams not in (1, 2):
        raise ValueError("n_streams must be 1 or 2")
    return (num.n_subcarriers * num.symbols_per_subframe * mcs.bits_per_symbol
            * mcs.code_rate * n_streams * (1.0 - mcs.overhead_fraction) * 1000 / 1e6)
