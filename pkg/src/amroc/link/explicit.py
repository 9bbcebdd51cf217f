"""Bit-true Monte-Carlo link: fader, copper section, noise, MMSE, decoding."""
import numpy as np

from ..channel import generate_channel
from ..phy import decode_batch, demodulate_soft, encode_batch, modulate, payload_bits, peak_throughput_mbps
from .budget import normalized_noise_var
from .config import EXPLICIT, ConfigError, assemble_result, copper_matrix
from .receiver import mmse_equalize

N_STREAMS = 2


def _subframe_rng(seed, i):
    return np.random.default_rng([seed, 0xB175, i])


def simulate_subframe(A_data, noise_var, mcs, k_payload, rng):
    """Send one block per stream over per-RE channels ``A_data (n_re, 2, 2)``.

    Returns ``(crc_ok (2,), sinr (n_re, 2))``.
    """
    n_re = A_data.shape[0]
    bps = mcs.bits_per_symbol
    n_coded = n_re * bps
    bits = rng.integers(0, 2, (N_STREAMS, k_payload), dtype=np.uint8)
    coded = encode_batch(bits, n_coded)
    x = np.stack([modulate(coded[s], bps) for s in range(N_STREAMS)], axis=1)  # (n_re, 2)
    noise = np.sqrt(noise_var / 2.0) * (rng.standard_normal((n_re, 2))
                                        + 1j * rng.standard_normal((n_re, 2)))
    y = (A_data @ x[..., None])[..., 0] + noise
    x_hat, sinr = mmse_equalize(A_data, y, noise_var)
    resid = 1.0 / np.clip(sinr, 1e-12, None)
    llr = np.stack([demodulate_soft(x_hat[:, s], resid[:, s], bps) for s in range(N_STREAMS)])
    decoded, ok = decode_batch(llr, k_payload)
    return ok & np.all(decoded == bits, axis=1), sinr


def run_link_explicit(config):
    if config.mode != EXPLICIT:
        raise ConfigError("run_link_explicit needs mode 'explicit'")
    num = config.numerology
    mcs = config.mcs_entry
    K = copper_matrix(config)
    mask = num.data_re_mask()
    if num.n_data_re() * mcs.bits_per_symbol < payload_bits(mcs, num):
        raise ConfigError("code rate above 1")
    k_payload = payload_bits(mcs, num)
    noise_var = normalized_noise_var(config.input_power_dbm_per_bw, config.rx_noise_figure_db, num)
    chan = generate_channel(config.channel, num, config.n_subframes, config.seed)
    ok = np.empty((config.n_subframes, N_STREAMS), dtype=bool)
    sinr_sum = 0.0
    for i in range(config.n_subframes):
        A = K[None] @ chan.subframe(i)  # (symbols, n_sc, 2, 2)
        ok[i], sinr = simulate_subframe(A[mask], noise_var, mcs, k_payload, _subframe_rng(config.seed, i))
        sinr_sum += sinr.mean()
    mean_sinr_db = 10.0 * np.log10(sinr_sum / config.n_subframes)
    return assemble_result(ok, k_payload, num, peak_throughput_mbps(mcs, num, N_STREAMS),
                           mean_sinr_db, EXPLICIT)
