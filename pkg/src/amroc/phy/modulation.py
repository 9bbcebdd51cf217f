"""Gray-mapped QPSK / 16QAM with max-log soft demapping.

Mapping (LTE convention), per symbol bits ``b0 b1 [b2 b3]``::

    QPSK : I = (1-2 b0) / sqrt(2),            Q = (1-2 b1) / sqrt(2)
    16QAM: I = (1-2 b0) (2 - (1-2 b2)) / sqrt(10),
           Q = (1-2 b1) (2 - (1-2 b3)) / sqrt(10)

LLRs are ``log P(b=0) / P(b=1)``: positive values favour a zero bit.
"""
import numpy as np

# Per-dimension amplitude levels and the bits they carry.
_PAM = {
    2: (np.array([1.0, -1.0]) / np.sqrt(2.0), np.array([[0], [1]])),
    4: (np.array([1.0, 3.0, -1.0, -3.0]) / np.sqrt(10.0),
        np.array([[0, 0], [0, 1], [1, 0], [1, 1]])),
}


def _levels(bits_per_symbol):
    try:
        return _PAM[bits_per_symbol]
    except KeyError:
        raise ValueError(f"unsupported bits_per_symbol {bits_per_symbol}") from None


def modulate(bits, bits_per_symbol):
    """Map a flat bit array to unit-average-energy symbols."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % bits_per_symbol:
        raise ValueError(f"bit count {bits.size} not divisible by {bits_per_symbol}")
    groups = bits.reshape(-1, bits_per_symbol)
    half = bits_per_symbol // 2
    if half == 1:
        i_amp = 1.0 - 2.0 * groups[:, 0]
        q_amp = 1.0 - 2.0 * groups[:, 1]
        return (i_amp + 1j * q_amp) / np.sqrt(2.0)
    i_amp = (1.0 - 2.0 * groups[:, 0]) * (2.0 - (1.0 - 2.0 * groups[:, 2]))
    q_amp = (1.0 - 2.0 * groups[:, 1]) * (2.0 - (1.0 - 2.0 * groups[:, 3]))
    return (i_amp + 1j * q_amp) / np.sqrt(10.0)


def _dim_llr(y, noise_variance, bits_per_symbol):
    # y real, noise per real dimension = noise_variance / 2
    levels, lbits = _levels(bits_per_symbol)
    d2 = (y[:, None] - levels[None, :]) ** 2
    n_bits = lbits.shape[1]
    out = np.empty((y.size, n_bits))
    for b in range(n_bits):
        zero = lbits[:, b] == 0
        out[:, b] = (d2[:, ~zero].min(axis=1) - d2[:, zero].min(axis=1)) / noise_variance
    return out


def demodulate_soft(symbols, noise_variance, bits_per_symbol):
    """Max-log LLRs for each bit; ``noise_variance`` is per complex symbol.

    ``noise_variance`` may be a scalar or one value per symbol.
    """
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    nv = np.broadcast_to(np.asarray(noise_variance, dtype=np.float64), symbols.shape)
    if np.any(nv <= 0):
        raise ValueError("noise_variance must be > 0")
    li = _dim_llr(symbols.real, nv, bits_per_symbol)
    lq = _dim_llr(symbols.imag, nv, bits_per_symbol)
    half = bits_per_symbol // 2
    llr = np.empty((symbols.size, bits_per_symbol))
    # I carries b0 (and b2), Q carries b1 (and b3)
    llr[:, 0] = li[:, 0]
    llr[:, 1] = lq[:, 0]
    if half == 2:
        llr[:, 2] = li[:, 1]
        llr[:, 3] = lq[:, 1]
    return llr.ravel()
