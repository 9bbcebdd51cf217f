"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``AMROC_DISABLE_NUMBA=1`` in the environment before import to force the
numpy implementations. The encoder and Viterbi paths perform the same arithmetic in the same order
and produce bit-identical output; the EESM reduction agrees to within a few
ulps because the two backends use different ``exp`` implementations.
"""
import os

import numpy as np

try:
    import numba
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("AMROC_DISABLE_NUMBA", "0") not in ("1", "true", "yes")


def trellis_tables(generators, constraint_length):
    """Output-sign table for every (next_state, oldest_bit) branch.

    States hold the last ``K-1`` inputs with the newest bit in the LSB. The
    branch into ``s`` whose dropped bit is ``m`` has register
    ``(m << (K-1)) | s`` and emits ``parity(register & g)`` per generator.
    Returned signs are +1 for a coded 0 and -1 for a coded 1, shape
    ``(n_states, 2, n_out)``.
    """
    k1 = constraint_length - 1
    n_states = 1 << k1
    signs = np.empty((n_states, 2, len(generators)), dtype=np.float64)
    for s in range(n_states):
        for m in range(2):
            reg = (m << k1) | s
            for g_idx, g in enumerate(generators):
                parity = bin(reg & g).count("1") & 1
                signs[s, m, g_idx] = 1.0 - 2.0 * parity
    return signs


# ---------------------------------------------------------------- encoder

def _conv_encode_np(bits, taps):
    # bits: (B, T) uint8, taps: (n_out, K) uint8 with taps[g, i] for delay i
    n_out, K = taps.shape
    B, T = bits.shape
    out = np.zeros((B, T, n_out), dtype=np.uint8)
    for g in range(n_out):
        acc = np.zeros((B, T), dtype=np.uint8)
        for i in range(K):
            if taps[g, i]:
                acc[:, i:] ^= bits[:, :T - i]
        out[:, :, g] = acc
    return out.reshape(B, T * n_out)


def _conv_encode_nb_impl(bits, taps):
    n_out, K = taps.shape
    B, T = bits.shape
    n_states = 1 << K
    # output bit of every generator for every register content
    table = np.zeros((n_states, n_out), dtype=np.uint8)
    for r in range(n_states):
        for g in range(n_out):
            acc = 0
            for i in range(K):
                if taps[g, i]:
                    acc ^= (r >> i) & 1
            table[r, g] = acc
    out = np.empty((B, T * n_out), dtype=np.uint8)
    for b in range(B):
        state = 0  # bit i holds the input delayed by i steps
        for t in range(T):
            state = ((state << 1) | np.int64(bits[b, t])) & (n_states - 1)
            for g in range(n_out):
                out[b, t * n_out + g] = table[state, g]
    return out


# ---------------------------------------------------------------- viterbi

def _viterbi_np(llr, signs):
    # llr: (B, T, n_out), positive favours coded 0; returns (B, T) uint8
    B, T, n_out = llr.shape
    n_states = signs.shape[0]
    half = n_states >> 1
    s_idx = np.arange(n_states)
    pred0 = s_idx >> 1
    pred1 = pred0 | half
    neg_inf = -1e300
    pm = np.full((B, n_states), neg_inf)
    pm[:, 0] = 0.0
    survivors = np.empty((B, T, n_states), dtype=np.bool_)
    sg0 = signs[:, 0, :]
    sg1 = signs[:, 1, :]
    for t in range(T):
        lt = llr[:, t, :]
        bm0 = lt[:, 0:1] * sg0[None, :, 0]
        bm1 = lt[:, 0:1] * sg1[None, :, 0]
        for g in range(1, n_out):
            bm0 = bm0 + lt[:, g:g + 1] * sg0[None, :, g]
            bm1 = bm1 + lt[:, g:g + 1] * sg1[None, :, g]
        c0 = pm[:, pred0] + bm0
        c1 = pm[:, pred1] + bm1
        choose1 = c1 > c0
        survivors[:, t, :] = choose1
        pm = np.where(choose1, c1, c0)
    out = np.empty((B, T), dtype=np.uint8)
    state = np.zeros(B, dtype=np.int64)
    rows = np.arange(B)
    for t in range(T - 1, -1, -1):
        out[:, t] = state & 1
        m = survivors[rows, t, state]
        state = (state >> 1) | (m.astype(np.int64) * half)
    return out


def _viterbi_nb_impl(llr, signs):
    B, T, n_out = llr.shape
    n_states = signs.shape[0]
    half = n_states >> 1
    neg_inf = -1e300
    out = np.empty((B, T), dtype=np.uint8)
    survivors = np.empty((T, n_states), dtype=np.bool_)
    pm = np.empty(n_states)
    new_pm = np.empty(n_states)
    for b in range(B):
        for s in range(n_states):
            pm[s] = neg_inf
        pm[0] = 0.0
        for t in range(T):
            for s in range(n_states):
                p0 = s >> 1
                p1 = p0 | half
                bm0 = llr[b, t, 0] * signs[s, 0, 0]
                bm1 = llr[b, t, 0] * signs[s, 1, 0]
                for g in range(1, n_out):
                    bm0 = bm0 + llr[b, t, g] * signs[s, 0, g]
                    bm1 = bm1 + llr[b, t, g] * signs[s, 1, g]
                c0 = pm[p0] + bm0
                c1 = pm[p1] + bm1
                if c1 > c0:
                    survivors[t, s] = True
                    new_pm[s] = c1
                else:
                    survivors[t, s] = False
                    new_pm[s] = c0
            for s in range(n_states):
                pm[s] = new_pm[s]
        state = 0
        for t in range(T - 1, -1, -1):
            out[b, t] = state & 1
            if survivors[t, state]:
                state = (state >> 1) | half
            else:
                state = state >> 1
    return out


# ---------------------------------------------------------------- EESM

def _eesm_np(sinr, betas, weights):
    # sinr: (N, M) linear, betas: (J,), weights: (M,) -> (N, J)
    out = np.empty((sinr.shape[0], betas.shape[0]))
    lo = sinr.min(axis=1)
    wsum = 0.0
    for m in range(sinr.shape[1]):
        wsum += weights[m]
    for j, beta in enumerate(betas):
        acc = np.zeros(sinr.shape[0])
        for m in range(sinr.shape[1]):
            acc += weights[m] * np.exp(-(sinr[:, m] - lo) / beta)
        out[:, j] = lo - beta * np.log(acc / wsum)
    return out


def _eesm_nb_impl(sinr, betas, weights):
    N, M = sinr.shape
    J = betas.shape[0]
    out = np.empty((N, J))
    wsum = 0.0
    for m in range(M):
        wsum += weights[m]
    for n in range(N):
        lo = sinr[n, 0]
        for m in range(1, M):
            if sinr[n, m] < lo:
                lo = sinr[n, m]
        for j in range(J):
            beta = betas[j]
            acc = 0.0
            for m in range(M):
                acc += weights[m] * np.exp(-(sinr[n, m] - lo) / beta)
            out[n, j] = lo - beta * np.log(acc / wsum)
    return out


if _HAVE_NUMBA:
    _conv_encode_nb = numba.njit(cache=True)(_conv_encode_nb_impl)
    _viterbi_nb = numba.njit(cache=True)(_viterbi_nb_impl)
    _eesm_nb = numba.njit(cache=True)(_eesm_nb_impl)


def conv_encode(bits, taps, use_numba=None):
    """Feed-forward convolutional encoding of a batch, output interleaved per step."""
    bits = np.ascontiguousarray(np.atleast_2d(bits), dtype=np.uint8)
    taps = np.ascontiguousarray(taps, dtype=np.uint8)
    if USE_NUMBA if use_numba is None else use_numba:
        return _conv_encode_nb(bits, taps)
    return _conv_encode_np(bits, taps)


def viterbi_decode(llr, signs, use_numba=None):
    """Max-log soft Viterbi for zero-started, zero-terminated trellises."""
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    if llr.ndim == 2:
        llr = llr[None]
    if USE_NUMBA if use_numba is None else use_numba:
        return _viterbi_nb(llr, np.ascontiguousarray(signs))
    return _viterbi_np(llr, signs)


def eesm_reduce(sinr, betas, weights=None, use_numba=None):
    """Row-wise exponential effective SINR for each beta; ``(N, M) -> (N, J)``.

    ``weights`` (length ``M``) turns the mean over columns into a weighted mean.
    """
    sinr = np.ascontiguousarray(np.atleast_2d(sinr), dtype=np.float64)
    betas = np.ascontiguousarray(np.atleast_1d(betas), dtype=np.float64)
    if weights is None:
        weights = np.ones(sinr.shape[1])
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if USE_NUMBA if use_numba is None else use_numba:
        return _eesm_nb(sinr, betas, weights)
    return _eesm_np(sinr, betas, weights)
