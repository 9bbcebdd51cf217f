"""Transport-block channel coding.

A CRC-16 is appended to the payload, the result is encoded with a
zero-terminated rate-1/3 convolutional code (K=7, generators 133/171/165
octal), rate-matched to the number of coded bits the subframe carries and
interleaved with a fixed pseudo-random permutation. Rate matching picks mother-code positions on a uniform
lattice, which punctures for rates above 1/3 and repeats below it.
"""
import binascii
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import _kernels

CODEC_VERSION = "cc7-133.171.165-crc16-rm1-ilprp1"


@dataclass(frozen=True)
class CodecSpec:
    constraint_length: int = 7
    generators: tuple = (0o133, 0o171, 0o165)
    crc_bits: int = 16
    interleaver_seed: int = 0x1EAF

    @property
    def tail_bits(self):
        return self.constraint_length - 1

    @property
    def mother_rate(self):
        return 1.0 / len(self.generators)

    @property
    def version(self):
        return CODEC_VERSION

    def mother_length(self, k_payload):
        return (k_payload + self.crc_bits + self.tail_bits) * len(self.generators)

    def rate_match_indices(self, k_payload, n_coded):
        """Mother-codeword position feeding each transmitted coded bit."""
        return _rate_match_indices(self.mother_length(k_payload), n_coded)

    def interleaver(self, n_coded):
        return _interleaver(n_coded, self.interleaver_seed)

    def punctured_rate(self, k_payload, n_coded):
        return k_payload / n_coded


DEFAULT_CODEC = CodecSpec()


@lru_cache(maxsize=256)
def _rate_match_indices(mother_len, n_coded):
    idx = (np.arange(n_coded, dtype=np.int64) * mother_len) // n_coded
    idx.flags.writeable = False
    return idx


@lru_cache(maxsize=256)
def _interleaver(n, seed):
    # spreads neighbouring trellis outputs across the whole subframe, so
    # frequency-correlated fades do not hit one error event together
    perm = np.random.default_rng([seed, n]).permutation(n)
    perm.flags.writeable = False
    return perm


@lru_cache(maxsize=16)
def _taps(generators, constraint_length):
    taps = np.zeros((len(generators), constraint_length), dtype=np.uint8)
    for g, poly in enumerate(generators):
        for i in range(constraint_length):
            taps[g, i] = (poly >> i) & 1
    return taps


@lru_cache(maxsize=16)
def _signs(generators, constraint_length):
    return _kernels.trellis_tables(generators, constraint_length)


def crc16(bits):
    """CRC-16/CCITT (poly 0x1021, zero init) of each row of a bit array."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    pad = (-bits.shape[1]) % 8
    padded = np.concatenate([np.zeros((bits.shape[0], pad), dtype=np.uint8), bits], axis=1)
    packed = np.packbits(padded, axis=1)
    out = np.empty((bits.shape[0], 16), dtype=np.uint8)
    for row in range(bits.shape[0]):
        crc = binascii.crc_hqx(packed[row].tobytes(), 0)
        out[row] = (crc >> np.arange(15, -1, -1)) & 1
    return out


def encode_batch(bits, n_coded, codec=DEFAULT_CODEC):
    """Encode a ``(B, K)`` batch of payloads into ``(B, n_coded)`` coded bits."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    B, K = bits.shape
    tail = np.zeros((B, codec.tail_bits), dtype=np.uint8)
    framed = np.concatenate([bits, crc16(bits), tail], axis=1)
    mother = _kernels.conv_encode(framed, _taps(codec.generators, codec.constraint_length))
    matched = mother[:, codec.rate_match_indices(K, n_coded)]
    return matched[:, codec.interleaver(n_coded)]


def decode_batch(llrs, k_payload, codec=DEFAULT_CODEC):
    """Soft-decode ``(B, n_coded)`` LLRs. Returns ``(bits (B, K), crc_ok (B,))``."""
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    B, n_coded = llrs.shape
    if n_coded < 1:
        raise ValueError("empty LLR block")
    deint = np.empty_like(llrs)
    deint[:, codec.interleaver(n_coded)] = llrs
    m_len = codec.mother_length(k_payload)
    idx = codec.rate_match_indices(k_payload, n_coded)
    mother = np.zeros((B, m_len))
    if n_coded <= m_len:
        # uniform lattice with step >= 1 never repeats a position
        mother[:, idx] = deint
    else:
        for row in range(B):
            mother[row] = np.bincount(idx, weights=deint[row], minlength=m_len)
    n_out = len(codec.generators)
    decoded = _kernels.viterbi_decode(mother.reshape(B, -1, n_out),
                                      _signs(codec.generators, codec.constraint_length))
    k_crc = k_payload + codec.crc_bits
    payload = decoded[:, :k_payload]
    crc_ok = np.all(crc16(payload) == decoded[:, k_payload:k_crc], axis=1)
    return payload, crc_ok


def encode_block(bits, n_coded, codec=DEFAULT_CODEC):
    """Encode one payload to exactly ``n_coded`` bits."""
    return encode_batch(np.asarray(bits)[None, :], n_coded, codec)[0]


def decode_block(llrs, k_payload, codec=DEFAULT_CODEC, n_coded=None):
    """Decode one block. Returns ``(bits, crc_ok)``."""
    llrs = np.asarray(llrs, dtype=np.float64).ravel()
    if n_coded is not None and llrs.size != n_coded:
        raise ValueError(f"expected {n_coded} LLRs, got {llrs.size}")
    bits, ok = decode_batch(llrs[None, :], k_payload, codec)
    return bits[0], bool(ok[0])
