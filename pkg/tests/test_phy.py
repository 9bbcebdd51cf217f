import os
import subprocess
import sys

import numpy as np
import pytest

from amroc import _kernels
from amroc.phy import (MCS_TABLE, build_mcs_table, decode_batch, decode_block, demodulate_soft,
                       encode_batch, encode_block, mcs_entry, modulate, numerology_for_bw,
                       payload_bits, peak_throughput_mbps)
from amroc.phy.codec import DEFAULT_CODEC, crc16
from amroc.link.abstraction import simulate_blocks

needs_numba = pytest.mark.skipif(not _kernels._HAVE_NUMBA, reason="numba not installed")


class TestNumerology:
    @pytest.mark.parametrize("bw,n_rb,n_sc", [(5e6, 25, 300), (10e6, 50, 600), (20e6, 100, 1200)])
    def test_grid(self, bw, n_rb, n_sc):
        num = numerology_for_bw(bw)
        assert (num.n_rb, num.n_subcarriers) == (n_rb, n_sc)

    def test_unsupported_lists_supported(self):
        with pytest.raises(ValueError, match="5 MHz, 10 MHz, 20 MHz"):
            numerology_for_bw(15e6)

    def test_data_fraction(self):
        num = numerology_for_bw(10e6)
        assert num.n_data_re() == 0.75 * num.n_subcarriers * 14

    def test_offsets_symmetric(self):
        off = numerology_for_bw(5e6).subcarrier_offsets_hz()
        assert off.sum() == pytest.approx(0.0, abs=1e-6)
        assert np.allclose(np.diff(off), 15e3)


class TestMcs:
    def test_table_shape(self):
        assert len(MCS_TABLE) == 18
        assert {m.modulation for m in MCS_TABLE[:10]} == {"QPSK"}
        assert {m.modulation for m in MCS_TABLE[10:]} == {"16QAM"}

    def test_peak_mcs17_10mhz(self):
        assert peak_throughput_mbps(mcs_entry(17), numerology_for_bw(10e6)) == pytest.approx(37.8, abs=1e-9)

    def test_peak_mcs0_5mhz(self):
        assert peak_throughput_mbps(mcs_entry(0), numerology_for_bw(5e6)) == pytest.approx(1.512, abs=1e-9)

    def test_payload_consistent_with_peak(self):
        num = numerology_for_bw(10e6)
        for m in MCS_TABLE:
            assert abs(2 * payload_bits(m, num) / 1e3 - peak_throughput_mbps(m, num)) < 2e-3

    def test_bad_index(self):
        with pytest.raises(ValueError):
            mcs_entry(18)

    def test_rates_validated(self):
        with pytest.raises(ValueError):
            build_mcs_table(qpsk_rates=(0.5, 0.4))


class TestModulation:
    def test_qpsk_zero(self):
        assert modulate(np.array([0, 0]), 2)[0] == pytest.approx((1 + 1j) / np.sqrt(2))

    @pytest.mark.parametrize("bps", [2, 4])
    def test_unit_energy(self, bps):
        bits = np.array(np.unravel_index(np.arange(2**bps), (2,) * bps)).T.ravel()
        s = modulate(bits, bps)
        assert np.mean(np.abs(s) ** 2) == pytest.approx(1.0)
        assert len(set(np.round(s, 9))) == 2**bps

    @pytest.mark.parametrize("bps", [2, 4])
    def test_noiseless_round_trip(self, bps):
        bits = np.random.default_rng(1).integers(0, 2, 400 * bps)
        llr = demodulate_soft(modulate(bits, bps), 1e-9, bps)
        np.testing.assert_array_equal((llr < 0).astype(int), bits)

    def test_gray_neighbours(self):
        # adjacent 16QAM points differ in one bit
        bits = np.array(np.unravel_index(np.arange(16), (2,) * 4)).T
        s = modulate(bits.ravel(), 4)
        for i in range(16):
            d = np.abs(s - s[i])
            nearest = np.isclose(d, np.sort(d)[1])
            assert np.all(np.sum(bits[nearest] != bits[i], axis=1) == 1)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            modulate(np.array([0, 1, 1]), 2)
        with pytest.raises(ValueError):
            demodulate_soft(np.ones(3, complex), np.ones(2), 2)

    def test_nonpositive_noise(self):
        with pytest.raises(ValueError):
            demodulate_soft(np.ones(3, complex), 0.0, 2)


class TestCodec:
    @pytest.mark.parametrize("k,n", [(100, 120), (100, 400), (1000, 1500), (64, 600)])
    def test_noiseless_round_trip(self, k, n):
        bits = np.random.default_rng(k + n).integers(0, 2, k).astype(np.uint8)
        coded = encode_block(bits, n)
        assert coded.size == n
        out, ok = decode_block(1.0 - 2.0 * coded, k)
        assert ok
        np.testing.assert_array_equal(out, bits)

    def test_all_zero(self):
        coded = encode_block(np.zeros(200, np.uint8), 500)
        assert not coded.any()
        out, ok = decode_block(np.full(500, 4.0), 200)
        assert ok and not out.any()

    def test_crc_detects_flip(self):
        bits = np.random.default_rng(0).integers(0, 2, 300).astype(np.uint8)
        flipped = bits.copy()
        flipped[17] ^= 1
        assert not np.array_equal(crc16(bits), crc16(flipped))

    def test_crc_known_value(self):
        # CRC-16/XMODEM check value of "123456789"
        bits = np.unpackbits(np.frombuffer(b"123456789", dtype=np.uint8))
        assert int("".join(map(str, crc16(bits)[0])), 2) == 0x31C3

    def test_rate_match_lattice(self):
        idx = DEFAULT_CODEC.rate_match_indices(100, 200)
        assert np.all(np.diff(idx) >= 1)
        idx = DEFAULT_CODEC.rate_match_indices(100, 800)
        assert set(idx) == set(range(DEFAULT_CODEC.mother_length(100)))

    def test_interleaver_is_permutation(self):
        perm = DEFAULT_CODEC.interleaver(1000)
        assert sorted(perm) == list(range(1000))

    def test_llr_length_mismatch(self):
        with pytest.raises(ValueError):
            decode_block(np.zeros(10), 5, n_coded=12)

    def test_crc_rejects_low_snr(self):
        rng = np.random.default_rng(5)
        k, n = 150, 600
        bits = rng.integers(0, 2, (1000, k)).astype(np.uint8)
        x = modulate(encode_batch(bits, n).ravel(), 2)
        nv = 10.0
        y = x + np.sqrt(nv / 2) * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
        _, ok = decode_batch(demodulate_soft(y, nv, 2).reshape(1000, n), k)
        assert ok.mean() <= 0.01

    def test_numpy_fallback_flag(self):
        env = dict(os.environ, AMROC_DISABLE_NUMBA="1")
        out = subprocess.run([sys.executable, "-c", "from amroc import _kernels; print(_kernels.USE_NUMBA)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "False"


@needs_numba
class TestKernelParity:
    def test_encoder(self):
        from amroc.phy.codec import _taps
        bits = np.random.default_rng(2).integers(0, 2, (20, 300)).astype(np.uint8)
        taps = _taps(DEFAULT_CODEC.generators, 7)
        np.testing.assert_array_equal(_kernels.conv_encode(bits, taps, use_numba=True),
                                      _kernels.conv_encode(bits, taps, use_numba=False))

    def test_viterbi(self):
        from amroc.phy.codec import _signs
        llr = np.random.default_rng(3).standard_normal((30, 250, 3))
        signs = _signs(DEFAULT_CODEC.generators, 7)
        np.testing.assert_array_equal(_kernels.viterbi_decode(llr, signs, use_numba=True),
                                      _kernels.viterbi_decode(llr, signs, use_numba=False))

    def test_eesm(self):
        rng = np.random.default_rng(4)
        s = rng.exponential(5.0, (10, 600))
        w = rng.integers(1, 12, 600).astype(float)
        np.testing.assert_allclose(_kernels.eesm_reduce(s, [0.5, 2.0, 9.0], w, use_numba=True),
                                   _kernels.eesm_reduce(s, [0.5, 2.0, 9.0], w, use_numba=False),
                                   rtol=1e-12)


class TestAwgnBler:
    @pytest.mark.parametrize("mcs", [0, 9, 17])
    def test_extremes(self, mcs):
        e = mcs_entry(mcs)
        rng = np.random.default_rng(mcs)
        assert simulate_blocks(e, 10 ** (-10 / 10), 200, rng) / 200 >= 0.99
        assert simulate_blocks(e, 10 ** (25 / 10), 200, rng) == 0

    def test_monotone_in_snr(self):
        e = mcs_entry(11)
        n = 1000
        grid = np.arange(3.0, 8.01, 1.0)
        p = np.array([simulate_blocks(e, 10 ** (s / 10), n, np.random.default_rng([11, i])) / n
                      for i, s in enumerate(grid)])
        se = np.sqrt(np.maximum(p * (1 - p), 1 / n) / n)
        assert np.all(np.diff(p) <= 2 * np.hypot(se[1:], se[:-1]))

    def test_waterfall_ordering(self):
        # at a fixed SNR, a higher MCS never does better than a lower one of the same modulation
        n = 400
        for mcs_list, snr in (((3, 6, 9), 1.0), ((11, 14, 17), 9.0)):
            p = [simulate_blocks(mcs_entry(m), 10 ** (snr / 10), n, np.random.default_rng(m)) / n
                 for m in mcs_list]
            assert p[0] <= p[1] + 0.05 and p[1] <= p[2] + 0.05
