import numpy as np
import pytest
from scipy.special import j0

from amroc import constants_36101 as c3gpp
from amroc.channel import ChannelModel, correlation_matrices, epa_tap_profile, generate_channel
from amroc.phy import numerology_for_bw

NUM5 = numerology_for_bw(5e6)


def epa(corr="low"):
    return ChannelModel("epa5", correlation=corr)


class TestProfile:
    def test_taps(self):
        p = epa_tap_profile()
        assert len(p.delays_ns) == len(p.powers_db) == 7
        assert p.delays_ns[-1] == 410.0

    def test_normalized(self):
        assert abs(epa_tap_profile().linear_powers.sum() - 1.0) < 1e-12
        assert abs(np.sum(10 ** (np.asarray(epa_tap_profile().powers_db) / 10)) - 1.0) < 1e-12

    def test_delay_within_cp(self):
        assert max(epa_tap_profile().delays_ns) * 1e-9 < c3gpp.NORMAL_CP_S


class TestCorrelationMatrices:
    def test_low_identity(self):
        r_tx, r_rx = correlation_matrices("low")
        np.testing.assert_array_equal(r_tx, np.eye(2))
        np.testing.assert_array_equal(r_rx, np.eye(2))

    def test_medium(self):
        r_tx, r_rx = correlation_matrices("medium")
        assert r_tx[0, 1] == 0.3 and r_rx[0, 1] == 0.9

    def test_high(self):
        r_tx, _ = correlation_matrices("high")
        np.testing.assert_array_equal(r_tx, [[1, 0.9], [0.9, 1]])

    def test_unknown(self):
        with pytest.raises(ValueError):
            correlation_matrices("extreme")


class TestModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelModel("eva")
        with pytest.raises(ValueError):
            ChannelModel("epa5", n_sinusoids=8)

    def test_label(self):
        assert ChannelModel().label == "static"
        assert epa("high").label == "epa5-high"


class TestRealization:
    def test_static_identity(self):
        ch = generate_channel(ChannelModel(), NUM5, 3, seed=9)
        h = ch.h
        assert h.shape == (42, 300, 2, 2)
        assert np.all(h == np.eye(2))

    def test_deterministic(self):
        a = generate_channel(epa(), NUM5, 2, seed=4).h
        b = generate_channel(epa(), NUM5, 2, seed=4).h
        assert a.tobytes() == b.tobytes()

    def test_subframe_matches_full(self):
        ch = generate_channel(epa("medium"), NUM5, 4, seed=1)
        np.testing.assert_array_equal(ch.subframe(2), ch.h[28:42])

    def test_zero_subframes(self):
        with pytest.raises(ValueError):
            generate_channel(epa(), NUM5, 0, 0)


class TestStatistics:
    def test_unit_power(self):
        p = [np.mean(np.abs(generate_channel(epa(), NUM5, 1, s).at_times(np.arange(0, 2, 0.05))) ** 2)
             for s in range(100)]
        assert np.mean(p) == pytest.approx(1.0, abs=0.05)

    def test_doppler_autocorrelation(self):
        lag = 0.1
        t0 = np.arange(0.0, 2.0, 0.05)
        acc = []
        for s in range(200):
            ch = generate_channel(epa(), NUM5, 1, s)
            a = ch.at_times(t0)[:, 150]
            b = ch.at_times(t0 + lag)[:, 150]
            acc.append(np.mean(np.real(a * b.conj())))
        assert np.mean(acc) == pytest.approx(j0(2 * np.pi * 5.0 * lag), abs=0.05)

    @pytest.mark.parametrize("level", ["low", "medium", "high"])
    def test_spatial_correlation(self, level):
        alpha, beta = c3gpp.CORRELATION[level]
        rx, tx = [], []
        for s in range(150):
            h = generate_channel(epa(level), NUM5, 1, s).at_times(np.arange(0, 4, 0.1))[:, ::50]
            rx.append(np.mean(h[..., 0, 0] * h[..., 1, 0].conj()))
            tx.append(np.mean(h[..., 0, 0] * h[..., 0, 1].conj()))
        assert np.real(np.mean(rx)) == pytest.approx(beta, abs=0.05)
        assert np.real(np.mean(tx)) == pytest.approx(alpha, abs=0.05)

    def test_adjacent_subcarriers_correlated(self):
        h = generate_channel(epa(), NUM5, 1, 3).at_times(np.arange(0, 2, 0.01))[..., 0, 0]
        a, b = h[:, :-1].ravel(), h[:, 1:].ravel()
        rho = np.abs(np.vdot(a, b)) / np.sqrt(np.vdot(a, a).real * np.vdot(b, b).real)
        assert rho > 0.99
