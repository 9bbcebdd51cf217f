"""Transmit power and thermal-noise bookkeeping per subcarrier."""
import numpy as np

THERMAL_NOISE_DBM_PER_HZ = -174.0


def tx_power_per_subcarrier_dbm(input_power_dbm_per_bw, numerology):
    """Per-port power on each occupied subcarrier."""
    return input_power_dbm_per_bw - 10.0 * np.log10(numerology.n_subcarriers)


def noise_power_per_subcarrier_dbm(rx_noise_figure_db, numerology):
    return (THERMAL_NOISE_DBM_PER_HZ + 10.0 * np.log10(numerology.subcarrier_spacing_hz)
            + rx_noise_figure_db)


def snr_per_subcarrier_db(input_power_dbm_per_bw, rx_noise_figure_db, numerology):
    """SNR on one subcarrier before any path gain (unit-gain channel)."""
    return (tx_power_per_subcarrier_dbm(input_power_dbm_per_bw, numerology)
            - noise_power_per_subcarrier_dbm(rx_noise_figure_db, numerology))


def normalized_noise_var(input_power_dbm_per_bw, rx_noise_figure_db, numerology):
    """Noise variance relative to unit-energy transmit symbols."""
    return 10.0 ** (-snr_per_subcarrier_db(input_power_dbm_per_bw, rx_noise_figure_db,
                                           numerology) / 10.0)
