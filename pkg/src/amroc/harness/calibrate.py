"""Pin the absolute link budget to the reported operating points.

The converter loss and the receiver noise figure both shift every
per-subcarrier SNR by the same amount, so the search runs over the loss
with the noise figure held fixed. Each candidate is scored on the Static
channel with expected (not sampled) BLER:

* BW 5 MHz, every IF: every MCS keeps BLER <= 5% (>= 95% of peak);
* BW 10 MHz, 175 MHz: highest MCS with BLER <= 15% in 13..17;
* BW 10 MHz, 400 MHz: highest MCS with BLER <= 15% in 9..13.

The chosen loss is the midpoint of the widest run of grid values that
meets the most targets.
"""
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from ..frontend import FrontendSpec, same_if_plan
from ..link.abstraction import SinrTrace, effective_sinr_db, payload_bler
from ..link.budget import normalized_noise_var
from ..link.config import copper_matrix
from ..link.receiver import per_subcarrier_sinr
from ..phy import numerology_for_bw

TARGETS = (
    ("fig4: BW 5 MHz all MCS >= 95% of peak", 5e6, (75e6, 175e6, 400e6)),
    ("fig5: BW 10 MHz, 175 MHz highest usable MCS 15+-2", 10e6, (175e6,)),
    ("fig5: BW 10 MHz, 400 MHz highest usable MCS 11+-2", 10e6, (400e6,)),
)


@dataclass
class CalibrationResult:
    converter_pair_loss_db: float
    rx_noise_figure_db: float
    satisfied: list
    feasible_interval_db: tuple

    def config_text(self):
        met = ", ".join(f"{name}={'met' if ok else 'missed'}" for name, ok in self.satisfied)
        return (
            "# calibrated preset constants, generated by `amroc calibrate`\n"
            f"# targets: {met}\n"
            f"# loss interval meeting them: {self.feasible_interval_db[0]:.2f}..{self.feasible_interval_db[1]:.2f} dB\n"
            f"frontend.converter_pair_loss_db = {self.converter_pair_loss_db:.2f}\n"
            f"link.rx_noise_figure_db = {self.rx_noise_figure_db:.2f}\n"
        )


@lru_cache(maxsize=64)
def _lossless_copper(cfg):
    return copper_matrix(replace(cfg, frontend=replace(cfg.frontend, converter_pair_loss_db=0.0)))


def expected_bler(link, bw_hz, f_if_hz, loss_db, tables, seeds, power_dbm=-20.0, mcs_list=range(18)):
    """Seed-averaged expected BLER per MCS on the Static channel, shape ``(n_mcs,)``."""
    num = numerology_for_bw(bw_hz)
    nv = normalized_noise_var(power_dbm, link.rx_noise_figure_db, num) * 10.0 ** (loss_db / 10.0)
    weights = num.data_re_mask().sum(axis=0).astype(np.float64)
    mcs_list = list(mcs_list)
    betas = [tables[m].beta for m in mcs_list]
    out = np.zeros(len(mcs_list))
    for seed in seeds:
        K = _lossless_copper(replace(link, bw_hz=bw_hz, plan=same_if_plan(f_if_hz), seed=seed))
        trace = SinrTrace(per_subcarrier_sinr(K, nv)[None], weights, 1)
        eff = effective_sinr_db(trace, betas)[0]  # (2, n_mcs)
        for j, m in enumerate(mcs_list):
            p = payload_bler(tables[m], link.mcs_table[m], num, eff[:, j])
            out[j] += p.mean()
    return out / len(seeds)


def _highest_usable(bler, threshold=0.15):
    idx = np.nonzero(bler <= threshold)[0]
    return int(idx.max()) if idx.size else None


def score(link, loss_db, tables, seeds):
    """Which targets a given converter loss meets."""
    met = []
    fig4 = max(expected_bler(link, 5e6, f, loss_db, tables, seeds).max() for f in TARGETS[0][2])
    met.append(fig4 <= 0.05)
    u175 = _highest_usable(expected_bler(link, 10e6, 175e6, loss_db, tables, seeds))
    met.append(u175 is not None and 13 <= u175 <= 17)
    u400 = _highest_usable(expected_bler(link, 10e6, 400e6, loss_db, tables, seeds))
    met.append(u400 is not None and 9 <= u400 <= 13)
    return met


def calibrate_frontend(link, tables, loss_grid_db=None, seeds=(0, 1, 2)):
    if loss_grid_db is None:
        loss_grid_db = np.arange(20.0, 70.0 + 1e-9, 0.05)
    grid = np.asarray(loss_grid_db)
    scores = [score(link, l, tables, seeds) for l in grid]
    counts = np.array([sum(s) for s in scores])
    best = counts.max()
    # widest contiguous run at the best count
    runs, start = [], None
    for i, c in enumerate(np.append(counts, -1)):
        if c == best and start is None:
            start = i
        elif c != best and start is not None:
            runs.append((start, i - 1))
            start = None
    a, b = max(runs, key=lambda r: r[1] - r[0])
    loss = round(float(0.5 * (grid[a] + grid[b])), 2)
    final = score(link, loss, tables, seeds)
    return CalibrationResult(loss, link.rx_noise_figure_db,
                             [(t[0], ok) for t, ok in zip(TARGETS, final)],
                             (float(grid[a]), float(grid[b])))


def uncalibrated_link(link):
    """Link with the nominal 60 dB converter loss, the starting point for calibration."""
    return replace(link, frontend=FrontendSpec(60.0, link.frontend.f_if_min_hz))
