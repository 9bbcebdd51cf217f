"""EESM link abstraction: AWGN reference tables, beta calibration, fast runs."""
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import _kernels
from ..channel import ChannelModel, generate_channel
from ..phy.codec import DEFAULT_CODEC
from ..phy import (CODEC_VERSION, MCS_TABLE, decode_batch, demodulate_soft, encode_batch, modulate,
                   numerology_for_bw, payload_bits, peak_throughput_mbps)
from .budget import normalized_noise_var
from .config import ABSTRACTED, assemble_result, copper_matrix
from .receiver import per_subcarrier_sinr

REF_BLOCK_BITS = 1024
TABLE_FORMAT = 2
BLER_FLOOR = 1e-6
CRC_BITS = 16


class StaleTableError(RuntimeError):
    """Reference table missing or built with a different codec."""


class CalibrationInfeasibleError(RuntimeError):
    """No calibration realization falls inside the waterfall region."""


def eesm_effective_sinr(sinrs, beta, weights=None):
    """Exponential effective SINR (linear in, linear out)."""
    s = np.asarray(sinrs, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("empty SINR list")
    if np.any(s < 0):
        raise ValueError("SINRs must be >= 0")
    if not beta > 0:
        raise ValueError("beta must be > 0")
    return float(_kernels.eesm_reduce(s[None, :], [beta], weights)[0, 0])


@dataclass
class BlerRefTable:
    mcs: int
    snr_grid_db: np.ndarray
    bler: np.ndarray
    n_blocks: np.ndarray
    codec_version: str = CODEC_VERSION
    block_bits: int = REF_BLOCK_BITS
    beta: float = float("nan")

    def lookup(self, snr_db, block_bits=None):
        """BLER at ``snr_db`` (log-linear interpolation), rescaled to ``block_bits``.

        Error events of the convolutional code are local, so a block of
        ``L`` information bits survives with probability
        ``(1 - p_ref) ** (L / L_ref)``.
        """
        logb = np.log10(np.clip(self.bler, BLER_FLOOR, 1.0))
        v = np.interp(np.asarray(snr_db, dtype=np.float64), self.snr_grid_db, logb)
        p = np.where(v <= np.log10(BLER_FLOOR) + 1e-12, 0.0, 10.0 ** v)
        if block_bits is None:
            return p
        ratio = (block_bits + CRC_BITS) / (self.block_bits + CRC_BITS)
        return -np.expm1(ratio * np.log1p(-np.clip(p, 0.0, 1.0 - 1e-16)))

    def snr_at(self, bler_target):
        """Smallest grid-interpolated SNR where BLER drops to ``bler_target``."""
        logb = np.log10(np.clip(self.bler, BLER_FLOOR, 1.0))
        mono = np.minimum.accumulate(logb)
        target = np.log10(bler_target)
        idx = np.nonzero(mono <= target)[0]
        if idx.size == 0:
            return float(self.snr_grid_db[-1])
        i = idx[0]
        if i == 0:
            return float(self.snr_grid_db[0])
        x0, x1 = self.snr_grid_db[i - 1], self.snr_grid_db[i]
        y0, y1 = mono[i - 1], mono[i]
        return float(x0 + (target - y0) * (x1 - x0) / (y1 - y0)) if y1 != y0 else float(x1)


# ------------------------------------------------------------ AWGN tables

def _ref_n_coded(mcs, block_bits=REF_BLOCK_BITS, codec=DEFAULT_CODEC):
    # CRC and tail count against the rate, as they do in a long transport block
    framed = block_bits + codec.crc_bits + codec.tail_bits
    n_sym = int(np.ceil(framed / (mcs.code_rate * mcs.bits_per_symbol)))
    return n_sym * mcs.bits_per_symbol


def rate_offset_db(mcs, k_payload, n_coded, block_bits=REF_BLOCK_BITS, codec=DEFAULT_CODEC):
    """SNR penalty of a ``(k_payload, n_coded)`` block relative to the reference framing.

    CRC and tail make the effective rate depend on the block size. The
    offset is the capacity-equivalent SNR gap between the two spectral
    efficiencies.
    """
    overhead = codec.crc_bits + codec.tail_bits
    bps = mcs.bits_per_symbol
    rho_ref = (block_bits + overhead) / _ref_n_coded(mcs, block_bits, codec) * bps
    rho = (k_payload + overhead) / n_coded * bps
    return float(10.0 * np.log10(np.expm1(rho * np.log(2.0)) / np.expm1(rho_ref * np.log(2.0))))


def simulate_blocks(mcs, sinr_re, n_blocks, rng, block_bits=REF_BLOCK_BITS, batch=250):
    """Decode ``n_blocks`` reference blocks whose symbols see per-symbol SINRs ``sinr_re``.

    ``sinr_re`` is either a scalar (AWGN) or one linear SINR per coded
    symbol. Returns the number of failed blocks.
    """
    n_coded = _ref_n_coded(mcs, block_bits)
    bps = mcs.bits_per_symbol
    n_sym = n_coded // bps
    nv = 1.0 / np.broadcast_to(np.asarray(sinr_re, dtype=np.float64), (n_sym,))
    errors = 0
    done = 0
    while done < n_blocks:
        b = min(batch, n_blocks - done)
        bits = rng.integers(0, 2, (b, block_bits), dtype=np.uint8)
        coded = encode_batch(bits, n_coded)
        x = modulate(coded.ravel(), bps).reshape(b, n_sym)
        noise = np.sqrt(nv / 2.0) * (rng.standard_normal((b, n_sym)) + 1j * rng.standard_normal((b, n_sym)))
        llr = demodulate_soft((x + noise).ravel(), np.tile(nv, b), bps).reshape(b, n_coded)
        decoded, ok = decode_batch(llr, block_bits)
        errors += int(np.sum(~(ok & np.all(decoded == bits, axis=1))))
        done += b
    return errors


def build_bler_reference(mcs, snr_grid_db, n_blocks, seed, mcs_table=MCS_TABLE,
                         target_errors=1000, max_factor=50):
    """Monte-Carlo AWGN BLER of the reference block at each SNR.

    Points that see a handful of errors in the first ``n_blocks`` keep
    drawing batches of ``n_blocks`` until ``target_errors`` errors or
    ``max_factor * n_blocks`` blocks. Long payloads amplify the relative
    error of small reference BLERs, so those points need the extra blocks.
    """
    entry = mcs_table[mcs]
    grid = np.asarray(snr_grid_db, dtype=np.float64)
    bler = np.empty(grid.size)
    counts = np.empty(grid.size, dtype=np.int64)
    for i, snr_db in enumerate(grid):
        rng = np.random.default_rng([seed, 0xAE6, mcs, i])
        sinr = 10.0 ** (snr_db / 10.0)
        errors = simulate_blocks(entry, sinr, n_blocks, rng)
        done = n_blocks
        if errors >= 5:
            while errors < target_errors and done < max_factor * n_blocks:
                errors += simulate_blocks(entry, sinr, n_blocks, rng)
                done += n_blocks
        bler[i] = errors / done
        counts[i] = done
    return BlerRefTable(mcs, grid, bler, counts)


def auto_snr_grid(mcs, seed=0, step_db=0.25, span_db=(-2.5, 3.0), probe_blocks=100,
                  mcs_table=MCS_TABLE):
    """SNR grid around the AWGN waterfall, located by bisection on a coarse probe."""
    entry = mcs_table[mcs]
    lo, hi = -12.0, 25.0
    for it in range(12):
        mid = 0.5 * (lo + hi)
        rng = np.random.default_rng([seed, 0x9B0E, mcs, it])
        p = simulate_blocks(entry, 10.0 ** (mid / 10.0), probe_blocks, rng) / probe_blocks
        if p > 0.5:
            lo = mid
        else:
            hi = mid
    centre = round(0.5 * (lo + hi) / step_db) * step_db
    return np.arange(centre + span_db[0], centre + span_db[1] + step_db / 2, step_db)


# ------------------------------------------------------------ persistence

def save_tables(tables, path):
    """Write reference tables as a commented header plus numeric rows."""
    tables = sorted(tables.values() if isinstance(tables, dict) else tables, key=lambda t: t.mcs)
    lines = [
        "# amroc BLER reference tables",
        f"# format: {TABLE_FORMAT}",
        f"# codec: {tables[0].codec_version}",
        f"# block_bits: {tables[0].block_bits}",
        "# columns: mcs beta snr_db bler n_blocks",
    ]
    for t in tables:
        for s, b, n in zip(t.snr_grid_db, t.bler, t.n_blocks):
            lines.append(f"{t.mcs:d} {t.beta:.6g} {s:.4f} {b:.6f} {int(n):d}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_tables(path, expected_codec=CODEC_VERSION):
    """Read tables written by :func:`save_tables`; reject other codec versions."""
    path = Path(path)
    if not path.exists():
        raise StaleTableError(f"reference table {path} not found; run `amroc bler-ref`")
    header = {}
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            if ":" in line:
                key, _, val = line[1:].partition(":")
                header[key.strip()] = val.strip()
        elif line.strip():
            rows.append(line.split())
    if header.get("codec") != expected_codec:
        raise StaleTableError(
            f"reference table {path} built for codec {header.get('codec')!r}, "
            f"current codec is {expected_codec!r}; rebuild with `amroc bler-ref`")
    if int(header.get("format", -1)) != TABLE_FORMAT:
        raise StaleTableError(f"unsupported table format {header.get('format')!r}")
    block_bits = int(header["block_bits"])
    by_mcs = {}
    for r in rows:
        by_mcs.setdefault(int(r[0]), []).append(r)
    out = {}
    for mcs, rs in by_mcs.items():
        arr = np.array([[float(x) for x in r[1:]] for r in rs])
        out[mcs] = BlerRefTable(mcs, arr[:, 1], arr[:, 2], arr[:, 3].astype(int),
                                expected_codec, block_bits, float(arr[0, 0]))
    return out


def default_table_path():
    return Path(__file__).resolve().parent.parent / "data" / "bler_ref.txt"


# ------------------------------------------------------------ beta calibration

@dataclass
class Realization:
    """One frequency-selective SINR profile seen by a reference block."""
    sinr_re: np.ndarray
    n_blocks: int
    n_errors: int

    @property
    def bler(self):
        return self.n_errors / self.n_blocks


def _spread(profile, n_sym):
    n = profile.size
    if n_sym <= n:
        return profile[(np.arange(n_sym) * n) // n_sym]
    return profile[np.arange(n_sym) % n]


def fading_profiles(n_profiles, seed, bw_hz=20e6, correlations=("low", "medium", "high")):
    """Post-MMSE SINR shapes (unit mean) over frequency from EPA5 snapshots."""
    num = numerology_for_bw(bw_hz)
    out = []
    for i in range(n_profiles):
        corr = correlations[i % len(correlations)]
        ch = generate_channel(ChannelModel("epa5", correlation=corr), num, 1, seed * 100003 + i)
        h = ch.at_times([0.0])[0]
        s = per_subcarrier_sinr(h, 0.1)[:, i % 2]
        out.append(s / s.mean())
    return out


def make_realizations(mcs, table, n_realizations, n_blocks, seed, beta0=None,
                      mcs_table=MCS_TABLE):
    """Scale fading profiles into the waterfall and simulate each explicitly."""
    entry = mcs_table[mcs]
    beta0 = beta0 or (2.0 if entry.bits_per_symbol == 2 else 8.0)
    n_sym = _ref_n_coded(entry) // entry.bits_per_symbol
    lo_db, hi_db = table.snr_at(0.9), table.snr_at(0.02)
    rng = np.random.default_rng([seed, 0xCA1, mcs])
    targets = rng.uniform(lo_db - 0.3, hi_db + 0.3, n_realizations)
    out = []
    for i, (shape, target_db) in enumerate(zip(fading_profiles(n_realizations, seed), targets)):
        base = _spread(shape, n_sym)
        target = 10.0 ** (target_db / 10.0)
        # bisection on the scale so that EESM(scale * base, beta0) hits the target
        a, b = 1e-3, 1e6
        for _ in range(80):
            m = np.sqrt(a * b)
            if eesm_effective_sinr(m * base, beta0) < target:
                a = m
            else:
                b = m
        sinr = np.sqrt(a * b) * base
        brng = np.random.default_rng([seed, 0xB10C, mcs, i])
        out.append(Realization(sinr, n_blocks, simulate_blocks(entry, sinr, n_blocks, brng)))
    return out


def prediction_error(beta, realizations, table):
    pred = np.array([table.lookup(10.0 * np.log10(max(eesm_effective_sinr(r.sinr_re, beta), 1e-30)))
                     for r in realizations])
    sim = np.array([r.bler for r in realizations])
    return pred - sim


def _golden(f, a, b, tol=1e-4, max_iter=100):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def calibrate_beta(mcs, realizations, ref, beta_range=(0.05, 100.0), n_grid=41,
                   waterfall=(0.02, 0.9)):
    """Beta minimizing squared BLER prediction error over the realizations.

    A log-spaced grid brackets the minimum, then golden-section search
    refines it in log-beta.
    """
    inside = [r for r in realizations if waterfall[0] < r.bler < waterfall[1]]
    if not inside:
        raise CalibrationInfeasibleError(
            f"MCS {mcs}: no realization has BLER inside {waterfall}")

    def cost(log_beta):
        e = prediction_error(float(np.exp(log_beta)), realizations, ref)
        return float(np.sum(e * e))

    grid = np.linspace(np.log(beta_range[0]), np.log(beta_range[1]), n_grid)
    costs = np.array([cost(g) for g in grid])
    i = int(np.argmin(costs))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n_grid - 1)]
    best = _golden(cost, a, b)
    if cost(best) > costs[i]:
        best = grid[i]
    return float(np.exp(best))


# ------------------------------------------------------------ fast link runs

@dataclass
class SinrTrace:
    """Per-subframe post-MMSE SINRs of one link configuration (MCS-independent)."""
    sinr: np.ndarray        # (n_rows, n_sc, 2); one row when the channel is static
    weights: np.ndarray     # data REs per subcarrier
    n_subframes: int

    def mean_sinr_db(self):
        w = self.weights / self.weights.sum()
        return float(10.0 * np.log10(np.mean(np.tensordot(self.sinr, w, axes=([1], [0])))))


def sinr_trace(config):
    """Post-MMSE SINR per subcarrier and stream at each subframe midpoint."""
    num = config.numerology
    K = copper_matrix(config)
    noise_var = normalized_noise_var(config.input_power_dbm_per_bw, config.rx_noise_figure_db, num)
    weights = num.data_re_mask().sum(axis=0).astype(np.float64)
    if config.channel.kind == "static":
        h = np.broadcast_to(np.eye(2), (num.n_subcarriers, 2, 2))
        return SinrTrace(per_subcarrier_sinr(K @ h, noise_var)[None], weights, config.n_subframes)
    chan = generate_channel(config.channel, num, config.n_subframes, config.seed)
    mid = (np.arange(config.n_subframes) + 0.5) * num.subframe_duration_s
    out = np.empty((config.n_subframes, num.n_subcarriers, 2))
    chunk = 64
    for s in range(0, config.n_subframes, chunk):
        h = chan.at_times(mid[s:s + chunk])
        out[s:s + chunk] = per_subcarrier_sinr(K[None] @ h, noise_var)
    return SinrTrace(out, weights, config.n_subframes)


def effective_sinr_db(trace, betas):
    """EESM over subcarriers for each row, stream and beta: ``(n_rows, 2, n_beta)``."""
    n_rows, n_sc, n_st = trace.sinr.shape
    betas = np.atleast_1d(np.asarray(betas, dtype=np.float64))
    flat = trace.sinr.transpose(0, 2, 1).reshape(n_rows * n_st, n_sc)
    eff = _kernels.eesm_reduce(np.clip(flat, 0.0, None), betas, trace.weights)
    return 10.0 * np.log10(np.clip(eff, 1e-30, None)).reshape(n_rows, n_st, betas.size)


def payload_bler(table, mcs, num, eff_db):
    """Reference-table BLER of one transport block of ``mcs`` on numerology ``num``."""
    k_payload = payload_bits(mcs, num)
    offset = rate_offset_db(mcs, k_payload, num.n_data_re() * mcs.bits_per_symbol)
    return table.lookup(np.asarray(eff_db) - offset, block_bits=k_payload)


def abstracted_result(trace, config, tables, eff_db=None):
    """Draw block outcomes for ``config.mcs`` from a precomputed SINR trace."""
    num = config.numerology
    mcs = config.mcs_entry
    table = _table_for(tables, config.mcs)
    if eff_db is None:
        eff_db = effective_sinr_db(trace, [table.beta])[..., 0]
    k_payload = payload_bits(mcs, num)
    p = payload_bler(table, mcs, num, eff_db)  # (n_rows, 2)
    p = np.broadcast_to(p, (trace.n_subframes, 2)) if p.shape[0] == 1 else p
    u = np.random.default_rng([config.seed, 0xAB57, config.mcs]).random((trace.n_subframes, 2))
    ok = u >= p
    return assemble_result(ok, k_payload, num, peak_throughput_mbps(mcs, num, 2),
                           trace.mean_sinr_db(), ABSTRACTED)


def _table_for(tables, mcs):
    if tables is None or mcs not in tables:
        raise StaleTableError(f"no reference table for MCS {mcs}; run `amroc bler-ref`")
    t = tables[mcs]
    if t.codec_version != CODEC_VERSION:
        raise StaleTableError(f"table for MCS {mcs} built with codec {t.codec_version!r}")
    if not np.isfinite(t.beta):
        raise StaleTableError(f"table for MCS {mcs} has no calibrated beta")
    return t


def run_link_abstracted(config, tables=None):
    """Fast EESM-based run with the same result shape as the explicit mode."""
    if tables is None:
        tables = load_tables(default_table_path())
    _table_for(tables, config.mcs)
    return abstracted_result(sinr_trace(config), replace(config, mode=ABSTRACTED), tables)


def build_tables(mcs_list, n_blocks=1000, seed=0, n_realizations=120, realization_blocks=200,
                 log=None, mcs_table=MCS_TABLE):
    """AWGN reference table plus calibrated beta for every MCS in ``mcs_list``."""
    out = {}
    for mcs in mcs_list:
        grid = auto_snr_grid(mcs, seed=seed, span_db=(-3.0, 4.0), mcs_table=mcs_table)
        table = build_bler_reference(mcs, grid, n_blocks, seed, mcs_table=mcs_table)
        reals = make_realizations(mcs, table, n_realizations, realization_blocks, seed,
                                  mcs_table=mcs_table)
        table.beta = calibrate_beta(mcs, reals, table)
        if log:
            rms = float(np.sqrt(np.mean(prediction_error(table.beta, reals, table) ** 2)))
            log(f"MCS {mcs:2d}: grid {grid[0]:.2f}..{grid[-1]:.2f} dB, beta {table.beta:.3f}, "
                f"calibration RMS {rms:.3f}")
        out[mcs] = table
    return out
