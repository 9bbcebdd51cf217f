"""Sweep execution and CSV emission."""
import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

from ..frontend import same_if_plan
from ..link.abstraction import abstracted_result, default_table_path, effective_sinr_db, load_tables, sinr_trace
from ..link.config import ABSTRACTED, EXPLICIT
from ..link.explicit import run_link_explicit
from .config import SweepSpec, channel_from_label
from .presets import get_preset

SCHEMA_LINE = "# amroc sweep schema 1"


@dataclass(frozen=True)
class SweepResultRow:
    preset: str
    mcs: int
    f_if_hz: float
    bw_hz: float
    channel: str
    correlation: str
    seed: int
    n_subframes: int
    throughput_mbps: float
    bler: float
    mean_sinr_db: float
    peak_mbps: float

    def formatted(self):
        return [self.preset, str(self.mcs), f"{self.f_if_hz:.0f}", f"{self.bw_hz:.0f}", self.channel,
                self.correlation, str(self.seed), str(self.n_subframes), f"{self.throughput_mbps:.6f}",
                f"{self.bler:.6f}", f"{self.mean_sinr_db:.4f}", f"{self.peak_mbps:.6f}"]


COLUMNS = [f.name for f in fields(SweepResultRow)]


def sweep_spec(preset_name, experiment):
    """Axes and fixed parameters for a preset, or the config's custom sweep."""
    if preset_name == "custom":
        s = experiment.sweep
        return s, experiment.link
    p = get_preset(preset_name)
    spec = SweepSpec(p.name, experiment.sweep.seeds, p.f_if_hz, p.mcs, p.channels)
    link = replace(experiment.link, bw_hz=p.bw_hz, input_power_dbm_per_bw=p.input_power_dbm_per_bw)
    return spec, link


def _group_configs(spec, link, n_subframes, mode):
    """One entry per (channel, IF, seed), in output order."""
    pairs = tuple(a.pair for a in sorted(link.plan.assignments, key=lambda a: a.rf_port))
    groups = []
    for label in spec.channels:
        ch = channel_from_label(label)
        for f_if in spec.f_if_hz:
            for seed in spec.seeds:
                cfg = replace(link, channel=ch, plan=same_if_plan(f_if, pairs, link.plan.guard_band_hz),
                              seed=seed, n_subframes=n_subframes, mode=mode)
                groups.append((label, f_if, seed, cfg))
    return groups


def _run_group(job):
    preset, label, f_if, seed, cfg, mcs_list, tables = job
    rows = []
    if cfg.mode == ABSTRACTED:
        trace = sinr_trace(cfg)
        betas = [tables[m].beta for m in mcs_list]
        eff = effective_sinr_db(trace, betas)
        results = [abstracted_result(trace, replace(cfg, mcs=m), tables, eff[..., j])
                   for j, m in enumerate(mcs_list)]
    else:
        results = [run_link_explicit(replace(cfg, mcs=m)) for m in mcs_list]
    for m, r in zip(mcs_list, results):
        rows.append(SweepResultRow(preset, m, float(f_if), float(cfg.bw_hz), cfg.channel.kind,
                                   cfg.channel.correlation if cfg.channel.kind != "static" else "none",
                                   seed, cfg.n_subframes, r.throughput_mbps, r.bler,
                                   r.mean_post_eq_sinr_db, r.peak_mbps))
    return rows


def run_sweep_rows(preset_name, experiment, n_subframes=None, mode=None, workers=1, tables=None):
    """Run every sweep point; rows come back in a fixed order for any worker count."""
    spec, link = sweep_spec(preset_name, experiment)
    n_subframes = n_subframes or link.n_subframes
    mode = mode or link.mode
    if mode == ABSTRACTED and tables is None:
        tables = load_tables(default_table_path())
    jobs = [(spec.preset if preset_name == "custom" else preset_name, label, f_if, seed, cfg,
             tuple(spec.mcs), tables if mode == ABSTRACTED else None)
            for label, f_if, seed, cfg in _group_configs(spec, link, n_subframes, mode)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            grouped = list(pool.map(_run_group, jobs))
    else:
        grouped = [_run_group(j) for j in jobs]
    by_group = {(label, f_if, seed): rows for (_, label, f_if, seed, *_), rows in zip(jobs, grouped)}
    # output order: channel, IF, MCS, seed
    return [by_group[(label, f_if, seed)][j]
            for label in spec.channels for f_if in spec.f_if_hz
            for j in range(len(spec.mcs)) for seed in spec.seeds]


def rows_to_csv(rows):
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.formatted())
    return buf.getvalue()


class SchemaError(ValueError):
    """CSV does not match the sweep schema."""


def read_rows(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise SchemaError(f"missing schema line {SCHEMA_LINE!r}")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header != COLUMNS:
        raise SchemaError(f"unexpected columns {header}; expected {COLUMNS}")
    types = [f.type for f in fields(SweepResultRow)]
    conv = {"str": str, "int": int, "float": float}
    rows = []
    for n, rec in enumerate(reader, 3):
        if len(rec) != len(COLUMNS):
            raise SchemaError(f"line {n}: expected {len(COLUMNS)} fields, got {len(rec)}")
        try:
            rows.append(SweepResultRow(*[conv[t if isinstance(t, str) else t.__name__](x)
                                         for t, x in zip(types, rec)]))
        except ValueError as exc:
            raise SchemaError(f"line {n}: {exc}") from None
    return rows

