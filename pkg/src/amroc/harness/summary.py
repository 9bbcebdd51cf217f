"""Trend checks over sweep CSVs. Pure: never runs the simulator."""
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .presets import USABLE_BLER
from .sweep import read_rows


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@dataclass
class CurvePoint:
    mcs: int
    throughput_mbps: float
    bler: float
    peak_mbps: float
    bler_se: float


def _label(row):
    return "static" if row.channel == "static" else f"{row.channel}-{row.correlation}"


def curves(rows):
    """Seed-averaged curves keyed by ``(preset, bw_hz, f_if_hz, channel_label)``."""
    acc = defaultdict(lambda: defaultdict(list))
    for r in rows:
        acc[(r.preset, r.bw_hz, r.f_if_hz, _label(r))][r.mcs].append(r)
    out = {}
    for key, by_mcs in acc.items():
        pts = []
        for m in sorted(by_mcs):
            rs = by_mcs[m]
            b = np.array([r.bler for r in rs])
            n_blocks = sum(2 * r.n_subframes for r in rs)
            p = b.mean()
            se_seed = b.std(ddof=1) / np.sqrt(b.size) if b.size > 1 else 0.0
            se_binom = np.sqrt(max(p * (1 - p), 0.25 / n_blocks) / n_blocks)
            pts.append(CurvePoint(m, float(np.mean([r.throughput_mbps for r in rs])), float(p),
                                  rs[0].peak_mbps, float(max(se_seed, se_binom))))
        out[key] = pts
    return out


def highest_usable(points, threshold=USABLE_BLER):
    usable = [p for p in points if p.bler <= threshold]
    return max(usable, key=lambda p: p.mcs) if usable else None


def _mhz(f):
    return f"{f / 1e6:g} MHz"


def _usable_check(name, pts, lo, hi):
    best = highest_usable(pts)
    got = best.mcs if best else None
    return Check(name, got is not None and lo <= got <= hi, f"highest MCS with BLER <= 15% is {got}")


def trend_checks(rows):
    """Pass/fail of every preset expectation present in the rows."""
    cs = curves(rows)
    checks = []
    for (preset, bw, f_if, label), pts in sorted(cs.items()):
        where = f"{preset} BW={_mhz(bw)} f_IF={_mhz(f_if)} {label}"
        if preset == "fig4":
            worst = min(pts, key=lambda p: p.throughput_mbps / p.peak_mbps)
            checks.append(Check(f"{where}: all MCS >= 95% of peak",
                                all(p.throughput_mbps >= 0.95 * p.peak_mbps for p in pts),
                                f"worst MCS {worst.mcs} at {100 * worst.throughput_mbps / worst.peak_mbps:.1f}%"))
        elif preset == "fig5" and f_if == 175e6:
            checks.append(_usable_check(f"{where}: highest usable MCS 15+-2", pts, 13, 17))
        elif preset == "fig5" and f_if == 400e6:
            checks.append(_usable_check(f"{where}: highest usable MCS 11+-2", pts, 9, 13))
            m11 = next((p for p in pts if p.mcs == 11), None)
            if m11 is not None:
                checks.append(Check(f"{where}: MCS 11 throughput 10 Mbps +-25%",
                                    7.5 <= m11.throughput_mbps <= 12.5, f"{m11.throughput_mbps:.2f} Mbps"))
        elif preset == "fig6" and label == "static":
            low = [p for p in pts if p.mcs < 16]
            worst = min(low, key=lambda p: p.throughput_mbps / p.peak_mbps)
            checks.append(Check(f"{where}: degradation <= 5% below MCS 16",
                                all(p.throughput_mbps >= 0.95 * p.peak_mbps for p in low),
                                f"worst MCS {worst.mcs} at {100 * worst.throughput_mbps / worst.peak_mbps:.1f}%"))
        elif preset == "fig6" and label in ("epa5-low", "epa5-medium"):
            best = highest_usable(pts)
            ok = best is not None and best.mcs >= 10 and 12.75 <= best.throughput_mbps <= 21.25
            got = f"MCS {best.mcs} at {best.throughput_mbps:.2f} Mbps" if best else "none usable"
            checks.append(Check(f"{where}: usable up to 16QAM at 17 Mbps +-25%", ok, got))
        elif preset == "fig6" and label == "epa5-high":
            best = highest_usable(pts)
            ok = best is not None and best.mcs <= 9 and best.throughput_mbps < 15.0
            got = f"MCS {best.mcs} at {best.throughput_mbps:.2f} Mbps" if best else "none usable"
            checks.append(Check(f"{where}: usable MCS QPSK only, < 15 Mbps", ok, got))
    checks.extend(_ordering_checks(cs))
    return checks


def _ordering_checks(cs):
    out = []
    keys = {(p, bw, f) for (p, bw, f, _) in cs}
    for preset, bw, f_if in sorted(keys):
        names = ("epa5-low", "epa5-medium", "epa5-high")
        trio = [cs.get((preset, bw, f_if, n)) for n in names]
        if any(t is None for t in trio):
            continue
        bad = []
        for a, b, pa, pb in ((0, 1, *trio[:2]), (1, 2, *trio[1:])):
            for x, y in zip(pa, pb):
                in_wf = 0.01 < x.bler < 0.99 or 0.01 < y.bler < 0.99
                if in_wf:
                    tol = 2.0 * np.hypot(x.bler_se * x.peak_mbps, y.bler_se * y.peak_mbps)
                    if x.throughput_mbps + tol < y.throughput_mbps:
                        bad.append(f"MCS {x.mcs} {names[a]} < {names[b]}")
        out.append(Check(f"{preset} BW={_mhz(bw)} f_IF={_mhz(f_if)}: throughput Low >= Medium >= High (2 sigma)",
                         not bad, "; ".join(bad) if bad else "ordering holds"))
    return out


def summarize(csv_text):
    """Human-readable report: usable MCS per curve and trend pass/fail lines."""
    rows = read_rows(csv_text)
    lines = []
    for (preset, bw, f_if, label), pts in sorted(curves(rows).items()):
        best = highest_usable(pts)
        usable = f"MCS {best.mcs} ({best.throughput_mbps:.2f} Mbps)" if best else "none"
        lines.append(f"{preset} BW={_mhz(bw)} f_IF={_mhz(f_if)} {label}: highest usable {usable}")
    checks = trend_checks(rows)
    lines.append("")
    lines.extend(c.line() for c in checks)
    return "\n".join(lines), checks
