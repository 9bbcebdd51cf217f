"""The two back-to-back LAN-to-coax converters.

Covers the assignment of RF ports to (pair, IF) cable slots, the passive
cable equalizer, the flat converter loss, and composition of the whole
copper section into one port-to-port matrix per subcarrier.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .cable import CableSpec, insertion_loss_db


@dataclass(frozen=True)
class SlotAssignment:
    rf_port: int
    pair: int
    f_if_hz: float


@dataclass(frozen=True)
class Sf2sfPlan:
    assignments: tuple
    guard_band_hz: float = 180e3

    def slot(self, port):
        for a in self.assignments:
            if a.rf_port == port:
                return a
        raise ValueError(f"port {port} is not in the plan")

    @property
    def ports(self):
        return tuple(sorted(a.rf_port for a in self.assignments))


def same_if_plan(f_if_hz, pairs=(0, 1), guard_band_hz=180e3):
    """Port ``i`` on ``pairs[i]``, every port at the same IF."""
    return Sf2sfPlan(tuple(SlotAssignment(i, p, float(f_if_hz)) for i, p in enumerate(pairs)),
                     guard_band_hz)


@dataclass(frozen=True)
class FrontendSpec:
    converter_pair_loss_db: float = 60.0
    f_if_min_hz: float = 10e6

    def __post_init__(self):
        if self.converter_pair_loss_db < 0:
            raise ValueError("converter_pair_loss_db must be >= 0")


@dataclass(frozen=True)
class PlanViolation:
    kind: str
    assignment: SlotAssignment
    detail: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        if self.ok:
            return "plan ok"
        return "\n".join(f"{v.kind}: port {v.assignment.rf_port}: {v.detail}" for v in self.violations)


def validate_plan(plan, cable, bw_hz, f_if_min_hz=10e6):
    """Check a plan against the cable and signal bandwidth; never raises."""
    report = ValidationReport()
    seen = set()
    half = bw_hz / 2.0
    for a in plan.assignments:
        if a.rf_port in seen:
            report.violations.append(PlanViolation("duplicate-port", a, "rf_port used twice"))
        seen.add(a.rf_port)
        if not 0 <= a.pair < cable.n_pairs:
            report.violations.append(PlanViolation(
                "bad-pair", a, f"pair {a.pair} not in 0..{cable.n_pairs - 1}"))
        lo, hi = a.f_if_hz - half, a.f_if_hz + half
        if lo < f_if_min_hz or hi > cable.f_max_hz:
            report.violations.append(PlanViolation(
                "out-of-band", a,
                f"slot [{lo / 1e6:g}, {hi / 1e6:g}] MHz outside "
                f"[{f_if_min_hz / 1e6:g}, {cable.f_max_hz / 1e6:g}] MHz"))
    items = list(plan.assignments)
    for n, a in enumerate(items):
        for b in items[n + 1:]:
            gap = abs(a.f_if_hz - b.f_if_hz) - bw_hz
            if a.pair == b.pair and gap < plan.guard_band_hz:
                report.violations.append(PlanViolation(
                    "overlap", b,
                    f"shares pair {a.pair} with port {a.rf_port}; spacing "
                    f"{(gap + bw_hz) / 1e6:g} MHz < BW + guard"))
            elif a.pair != b.pair and gap < 0 and a.f_if_hz != b.f_if_hz:
                report.violations.append(PlanViolation(
                    "misaligned", b,
                    f"partially overlaps port {a.rf_port} on another pair at a different IF"))
    return report


@dataclass(frozen=True)
class EqualizerProfile:
    """Passive equalizer matched to a cable model at ``design_length_m``."""
    design_length_m: float
    band_hz: tuple
    reference: CableSpec = field(repr=False)

    def gain(self, f_hz):
        """Linear gain (<= 1); held flat outside the design band."""
        lo, hi = self.band_hz
        f = np.clip(np.asarray(f_hz, dtype=np.float64), lo, hi)
        return 10.0 ** (-(insertion_loss_db(self.reference, hi)
                          - insertion_loss_db(self.reference, f)) / 20.0)


def design_passive_equalizer(cable, design_length_m, band_hz):
    """Attenuate low frequencies so equalizer + cable is flat at the design length.

    Unity gain sits at the band's upper edge.
    """
    lo, hi = float(band_hz[0]), float(band_hz[1])
    if not 0 < lo < hi:
        raise ValueError(f"degenerate equalizer band {band_hz}")
    if hi > cable.f_max_hz:
        raise ValueError("equalizer band exceeds the cable model range")
    return EqualizerProfile(float(design_length_m), (lo, hi),
                            replace(cable, length_m=float(design_length_m)))


def map_subcarrier_freq(plan, port, k, numerology):
    """Cable frequency carrying subcarrier ``k`` of ``port``."""
    slot = plan.slot(port)
    n = numerology.n_subcarriers
    k = np.asarray(k)
    if np.any((k < 0) | (k >= n)):
        raise ValueError(f"subcarrier index outside 0..{n - 1}")
    return slot.f_if_hz + numerology.subcarrier_offsets_hz()[k]


def _interp_matrices(cable_ch, f_hz):
    """Interpolate cable matrices at ``f_hz``: linear in dB magnitude, linear in phase."""
    grid = cable_ch.freq_grid_hz
    f = np.asarray(f_hz, dtype=np.float64)
    tol = 1e-6 * grid[-1]
    if np.any(f < grid[0] - tol) or np.any(f > grid[-1] + tol):
        raise ValueError("subcarrier frequency outside the cable grid; extrapolation not allowed")
    hi = np.clip(np.searchsorted(grid, f), 1, grid.size - 1) if grid.size > 1 else np.zeros(f.shape, int)
    if grid.size == 1:
        return np.broadcast_to(cable_ch.matrices[0], f.shape + cable_ch.matrices.shape[1:]).copy()
    lo = hi - 1
    w = ((f - grid[lo]) / (grid[hi] - grid[lo]))[..., None, None]
    a = cable_ch.matrices[lo]
    b = cable_ch.matrices[hi]
    mag_a, mag_b = np.abs(a), np.abs(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = (1 - w) * np.log(mag_a) + w * np.log(mag_b)
        mag = np.where((mag_a > 0) & (mag_b > 0), np.exp(log_mag), (1 - w) * mag_a + w * mag_b)
    dphi = np.angle(b * np.conj(a))  # shortest arc between bins
    phase = np.angle(a) + w * dphi
    return mag * np.exp(1j * phase)


def compose_copper_section(plan, cable_ch, eq, fe, numerology):
    """Port-to-port matrix ``K[k]`` of the whole copper section, shape ``(n_sc, P, P)``.

    ``K[k][i][j]`` is the gain from input port ``j`` to output port ``i`` at
    subcarrier ``k``. Leakage between ports only lands on the same
    subcarrier when both ports share an IF, so other pairs of ports get
    zero coupling.
    """
    ports = plan.ports
    n_sc = numerology.n_subcarriers
    k = np.arange(n_sc)
    amp = 10.0 ** (-fe.converter_pair_loss_db / 40.0)
    K = np.zeros((n_sc, len(ports), len(ports)), dtype=np.complex128)
    for col, pj in enumerate(ports):
        sj = plan.slot(pj)
        f = map_subcarrier_freq(plan, pj, k, numerology)
        H = _interp_matrices(cable_ch, f)
        g = eq.gain(f)
        for row, pi in enumerate(ports):
            si = plan.slot(pi)
            if row != col and si.f_if_hz != sj.f_if_hz:
                continue
            K[:, row, col] = amp * amp * g * H[:, si.pair, sj.pair]
    return K
