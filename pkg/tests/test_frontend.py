import numpy as np
import pytest

from amroc.cable import CableSpec, build_cable_channel, default_grid, fext_coupling_db, insertion_loss_db
from amroc.frontend import (FrontendSpec, SlotAssignment, Sf2sfPlan, compose_copper_section,
                            design_passive_equalizer, map_subcarrier_freq, same_if_plan, validate_plan)
from amroc.phy import numerology_for_bw

CABLE = CableSpec()
NUM10 = numerology_for_bw(10e6)


def kinds(report):
    return {v.kind for v in report.violations}


class TestValidatePlan:
    def test_same_if_plan_ok(self):
        assert validate_plan(same_if_plan(175e6), CABLE, 10e6).ok

    def test_overlap_same_pair(self):
        plan = Sf2sfPlan((SlotAssignment(0, 0, 100e6), SlotAssignment(1, 0, 104e6)))
        assert "overlap" in kinds(validate_plan(plan, CABLE, 10e6))

    def test_guard_respected_on_same_pair(self):
        plan = Sf2sfPlan((SlotAssignment(0, 0, 100e6), SlotAssignment(1, 0, 110.2e6)))
        assert validate_plan(plan, CABLE, 10e6).ok

    def test_out_of_band(self):
        cable = CableSpec(f_max_hz=400e6)
        report = validate_plan(same_if_plan(400e6), cable, 10e6)
        assert "out-of-band" in kinds(report)
        assert "405" in str(report)

    def test_below_min_if(self):
        assert "out-of-band" in kinds(validate_plan(same_if_plan(12e6), CABLE, 10e6))

    def test_bad_pair_and_duplicate(self):
        plan = Sf2sfPlan((SlotAssignment(0, 0, 175e6), SlotAssignment(0, 9, 175e6)))
        assert {"bad-pair", "duplicate-port"} <= kinds(validate_plan(plan, CABLE, 10e6))

    def test_misaligned(self):
        plan = Sf2sfPlan((SlotAssignment(0, 0, 175e6), SlotAssignment(1, 1, 178e6)))
        assert "misaligned" in kinds(validate_plan(plan, CABLE, 10e6))


class TestEqualizer:
    def test_unity_at_upper_edge(self):
        eq = design_passive_equalizer(CABLE, 50.0, (10e6, 400e6))
        assert eq.gain(400e6) == pytest.approx(1.0, abs=1e-15)

    def test_gain_at_100mhz(self):
        eq = design_passive_equalizer(CABLE, 50.0, (10e6, 400e6))
        assert eq.gain(100e6) == pytest.approx(10 ** (-(24.27125 - 10.98750) / 20), rel=1e-9)
        assert eq.gain(100e6) == pytest.approx(0.2166, abs=1e-4)

    def test_flat_at_design_length(self):
        eq = design_passive_equalizer(CABLE, 50.0, (10e6, 400e6))
        f = np.linspace(10e6, 400e6, 777)
        total = eq.gain(f) * 10 ** (-insertion_loss_db(CABLE, f) / 20)
        assert np.ptp(total) / total.mean() < 1e-9

    def test_gain_at_most_one(self):
        eq = design_passive_equalizer(CABLE, 50.0, (10e6, 500e6))
        assert np.all(eq.gain(np.linspace(1e6, 500e6, 100)) <= 1.0)

    @pytest.mark.parametrize("band", [(100e6, 100e6), (0.0, 10e6), (10e6, 600e6)])
    def test_degenerate_band(self, band):
        with pytest.raises(ValueError):
            design_passive_equalizer(CABLE, 50.0, band)


class TestSubcarrierMap:
    def test_center(self):
        num = numerology_for_bw(5e6)
        f = map_subcarrier_freq(same_if_plan(75e6), 0, np.array([149, 150]), num)
        assert f.mean() == pytest.approx(75e6)

    def test_upper_edge(self):
        num = numerology_for_bw(5e6)
        f = map_subcarrier_freq(same_if_plan(75e6), 0, num.n_subcarriers - 1, num)
        # 300 subcarriers occupy 4.5 MHz; the last centre sits half a spacing inside the edge
        assert f == pytest.approx(75e6 + 2.25e6 - 7.5e3)

    def test_lowest_10mhz(self):
        f = map_subcarrier_freq(same_if_plan(400e6), 1, 0, NUM10)
        assert f == pytest.approx(400e6 - 4.5e6 + 7.5e3)

    def test_unknown_port(self):
        with pytest.raises(ValueError):
            map_subcarrier_freq(same_if_plan(75e6), 5, 0, NUM10)

    def test_bad_index(self):
        with pytest.raises(ValueError):
            map_subcarrier_freq(same_if_plan(75e6), 0, 600, NUM10)


class TestCompose:
    def setup_method(self):
        self.ch = build_cable_channel(CABLE, default_grid(CABLE), seed=3)
        self.eq = design_passive_equalizer(CABLE, 50.0, (10e6, 500e6))
        self.fe = FrontendSpec(60.0)

    def test_single_port_scalar_chain(self):
        plan = Sf2sfPlan((SlotAssignment(0, 2, 175e6),))
        f = map_subcarrier_freq(plan, 0, np.arange(600), NUM10)
        on_grid = build_cable_channel(CABLE, f)
        K = compose_copper_section(plan, on_grid, self.eq, self.fe, NUM10)
        assert K.shape == (600, 1, 1)
        expected = 10 ** (-(60 + insertion_loss_db(CABLE, f)) / 20) * self.eq.gain(f)
        np.testing.assert_allclose(np.abs(K[:, 0, 0]), expected, rtol=1e-12)

    def test_interpolation_close_to_closed_form(self):
        plan = Sf2sfPlan((SlotAssignment(0, 2, 175e6),))
        f = map_subcarrier_freq(plan, 0, np.arange(600), NUM10)
        K = compose_copper_section(plan, self.ch, self.eq, self.fe, NUM10)
        expected = 10 ** (-(60 + insertion_loss_db(CABLE, f)) / 20) * self.eq.gain(f)
        np.testing.assert_allclose(np.abs(K[:, 0, 0]), expected, rtol=1e-4)

    def test_fext_ratio(self):
        plan = same_if_plan(175e6)
        f = map_subcarrier_freq(plan, 0, np.arange(600), NUM10)
        K = compose_copper_section(plan, build_cable_channel(CABLE, f), self.eq, self.fe, NUM10)
        ratio = np.abs(K[:, 0, 1]) / np.abs(K[:, 0, 0])
        np.testing.assert_allclose(ratio, 10 ** (-fext_coupling_db(CABLE, f) / 20), rtol=1e-12)

    def test_disjoint_ifs_decouple(self):
        plan = Sf2sfPlan((SlotAssignment(0, 0, 100e6), SlotAssignment(1, 0, 150e6)))
        K = compose_copper_section(plan, self.ch, self.eq, self.fe, NUM10)
        assert np.all(K[:, 0, 1] == 0) and np.all(K[:, 1, 0] == 0)
        assert np.all(np.abs(K[:, 0, 0]) > 0)

    def test_passive(self):
        for f_if in (75e6, 175e6, 400e6):
            K = compose_copper_section(same_if_plan(f_if), self.ch, self.eq, FrontendSpec(0.0), NUM10)
            assert np.linalg.svd(K, compute_uv=False).max() <= 1.0

    def test_flat_diagonal_at_design_length(self):
        K = compose_copper_section(same_if_plan(175e6), self.ch, self.eq, self.fe, NUM10)
        mag_db = 20 * np.log10(np.abs(K[:, 0, 0]))
        assert np.ptp(mag_db) < 0.1

    def test_relabeling(self):
        a = compose_copper_section(same_if_plan(175e6, pairs=(0, 1)), self.ch, self.eq, self.fe, NUM10)
        b = compose_copper_section(same_if_plan(175e6, pairs=(1, 0)), self.ch, self.eq, self.fe, NUM10)
        np.testing.assert_allclose(b, a[:, ::-1, ::-1], rtol=1e-12)

    def test_extrapolation_rejected(self):
        coarse = build_cable_channel(CABLE, np.arange(100, 201) * 1e6)
        with pytest.raises(ValueError, match="extrapolation"):
            compose_copper_section(same_if_plan(300e6), coarse, self.eq, self.fe, NUM10)

    def test_negative_loss_rejected(self):
        with pytest.raises(ValueError):
            FrontendSpec(-1.0)
