"""Experiment presets for the three measured figures."""
from dataclasses import dataclass

MCS_ALL = tuple(range(18))


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    bw_hz: float
    input_power_dbm_per_bw: float
    f_if_hz: tuple
    channels: tuple
    mcs: tuple = MCS_ALL


PRESETS = {
    "fig4": ExperimentPreset("fig4", 5e6, -20.0, (75e6, 175e6, 400e6), ("static",)),
    "fig5": ExperimentPreset("fig5", 10e6, -20.0, (75e6, 175e6, 400e6), ("static",)),
    "fig6": ExperimentPreset("fig6", 20e6, -15.0, (175e6,),
                             ("static", "epa5-low", "epa5-medium", "epa5-high")),
}

USABLE_BLER = 0.15
DESK_SUBFRAMES = 2000
FULL_SUBFRAMES = 120_000


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)} or 'custom'") from None
