"""Plain-text experiment configuration.

One ``key = value`` per line. Keys are dotted (``channel.kind = epa5``) or
sit under a ``[section]`` header; ``#`` starts a comment. Frequencies
accept ``Hz``/``kHz``/``MHz``/``GHz`` suffixes, lists are comma-separated
and integer ranges may be written ``0-17``.

Sections and keys (defaults in parentheses)::

    [cable]     category (cat5e), length_m (50), n_pairs (4), velocity_factor (0.65),
                il_a (1.967), il_b (0.023), il_c (0.050), elfext_ref_db (23.8),
                elfext_slope_db_per_decade (20), next_ref_db (35.3),
                next_slope_db_per_decade (15), f_max_hz (500 MHz), grid_step_hz (1 MHz)
    [frontend]  converter_pair_loss_db (calibrated), f_if_min_hz (10 MHz),
                eq_design_length_m (cable length), eq_band_low_hz (f_if_min_hz),
                eq_band_high_hz (f_max_hz)
    [plan]      f_if_hz (175 MHz), pairs (0,1), guard_band_hz (180 kHz)
    [phy]       bw_hz (10 MHz), mcs (11), qpsk_rates, qam16_rates, overhead_fraction (0.25)
    [channel]   kind (static), correlation (low), doppler_hz (5), n_sinusoids (16)
    [link]      input_power_dbm_per_bw (-20), rx_noise_figure_db (calibrated),
                n_subframes (2000), seed (0), mode (abstracted)
    [sweep]     preset (custom), seeds (0,1,2), f_if_hz (175 MHz), mcs (0-17),
                channels (static)

An empty file yields the defaults above: the two-pair same-IF plan on 50 m
of Cat-5e at a 10 MHz, -20 dBm/BW, Static operating point with the
calibrated converter loss and noise figure.
"""
import re
from dataclasses import dataclass, field
from importlib import resources

from ..cable import CableSpec
from ..channel import ChannelModel
from ..frontend import FrontendSpec, same_if_plan
from ..link.config import ABSTRACTED, EXPLICIT, ConfigError, LinkConfig
from ..phy import build_mcs_table
from ..phy.mcs import DEFAULT_OVERHEAD, QAM16_RATES, QPSK_RATES


class ConfigSyntaxError(ConfigError):
    """Malformed line."""


class UnknownKeyError(ConfigError):
    """Key not recognised in its section."""


class ConfigValueError(ConfigError):
    """Value that cannot be parsed or violates an invariant."""


_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_NUM_UNIT = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*([a-zA-Z]*)\s*$")


def _number(text):
    m = _NUM_UNIT.match(text)
    if not m:
        raise ValueError(f"not a number: {text!r}")
    unit = m.group(2).lower()
    if unit and unit not in _UNITS:
        raise ValueError(f"unknown unit {m.group(2)!r}")
    return float(m.group(1)) * _UNITS.get(unit, 1.0)


def _int(text):
    v = _number(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


def _list(conv):
    def parse(text):
        return tuple(conv(t) for t in text.split(",") if t.strip())
    return parse


def _int_range(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        m = re.match(r"^(\d+)\s*-\s*(\d+)$", part)
        if m:
            out.extend(range(int(m.group(1)), int(m.group(2)) + 1))
        elif part:
            out.append(_int(part))
    return tuple(out)


def _word(text):
    return text.strip().lower()


def _words(text):
    return tuple(_word(t) for t in text.split(",") if t.strip())


SCHEMA = {
    "cable": {
        "category": str.strip, "length_m": _number, "n_pairs": _int, "velocity_factor": _number,
        "il_a": _number, "il_b": _number, "il_c": _number, "elfext_ref_db": _number,
        "elfext_slope_db_per_decade": _number, "next_ref_db": _number,
        "next_slope_db_per_decade": _number, "f_max_hz": _number, "grid_step_hz": _number,
    },
    "frontend": {
        "converter_pair_loss_db": _number, "f_if_min_hz": _number, "eq_design_length_m": _number,
        "eq_band_low_hz": _number, "eq_band_high_hz": _number,
    },
    "plan": {"f_if_hz": _number, "pairs": _list(_int), "guard_band_hz": _number},
    "phy": {
        "bw_hz": _number, "mcs": _int, "qpsk_rates": _list(_number),
        "qam16_rates": _list(_number), "overhead_fraction": _number,
    },
    "channel": {"kind": _word, "correlation": _word, "doppler_hz": _number, "n_sinusoids": _int},
    "link": {
        "input_power_dbm_per_bw": _number, "rx_noise_figure_db": _number, "n_subframes": _int,
        "seed": _int, "mode": _word,
    },
    "sweep": {
        "preset": _word, "seeds": _list(_int), "f_if_hz": _list(_number), "mcs": _int_range,
        "channels": _words,
    },
}


@dataclass(frozen=True)
class SweepSpec:
    preset: str = "custom"
    seeds: tuple = (0, 1, 2)
    f_if_hz: tuple = (175e6,)
    mcs: tuple = tuple(range(18))
    channels: tuple = ("static",)


@dataclass(frozen=True)
class Experiment:
    """Parsed configuration: one base link point plus sweep axes."""
    link: LinkConfig = field(default_factory=LinkConfig)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    values: dict = field(default_factory=dict)


def read_pairs(text, origin="<config>"):
    """Yield ``(lineno, section, key, raw_value)`` from config text."""
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigSyntaxError(f"{origin}:{lineno}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip().lower()
            if section not in SCHEMA:
                raise UnknownKeyError(f"{origin}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigSyntaxError(f"{origin}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if not value.strip():
            raise ConfigSyntaxError(f"{origin}:{lineno}: missing value for {key!r}")
        if "." in key:
            sec, _, key = key.partition(".")
        elif section is not None:
            sec = section
        else:
            raise ConfigSyntaxError(f"{origin}:{lineno}: key {key!r} outside any section")
        if sec not in SCHEMA:
            raise UnknownKeyError(f"{origin}:{lineno}: unknown section {sec!r}")
        if key not in SCHEMA[sec]:
            raise UnknownKeyError(f"{origin}:{lineno}: unknown key {sec}.{key}")
        yield lineno, sec, key, value.strip()


def parse_values(text, origin="<config>"):
    """Parse config text into ``{(section, key): value}``."""
    out = {}
    for lineno, sec, key, raw in read_pairs(text, origin):
        try:
            out[(sec, key)] = SCHEMA[sec][key](raw)
        except ValueError as exc:
            raise ConfigValueError(f"{origin}:{lineno}: {sec}.{key}: {exc}") from None
    return out


def calibrated_values():
    """Constants of the calibrated preset shipped with the package."""
    path = resources.files("amroc") / "data" / "calibrated.cfg"
    if not path.is_file():
        return {}
    return parse_values(path.read_text(), "calibrated.cfg")


def build_experiment(values):
    """Assemble a validated :class:`Experiment` from parsed values."""
    v = dict(values)

    def get(sec, key, default):
        return v.get((sec, key), default)

    try:
        cable_kwargs = {k: v[("cable", k)] for k in SCHEMA["cable"] if ("cable", k) in v and k != "grid_step_hz"}
        cable = CableSpec(**cable_kwargs)
        fe = FrontendSpec(get("frontend", "converter_pair_loss_db", FrontendSpec.converter_pair_loss_db),
                          get("frontend", "f_if_min_hz", FrontendSpec.f_if_min_hz))
        pairs = get("plan", "pairs", (0, 1))
        plan = same_if_plan(get("plan", "f_if_hz", 175e6), pairs, get("plan", "guard_band_hz", 180e3))
        table = build_mcs_table(get("phy", "qpsk_rates", QPSK_RATES),
                                get("phy", "qam16_rates", QAM16_RATES),
                                get("phy", "overhead_fraction", DEFAULT_OVERHEAD))
        channel = ChannelModel(get("channel", "kind", "static"),
                               get("channel", "doppler_hz", 5.0),
                               get("channel", "correlation", "low"),
                               get("channel", "n_sinusoids", 16))
        band = None
        if ("frontend", "eq_band_low_hz") in v or ("frontend", "eq_band_high_hz") in v:
            band = (get("frontend", "eq_band_low_hz", fe.f_if_min_hz),
                    get("frontend", "eq_band_high_hz", cable.f_max_hz))
        mode = get("link", "mode", ABSTRACTED)
        if mode not in (ABSTRACTED, EXPLICIT):
            raise ValueError(f"link.mode must be {ABSTRACTED!r} or {EXPLICIT!r}")
        link = LinkConfig(
            plan=plan, cable=cable, frontend=fe, bw_hz=get("phy", "bw_hz", 10e6),
            mcs=get("phy", "mcs", 11), channel=channel,
            input_power_dbm_per_bw=get("link", "input_power_dbm_per_bw", -20.0),
            rx_noise_figure_db=get("link", "rx_noise_figure_db", 7.0),
            n_subframes=get("link", "n_subframes", 2000), seed=get("link", "seed", 0), mode=mode,
            eq_design_length_m=get("frontend", "eq_design_length_m", None), eq_band_hz=band,
            cable_grid_step_hz=get("cable", "grid_step_hz", 1e6), mcs_table=table,
        )
        link.numerology  # validates bandwidth
        sweep = SweepSpec(get("sweep", "preset", "custom"), get("sweep", "seeds", (0, 1, 2)),
                          get("sweep", "f_if_hz", (175e6,)), get("sweep", "mcs", tuple(range(18))),
                          get("sweep", "channels", ("static",)))
        for label in sweep.channels:
            channel_from_label(label)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigValueError(str(exc)) from None
    return Experiment(link, sweep, v)


def parse_config(text, origin="<config>", base=None):
    """Parse config text on top of the calibrated defaults (or ``base`` values)."""
    values = dict(calibrated_values() if base is None else base)
    values.update(parse_values(text, origin))
    return build_experiment(values)


def channel_from_label(label):
    """``static`` or ``epa5-<low|medium|high>`` to a :class:`ChannelModel`."""
    label = label.strip().lower()
    if label == "static":
        return ChannelModel("static")
    if label.startswith("epa5-"):
        return ChannelModel("epa5", correlation=label[5:])
    if label == "epa5":
        return ChannelModel("epa5")
    raise ValueError(f"unknown channel label {label!r}")


def with_overrides(experiment, text):
    """Re-parse with extra ``key = value`` lines applied last."""
    values = dict(experiment.values)
    values.update(parse_values(text, "<override>"))
    return build_experiment(values)


def overrides_from_args(pairs):
    """``["phy.mcs=3", ...]`` from the CLI into config text."""
    lines = []
    for p in pairs or ():
        if "=" not in p:
            raise ConfigSyntaxError(f"override {p!r} is not key=value")
        lines.append(p)
    return "\n".join(lines)

