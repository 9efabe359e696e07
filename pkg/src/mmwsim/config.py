"""INI-style configuration files.

Sections map onto the nested parameter objects::

    [scenario]    n_ues, cell_radius, ap_height, slot_duration_us, horizon
    [blockage]    arrival_rate, mean_duration, decay_rate, rise_rate, max_attenuation
    [link]        tx_power, tx_gain, rx_gain, ref_loss, pathloss_exponent,
                  bandwidth, noise_figure, snr_threshold, beamwidth
    [prediction]  window_ms, error_std, detection_threshold
    [scheduler]   policy, ema_weight
    [run]         drops, master_seed
    [sweep]       arrival_rates, mean_durations, windows_ms, policies

Missing keys keep their ``table1`` defaults; unknown sections or keys are
errors.  ``error_std = auto`` selects the error paired with the window.
"""
from __future__ import annotations

import configparser
import dataclasses
from pathlib import Path

from .blockage import BlockageParams
from .channel import LinkBudget
from .engine import ScenarioConfig, ScenarioGrid
from .exceptions import ConfigError, MmwsimError
from .predictor import PredictionParams

__all__ = ["PRESETS", "load_config", "load_grid", "parse_config", "dump_config"]

PRESETS = ("table1",)

_SCENARIO_KEYS = ("n_ues", "cell_radius", "ap_height", "slot_duration_us", "horizon")
_SECTIONS = {
    "scenario": (None, _SCENARIO_KEYS),
    "blockage": ("blockage", tuple(f.name for f in dataclasses.fields(BlockageParams))),
    "link": ("link", tuple(f.name for f in dataclasses.fields(LinkBudget))),
    "prediction": ("prediction", tuple(f.name for f in dataclasses.fields(PredictionParams))),
    "scheduler": (None, ("policy", "ema_weight")),
    "run": (None, ("drops", "master_seed")),
    "sweep": (None, ("arrival_rates", "mean_durations", "windows_ms", "policies")),
}
_INT_KEYS = {"n_ues", "horizon", "drops", "master_seed"}
_STR_KEYS = {"policy"}
_LIST_KEYS = {"arrival_rates", "mean_durations", "windows_ms", "policies"}


def _convert(section, key, raw):
    where = f"[{section}] {key}"
    try:
        if key in _STR_KEYS:
            return raw.strip()
        if key in _LIST_KEYS:
            items = [x.strip() for x in raw.split(",") if x.strip()]
            if not items:
                raise ValueError("empty list")
            return tuple(items) if key == "policies" else tuple(float(x) for x in items)
        if key == "error_std" and raw.strip().lower() in ("auto", ""):
            return None
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from None


def _read(text, source):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}: key outside any section") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{source}: line {lineno}: cannot parse {line.strip()!r}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if parser.defaults():
        raise ConfigError(f"{source}: [DEFAULT] section is not supported")
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        allowed = _SECTIONS[section][1]
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"{source}: unknown key [{section}] {key}")
            values[(section, key)] = _convert(section, key, raw)
    return values


def parse_config(text, source="<config>"):
    """Build ``(ScenarioConfig, ScenarioGrid | None)`` from config text."""
    values = _read(text, source)
    nested = {"blockage": {}, "link": {}, "prediction": {}}
    top = {}
    grid = {}
    for (section, key), value in values.items():
        target = _SECTIONS[section][0]
        if section == "sweep":
            grid[key] = value
        elif target is None:
            top[key] = value
        else:
            nested[target][key] = value
    try:
        parts = {
            "blockage": BlockageParams(**nested["blockage"]),
            "link": LinkBudget(**nested["link"]),
            "prediction": PredictionParams(**nested["prediction"]),
        }
        config = ScenarioConfig(**top, **parts)
    except MmwsimError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    sweep = None
    if grid:
        grid.setdefault("arrival_rates", (config.blockage.arrival_rate,))
        grid.setdefault("mean_durations", (config.blockage.mean_duration,))
        grid.setdefault("windows_ms", (config.prediction.window_ms,))
        try:
            sweep = ScenarioGrid(**grid)
        except MmwsimError as exc:
            raise ConfigError(f"{source}: [sweep] {exc}") from None
    return config, sweep


def _load(path):
    if str(path) in PRESETS:
        return "", str(path)
    path = Path(path)
    try:
        return path.read_text(), str(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def load_config(path):
    """Load a :class:`ScenarioConfig` from ``path`` or a preset name."""
    return parse_config(*_load(path))[0]


def load_grid(path):
    """The ``[sweep]`` grid in ``path``, or ``None`` when absent."""
    return parse_config(*_load(path))[1]


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if value is None:
        return "auto"
    return str(value)


def dump_config(config, grid=None):
    """Serialize ``config`` (and optionally a sweep grid) to INI text."""
    lines = []
    for section, (attr, keys) in _SECTIONS.items():
        if section == "sweep":
            if grid is None:
                continue
            source = grid
        else:
            source = config if attr is None else getattr(config, attr)
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {_fmt(getattr(source, key))}" for key in keys)
        lines.append("")
    return "\n".join(lines)
