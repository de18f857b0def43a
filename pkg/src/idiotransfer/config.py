"""INI run configuration.

Sections mirror the module configs::

    [ga]          GaConfig fields
    [limits]      GeneLimits fields
    [immune]      ImmuneConfig fields
    [episode]     tick, time_limit, window_cap
    [scoring]     ScoreWeights fields
    [sensors]     SensorModel fields (tuples as comma lists, camera_fov in degrees)
    [experiment]  runs, worlds, master_seed, profile, workers, output_dir
    [profile.X]   extra or overriding platform profiles

Unknown keys are errors. ``IDIOTRANSFER_OUT`` overrides the output directory.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import os
from dataclasses import dataclass, field

from .behaviour import ScoreWeights
from .evolution import GaConfig
from .genome import GeneLimits
from .harness.control import EpisodeConfig
from .harness.experiment import ExperimentConfig
from .immune import ImmuneConfig
from .platforms import BUILTIN_PROFILES, PlatformProfile, profile_from_section
from .world import SensorModel

OUTPUT_ENV = "IDIOTRANSFER_OUT"


class ConfigError(ValueError):
    pass


def _coerce(text: str, default, name: str):
    text = text.strip()
    try:
        if isinstance(default, bool):
            return configparser.ConfigParser.BOOLEAN_STATES[text.lower()]
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            parts = [p.strip() for p in text.split(",") if p.strip()]
            if default and all(isinstance(v, (int, float)) for v in default):
                return tuple(float(p) for p in parts)
            return tuple(parts)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad value {text!r} for {name}") from exc
    return text


def _apply(obj, section, skip=(), convert=None):
    """Replace the dataclass fields of ``obj`` named in ``section``."""
    if section is None:
        return obj
    names = {f.name for f in dataclasses.fields(obj)} - set(skip)
    changes = {}
    for key, text in section.items():
        if key not in names:
            raise ConfigError(f"unknown key {key!r} in [{section.name}]")
        value = _coerce(text, getattr(obj, key), f"{section.name}.{key}")
        if convert and key in convert:
            value = convert[key](value)
        changes[key] = value
    try:
        return dataclasses.replace(obj, **changes)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}]: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    ga: GaConfig = GaConfig()
    immune: ImmuneConfig = ImmuneConfig()
    episode: EpisodeConfig = EpisodeConfig()
    experiment: ExperimentConfig = ExperimentConfig()
    profiles: dict[str, PlatformProfile] = field(default_factory=lambda: dict(BUILTIN_PROFILES))
    output_dir: str = "."

    def profile(self, name: str) -> PlatformProfile:
        try:
            return self.profiles[name]
        except KeyError:
            raise ConfigError(f"unknown profile {name!r}; known: {sorted(self.profiles)}") from None


_SECTIONS = {"ga", "limits", "immune", "episode", "scoring", "sensors", "experiment"}


def parse(cp: configparser.ConfigParser, env=None) -> RunConfig:
    env = os.environ if env is None else env
    for sec in cp.sections():
        if sec not in _SECTIONS and not sec.startswith("profile."):
            raise ConfigError(f"unknown section [{sec}]")
    get = lambda name: cp[name] if cp.has_section(name) else None

    profiles = dict(BUILTIN_PROFILES)
    for sec in cp.sections():
        if sec.startswith("profile."):
            name = sec.split(".", 1)[1]
            try:
                profiles[name] = profile_from_section(name, cp[sec])
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc

    limits = _apply(GeneLimits(), get("limits"))
    ga = _apply(GaConfig(limits=limits), get("ga"), skip=("limits",))
    imm = _apply(ImmuneConfig(), get("immune"))
    sensors = _apply(SensorModel(), get("sensors"), convert={"camera_fov": math.radians})
    weights = _apply(ScoreWeights(), get("scoring"))
    episode = _apply(EpisodeConfig(weights=weights, sensors=sensors), get("episode"),
                     skip=("weights", "sensors"))

    exp_sec = dict(get("experiment") or {})
    out = exp_sec.pop("output_dir", ".")
    prof_name = exp_sec.pop("profile", "pioneer_sim")
    if prof_name not in profiles:
        raise ConfigError(f"unknown profile {prof_name!r} in [experiment]")
    base = ExperimentConfig(immune=imm, episode=episode, profile=profiles[prof_name])
    changes = {}
    for key, text in exp_sec.items():
        if key not in ("runs", "worlds", "master_seed", "workers"):
            raise ConfigError(f"unknown key {key!r} in [experiment]")
        changes[key] = _coerce(text, getattr(base, key), f"experiment.{key}")
    try:
        exp = dataclasses.replace(base, **changes)
    except ValueError as exc:
        raise ConfigError(f"[experiment]: {exc}") from exc

    out = env.get(OUTPUT_ENV) or out
    return RunConfig(ga, imm, episode, exp, profiles, out)


def load(path: str | os.PathLike | None = None, env=None) -> RunConfig:
    cp = configparser.ConfigParser()
    if path is not None and not cp.read(path):
        raise ConfigError(f"cannot read {path}")
    return parse(cp, env)


def loads(text: str, env=None) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    return parse(cp, env)
