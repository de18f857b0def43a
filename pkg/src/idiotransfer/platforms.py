"""Robot platform profiles and wheel-speed to body-velocity conversion.

Wheel speeds are expressed in epuck speed units per second; one unit is
``PSI`` radians of wheel rotation.
"""
from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field
from typing import Mapping

PSI = 0.00683

INFRARED = "infrared_nonlinear"
SONAR = "sonar_linear"
WHEEL_SPEEDS = "wheel_speeds"
VELOCITY_YAW = "velocity_yaw"
SIDES = ("right", "rear", "left")


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class WheelCommand:
    left: float
    right: float


@dataclass(frozen=True)
class BodyVelocity:
    v: float
    omega: float


@dataclass(frozen=True)
class PlatformProfile:
    name: str
    wheel_radius: float
    axle_length: float
    body_radius: float
    sensor_modality: str
    sensor_angles: tuple[float, ...]
    orientation_map: tuple[str, ...]
    obstacle_threshold: float
    collision_threshold: float
    sensor_range: tuple[float, float]
    zeta: float = 1.0
    steering_interface: str = WHEEL_SPEEDS
    max_wheel_speed: float = 1000.0
    camera_range: float = 10.0
    sensor_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sensor_count", len(self.sensor_angles))
        if len(self.orientation_map) != self.sensor_count:
            raise ProfileError(f"{self.name}: orientation map covers {len(self.orientation_map)}"
                               f" sensors, profile has {self.sensor_count}")
        bad = set(self.orientation_map) - set(SIDES)
        if bad:
            raise ProfileError(f"{self.name}: unknown sides {sorted(bad)}")
        if self.sensor_modality == INFRARED:
            if not self.collision_threshold > self.obstacle_threshold:
                raise ProfileError(f"{self.name}: infrared needs collision > obstacle threshold")
        elif self.sensor_modality == SONAR:
            if not self.collision_threshold < self.obstacle_threshold:
                raise ProfileError(f"{self.name}: sonar needs collision < obstacle threshold")
        else:
            raise ProfileError(f"{self.name}: unknown sensor modality {self.sensor_modality!r}")
        if self.steering_interface not in (WHEEL_SPEEDS, VELOCITY_YAW):
            raise ProfileError(f"{self.name}: unknown steering interface {self.steering_interface!r}")

    @property
    def nearer_is_higher(self) -> bool:
        return self.sensor_modality == INFRARED


def _sides(groups: Mapping[str, list[int]], count: int) -> tuple[str, ...]:
    out = [None] * count
    for side, idx in groups.items():
        for i in idx:
            out[i] = side
    return tuple(out)


def _deg(values) -> tuple[float, ...]:
    return tuple(math.radians(v) for v in values)


# e-puck ring: ps0..ps7, positive bearings to the left
EPUCK = PlatformProfile(
    name="epuck",
    wheel_radius=0.0205,
    axle_length=0.052,
    body_radius=0.035,
    sensor_modality=INFRARED,
    sensor_angles=_deg([-17, -49, -90, -150, 150, 90, 49, 17]),
    orientation_map=_sides({"right": [0, 1, 2], "rear": [3, 4], "left": [5, 6, 7]}, 8),
    obstacle_threshold=250,
    collision_threshold=2400,
    sensor_range=(0.0, 0.06),
    steering_interface=WHEEL_SPEEDS,
    camera_range=0.65,
)

_PIONEER_SONAR = _deg([90, 50, 30, 10, -10, -30, -50, -90,
                       -90, -130, -150, -170, 170, 150, 130, 90])
_PIONEER_SIDES = _sides({"left": [0, 1, 2, 3, 14, 15], "right": [4, 5, 6, 7, 8, 9],
                         "rear": [10, 11, 12, 13]}, 16)

PIONEER_SIM = PlatformProfile(
    name="pioneer_sim",
    wheel_radius=0.095,
    axle_length=0.33,
    body_radius=0.29,
    sensor_modality=SONAR,
    sensor_angles=_PIONEER_SONAR,
    orientation_map=_PIONEER_SIDES,
    obstacle_threshold=0.15,
    collision_threshold=0.04,
    sensor_range=(0.0, 5.0),
    zeta=1.575,
    steering_interface=VELOCITY_YAW,
    camera_range=3.0,
)

# physical-robot values, kept for reference; nothing exercises this profile
PIONEER_REAL = PlatformProfile(
    name="pioneer_real",
    wheel_radius=0.095,
    axle_length=0.33,
    body_radius=0.29,
    sensor_modality=SONAR,
    sensor_angles=_PIONEER_SONAR,
    orientation_map=_PIONEER_SIDES,
    obstacle_threshold=0.30,
    collision_threshold=0.04,
    sensor_range=(0.15, 5.0),
    zeta=0.750,
    steering_interface=VELOCITY_YAW,
    camera_range=3.0,
)

BUILTIN_PROFILES = {p.name: p for p in (EPUCK, PIONEER_SIM, PIONEER_REAL)}


def get_profile(name: str) -> PlatformProfile:
    try:
        return BUILTIN_PROFILES[name]
    except KeyError:
        raise ProfileError(f"unknown profile {name!r}; built-ins: {sorted(BUILTIN_PROFILES)}") from None


def to_body_velocity(cmd: WheelCommand, pioneer: PlatformProfile,
                     epuck: PlatformProfile = EPUCK) -> BodyVelocity:
    """Convert epuck wheel speeds to a linear/yaw command for a larger platform.

    Linear speed uses the target wheel radius; yaw reproduces the epuck's turn
    per unit wheel-speed difference, scaled by the target profile's ``zeta``.
    """
    v = PSI * pioneer.wheel_radius * (cmd.right + cmd.left) / 2.0
    omega = pioneer.zeta * PSI * epuck.wheel_radius * (cmd.right - cmd.left) / epuck.axle_length
    return BodyVelocity(v, omega)


def epuck_direct_drive(cmd: WheelCommand, epuck: PlatformProfile = EPUCK) -> BodyVelocity:
    v = PSI * epuck.wheel_radius * (cmd.right + cmd.left) / 2.0
    omega = PSI * epuck.wheel_radius * (cmd.right - cmd.left) / epuck.axle_length
    return BodyVelocity(v, omega)


def drive(cmd: WheelCommand, profile: PlatformProfile) -> BodyVelocity:
    """Body velocity for ``profile`` through its own steering interface."""
    if profile.steering_interface == VELOCITY_YAW:
        return to_body_velocity(cmd, profile, EPUCK)
    return epuck_direct_drive(cmd, profile)


# ---------------------------------------------------------------- config files

def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def profile_from_section(name: str, sec: Mapping[str, str]) -> PlatformProfile:
    """Build a profile from one INI section.

    Keys mirror the platform table in snake_case, lengths in metres, angles in
    degrees; ``right_sensors``/``rear_sensors``/``left_sensors`` list indices.
    """
    try:
        angles = _floats(sec["sensor_angles_deg"])
        groups = {side: [int(v) for v in _floats(sec.get(f"{side}_sensors", ""))]
                  for side in SIDES}
        lo, hi = _floats(sec["sensor_range"])
        return PlatformProfile(
            name=name,
            wheel_radius=float(sec["wheel_radius"]),
            axle_length=float(sec["axle_length"]),
            body_radius=float(sec["body_radius"]),
            sensor_modality=sec["sensor_modality"].strip(),
            sensor_angles=_deg(angles),
            orientation_map=_sides(groups, len(angles)),
            obstacle_threshold=float(sec["obstacle_threshold"]),
            collision_threshold=float(sec["collision_threshold"]),
            sensor_range=(lo, hi),
            zeta=float(sec.get("zeta", 1.0)),
            steering_interface=sec.get("steering_interface", WHEEL_SPEEDS).strip(),
            max_wheel_speed=float(sec.get("max_wheel_speed", 1000.0)),
            camera_range=float(sec.get("camera_range", 10.0)),
        )
    except KeyError as exc:
        raise ProfileError(f"profile {name}: missing key {exc.args[0]}") from None
    except TypeError:
        raise ProfileError(f"profile {name}: orientation map leaves a sensor unassigned") from None


def profile_to_section(p: PlatformProfile) -> dict[str, str]:
    fmt = lambda xs: ", ".join(f"{x:g}" for x in xs)
    out = {
        "wheel_radius": f"{p.wheel_radius:g}",
        "axle_length": f"{p.axle_length:g}",
        "body_radius": f"{p.body_radius:g}",
        "sensor_modality": p.sensor_modality,
        "sensor_angles_deg": fmt(round(math.degrees(a), 6) for a in p.sensor_angles),
        "obstacle_threshold": f"{p.obstacle_threshold:g}",
        "collision_threshold": f"{p.collision_threshold:g}",
        "sensor_range": fmt(p.sensor_range),
        "zeta": f"{p.zeta:g}",
        "steering_interface": p.steering_interface,
        "max_wheel_speed": f"{p.max_wheel_speed:g}",
        "camera_range": f"{p.camera_range:g}",
    }
    for side in SIDES:
        out[f"{side}_sensors"] = ", ".join(str(i) for i, s in enumerate(p.orientation_map) if s == side)
    return out


def load_profiles(path: str | os.PathLike) -> dict[str, PlatformProfile]:
    """Read every ``[profile.<name>]`` section of an INI file."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ProfileError(f"cannot read {path}")
    out = {}
    for sec in cp.sections():
        if sec.startswith("profile."):
            name = sec.split(".", 1)[1]
            out[name] = profile_from_section(name, cp[sec])
    return out
