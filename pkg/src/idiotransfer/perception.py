"""Sensor frames to antigen codes."""
from __future__ import annotations

from enum import IntEnum

from .platforms import PlatformProfile
from .world import SensorFrame


class Antigen(IntEnum):
    TARGET_UNSEEN = 1
    TARGET_SEEN = 2
    OBSTACLE_RIGHT = 3
    OBSTACLE_REAR = 4
    OBSTACLE_LEFT = 5
    COLLISION_RIGHT = 6
    COLLISION_REAR = 7
    COLLISION_LEFT = 8

    @property
    def index(self) -> int:
        """0-based index used in genetic sequences and matrices."""
        return self.value - 1

    @property
    def danger(self) -> int:
        """0 clear, 1 obstacle, 2 collision."""
        return 0 if self <= 2 else 1 if self <= 5 else 2


COLLISIONS = frozenset({Antigen.COLLISION_RIGHT, Antigen.COLLISION_REAR, Antigen.COLLISION_LEFT})
_SIDE_OFFSET = {"right": 0, "rear": 1, "left": 2}


def salient_sensor(readings, nearer_is_higher: bool) -> int:
    # strict comparison keeps the lowest index on ties
    best = 0
    for i in range(1, len(readings)):
        if (readings[i] > readings[best]) if nearer_is_higher else (readings[i] < readings[best]):
            best = i
    return best


def classify(frame: SensorFrame, profile: PlatformProfile) -> Antigen:
    """Most severe situation wins: collision, then obstacle, then target seen."""
    readings = frame.readings
    k = salient_sensor(readings, profile.nearer_is_higher)
    r = readings[k]
    if profile.nearer_is_higher:
        collision, obstacle = r >= profile.collision_threshold, r >= profile.obstacle_threshold
    else:
        collision, obstacle = r <= profile.collision_threshold, r <= profile.obstacle_threshold
    if collision or obstacle:
        base = Antigen.COLLISION_RIGHT if collision else Antigen.OBSTACLE_RIGHT
        return Antigen(base + _SIDE_OFFSET[profile.orientation_map[k]])
    return Antigen.TARGET_SEEN if frame.blob is not None else Antigen.TARGET_UNSEEN


def blob_direction(frame: SensorFrame) -> str:
    return frame.blob.direction if frame.blob is not None else "none"
