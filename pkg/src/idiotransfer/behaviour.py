"""Executing behaviour genes as wheel commands, and scoring them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .genome import (LEFT, RIGHT, TRACK, TURN_BACKWARDS, TURN_FORWARDS,
                     TURN_ON_SPOT, WANDER_BOTH, WANDER_ONE, BehaviourGene)
from .perception import Antigen
from .platforms import WheelCommand

DWELL_TICKS = 5

STRAIGHT, TURN_LEFT, TURN_RIGHT = "straight", "turn_left", "turn_right"


def _reduced(speed: float, percent: float) -> float:
    return speed * (1.0 - percent / 100.0)


def _turn(s: float, side: int, percent: float) -> WheelCommand:
    # slowing the left wheel turns the robot left
    if side == LEFT:
        return WheelCommand(_reduced(s, percent), s)
    return WheelCommand(s, _reduced(s, percent))


class BehaviourRuntime:
    """One executing behaviour; wander modes persist for a dwell window."""

    def __init__(self, gene: BehaviourGene, rng: np.random.Generator, dwell: int = DWELL_TICKS):
        self.gene = gene
        self.rng = rng
        self.dwell = dwell
        self.mode = STRAIGHT
        self.dwell_remaining = 0

    def _sample_mode(self) -> str:
        g = self.gene
        if self.rng.random() * 100.0 >= g.turn_frequency:
            return STRAIGHT
        if g.behaviour_type == WANDER_ONE:
            return TURN_LEFT if g.direction == LEFT else TURN_RIGHT
        if self.rng.random() * 100.0 < g.right_turn_frequency:
            return TURN_RIGHT
        return TURN_LEFT

    def tick(self, blob_direction: str = "none") -> WheelCommand:
        g = self.gene
        s = float(g.speed)
        t = g.behaviour_type
        if t in (WANDER_ONE, WANDER_BOTH):
            if self.dwell_remaining == 0:
                self.mode = self._sample_mode()
                self.dwell_remaining = self.dwell
            self.dwell_remaining -= 1
            if self.mode == STRAIGHT:
                return WheelCommand(s, s)
            if t == WANDER_ONE:
                return _turn(s, g.direction, g.turn_angle)
            if self.mode == TURN_RIGHT:
                return _turn(s, RIGHT, g.right_turn_angle)
            return _turn(s, LEFT, g.turn_angle)
        if t == TURN_FORWARDS:
            return _turn(s, g.direction, g.turn_angle)
        if t == TURN_BACKWARDS:
            c = _turn(s, g.direction, g.turn_angle)
            return WheelCommand(-c.left, -c.right)
        if t == TURN_ON_SPOT:
            w = s * g.turn_angle / 100.0
            return WheelCommand(w, -w) if g.direction == RIGHT else WheelCommand(-w, w)
        if t == TRACK:
            if blob_direction == "left":
                return _turn(s, LEFT, g.turn_angle)
            if blob_direction == "right":
                return _turn(s, RIGHT, g.turn_angle)
            return WheelCommand(s, s)
        raise ValueError(f"unknown behaviour type {t}")


def tick(rt: BehaviourRuntime, blob_direction: str = "none") -> WheelCommand:
    return rt.tick(blob_direction)


@dataclass(frozen=True)
class ScoreWeights:
    neutral: float = 0.5
    de_escalate: float = 0.2
    escalate: float = 0.2
    target: float = 0.2
    contact: float = 0.3


DEFAULT_WEIGHTS = ScoreWeights()


def score(prev: Antigen, now: Antigen, contact: bool = False, progress: float = 0.0,
          weights: ScoreWeights = DEFAULT_WEIGHTS) -> float:
    """Reinforcement for the behaviour that ran between two antigen readings."""
    prev, now = Antigen(prev), Antigen(now)
    r = weights.neutral
    if now.danger < prev.danger:
        r += weights.de_escalate
    elif now.danger > prev.danger:
        r -= weights.escalate
    if now == Antigen.TARGET_SEEN and (prev != Antigen.TARGET_SEEN or progress > 0):
        r += weights.target
    if contact:
        r -= weights.contact
    return min(1.0, max(0.0, r))
