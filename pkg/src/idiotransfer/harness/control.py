"""The sense-classify-score-select-act loop shared by evolution and experiments."""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .. import immune
from ..behaviour import DEFAULT_WEIGHTS, BehaviourRuntime, ScoreWeights, score
from ..genome import BehaviourGene, GeneticSequence
from ..perception import COLLISIONS, Antigen, blob_direction, classify
from ..platforms import PlatformProfile, drive
from ..world import DEFAULT_SENSORS, TICK, SensorModel, WorldState

TIME_LIMIT = 900.0
WINDOW_CAP = 20


@dataclass(frozen=True)
class EpisodeConfig:
    tick: float = TICK
    time_limit: float = TIME_LIMIT
    window_cap: int = WINDOW_CAP
    weights: ScoreWeights = DEFAULT_WEIGHTS
    sensors: SensorModel = DEFAULT_SENSORS


@dataclass
class EpisodeResult:
    time: float
    collisions: int
    failed: bool
    difference_rate: float = 0.0
    seed: int = 0
    contacts: int = 0
    selections: int = 0
    trace: list[tuple] | None = field(default=None, repr=False)
    trace_path: str | None = None
    selection_ticks: list[int] | None = field(default=None, repr=False)

    @property
    def cost(self) -> float:
        return self.time + self.collisions

    def weighted_cost(self, rho: float) -> float:
        return self.time + rho * self.collisions


class ImmuneController:
    """Selects among solution sets with the idiotypic network (or plain argmax)."""

    def __init__(self, repertoire: immune.Repertoire, sequence: GeneticSequence,
                 cfg: immune.ImmuneConfig):
        self.rep = repertoire
        self.seq = sequence
        self.cfg = cfg
        self.history: list[immune.SelectionReport] = []
        self._last: tuple[int, Antigen] | None = None

    def select(self, antigen: Antigen) -> tuple[BehaviourGene, int]:
        k, report = immune.select(self.rep, antigen, self.cfg)
        self.history.append(report)
        self._last = (k, antigen)
        return self.seq.gene(k, antigen.index), k

    def reinforce(self, r: float) -> None:
        if self._last is not None:
            immune.reinforce(self.rep, *self._last, r, self.cfg)

    def difference_rate(self) -> float:
        return immune.difference_rate(self.history) if self.history else 0.0


TRACE_HEADER = ("tick", "x", "y", "theta", "antigen", "selected_set")


def run_episode(world: WorldState, profile: PlatformProfile, controller,
                cfg: EpisodeConfig = EpisodeConfig(), seed: int = 0,
                trace: bool = False) -> EpisodeResult:
    """Run one task until the goal is touched or the time limit expires.

    ``controller`` needs ``select(antigen) -> (gene, tag)`` and
    ``reinforce(r)``. A behaviour runs for one evaluation window: until the
    antigen changes or ``window_cap`` ticks pass; then it is scored and a new
    selection is made. Collisions count every tick whose antigen is a
    collision code; physical contacts are counted separately.
    """
    rng = np.random.default_rng(seed)
    max_ticks = int(round(cfg.time_limit / cfg.tick))
    collisions = contacts = 0
    runtime: BehaviourRuntime | None = None
    tag = None
    win_antigen = None
    win_ticks = 0
    win_contact = False
    win_dist = math.inf
    rows = [] if trace else None
    sel_ticks = []

    if world.update_targets():
        return EpisodeResult(0.0, 0, False, _rate(controller), seed, trace=rows,
                             selection_ticks=sel_ticks)

    for n in range(max_ticks):
        frame = world.sense(profile, cfg.sensors)
        antigen = classify(frame, profile)
        if antigen in COLLISIONS:
            collisions += 1
        if runtime is None or antigen != win_antigen or win_ticks >= cfg.window_cap:
            if runtime is not None:
                now_dist = world.goal_distance()
                progress = win_dist - now_dist if math.isfinite(win_dist) else 0.0
                controller.reinforce(score(win_antigen, antigen, win_contact, progress, cfg.weights))
            gene, new_tag = controller.select(antigen)
            sel_ticks.append(n)
            if runtime is None or gene is not runtime.gene:
                runtime = BehaviourRuntime(gene, rng)
            tag = new_tag
            win_antigen, win_ticks, win_contact = antigen, 0, False
            win_dist = world.goal_distance()
        cmd = runtime.tick(blob_direction(frame))
        world.step(drive(cmd, profile), cfg.tick)
        win_ticks += 1
        if world.contact:
            contacts += 1
            win_contact = True
        if rows is not None:
            rows.append((n, world.x, world.y, world.theta, int(antigen), tag))
        if world.update_targets():
            return EpisodeResult(round((n + 1) * cfg.tick, 9), collisions, False,
                                 _rate(controller), seed, contacts, len(sel_ticks), rows,
                                 selection_ticks=sel_ticks)
    return EpisodeResult(cfg.time_limit, collisions, True, _rate(controller), seed,
                         contacts, len(sel_ticks), rows, selection_ticks=sel_ticks)


def _rate(controller) -> float:
    f = getattr(controller, "difference_rate", None)
    return f() if f is not None else 0.0


def write_trace(path: str | os.PathLike, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for row in rows:
            n, x, y, th, a, k = row
            w.writerow([n, repr(x), repr(y), repr(th), a, k])


SELECTION_HEADER = ("tick", "antigen", "antigenic", "selected", "alpha", "delta", "difference_rate")


def write_selections(path: str | os.PathLike, history, ticks) -> None:
    """One row per selection; alpha and delta are space-separated per set."""
    history = list(history)
    if len(history) != len(ticks):
        raise ValueError("selection history and tick list differ in length")
    diffs = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SELECTION_HEADER)
        for k, (n, r) in enumerate(zip(ticks, history), 1):
            diffs += r.difference
            w.writerow([n, r.antigen, r.antigenic, r.selected, " ".join(map(repr, r.alpha)),
                        " ".join(map(repr, r.delta)), repr(diffs / k)])
