"""Paired idiotypic vs RL-only batches and their comparison report."""
from __future__ import annotations

import csv
import io
import os
from collections.abc import Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import immune
from ..genome import GeneticSequence
from ..platforms import PIONEER_SIM, PlatformProfile
from ..world import BLOCK, MAZE, generate_world, world_scale
from .control import EpisodeConfig, EpisodeResult, ImmuneController, run_episode
from .stats import Summary, a_test, mann_whitney, summarize

IDIOTYPIC, RL_ONLY = "idiotypic", "rl_only"
ARMS = (IDIOTYPIC, RL_ONLY)

EPISODE_FIELDS = ("world", "pair", "arm", "world_seed", "seed", "time", "collisions",
                  "failed", "contacts", "difference_rate")

ORIENTATION = ("A-values give the probability that an RL-only run takes longer (or collides "
               "more) than an idiotypic run; values above 0.5 favour idiotypic selection.")


@dataclass
class EpisodeRecord:
    world: str
    pair: int
    arm: str
    world_seed: int
    seed: int
    result: EpisodeResult

    def row(self) -> list:
        r = self.result
        return [self.world, self.pair, self.arm, self.world_seed, self.seed, repr(float(r.time)),
                r.collisions, int(r.failed), r.contacts, repr(float(r.difference_rate))]


@dataclass(frozen=True)
class WorldComparison:
    world: str
    idiotypic: Summary
    rl_only: Summary
    p_time: float
    p_collisions: float
    a_time: float
    a_collisions: float
    mean_difference_rate: float
    degenerate: bool


@dataclass
class ComparisonReport:
    worlds: list[WorldComparison]
    records: list[EpisodeRecord] = field(default_factory=list, repr=False)

    def by_world(self, name: str) -> WorldComparison:
        return next(w for w in self.worlds if w.world == name)

    def table(self) -> str:
        head = (f"{'world':<14}{'arm':<11}{'t med':>8}{'t IQR':>8}{'c med':>8}{'c IQR':>8}"
                f"{'F%':>6}{'p(t)':>8}{'p(c)':>8}{'A(t)':>7}{'A(c)':>7}{'E':>6}")
        lines = [f"# {ORIENTATION}", head]
        for w in self.worlds:
            for arm, s in ((IDIOTYPIC, w.idiotypic), (RL_ONLY, w.rl_only)):
                stats = (f"{w.p_time:8.3f}{w.p_collisions:8.3f}{w.a_time:7.2f}{w.a_collisions:7.2f}"
                         f"{w.mean_difference_rate:6.2f}") if arm == IDIOTYPIC else ""
                lines.append(f"{w.world:<14}{arm:<11}{s.time_median:8.1f}{s.time_iqr:8.1f}"
                             f"{s.collisions_median:8.1f}{s.collisions_iqr:8.1f}"
                             f"{100 * s.fail_rate:6.0f}{stats}")
            if w.degenerate:
                lines.append(f"{'':<14}(fewer than 5 runs per arm: statistics are indicative only)")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["world", "arm", "runs", "time_median", "time_iqr", "collisions_median",
                    "collisions_iqr", "fail_rate", "p_time", "p_collisions", "a_time",
                    "a_collisions", "mean_difference_rate"])
        for c in self.worlds:
            for arm, s in ((IDIOTYPIC, c.idiotypic), (RL_ONLY, c.rl_only)):
                w.writerow([c.world, arm, s.runs, *(repr(float(v)) for v in (
                    s.time_median, s.time_iqr, s.collisions_median, s.collisions_iqr, s.fail_rate,
                    c.p_time, c.p_collisions, c.a_time, c.a_collisions, c.mean_difference_rate))])
        return buf.getvalue()


def compare(world: str, idio: list[EpisodeResult], rl: list[EpisodeResult]) -> WorldComparison:
    ti, tr = [r.time for r in idio], [r.time for r in rl]
    ci, cr = [r.collisions for r in idio], [r.collisions for r in rl]
    return WorldComparison(
        world=world,
        idiotypic=summarize(idio),
        rl_only=summarize(rl),
        p_time=mann_whitney(ti, tr),
        p_collisions=mann_whitney(ci, cr),
        a_time=a_test(tr, ti),
        a_collisions=a_test(cr, ci),
        mean_difference_rate=float(np.mean([r.difference_rate for r in idio])),
        degenerate=min(len(idio), len(rl)) < 5,
    )


def report_from_records(records: list[EpisodeRecord]) -> ComparisonReport:
    names = list(dict.fromkeys(r.world for r in records))
    out = []
    for name in names:
        idio = [r.result for r in records if r.world == name and r.arm == IDIOTYPIC]
        rl = [r.result for r in records if r.world == name and r.arm == RL_ONLY]
        out.append(compare(name, idio, rl))
    return ComparisonReport(out, records)


def pair_seeds(master_seed: int, world_index: int, pair: int) -> tuple[int, int]:
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFF, 7, world_index, pair])
    world_seed, seed = ss.generate_state(2, dtype=np.uint32)
    return int(world_seed), int(seed)


@dataclass(frozen=True)
class ExperimentConfig:
    runs: int = 30
    worlds: tuple[str, ...] = (MAZE, BLOCK)
    master_seed: int = 0
    immune: immune.ImmuneConfig = immune.ImmuneConfig()
    episode: EpisodeConfig = EpisodeConfig()
    profile: PlatformProfile = PIONEER_SIM
    workers: int = 1

    def __post_init__(self):
        if self.runs < 2:
            raise ValueError("need at least two runs per arm")


def run_pair(seq: GeneticSequence, cfg: ExperimentConfig, world_index: int, pair: int,
             arms=ARMS) -> list[EpisodeRecord]:
    """Both arms on byte-identical copies of one freshly generated world."""
    kind = cfg.worlds[world_index]
    world_seed, seed = pair_seeds(cfg.master_seed, world_index, pair)
    world = generate_world(kind, world_seed, world_scale(cfg.profile), cfg.profile.body_radius)
    out = []
    base = immune.build_repertoire(seq, cfg.immune)
    for arm in arms:
        icfg = cfg.immune.with_(idiotypic=(arm == IDIOTYPIC) and cfg.immune.idiotypic)
        ctl = ImmuneController(base.copy(), seq, icfg)
        res = run_episode(world.copy(), cfg.profile, ctl, cfg.episode, seed)
        out.append(EpisodeRecord(kind, pair, arm, world_seed, seed, res))
    return out


def _pair_job(args):
    return run_pair(*args)


def run_experiment(seq, cfg: ExperimentConfig = ExperimentConfig()) -> ComparisonReport:
    """``seq`` is one sequence for every world or a mapping from world kind to sequence."""
    seqs = seq if isinstance(seq, Mapping) else {kind: seq for kind in cfg.worlds}
    for kind in cfg.worlds:
        if kind not in seqs:
            raise ValueError(f"no sequence for world {kind}")
        if seqs[kind].costs is None:
            raise ValueError("sequence has no per-set costs; run calibrate_costs first")
    jobs = [(seqs[kind], cfg, w, p) for w, kind in enumerate(cfg.worlds) for p in range(cfg.runs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            chunks = list(ex.map(_pair_job, jobs))
    else:
        chunks = [_pair_job(j) for j in jobs]
    return report_from_records([r for chunk in chunks for r in chunk])


def calibrate_costs(seq: GeneticSequence, profile: PlatformProfile, kind: str = MAZE,
                    seed: int = 0, episode: EpisodeConfig = EpisodeConfig()) -> list[tuple[float, int]]:
    """Measure (time, collisions) for each solution set with one RL-only episode."""
    world = generate_world(kind, seed, world_scale(profile), profile.body_radius)
    costs = []
    cfg = immune.ImmuneConfig(idiotypic=False)
    for k in range(seq.n):
        single = GeneticSequence([seq.solution_sets[k]])
        rep = immune.from_matrix(np.ones((1, 8)), cfg, single)
        res = run_episode(world.copy(), profile, ImmuneController(rep, single, cfg), episode, seed)
        costs.append((res.time, res.collisions))
    return costs


# ---------------------------------------------------------------- CSV I/O

def write_episodes(path: str | os.PathLike, records: list[EpisodeRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EPISODE_FIELDS)
        for r in records:
            w.writerow(r.row())


def read_episodes(path: str | os.PathLike) -> list[EpisodeRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        res = EpisodeResult(float(r["time"]), int(r["collisions"]), bool(int(r["failed"])),
                            float(r["difference_rate"]), int(r["seed"]), int(r["contacts"]))
        out.append(EpisodeRecord(r["world"], int(r["pair"]), r["arm"], int(r["world_seed"]),
                                 int(r["seed"]), res))
    return out
