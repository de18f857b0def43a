"""RL-assisted integer-coded GA that evolves one behaviour per antigen.

Each of ``n`` populations evolves in isolation on its own generated world;
the fittest robot of every population becomes one solution set of the
output genetic sequence.
"""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .genome import (DEFAULT_LIMITS, N_ANTIGENS, BehaviourGene,
                     GeneLimits, GeneticSequence, random_gene)
from .harness.control import EpisodeConfig, EpisodeResult, run_episode
from .immune import relative_fitness
from .perception import Antigen
from .platforms import EPUCK, PlatformProfile
from .world import MAZE, WorldState, generate_world, world_scale

log = logging.getLogger(__name__)

NUMERIC = ("speed", "turn_frequency", "turn_angle", "right_turn_frequency", "right_turn_angle")


@dataclass(frozen=True)
class GaConfig:
    population: int = 10
    populations: int = 5
    replacement_rate: float = 0.05
    mutation_rate: float = 0.05
    rho: float = 1.0
    max_generations: int = 50
    convergence_window: int = 10
    convergence_tol: float = 0.01
    elitism: int = 1
    low_score: float = 0.2
    low_score_episodes: int = 3
    trials: int = 3
    limits: GeneLimits = DEFAULT_LIMITS
    workers: int = 1

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population needs at least two robots")
        for name in ("replacement_rate", "mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.populations < 1 or self.max_generations < 1 or self.trials < 1:
            raise ValueError("populations, max_generations and trials must be positive")


@dataclass
class Individual:
    genes: list[BehaviourGene]
    population: int = 0
    streak: list[int] = field(default_factory=lambda: [0] * N_ANTIGENS)
    fitness: float = 0.0
    result: EpisodeResult | None = None

    def cost(self, rho: float) -> float:
        return self.result.weighted_cost(rho)


class GeneController:
    """One robot, one gene per antigen; accumulates reinforcement per gene."""

    def __init__(self, genes):
        self.genes = list(genes)
        self.sums = [0.0] * N_ANTIGENS
        self.counts = [0] * N_ANTIGENS
        self._last = None

    def select(self, antigen: Antigen):
        self._last = antigen.index
        return self.genes[antigen.index], antigen.index

    def reinforce(self, r: float) -> None:
        if self._last is not None:
            self.sums[self._last] += r
            self.counts[self._last] += 1

    def mean_scores(self) -> list[float | None]:
        return [s / c if c else None for s, c in zip(self.sums, self.counts)]


def random_individual(rng: np.random.Generator, population: int = 0,
                      limits: GeneLimits = DEFAULT_LIMITS) -> Individual:
    return Individual([random_gene(rng, j, limits) for j in range(N_ANTIGENS)], population)


# ---------------------------------------------------------------- evaluation

def run_individual(ind: Individual, worlds, profile: PlatformProfile, seed: int,
                   episode: EpisodeConfig = EpisodeConfig(), cfg: GaConfig = GaConfig()) -> Individual:
    """Run one episode per world, store the mean result and write back per-gene scores."""
    if isinstance(worlds, WorldState):
        worlds = [worlds]
    ctl = GeneController(ind.genes)
    results = [run_episode(w.copy(), profile, ctl, episode, seed + k) for k, w in enumerate(worlds)]
    ind.result = EpisodeResult(float(np.mean([r.time for r in results])),
                               float(np.mean([r.collisions for r in results])),
                               all(r.failed for r in results), seed=seed,
                               contacts=sum(r.contacts for r in results),
                               selections=sum(r.selections for r in results))
    genes, streak = [], []
    for g, mean, s in zip(ind.genes, ctl.mean_scores(), ind.streak):
        if mean is None:
            genes.append(g.with_(score=50))
            streak.append(0)
            continue
        genes.append(g.with_(score=int(round(100 * mean))))
        streak.append(s + 1 if mean < cfg.low_score else 0)
    ind.genes, ind.streak = genes, streak
    return ind


def assign_fitness(pop: list[Individual], rho: float) -> list[Individual]:
    mu = relative_fitness([i.result.time for i in pop], [i.result.collisions for i in pop], rho)
    for ind, m in zip(pop, mu):
        ind.fitness = float(m)
    return pop


def evaluate(pop: list[Individual], worlds, profile: PlatformProfile, seeds,
             episode: EpisodeConfig = EpisodeConfig(), cfg: GaConfig = GaConfig()) -> list[Individual]:
    """Give every robot without a result one episode, then relative fitness."""
    for ind, s in zip(pop, seeds):
        if ind.result is None:
            run_individual(ind, worlds, profile, int(s), episode, cfg)
    return assign_fitness(pop, cfg.rho)


# ---------------------------------------------------------------- operators

def roulette(weights, rng: np.random.Generator, u: float | None = None) -> int:
    """Index drawn proportionally to ``weights`` (``u`` in [0, 1) forces the draw)."""
    w = np.asarray(weights, dtype=float)
    cum = np.cumsum(w)
    if u is None:
        u = rng.random()
    k = int(np.searchsorted(cum, u * cum[-1], side="right"))
    return min(k, len(w) - 1)


def select_parents(pop: list[Individual], rng: np.random.Generator) -> tuple[Individual, Individual]:
    if len(pop) < 2:
        raise ValueError("need at least two individuals to pick two parents")
    mu = np.array([i.fitness for i in pop])
    first = roulette(mu, rng)
    rest = [k for k in range(len(pop)) if k != first]
    second = rest[roulette(mu[rest], rng)]
    return pop[first], pop[second]


def mutate_attribute(gene: BehaviourGene, rng: np.random.Generator,
                     limits: GeneLimits = DEFAULT_LIMITS, name: str | None = None) -> BehaviourGene:
    """Raise or lower one numeric attribute by 20-50% of its value."""
    if name is None:
        name = NUMERIC[int(rng.integers(len(NUMERIC)))]
    value = getattr(gene, name)
    frac = rng.uniform(0.2, 0.5) * (1 if rng.random() < 0.5 else -1)
    lo, hi = limits.bounds(name)
    new = int(min(hi, max(lo, math.floor(value * (1 + frac) + 0.5))))
    return gene.with_(**{name: new})


def _average(a: int, b: int) -> int:
    return int(math.floor((a + b) / 2 + 0.5))


def cross_genes(a: BehaviourGene, b: BehaviourGene, rng: np.random.Generator,
                mode: int | None = None) -> BehaviourGene:
    """Combine two same-type genes: 0 average, 1 random pick, 2 fixed pattern."""
    if mode is None:
        mode = int(rng.integers(3))
    values = {}
    if mode == 0:
        for name in NUMERIC:
            values[name] = _average(getattr(a, name), getattr(b, name))
        values["direction"] = a.direction if rng.random() < 0.5 else b.direction
    elif mode == 1:
        for name in NUMERIC + ("direction",):
            values[name] = getattr(a if rng.random() < 0.5 else b, name)
    else:
        first, second = (a, b) if rng.random() < 0.5 else (b, a)
        for name in ("speed", "turn_angle", "right_turn_frequency"):
            values[name] = getattr(first, name)
        for name in ("turn_frequency", "direction", "right_turn_angle"):
            values[name] = getattr(second, name)
    return a.with_(score=0, **values)


def crossover(a: Individual, b: Individual, rng: np.random.Generator,
              cfg: GaConfig = GaConfig()) -> Individual:
    genes, streak = [], []
    for j in range(N_ANTIGENS):
        ga, gb = a.genes[j], b.genes[j]
        if rng.random() < cfg.replacement_rate:
            genes.append(random_gene(rng, j, cfg.limits))
            streak.append(0)
            continue
        if ga.behaviour_type != gb.behaviour_type:
            pick_a = rng.random() < 0.5
            child = (ga if pick_a else gb).with_(score=0)
            s = (a if pick_a else b).streak[j]
        else:
            child = cross_genes(ga, gb, rng)
            s = 0
        if rng.random() < cfg.mutation_rate:
            child = mutate_attribute(child, rng, cfg.limits)
            s = 0
        genes.append(child)
        streak.append(s)
    return Individual(genes, a.population, streak)


def rl_replace(ind: Individual, rng: np.random.Generator, cfg: GaConfig) -> Individual:
    """Swap out genes whose score stayed low for several episodes running."""
    for j, s in enumerate(ind.streak):
        if s >= cfg.low_score_episodes:
            ind.genes[j] = random_gene(rng, j, cfg.limits)
            ind.streak[j] = 0
            ind.result = None
    return ind


# ---------------------------------------------------------------- driver

@dataclass
class PopulationRun:
    best: Individual
    history: list[tuple[int, float, float]]  # generation, best cost, mean cost
    population: int
    world_seeds: tuple[int, ...]


def _seeds(master: int, *path: int, count: int) -> np.ndarray:
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFF, *path])
    return ss.generate_state(count, dtype=np.uint32)


def evolve_population(cfg: GaConfig, kind: str, master_seed: int, index: int,
                      profile: PlatformProfile = EPUCK,
                      episode: EpisodeConfig = EpisodeConfig()) -> PopulationRun:
    world_seeds = _seeds(master_seed, 1, index, count=cfg.trials)
    worlds = [generate_world(kind, int(ws), world_scale(profile), profile.body_radius) for ws in world_seeds]
    rng = np.random.default_rng(_seeds(master_seed, 2, index, count=4))
    pop = [random_individual(rng, index, cfg.limits) for _ in range(cfg.population)]
    history = []
    best_costs = []
    for gen in range(cfg.max_generations):
        seeds = _seeds(master_seed, 3, index, gen, count=cfg.population)
        evaluate(pop, worlds, profile, seeds, episode, cfg)
        costs = [i.cost(cfg.rho) for i in pop]
        best_costs.append(min(costs))
        history.append((gen, min(costs), float(np.mean(costs))))
        log.debug("population %d generation %d best %.1f mean %.1f", index, gen, min(costs), np.mean(costs))
        w = cfg.convergence_window
        # a population whose best robot still fails has not converged, only stalled
        solved = not min(pop, key=lambda i: i.cost(cfg.rho)).result.failed
        if solved and len(best_costs) > w and \
                best_costs[-w - 1] - best_costs[-1] < cfg.convergence_tol * best_costs[-w - 1]:
            break
        if gen == cfg.max_generations - 1:
            break
        order = sorted(range(len(pop)), key=lambda k: costs[k])
        # elites keep their measured result; they are not re-run
        nxt = [pop[k] for k in order[:cfg.elitism]]
        while len(nxt) < cfg.population:
            a, b = select_parents(pop, rng)
            nxt.append(crossover(a, b, rng, cfg))
        for ind in nxt:
            rl_replace(ind, rng, cfg)
        pop = nxt
    best = min(pop, key=lambda i: i.cost(cfg.rho))
    return PopulationRun(best, history, index, tuple(int(ws) for ws in world_seeds))


def _evolve_one(args):
    return evolve_population(*args)


def evolve_populations(cfg: GaConfig = GaConfig(), kind: str = MAZE, master_seed: int = 0,
                       profile: PlatformProfile = EPUCK,
                       episode: EpisodeConfig = EpisodeConfig()) -> list[PopulationRun]:
    jobs = [(cfg, kind, master_seed, k, profile, episode) for k in range(cfg.populations)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            return list(ex.map(_evolve_one, jobs))
    return [_evolve_one(j) for j in jobs]


def sequence_from_runs(runs: list[PopulationRun]) -> GeneticSequence:
    return GeneticSequence([tuple(r.best.genes) for r in runs],
                           costs=[(r.best.result.time, r.best.result.collisions) for r in runs])


def evolve(cfg: GaConfig = GaConfig(), kind: str = MAZE, master_seed: int = 0,
           profile: PlatformProfile = EPUCK, episode: EpisodeConfig = EpisodeConfig(),
           log_path: str | os.PathLike | None = None) -> GeneticSequence:
    """Evolve ``cfg.populations`` isolated populations into a genetic sequence."""
    runs = evolve_populations(cfg, kind, master_seed, profile, episode)
    if log_path is not None:
        write_generation_log(log_path, runs)
    return sequence_from_runs(runs)


def write_generation_log(path, runs: list[PopulationRun]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["population", "generation", "best_cost", "mean_cost"])
        for r in runs:
            for gen, best, mean in r.history:
                w.writerow([r.population, gen, repr(float(best)), repr(float(mean))])
