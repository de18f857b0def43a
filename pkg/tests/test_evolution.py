import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from idiotransfer import evolution as ev
from idiotransfer.genome import (ATTRIBUTES, DEFAULT_LIMITS, BehaviourGene, decode_line,
                                 random_gene, validate)
from idiotransfer.harness.control import EpisodeResult
from idiotransfer.perception import Antigen
from idiotransfer.world import BLOCK, Target, WorldState

TINY = ev.GaConfig(population=4, populations=2, max_generations=3, convergence_window=2, trials=1)


def evaluated(costs, rho=1.0):
    pop = []
    rng = np.random.default_rng(0)
    for t, c in costs:
        ind = ev.random_individual(rng)
        ind.result = EpisodeResult(t, c, t >= 900)
        pop.append(ind)
    return ev.assign_fitness(pop, rho)


def test_fitness_examples():
    assert [i.fitness for i in evaluated([(100, 0), (300, 0)])] == pytest.approx([0.75, 0.25])
    assert [i.fitness for i in evaluated([(50, 2)] * 4)] == pytest.approx([0.25] * 4)
    assert [i.fitness for i in evaluated([(900, 10), (90, 0)])] == pytest.approx([0.09, 0.91])


@given(st.lists(st.tuples(st.floats(0.1, 900), st.integers(0, 500)), min_size=2, max_size=12))
def test_fitness_positive_and_normalised(costs):
    mu = [i.fitness for i in evaluated(costs)]
    assert all(m > 0 for m in mu)
    assert sum(mu) == pytest.approx(1.0, abs=1e-12)


def test_roulette_cumulative_bounds():
    assert ev.roulette([0.5, 0.3, 0.2], None, u=0.6) == 1
    assert ev.roulette([0.5, 0.3, 0.2], None, u=0.0) == 0
    assert ev.roulette([0.5, 0.3, 0.2], None, u=0.8) == 2
    assert ev.roulette([0.5, 0.3, 0.2], None, u=0.9999) == 2


def test_roulette_dominant_weight():
    rng = np.random.default_rng(5)
    hits = sum(ev.roulette([1.0, 1e-6, 1e-6], rng) == 0 for _ in range(10_000))
    assert hits >= 9_900


def test_parents_always_distinct():
    pop = evaluated([(100, 0), (110, 0), (900, 3)])
    rng = np.random.default_rng(1)
    for _ in range(10_000):
        a, b = ev.select_parents(pop, rng)
        assert a is not b


def test_parents_need_two():
    with pytest.raises(ValueError):
        ev.select_parents(evaluated([(100, 0)]), np.random.default_rng(0))


def test_averaging_crossover():
    a = decode_line("0 2 500 80 51 2 37 76 9")
    b = decode_line("0 2 700 40 51 1 37 76 9")
    child = ev.cross_genes(a, b, np.random.default_rng(0), mode=0)
    assert child.speed == 600 and child.turn_frequency == 60
    assert child.behaviour_type == 2


def test_pattern_crossover_takes_fixed_groups():
    a = decode_line("0 2 500 80 10 2 30 70 0")
    b = decode_line("0 2 700 40 20 1 35 75 0")
    child = ev.cross_genes(a, b, np.random.default_rng(2), mode=2)
    first = a if child.speed == a.speed else b
    second = b if first is a else a
    assert (child.turn_angle, child.right_turn_frequency) == (first.turn_angle, first.right_turn_frequency)
    assert (child.turn_frequency, child.direction, child.right_turn_angle) == \
        (second.turn_frequency, second.direction, second.right_turn_angle)


def test_different_types_copy_one_parent():
    rng = np.random.default_rng(3)
    a = ev.Individual([random_gene(rng, j).with_(behaviour_type=2) for j in range(8)])
    b = ev.Individual([random_gene(rng, j).with_(behaviour_type=6) for j in range(8)])
    cfg = ev.GaConfig(replacement_rate=0.0, mutation_rate=0.0)
    child = ev.crossover(a, b, rng, cfg)
    for j, g in enumerate(child.genes):
        assert g in (a.genes[j].with_(score=0), b.genes[j].with_(score=0))


def test_full_replacement_rate_one():
    rng = np.random.default_rng(4)
    a, b = ev.random_individual(rng), ev.random_individual(rng)
    child = ev.crossover(a, b, rng, ev.GaConfig(replacement_rate=1.0))
    assert all(g not in (a.genes[j], b.genes[j]) for j, g in enumerate(child.genes))


def test_mutation_interval():
    g = decode_line("0 2 500 80 50 2 37 76 0")
    rng = np.random.default_rng(6)
    seen = set()
    for _ in range(2000):
        a = ev.mutate_attribute(g, rng, name="turn_angle").turn_angle
        assert 25 <= a <= 40 or 60 <= a <= 75
        seen.add(a < 50)
    assert seen == {True, False}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_operators_respect_limits(seed):
    rng = np.random.default_rng(seed)
    cfg = ev.GaConfig(replacement_rate=0.2, mutation_rate=0.9)
    a, b = ev.random_individual(rng), ev.random_individual(rng)
    for _ in range(250):
        child = ev.crossover(a, b, rng, cfg)
        for g in child.genes:
            validate(g, DEFAULT_LIMITS)
            validate(ev.mutate_attribute(g, rng), DEFAULT_LIMITS)
        a, b = b, child


def test_mutation_clamps_at_limits():
    g = decode_line("0 2 900 100 100 2 100 100 0")
    rng = np.random.default_rng(0)
    for name in ATTRIBUTES:
        if name in ev.NUMERIC:
            for _ in range(50):
                validate(ev.mutate_attribute(g, rng, name=name))


def test_rl_replace_after_low_streak():
    rng = np.random.default_rng(7)
    ind = ev.random_individual(rng)
    ind.result = EpisodeResult(10.0, 0, False)
    ind.streak = [3, 0, 0, 0, 0, 0, 0, 2]
    old = list(ind.genes)
    ev.rl_replace(ind, rng, ev.GaConfig())
    assert ind.genes[0] != old[0] and ind.genes[1:] == old[1:]
    assert ind.streak[0] == 0 and ind.result is None


def test_gene_controller_scores():
    rng = np.random.default_rng(8)
    ctl = ev.GeneController([random_gene(rng, j) for j in range(8)])
    gene, tag = ctl.select(Antigen.OBSTACLE_LEFT)
    assert gene.antigen_index == 4 and tag == 4
    ctl.reinforce(0.7)
    ctl.reinforce(0.3)
    assert ctl.mean_scores()[4] == pytest.approx(0.5)
    assert ctl.mean_scores()[0] is None


def test_config_validation():
    with pytest.raises(ValueError):
        ev.GaConfig(population=1)
    with pytest.raises(ValueError):
        ev.GaConfig(mutation_rate=1.5)
    with pytest.raises(ValueError):
        ev.GaConfig(trials=0)


@pytest.fixture(scope="module")
def tiny_runs():
    return ev.evolve_populations(TINY, BLOCK, 3)


def test_evolve_output_shape_and_scores(tiny_runs):
    seq = ev.sequence_from_runs(tiny_runs)
    assert seq.n == 2 and sum(len(s) for s in seq.solution_sets) == 16
    assert len(seq.costs) == 2
    assert all(0 <= g.score <= 100 for s in seq.solution_sets for g in s)


def test_populations_are_isolated(tiny_runs):
    for r in tiny_runs:
        assert r.best.population == r.population


def test_best_cost_never_worsens(tiny_runs):
    for r in tiny_runs:
        best = [b for _, b, _ in r.history]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))


def test_evolve_deterministic(tiny_runs):
    again = ev.evolve_populations(TINY, BLOCK, 3)
    a = ev.sequence_from_runs(tiny_runs)
    b = ev.sequence_from_runs(again)
    assert a.dumps() == b.dumps() and a.costs == b.costs


def test_parallel_matches_serial(tiny_runs):
    par = ev.evolve_populations(ev.GaConfig(**{**TINY.__dict__, "workers": 2}), BLOCK, 3)
    assert ev.sequence_from_runs(par).dumps() == ev.sequence_from_runs(tiny_runs).dumps()


def test_generation_log(tiny_runs, tmp_path):
    p = tmp_path / "gens.csv"
    ev.write_generation_log(p, tiny_runs)
    lines = p.read_text().splitlines()
    assert lines[0] == "population,generation,best_cost,mean_cost"
    assert len(lines) == 1 + sum(len(r.history) for r in tiny_runs)


def test_unused_gene_scores_fifty():
    gene = BehaviourGene(0, 1, 500, 0, 0, 1, 0, 0, 77)
    ind = ev.Individual([gene.with_(antigen_index=j) for j in range(8)])
    w = WorldState(np.zeros((0, 4)), [Target(0.05, 0.0, 0.05, role="block")], 0.0, 0.0, 0.0, 0.037)
    ev.run_individual(ind, w, ev.EPUCK, 0)
    assert [g.score for g in ind.genes] == [50] * 8
    assert ind.result.time == 0.0
