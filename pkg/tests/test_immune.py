import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from idiotransfer import immune
from idiotransfer.genome import GeneticSequence, random_gene
from idiotransfer.immune import (P_FLOOR, RULES, ImmuneConfig, SelectionReport, build_repertoire,
                                 concentrations, difference_rate, from_matrix, idiotope, reinforce,
                                 relative_fitness, select)


def sequence(n=5, seed=0, costs=None):
    rng = np.random.default_rng(seed)
    sets = [tuple(random_gene(rng, j, score=int(rng.integers(0, 100))) for j in range(8))
            for _ in range(n)]
    costs = costs or [(100.0 + 50 * k, float(k)) for k in range(n)]
    return GeneticSequence(sets, costs=costs)


def test_relative_fitness():
    assert relative_fitness([100, 300], [0, 0], 1.0) == pytest.approx([0.75, 0.25])
    # (1/910) / (1/910 + 1/90) = 90/1000 exactly
    assert relative_fitness([900, 90], [10, 0], 1.0) == pytest.approx([0.09, 0.91], abs=1e-12)
    with pytest.raises(ValueError):
        relative_fitness([0.0], [0.0], 8.0)


def test_build_shapes_and_uniform_concentration():
    rep = build_repertoire(sequence())
    for m in (rep.P, rep.I, rep.N, rep.C):
        assert m.shape == (5, 8)
    assert np.all(rep.N == 1000.0)
    assert np.allclose(rep.C, 25.0 / 40)
    assert rep.P.min() >= P_FLOOR and rep.P.max() <= 1.0


def test_p_is_normalised_score_times_relative_fitness():
    seq = sequence()
    rep = build_repertoire(seq)
    raw = seq.scores()
    mu = relative_fitness(*zip(*seq.costs), rho=8.0)
    want = np.clip(np.maximum(raw / raw.max(), P_FLOOR) * (mu / mu.max())[:, None], P_FLOOR, 1)
    assert np.allclose(rep.P, want)
    assert np.allclose(rep.fitness, mu)


def test_idiotope_column_minimum():
    P = np.array([[0.4, 0.2], [0.7, 0.2]])
    I = idiotope(P)
    assert I[:, 0].tolist() == [1.0, 0.0]
    assert I[:, 1].tolist() == [1.0, 0.0]  # tie to the lowest set
    with pytest.raises(ValueError):
        I[0, 0] = 0.0


def test_degenerate_sequence():
    seq = sequence()
    seq.solution_sets = [tuple(g.with_(score=0) for g in s) for s in seq.solution_sets]
    with pytest.raises(ValueError, match="degenerate"):
        build_repertoire(seq)


def test_missing_costs():
    seq = sequence()
    seq.costs = None
    with pytest.raises(ValueError, match="costs"):
        build_repertoire(seq)


def test_disabled_selects_argmax():
    P = np.full((5, 8), 0.3)
    P[:, 2] = [0.2, 0.9, 0.5, 0.1, 0.3]
    rep = from_matrix(P)
    k, report = select(rep, 3, ImmuneConfig(idiotypic=False))
    assert k == 1 and not report.difference
    assert np.all(rep.N == 1000.0)


def test_no_interaction_selects_antigenic():
    rng = np.random.default_rng(0)
    rep = from_matrix(rng.uniform(0.05, 1, (5, 8)))
    cfg = ImmuneConfig(k1=0.0, k2=0.0)
    for m in range(1, 9):
        k, r = select(rep, m, cfg)
        assert r.alpha == (0.0,) * 5 and r.delta == (0.0,) * 5
        assert k == r.antigenic


def test_clone_update_value():
    P = np.full((2, 8), 0.5)
    rep = from_matrix(P)
    select(rep, 1, ImmuneConfig(k1=0.0, k2=0.0))
    assert rep.N[0, 0] == pytest.approx(1100.0)


def test_clone_update_with_death_rate():
    rep = from_matrix(np.full((2, 8), 0.5))
    select(rep, 1, ImmuneConfig(k1=0.0, k2=0.0, k3=0.5))
    assert rep.N[0, 0] == pytest.approx(200 * 0.5 + 1000 * 0.5)


def test_sum_rule_arithmetic():
    # set 1 is antigenic in column 0 and the column minimum in column 1
    P = np.array([[0.2, 0.8, 0.5], [0.9, 0.1, 0.5], [0.5, 0.5, 0.5]])
    I = idiotope(P)
    C = np.full((3, 3), 25 / 9)
    cfg = ImmuneConfig()
    a, d = RULES["sum"](P, I, C, 1, 0, cfg)
    # I[1] = [0, 1, 0] so only column 1 contributes
    assert a == pytest.approx(cfg.k1 / 3 * (1 - P[:, 1]) * C[1, 1])
    assert d == pytest.approx(cfg.k2 / 3 * P[:, 1] * C[:, 1])


def test_exhaust_rule_reduces_to_sum_at_zero_gain():
    rng = np.random.default_rng(4)
    P = rng.uniform(0.01, 1, (5, 8))
    rep = from_matrix(P)
    for m in range(8):
        l = immune.antigenic_set(P, m)
        a0, d0 = RULES["sum"](P, rep.I, rep.C, l, m, ImmuneConfig())
        a1, d1 = RULES["exhaust"](P, rep.I, rep.C, l, m, ImmuneConfig(rule="exhaust", gain=0.0))
        assert np.allclose(a0, a1) and np.allclose(d0, d1)


def test_unknown_rule():
    with pytest.raises(ValueError, match="unknown combination rule"):
        ImmuneConfig(rule="median")


@pytest.mark.parametrize("kw", [dict(b=0), dict(phi=-1), dict(n0=0), dict(k1=-0.1), dict(k3=1.5),
                                dict(learning_rate=0), dict(learning_rate=1.5), dict(gain=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ImmuneConfig(**kw)


def test_reinforce_examples():
    cfg = ImmuneConfig()
    rep = from_matrix(np.full((2, 8), 0.5))
    reinforce(rep, 0, 1, 0.5, ImmuneConfig(learning_rate=0.7))
    assert rep.P[0, 0] == 0.5
    reinforce(rep, 0, 1, 1.0, cfg)
    assert rep.P[0, 0] == pytest.approx(0.55)
    I = rep.I.copy()
    for _ in range(500):
        reinforce(rep, 1, 2, 0.0, cfg)
    assert rep.P[1, 1] == P_FLOOR
    assert np.array_equal(rep.I, I)


def test_difference_rate():
    same = [SelectionReport(1, 2, 2)] * 4
    assert difference_rate(same) == 0.0
    mixed = [SelectionReport(1, 2, 3)] * 3 + [SelectionReport(1, 2, 2)]
    assert difference_rate(mixed) == 0.75
    with pytest.raises(ValueError):
        difference_rate([])


def test_concentrations_sum_to_phi():
    N = np.arange(1, 41, dtype=float).reshape(5, 8)
    assert concentrations(N, 25.0).sum() == pytest.approx(25.0)


matrices = arrays(np.float64, (5, 8), elements=st.floats(0.0, 1.0))


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from(sorted(RULES)), st.integers(0, 2**32 - 1))
def test_invariants_under_select_and_reinforce(P, rule, seed):
    rng = np.random.default_rng(seed)
    cfg = ImmuneConfig(rule=rule)
    rep = from_matrix(P, cfg)
    I = rep.I.copy()
    for _ in range(200):
        m = int(rng.integers(1, 9))
        k, _ = select(rep, m, cfg)
        reinforce(rep, k, m, float(rng.random()), cfg)
        assert abs(rep.C.sum() - cfg.phi) <= 1e-9
        assert np.all(rep.N > 0) and np.all(np.isfinite(rep.N))
        assert rep.P.min() >= P_FLOOR and rep.P.max() <= 1.0
    assert np.array_equal(rep.I, I)
    assert np.all(rep.I.sum(axis=0) == 1.0)


@settings(max_examples=200, deadline=None)
@given(matrices, st.integers(0, 7), st.integers(0, 4), st.floats(0.0, 1.0))
def test_raising_p_never_lowers_antigenic_rank(P, m, i, bump):
    P = np.clip(P, P_FLOOR, 1.0)
    rank = lambda Q: int((Q[:, m] > Q[i, m]).sum())
    Q = P.copy()
    Q[i, m] = min(1.0, Q[i, m] + bump)
    assert rank(Q) <= rank(P)
    if immune.antigenic_set(P, m) == i:
        assert immune.antigenic_set(Q, m) == i


@settings(max_examples=50, deadline=None)
@given(matrices, st.integers(0, 2**32 - 1))
def test_disabled_matches_plain_argmax(P, seed):
    rng = np.random.default_rng(seed)
    cfg = ImmuneConfig(idiotypic=False)
    rep = from_matrix(P, cfg)
    for _ in range(50):
        m = int(rng.integers(1, 9))
        k, _ = select(rep, m, cfg)
        assert k == int(np.argmax(rep.P[:, m - 1]))
        reinforce(rep, k, m, float(rng.random()), cfg)


def test_copy_is_independent():
    rep = build_repertoire(sequence())
    cp = rep.copy()
    select(cp, 1, ImmuneConfig())
    assert np.all(rep.N == 1000.0)
