"""Idiotypic network over an evolved repertoire.

The repertoire holds n solution sets of y antibodies. ``P`` is the paratope
(degree of match) matrix, ``I`` the fixed idiotope matrix, ``N`` clone counts
and ``C`` concentrations, all n x y.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .genome import GeneticSequence

P_FLOOR = 0.01


# ----------------------------------------------------------------- interaction
#
# A rule maps (P, I, C, l, m, cfg) to the stimulation and suppression vectors
# (alpha, delta) for column m, given the antigenic set l.

def _sum_rule(P, I, C, l, m, cfg):
    y = P.shape[1]
    stim = cfg.k1 / y * ((1.0 - P) * (I[l] * C[l])[None, :]).sum(axis=1)
    supp = cfg.k2 / y * (P * I[l][None, :] * C).sum(axis=1)
    return stim, supp


def _product_rule(P, I, C, l, m, cfg):
    # literal product over the antigenic antibody's idiotope entries
    mask = I[l] > 0
    if not mask.any():
        return np.zeros(P.shape[0]), np.zeros(P.shape[0])
    stim = cfg.k1 * np.prod(((1.0 - P) * C * C)[:, mask], axis=1)
    supp = cfg.k2 * np.prod((P * C * C)[:, mask], axis=1)
    return stim, supp


def _exhaust_rule(P, I, C, l, m, cfg):
    """Sum rule plus self-regulation driven by the antigenic antibody's clone share.

    ``c`` is C_lm over the mean concentration phi / (n y). Every set is pulled
    towards k1 / (k1 + k2) with strength ``cfg.gain * c``, so a dominant,
    heavily cloned antibody eventually hands the column to its rivals.
    """
    stim, supp = _sum_rule(P, I, C, l, m, cfg)
    c = cfg.gain * C[l, m] * P.size / C.sum()
    col = P[:, m]
    return stim + cfg.k1 * (1.0 - col) * c, supp + cfg.k2 * col * c


RULES = {"sum": _sum_rule, "product": _product_rule, "exhaust": _exhaust_rule}


@dataclass(frozen=True)
class ImmuneConfig:
    k1: float = 0.30
    k2: float = 1.85
    k3: float = 0.0
    b: float = 200.0
    phi: float = 25.0
    n0: float = 1000.0
    rho: float = 8.0
    learning_rate: float = 0.1
    idiotypic: bool = True
    # "sum" alone leaves alpha = delta = 0 whenever the antigenic set is never a
    # column minimum, which is the usual case for evolved repertoires. The
    # exhaust gain is tuned so the difference rate on the maze sits near 0.75.
    rule: str = "exhaust"
    gain: float = 0.47

    def __post_init__(self):
        for name in ("b", "phi", "n0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("k1 and k2 must be non-negative")
        if not 0 <= self.k3 <= 1:
            raise ValueError("k3 must lie in [0, 1]")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must lie in (0, 1]")
        if self.gain < 0:
            raise ValueError("gain must be non-negative")
        if self.rule not in RULES:
            raise ValueError(f"unknown combination rule {self.rule!r}; choose from {sorted(RULES)}")

    def with_(self, **changes) -> "ImmuneConfig":
        return replace(self, **changes)


def relative_fitness(times, collisions, rho: float) -> np.ndarray:
    """Normalised inverse cost: mu_i = (t_i + rho c_i)^-1 / sum_k (t_k + rho c_k)^-1."""
    cost = np.asarray(times, dtype=float) + rho * np.asarray(collisions, dtype=float)
    if np.any(cost <= 0):
        raise ValueError("episode costs must be positive")
    inv = 1.0 / cost
    return inv / inv.sum()


@dataclass
class Repertoire:
    P: np.ndarray
    I: np.ndarray
    N: np.ndarray
    C: np.ndarray
    sequence: GeneticSequence | None = None
    fitness: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.P.shape

    def copy(self) -> "Repertoire":
        return Repertoire(self.P.copy(), self.I.copy(), self.N.copy(), self.C.copy(),
                          self.sequence, None if self.fitness is None else self.fitness.copy())


def idiotope(P: np.ndarray) -> np.ndarray:
    """1.0 at the weakest-matching antibody of each column (lowest set on ties)."""
    I = np.zeros_like(P, dtype=float)
    I[np.argmin(P, axis=0), np.arange(P.shape[1])] = 1.0
    I.setflags(write=False)
    return I


def concentrations(N: np.ndarray, phi: float) -> np.ndarray:
    return phi * N / N.sum()


def from_matrix(P, cfg: ImmuneConfig = ImmuneConfig(), sequence: GeneticSequence | None = None) -> Repertoire:
    P = np.clip(np.asarray(P, dtype=float), P_FLOOR, 1.0)
    N = np.full(P.shape, float(cfg.n0))
    return Repertoire(P, idiotope(P), N, concentrations(N, cfg.phi), sequence)


def build_repertoire(seq: GeneticSequence, cfg: ImmuneConfig = ImmuneConfig(),
                     costs: list[tuple[float, int]] | None = None) -> Repertoire:
    """Seed the network from a genetic sequence and per-set episode costs.

    Scores are scaled by the sequence maximum, then weighted by each set's
    fitness relative to the fittest set, so P lies in [0.01, 1].
    """
    costs = costs if costs is not None else seq.costs
    if costs is None:
        raise ValueError("per-set episode costs are required (run calibration episodes)")
    raw = seq.scores()
    top = raw.max()
    if top <= 0:
        raise ValueError("degenerate sequence: every reinforcement score is zero")
    norm = np.maximum(raw / top, P_FLOOR)
    times, cols = zip(*costs)
    mu = relative_fitness(times, cols, cfg.rho)
    rep = from_matrix(norm * (mu / mu.max())[:, None], cfg, seq)
    rep.fitness = mu
    return rep


@dataclass(frozen=True)
class SelectionReport:
    antigen: int
    antigenic: int
    selected: int
    alpha: tuple[float, ...] = ()
    delta: tuple[float, ...] = ()

    @property
    def difference(self) -> bool:
        return self.selected != self.antigenic


def antigenic_set(P: np.ndarray, col: int) -> int:
    return int(np.argmax(P[:, col]))


def select(rep: Repertoire, antigen: int, cfg: ImmuneConfig = ImmuneConfig()) -> tuple[int, SelectionReport]:
    """Choose a solution set for ``antigen`` (1-based code); updates N and C in place."""
    m = int(antigen) - 1
    l = antigenic_set(rep.P, m)
    if not cfg.idiotypic:
        return l, SelectionReport(int(antigen), l, l)
    alpha, delta = RULES[cfg.rule](rep.P, rep.I, rep.C, l, m, cfg)
    p2 = np.clip(rep.P[:, m] + alpha - delta, P_FLOOR, 1.0)
    rep.N[:, m] = cfg.b * p2 + rep.N[:, m] * (1.0 - cfg.k3)
    rep.C = concentrations(rep.N, cfg.phi)
    chosen = int(np.argmax(rep.C[:, m]))
    return chosen, SelectionReport(int(antigen), l, chosen, tuple(alpha.tolist()), tuple(delta.tolist()))


def reinforce(rep: Repertoire, set_index: int, antigen: int, r: float,
              cfg: ImmuneConfig = ImmuneConfig()) -> Repertoire:
    m = int(antigen) - 1
    p = rep.P[set_index, m]
    rep.P[set_index, m] = min(1.0, max(P_FLOOR, p + cfg.learning_rate * (r - p)))
    return rep


def difference_rate(history) -> float:
    history = list(history)
    if not history:
        raise ValueError("difference rate of an empty selection history")
    return sum(r.difference for r in history) / len(history)
