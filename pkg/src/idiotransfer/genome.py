"""Behaviour genes and the genetic-sequence text format.

A gene is nine integers on one line::

    antigen T S F A D Rf Ra score

``antigen`` is 0-based (0..7). Lines are grouped by solution set, eight per
set, ordered by antigen index. The format is the hand-off artifact between
evolution and the immune network, so it is parsed strictly.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import astuple, dataclass, replace
from typing import Iterable, Sequence

import numpy as np

N_ANTIGENS = 8
N_TYPES = 6
FIELD_NAMES = ("antigen_index", "behaviour_type", "speed", "turn_frequency",
               "turn_angle", "direction", "right_turn_frequency",
               "right_turn_angle", "score")
# attributes a GA operator may touch (antigen and score are bookkeeping)
ATTRIBUTES = FIELD_NAMES[1:8]

LEFT, RIGHT = 1, 2

WANDER_ONE, WANDER_BOTH, TURN_FORWARDS, TURN_ON_SPOT, TURN_BACKWARDS, TRACK = range(1, 7)


class GenomeError(ValueError):
    """Raised for malformed genes, lines or sequences."""


@dataclass(frozen=True)
class GeneLimits:
    speed_min: int = 100
    speed_max: int = 900
    percent_min: int = 0
    percent_max: int = 100

    def bounds(self, name: str) -> tuple[int, int]:
        if name == "antigen_index":
            return 0, N_ANTIGENS - 1
        if name == "behaviour_type":
            return 1, N_TYPES
        if name == "speed":
            return self.speed_min, self.speed_max
        if name == "direction":
            return LEFT, RIGHT
        if name == "score":
            return 0, 2**31 - 1
        return self.percent_min, self.percent_max


DEFAULT_LIMITS = GeneLimits()
# what any gene must satisfy regardless of configured speed limits
_STRUCTURAL = GeneLimits(speed_min=0, speed_max=2**31 - 1)


@dataclass(frozen=True)
class BehaviourGene:
    antigen_index: int
    behaviour_type: int
    speed: int
    turn_frequency: int
    turn_angle: int
    direction: int
    right_turn_frequency: int
    right_turn_angle: int
    score: int = 0

    def __post_init__(self):
        validate(self, _STRUCTURAL)

    @property
    def antigen_code(self) -> int:
        """1-based antigen number as used in tables and reports."""
        return self.antigen_index + 1

    def with_(self, **changes) -> "BehaviourGene":
        return replace(self, **changes)


def validate(gene: BehaviourGene, limits: GeneLimits = DEFAULT_LIMITS) -> None:
    for name in FIELD_NAMES:
        value = getattr(gene, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise GenomeError(f"{name}: expected integer, got {value!r}")
        lo, hi = limits.bounds(name)
        if not lo <= value <= hi:
            raise GenomeError(f"{name}: {value} outside [{lo}, {hi}]")


def decode_line(line: str, limits: GeneLimits = DEFAULT_LIMITS) -> BehaviourGene:
    tokens = line.split()
    if len(tokens) != len(FIELD_NAMES):
        raise GenomeError(f"expected 9 fields, got {len(tokens)}: {line.strip()!r}")
    values = []
    for name, tok in zip(FIELD_NAMES, tokens):
        try:
            values.append(int(tok, 10))
        except ValueError:
            raise GenomeError(f"{name}: non-integer token {tok!r}") from None
    gene = BehaviourGene(*values)
    validate(gene, limits)
    return gene


def encode_line(gene: BehaviourGene) -> str:
    return " ".join(str(int(v)) for v in astuple(gene)) + "\n"


def random_gene(rng: np.random.Generator, antigen_index: int,
                limits: GeneLimits = DEFAULT_LIMITS, score: int = 0) -> BehaviourGene:
    pct = lambda: int(rng.integers(limits.percent_min, limits.percent_max + 1))
    return BehaviourGene(
        antigen_index=antigen_index,
        behaviour_type=int(rng.integers(1, N_TYPES + 1)),
        speed=int(rng.integers(limits.speed_min, limits.speed_max + 1)),
        turn_frequency=pct(),
        turn_angle=pct(),
        direction=int(rng.integers(LEFT, RIGHT + 1)),
        right_turn_frequency=pct(),
        right_turn_angle=pct(),
        score=score,
    )


@dataclass
class GeneticSequence:
    """n solution sets of eight genes, plus optional per-set episode costs.

    ``costs`` holds the (time, collisions) pair measured for each set when it
    was evolved; it travels in a sidecar file, never in the sequence itself.
    """

    solution_sets: list[tuple[BehaviourGene, ...]]
    costs: list[tuple[float, float]] | None = None

    def __post_init__(self):
        if not self.solution_sets:
            raise GenomeError("a genetic sequence needs at least one solution set")
        for k, genes in enumerate(self.solution_sets, start=1):
            _check_coverage(genes, k)
        self.solution_sets = [tuple(sorted(s, key=lambda g: g.antigen_index))
                              for s in self.solution_sets]
        if self.costs is not None and len(self.costs) != len(self.solution_sets):
            raise GenomeError("costs must have one entry per solution set")

    @property
    def n(self) -> int:
        return len(self.solution_sets)

    def gene(self, set_index: int, antigen_index: int) -> BehaviourGene:
        return self.solution_sets[set_index][antigen_index]

    def scores(self) -> np.ndarray:
        return np.array([[g.score for g in s] for s in self.solution_sets], dtype=float)

    def dumps(self) -> str:
        return "".join(encode_line(g) for s in self.solution_sets for g in s)


def _check_coverage(genes: Sequence[BehaviourGene], set_number: int) -> None:
    seen = [g.antigen_index for g in genes]
    dup = sorted({a for a in seen if seen.count(a) > 1})
    if dup:
        raise GenomeError(f"solution set {set_number}: duplicate antigen index {dup[0]}")
    missing = sorted(set(range(N_ANTIGENS)) - set(seen))
    if missing or len(genes) != N_ANTIGENS:
        raise GenomeError(f"solution set {set_number}: missing antigen index {missing}")


def load_sequence(source: Iterable[str] | str, n: int | None = None,
                  limits: GeneLimits = DEFAULT_LIMITS) -> GeneticSequence:
    """Parse ``n`` solution sets from a text stream (or string).

    ``n`` may be omitted, in which case it is inferred from the line count.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = [ln for ln in source]
    while lines and not lines[-1].strip():
        lines.pop()
    if n is None:
        n = max(1, -(-len(lines) // N_ANTIGENS))
    if n < 1:
        raise GenomeError("n must be at least 1")
    expected = n * N_ANTIGENS
    if len(lines) > expected:
        raise GenomeError(f"expected {expected} lines for n={n}, got {len(lines)}")
    genes = []
    for lineno, line in enumerate(lines, start=1):
        try:
            genes.append(decode_line(line, limits))
        except GenomeError as exc:
            raise GenomeError(f"line {lineno}: {exc}") from None
    if len(genes) < expected:
        raise GenomeError(f"incomplete solution set {len(genes) // N_ANTIGENS + 1}"
                          f" ({len(genes)} of {expected} lines)")
    sets = [tuple(genes[k:k + N_ANTIGENS]) for k in range(0, expected, N_ANTIGENS)]
    return GeneticSequence(sets)


def costs_path(path: str | os.PathLike) -> str:
    return os.fspath(path) + ".costs.csv"


def write_sequence(path: str | os.PathLike, seq: GeneticSequence) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(seq.dumps())
    if seq.costs is not None:
        with open(costs_path(path), "w", encoding="ascii", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["set", "time", "collisions"])
            for k, (t, c) in enumerate(seq.costs):
                w.writerow([k, repr(float(t)), repr(float(c))])


def read_sequence(path: str | os.PathLike, n: int | None = None,
                  limits: GeneLimits = DEFAULT_LIMITS) -> GeneticSequence:
    with open(path, encoding="ascii") as fh:
        seq = load_sequence(fh, n, limits)
    side = costs_path(path)
    if os.path.exists(side):
        with open(side, encoding="ascii") as fh:
            attach_costs(seq, fh, side)
    return seq


def attach_costs(seq: GeneticSequence, source: Iterable[str], name: str = "costs") -> GeneticSequence:
    """Read a ``set,time,collisions`` table into ``seq.costs``."""
    rows = list(csv.DictReader(source))
    seq.costs = [(float(r["time"]), float(r["collisions"])) for r in rows]
    if len(seq.costs) != seq.n:
        raise GenomeError(f"{name}: expected {seq.n} cost rows, got {len(seq.costs)}")
    return seq
