"""Genetic sequences evolved on the e-puck profile with the default GA settings.

Regenerate with ``idiotransfer evolve --world-kind KIND --seed 5 --out KIND.txt``.
"""
import io
from importlib import resources

from ..genome import GeneticSequence, attach_costs, load_sequence

SEED = 5


def bundled_sequence(kind: str) -> GeneticSequence:
    root = resources.files(__name__)
    text = root / f"{kind}.txt"
    if not text.is_file():
        raise FileNotFoundError(f"no bundled sequence for world kind {kind!r}")
    seq = load_sequence(text.read_text(encoding="ascii"))
    costs = root / f"{kind}.txt.costs.csv"
    return attach_costs(seq, io.StringIO(costs.read_text(encoding="ascii")), costs.name)
