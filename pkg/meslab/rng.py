"""
Seeded, per-trial random streams.

Every trial draws from its own counter-based Philox generator keyed by
(seed, trial index), so a run split across worker processes replays the
same transcript as a sequential one.
"""

import bisect
import itertools
import logging
import math
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from numpy.random import Generator, Philox, SeedSequence

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1


def resolve_seed(seed: Optional[int]) -> int:
    """Use the given seed, or draw a fresh 64-bit one from OS entropy."""
    if seed is None:
        fresh = SeedSequence().entropy & SEED_MASK
        logger.info(f"No seed given, using {fresh}")
        return fresh
    if not 0 <= seed <= SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def trial_generator(seed: int, trial: int) -> Generator:
    return Generator(Philox(SeedSequence(entropy=seed, spawn_key=(trial,))))


def integer_weights(probabilities: Sequence[Fraction]) -> Sequence[int]:
    """Scale exact probabilities to integers over their common denominator."""
    denominator = math.lcm(*(p.denominator for p in probabilities)) if probabilities else 1
    return [int(p * denominator) for p in probabilities]


def cumulative_weights(probabilities: Sequence[Fraction]) -> Tuple[int, ...]:
    """Running totals of integer_weights; tables sampled many times keep these."""
    return tuple(itertools.accumulate(integer_weights(probabilities)))


def sample_cumulative(rng: Generator, cumulative: Sequence[int]) -> int:
    """Draw index i with weight cumulative[i] - cumulative[i-1]."""
    total = cumulative[-1] if len(cumulative) else 0
    if total <= 0:
        raise ValueError("cannot sample from an all-zero distribution")
    r = int(rng.integers(total))
    return bisect.bisect_right(cumulative, r)


def sample_index(rng: Generator, probabilities: Sequence[Fraction]) -> int:
    """Draw index i with probability probabilities[i], exactly (no float rounding)."""
    return sample_cumulative(rng, cumulative_weights(probabilities))
