"""Majority voting over consecutive segment classifications."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError


@dataclass(frozen=True)
class VoteConfig:
    """Voting parameters: an odd number of votes and the tie-break seed.

    Ties between equally common labels are resolved uniformly at random
    using the explicit seed, so a vote is reproducible.
    """

    k: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise InputError(f"k must be a positive odd count, got {self.k!r}")


def vote(labels, config: VoteConfig) -> str:
    """Majority label of ``config.k`` votes.

    Labels tied for the highest count are resolved uniformly at random
    (seeded); with three mutually distinct votes each label wins with
    probability 1/3.
    """
    labels = [str(l) for l in labels]
    if len(labels) != config.k:
        raise InputError(f"expected {config.k} labels, got {len(labels)}")
    counts = Counter(labels)
    top = max(counts.values())
    tied = [label for label in dict.fromkeys(labels) if counts[label] == top]
    if len(tied) == 1:
        return tied[0]
    rng = np.random.default_rng(config.seed)
    return tied[int(rng.integers(len(tied)))]


def vote_correct_prob(p: float) -> float:
    """Probability that a 3-vote majority is correct, given per-vote accuracy p.

    Assumes wrong votes never coincide, so a single correct vote still wins
    the three-way tie with probability 1/3. Closed form: p + p^2 - p^3,
    which is >= p on [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise NumericError(f"probability must lie in [0, 1], got {p!r}")
    return p + p * p - p**3
