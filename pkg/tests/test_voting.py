"""Majority voting and the closed-form accuracy boost."""
import numpy as np
import pytest

from motionfi import InputError, NumericError, VoteConfig, vote, vote_correct_prob


class TestVote:
    def test_majority_wins(self):
        assert vote(["SQ", "SQ", "PU"], VoteConfig(k=3, seed=0)) == "SQ"
        assert vote(["SQ", "SQ", "SQ"], VoteConfig(k=3, seed=0)) == "SQ"

    def test_three_way_tie_uniform_over_seeds(self):
        counts = {"SQ": 0, "PU": 0, "DB": 0}
        trials = 100_000
        for seed in range(trials):
            counts[vote(["SQ", "PU", "DB"], VoteConfig(k=3, seed=seed))] += 1
        for label in counts:
            assert abs(counts[label] / trials - 1 / 3) <= 0.01

    def test_tie_is_deterministic_per_seed(self):
        cfg = VoteConfig(k=3, seed=42)
        first = vote(["A", "B", "C"], cfg)
        assert all(vote(["A", "B", "C"], cfg) == first for _ in range(10))

    def test_wrong_label_count_rejected(self):
        with pytest.raises(InputError):
            vote(["A", "B"], VoteConfig(k=3, seed=0))

    def test_even_k_rejected(self):
        with pytest.raises(InputError):
            VoteConfig(k=2, seed=0)

    def test_k_one(self):
        assert vote(["DB"], VoteConfig(k=1, seed=0)) == "DB"


class TestVoteCorrectProb:
    def test_paper_scale_values(self):
        assert vote_correct_prob(0.9) == pytest.approx(0.9810, abs=5e-5)
        assert vote_correct_prob(0.95) == pytest.approx(0.9951, abs=5e-5)
        assert vote_correct_prob(1.0) == 1.0
        assert vote_correct_prob(0.0) == 0.0

    def test_never_below_single_vote(self):
        for p in np.linspace(0.0, 1.0, 101):
            assert vote_correct_prob(float(p)) >= p - 1e-12

    def test_out_of_range_rejected(self):
        with pytest.raises(NumericError):
            vote_correct_prob(1.5)
        with pytest.raises(NumericError):
            vote_correct_prob(-0.1)
