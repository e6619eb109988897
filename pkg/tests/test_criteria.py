import math

import numpy as np
import pytest

from mosel.criteria import (
    Convention,
    Criterion,
    CriterionScores,
    ModelEvidence,
    aic_score,
    aicc_score,
    beef_score,
    mdl_score,
    select_order,
)
from mosel.errors import EmptyCandidateSet, SmallSample
from mosel.numerics import stream


def doubled(llr, dim, m=1000):
    return ModelEvidence(llr=llr, dim=dim, n_samples=m)


class TestModelEvidence:
    def test_rejects_negative_llr(self):
        with pytest.raises(ValueError):
            ModelEvidence(llr=-0.1, dim=1, n_samples=10)

    def test_rejects_nan_llr(self):
        with pytest.raises(ValueError):
            ModelEvidence(llr=float("nan"), dim=1, n_samples=10)

    def test_rejects_bad_dim_and_samples(self):
        with pytest.raises(ValueError):
            ModelEvidence(llr=1.0, dim=0, n_samples=10)
        with pytest.raises(ValueError):
            ModelEvidence(llr=1.0, dim=1, n_samples=0)

    def test_rejects_non_convention(self):
        with pytest.raises(ValueError):
            ModelEvidence(llr=1.0, dim=1, n_samples=10, convention="doubled")


class TestBeefScore:
    def test_gate_at_dim(self):
        # doubled form switches on at llr = dim
        assert beef_score(doubled(3.0, 3)) == 0.0
        assert beef_score(doubled(2.9999, 3)) == 0.0
        assert beef_score(doubled(3.1, 3)) > 0.0

    def test_hand_value_doubled(self):
        # llr = 2e with d = 2: score is 2e - 2(ln e + 1) = 2e - 4
        got = beef_score(doubled(2.0 * math.e, 2))
        assert got == pytest.approx(2.0 * math.e - 4.0, rel=1e-14)

    def test_doubled_is_twice_natural_exactly(self):
        rng = stream(2, 0)
        for _ in range(200):
            llr = float(rng.uniform(0.0, 50.0))
            dim = int(rng.integers(1, 12))
            nat = beef_score(
                ModelEvidence(llr=llr, dim=dim, n_samples=100, convention=Convention.NATURAL)
            )
            dob = beef_score(
                ModelEvidence(llr=2.0 * llr, dim=dim, n_samples=100, convention=Convention.DOUBLED)
            )
            assert dob == 2.0 * nat

    def test_natural_hand_value(self):
        ev = ModelEvidence(llr=5.0, dim=2, n_samples=100, convention=Convention.NATURAL)
        assert beef_score(ev) == pytest.approx(4.0 - math.log(5.0), rel=1e-14)

    def test_nonnegative_everywhere(self):
        rng = stream(2, 1)
        for _ in range(500):
            llr = float(rng.uniform(0.0, 100.0))
            dim = int(rng.integers(1, 20))
            assert beef_score(doubled(llr, dim)) >= 0.0

    def test_increasing_in_llr(self):
        dim = 4
        values = [beef_score(doubled(l, dim)) for l in np.linspace(0.0, 40.0, 200)]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestClassicalScores:
    def test_mdl_hand_value(self):
        assert mdl_score(doubled(30.0, 4, m=100)) == pytest.approx(
            30.0 - 4 * math.log(100.0), rel=1e-14
        )

    def test_aic_hand_value(self):
        assert aic_score(doubled(30.0, 4)) == 30.0 - 8.0

    def test_aicc_hand_value(self):
        got = aicc_score(doubled(30.0, 4, m=100))
        assert got == pytest.approx(30.0 - 2.0 * 4 * 100 / 95.0, rel=1e-14)

    def test_aicc_approaches_aic(self):
        ev_big = doubled(30.0, 4, m=10**7)
        assert aicc_score(ev_big) == pytest.approx(aic_score(ev_big), abs=1e-4)
        assert aicc_score(doubled(30.0, 4, m=100)) < aic_score(doubled(30.0, 4, m=100))

    def test_aicc_small_sample(self):
        with pytest.raises(SmallSample):
            aicc_score(doubled(30.0, 4, m=5))
        # boundary: m = d + 2 is the smallest defined record length
        assert math.isfinite(aicc_score(doubled(30.0, 4, m=6)))

    def test_doubled_required(self):
        nat = ModelEvidence(llr=5.0, dim=2, n_samples=50, convention=Convention.NATURAL)
        for fn in (mdl_score, aic_score, aicc_score):
            with pytest.raises(ValueError):
                fn(nat)


class TestSelectOrder:
    def ladder(self, llrs, dims, m=1000):
        return [doubled(l, d, m=m) for l, d in zip(llrs, dims)]

    def test_simple_argmax(self):
        evs = self.ladder([10.0, 40.0, 41.0], [2, 4, 6], m=100)
        # aic scores: 6, 32, 29 -> order 2
        res = select_order(evs, Criterion.AIC)
        assert res.selected == 2
        assert res.scores[2] == 32.0
        assert res.excluded == ()

    def test_tie_breaks_to_smallest(self):
        evs = self.ladder([14.0, 18.0], [2, 4], m=100)
        # aic scores: 10, 10 -> tie, choose 1
        res = select_order(evs, Criterion.AIC)
        assert res.scores[1] == res.scores[2] == 10.0
        assert res.selected == 1

    def test_include_null_wins_when_all_scores_negative(self):
        evs = self.ladder([1.0, 2.0], [3, 6], m=1000)
        res = select_order(evs, Criterion.MDL, include_null=True)
        assert res.scores[0] == 0.0
        assert res.selected == 0

    def test_include_null_loses_to_positive_score(self):
        evs = self.ladder([50.0, 52.0], [3, 6], m=100)
        res = select_order(evs, Criterion.MDL, include_null=True)
        assert res.selected == 1

    def test_null_tie_prefers_null(self):
        # beef gives 0.0 at both the null and a gated-off order 1
        evs = self.ladder([2.0, 2.5], [3, 6], m=100)
        res = select_order(evs, Criterion.BEEF, include_null=True)
        assert res.scores[0] == 0.0 and res.scores[1] == 0.0
        assert res.selected == 0

    def test_small_sample_exclusion(self):
        evs = self.ladder([10.0, 20.0, 30.0], [2, 4, 9], m=10)
        res = select_order(evs, Criterion.AICC)
        assert res.excluded == (3,)
        assert 3 not in res.scores
        assert res.selected in (1, 2)

    def test_all_excluded_raises(self):
        evs = self.ladder([10.0, 20.0], [12, 22], m=10)
        with pytest.raises(EmptyCandidateSet):
            select_order(evs, Criterion.AICC)

    def test_all_excluded_but_null_survives(self):
        evs = self.ladder([10.0, 20.0], [12, 22], m=10)
        res = select_order(evs, Criterion.AICC, include_null=True)
        assert res.selected == 0
        assert res.excluded == (1, 2)

    def test_empty_ladder_raises(self):
        with pytest.raises(EmptyCandidateSet):
            select_order([], Criterion.AIC)

    def test_decreasing_evidence_warns(self):
        evs = self.ladder([10.0, 8.0], [2, 4], m=100)
        with pytest.warns(UserWarning):
            select_order(evs, Criterion.AIC)

    def test_nondecreasing_evidence_is_silent(self):
        import warnings

        evs = self.ladder([10.0, 10.0, 12.0], [2, 4, 6], m=100)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            res = select_order(evs, Criterion.AIC)
        assert isinstance(res, CriterionScores)

    def test_scores_keyed_by_order(self):
        evs = self.ladder([10.0, 20.0, 30.0], [2, 4, 6], m=100)
        res = select_order(evs, Criterion.MDL)
        assert sorted(res.scores) == [1, 2, 3]

    def test_criteria_disagree_on_crafted_ladder(self):
        # strong parsimony (mdl at large m) picks 1; weak penalty (aic) picks 2
        evs = self.ladder([20.0, 36.0], [2, 8], m=10**6)
        assert select_order(evs, Criterion.MDL).selected == 1
        assert select_order(evs, Criterion.AIC).selected == 2
