import numpy.testing as npt
import pytest

from wdje import (
    ConfusionMatrix,
    ValidationError,
    confusion_matrix,
    consistency_index,
    empirical_transferability,
    make_record,
    target_risk_bound,
    wdje_score,
)


def _bound(total_minus_slack: float):
    # source_risk carries the requested mass; k tiny so slack ~ k
    return target_risk_bound(total_minus_slack, 0.0, 0.0, 0.0, 1e-12)


def _record(task_id, tr, emp):
    bound = _bound(max(tr, 0.0) + 1.0)
    risk_without = bound.total - tr
    rec = make_record(task_id, bound, risk_without, risk_without + emp)
    assert abs(rec.tr_score - tr) < 1e-9
    return rec


class TestWdjeScore:
    def test_transfer_when_bound_below_risk(self):
        bound = _bound(0.5)
        tr, decision = wdje_score(bound, 1.0)
        npt.assert_allclose(tr, -0.5, atol=1e-9)
        assert decision == "transfer"

    def test_tie_is_no_transfer(self):
        bound = _bound(1.0)
        tr, decision = wdje_score(bound, bound.total)
        assert tr == 0.0
        assert decision == "no_transfer"

    def test_no_transfer_when_bound_large(self):
        bound = _bound(2.0)
        tr, decision = wdje_score(bound, 0.1)
        npt.assert_allclose(tr, 1.9, atol=1e-9)
        assert decision == "no_transfer"

    def test_negative_risk_rejected(self):
        with pytest.raises(ValidationError):
            wdje_score(_bound(1.0), -0.1)

    def test_score_decomposition_exact(self):
        bound = _bound(1.234)
        tr, _ = wdje_score(bound, 0.777)
        assert tr + 0.777 == bound.total


class TestEmpiricalTransferability:
    @pytest.mark.parametrize(
        "with_, without, expected",
        [(0.3, 0.5, -0.2), (0.5, 0.5, 0.0), (0.9, 0.2, 0.7)],
    )
    def test_signed_difference(self, with_, without, expected):
        npt.assert_allclose(empirical_transferability(with_, without), expected)

    def test_negative_loss_rejected(self):
        with pytest.raises(ValidationError):
            empirical_transferability(-0.1, 0.5)


class TestConfusionMatrix:
    def test_direct_binning(self):
        records = [
            _record("a", tr=-1.0, emp=-1.0),
            _record("b", tr=-1.0, emp=1.0),
            _record("c", tr=1.0, emp=-1.0),
        ]
        cm = confusion_matrix(records)
        assert (cm.n_pp, cm.n_pm, cm.n_mp, cm.n_mm) == (0, 1, 1, 1)
        assert cm.total == 3

    def test_empty(self):
        cm = confusion_matrix([])
        assert (cm.n_pp, cm.n_pm, cm.n_mp, cm.n_mm) == (0, 0, 0, 0)

    def test_tie_binds_to_plus(self):
        cm = confusion_matrix([_record("t", tr=-1.0, emp=0.0)])
        assert cm.n_pm == 1
        assert cm.ties == 1

    def test_missing_empirical_rejected(self):
        rec = make_record("x", _bound(1.0), 0.5)
        with pytest.raises(ValidationError, match="empirical"):
            confusion_matrix([rec])

    def test_totals(self, rng):
        records = [
            _record(str(i), tr=float(rng.uniform(-0.5, 0.5)),
                    emp=float(rng.uniform(-0.5, 0.5)))
            for i in range(40)
        ]
        cm = confusion_matrix(records)
        assert cm.total == 40


class TestConsistencyIndex:
    def test_published_table_counts(self):
        ci = consistency_index(ConfusionMatrix(3, 0, 22, 24))
        npt.assert_allclose(ci.ci_table, 24 / 46)
        assert round(ci.ci_table, 4) == 0.5217
        assert ci.ci_definition == 1.0

    def test_zero_denominator_is_undefined(self):
        ci = consistency_index(ConfusionMatrix(48, 0, 1, 0))
        assert ci.ci_table == 0.0
        assert ci.ci_definition is None

    def test_all_negative(self):
        ci = consistency_index(ConfusionMatrix(0, 0, 0, 5))
        assert ci.ci_table == 1.0
        assert ci.ci_definition == 1.0

    def test_range_and_definition_edge(self, rng):
        for _ in range(50):
            counts = rng.integers(0, 20, size=4)
            ci = consistency_index(ConfusionMatrix(*map(int, counts)))
            for value in (ci.ci_definition, ci.ci_table):
                if value is not None:
                    assert 0.0 <= value <= 1.0
            if counts[1] == 0 and counts[3] > 0:
                assert ci.ci_definition == 1.0
