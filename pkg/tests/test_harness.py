import math

import numpy as np
import numpy.testing as npt
import pytest

from wdje import (
    OTConfig,
    ValidationError,
    feature_measure,
    label_measure,
    wasserstein,
    wasserstein_1d,
)
from wdje.harness import (
    PipelineConfig,
    SweepGrid,
    SweepRow,
    SyntheticConfig,
    TrainConfig,
    dumps_csv,
    dumps_json,
    evaluate_sweep,
    gen_synthetic_pair,
    run_cell,
    run_sweep,
    sweep_report,
    train_target_baseline,
    train_transfer_baseline,
)
from wdje.measures import CLASSIFICATION, REGRESSION, Dataset, subsample_task

pytestmark = pytest.mark.filterwarnings("ignore:LogME fixed point")


def _fast_pipeline(**kw):
    defaults = dict(
        hyper=TrainConfig(learning_rate=0.5, epochs=40, l2=1e-3, finetune_epochs=20),
    )
    defaults.update(kw)
    return PipelineConfig(**defaults)


class TestSynthetic:
    def test_deterministic(self):
        cfg = SyntheticConfig(seed=11)
        a_src, a_tgt = gen_synthetic_pair(cfg)
        b_src, b_tgt = gen_synthetic_pair(cfg)
        npt.assert_array_equal(a_src.features, b_src.features)
        npt.assert_array_equal(a_tgt.features, b_tgt.features)
        npt.assert_array_equal(a_tgt.labels, b_tgt.labels)

    def test_domain_shift_increases_feature_distance(self):
        near = SyntheticConfig(mean_shift=0.0, seed=3)
        far = SyntheticConfig(mean_shift=4.0, seed=3)
        w_near = wasserstein(*map(feature_measure, gen_synthetic_pair(near)))[0]
        w_far = wasserstein(*map(feature_measure, gen_synthetic_pair(far)))[0]
        assert w_near < w_far

    def test_low_noise_domains_nearly_coincide(self):
        sigma = 0.05
        for seed in range(30):
            cfg = SyntheticConfig(classes=3, feature_dim=4, samples_per_domain=30,
                                  mean_shift=0.0, noise_sigma=sigma, seed=seed)
            src, tgt = gen_synthetic_pair(cfg)
            w, _ = wasserstein(feature_measure(src), feature_measure(tgt),
                               OTConfig(solver="exact"))
            assert w <= 3.0 * sigma * math.sqrt(cfg.feature_dim)

    def test_identity_regression_labels_close(self):
        for seed in range(10):
            cfg = SyntheticConfig(task_kind=REGRESSION, feature_dim=3,
                                  samples_per_domain=200, mean_shift=0.0,
                                  label_shift=0.0, noise_sigma=0.2, seed=seed)
            src, tgt = gen_synthetic_pair(cfg)
            w = wasserstein_1d(label_measure(src), label_measure(tgt))
            assert w < 0.5  # sampling noise only

    def test_label_permutation_validated(self):
        with pytest.raises(ValidationError, match="permutation"):
            SyntheticConfig(classes=3, label_shift=(0, 1))

    def test_classification_labels_permuted(self):
        cfg = SyntheticConfig(classes=3, samples_per_domain=30,
                              label_shift=(2, 0, 1), seed=0)
        src, tgt = gen_synthetic_pair(cfg)
        assert set(np.unique(tgt.labels)) == {0, 1, 2}
        assert src.n_samples == tgt.n_samples == 30


class TestTrainingBaselines:
    def _separable(self):
        rng = np.random.default_rng(0)
        x0 = rng.normal(size=(30, 2)) + [-3.0, 0.0]
        x1 = rng.normal(size=(30, 2)) + [3.0, 0.0]
        feats = np.vstack([x0, x1])
        labels = np.array([0] * 30 + [1] * 30)
        return Dataset(feats, labels, CLASSIFICATION, 2)

    def test_separable_beats_uniform(self):
        risk, _ = train_target_baseline(self._separable(),
                                        hyper=TrainConfig(epochs=200))
        assert risk < math.log(2.0)

    def test_zero_epochs_give_log_c(self):
        ds = self._separable()
        risk, _ = train_target_baseline(ds, hyper=TrainConfig(epochs=0))
        npt.assert_allclose(risk, math.log(2.0), atol=1e-12)

    def test_ridge_interpolates_exact_data(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 3))
        w = np.array([1.0, -2.0, 0.5])
        y = X @ w + 0.25
        ds = Dataset(X, y, REGRESSION)
        risk, _ = train_target_baseline(ds, hyper=TrainConfig(l2=0.0))
        assert risk <= 1e-9

    def test_warm_start_not_worse_than_untrained(self):
        cfg = SyntheticConfig(classes=3, samples_per_domain=60, seed=4)
        src, _ = gen_synthetic_pair(cfg)
        risk_with, source_risk = train_transfer_baseline(
            src, src, hyper=TrainConfig(epochs=100, finetune_epochs=0)
        )
        assert risk_with <= math.log(3.0)
        assert risk_with == source_risk  # same data, no continuation

    def test_negative_transfer_instance(self):
        synth = SyntheticConfig(classes=3, feature_dim=4, samples_per_domain=90,
                                mean_shift=6.0, label_shift=(2, 1, 0),
                                noise_sigma=0.4, seed=5)
        src, tgt = gen_synthetic_pair(synth)
        tiny = subsample_task(tgt, ratio=0.1, seed=5)
        hyper = TrainConfig(learning_rate=0.5, epochs=200, l2=1e-4, finetune_epochs=1)
        risk_without, _ = train_target_baseline(tiny, hyper=hyper)
        risk_with, _ = train_transfer_baseline(src, tiny, hyper=hyper)
        assert risk_with > risk_without  # transfer hurts here, and is recorded

    def test_reversed_labels_cold_finetune_finite(self):
        synth = SyntheticConfig(classes=2, samples_per_domain=40,
                                label_shift=(1, 0), seed=6)
        src, tgt = gen_synthetic_pair(synth)
        risk_with, source_risk = train_transfer_baseline(
            src, tgt, hyper=TrainConfig(epochs=100, finetune_epochs=0)
        )
        assert math.isfinite(risk_with) and math.isfinite(source_risk)

    def test_dimension_mismatch_rejected(self):
        a = Dataset(np.zeros((4, 2)), [0, 1, 0, 1], CLASSIFICATION, 2)
        b = Dataset(np.zeros((4, 3)), [0, 1, 0, 1], CLASSIFICATION, 2)
        with pytest.raises(ValidationError, match="dims differ"):
            train_transfer_baseline(a, b)


class TestSweep:
    def _synth(self, **kw):
        defaults = dict(classes=3, feature_dim=4, samples_per_domain=60,
                        mean_shift=1.0, noise_sigma=0.8, seed=0)
        defaults.update(kw)
        return SyntheticConfig(**defaults)

    def test_single_cell_equals_pipeline_call(self):
        synth = self._synth()
        pipe = _fast_pipeline()
        rows = run_sweep(SweepGrid(r_values=(1.0,), seeds=(0,)), pipe, synthetic=synth)
        assert len(rows) == 1
        src, tgt = gen_synthetic_pair(synth)
        direct = run_cell(src, tgt, rows[0].task_id, None, 1.0, 0, pipe)
        assert rows[0] == direct

    def test_grid_yields_unique_rows(self):
        rows = run_sweep(
            SweepGrid(c_values=(2, 3), r_values=(0.5, 1.0), seeds=(0, 1)),
            _fast_pipeline(),
            synthetic=self._synth(),
        )
        assert len(rows) == 8
        assert len({row.task_id for row in rows}) == 8
        assert all(row.status == "ok" for row in rows)

    def test_rerun_byte_identical(self):
        grid = SweepGrid(r_values=(0.5, 1.0), seeds=(0, 1))
        a = run_sweep(grid, _fast_pipeline(), synthetic=self._synth())
        b = run_sweep(grid, _fast_pipeline(), synthetic=self._synth())
        assert dumps_csv(a) == dumps_csv(b)
        report_a = sweep_report({"x": 1}, a, evaluate_sweep(a))
        report_b = sweep_report({"x": 1}, b, evaluate_sweep(b))
        assert dumps_json(report_a) == dumps_json(report_b)

    def test_cell_failure_is_isolated(self):
        # c=5 exceeds the 3 synthetic classes: that cell errors, others run
        rows = run_sweep(
            SweepGrid(c_values=(5, 3), r_values=(1.0,), seeds=(0,)),
            _fast_pipeline(),
            synthetic=self._synth(),
        )
        assert len(rows) == 2
        bad = [r for r in rows if r.status != "ok"]
        good = [r for r in rows if r.status == "ok"]
        assert len(bad) == 1 and len(good) == 1
        assert "error" in bad[0].status
        assert bad[0].bound_total is None

    def test_unsupervised_routing(self):
        rows = run_sweep(
            SweepGrid(r_values=(1.0,), seeds=(0,)),
            _fast_pipeline(target_label_fraction=0.0),
            synthetic=self._synth(),
        )
        assert rows[0].mode == "unsupervised"

    def test_supervised_routing(self):
        rows = run_sweep(
            SweepGrid(r_values=(1.0,), seeds=(0,)),
            _fast_pipeline(),
            synthetic=self._synth(),
        )
        assert rows[0].mode == "supervised"

    def test_grid_order_permutes_rows_only(self):
        pipe = _fast_pipeline()
        a = run_sweep(SweepGrid(r_values=(0.5, 1.0), seeds=(0,)), pipe,
                      synthetic=self._synth())
        b = run_sweep(SweepGrid(r_values=(1.0, 0.5), seeds=(0,)), pipe,
                      synthetic=self._synth())
        assert {row.task_id: row for row in a} == {row.task_id: row for row in b}

    def test_domain_term_monotone_in_shift(self):
        pipe = _fast_pipeline()
        terms = []
        for delta in (0.0, 1.0, 2.0, 4.0):
            rows = run_sweep(SweepGrid(r_values=(1.0,), seeds=(0,)), pipe,
                             synthetic=self._synth(mean_shift=delta))
            terms.append(rows[0].domain_term)
        assert terms == sorted(terms)
        assert all(b > a for a, b in zip(terms, terms[1:]))

    def test_heldout_pool_is_fixed_across_ratios(self):
        from wdje.harness.sweep import _split_eval_pool

        src, tgt = gen_synthetic_pair(self._synth(samples_per_domain=80))
        train_a, eval_a = _split_eval_pool(tgt, 0.5, seed=3)
        train_b, eval_b = _split_eval_pool(tgt, 0.5, seed=3)
        npt.assert_array_equal(eval_a.features, eval_b.features)
        assert train_a.n_samples + eval_a.n_samples == tgt.n_samples
        # disjoint: every eval row is absent from the train slice
        train_set = {tuple(row) for row in train_a.features}
        assert all(tuple(row) not in train_set for row in eval_a.features)

    def test_heldout_risks_differ_from_training_risks(self):
        synth = self._synth(samples_per_domain=100)
        grid = SweepGrid(r_values=(0.3,), seeds=(0,))
        train_row = run_sweep(grid, _fast_pipeline(), synthetic=synth)[0]
        held_row = run_sweep(grid, _fast_pipeline(heldout_fraction=0.5),
                             synthetic=synth)[0]
        assert held_row.status == train_row.status == "ok"
        assert held_row.risk_without != train_row.risk_without

    def test_regression_sweep(self):
        synth = SyntheticConfig(task_kind=REGRESSION, feature_dim=3,
                                samples_per_domain=80, mean_shift=1.0,
                                label_shift=0.5, noise_sigma=0.3, seed=0)
        pipe = PipelineConfig(
            bound=__import__("wdje").BoundConfig(loss="mse"),
            hyper=TrainConfig(learning_rate=0.05, epochs=60, l2=1e-3,
                              finetune_epochs=30),
        )
        rows = run_sweep(SweepGrid(r_values=(0.5, 1.0), seeds=(0,)), pipe,
                         synthetic=synth)
        assert all(row.status == "ok" for row in rows)
        assert all(row.leep is None and row.logme is not None for row in rows)

    def test_dataset_pair_required_without_synth(self):
        with pytest.raises(ValidationError, match="synthetic"):
            run_sweep(SweepGrid(), _fast_pipeline())


class TestEvaluateSweep:
    def _row(self, i, bound, risk_with, **kw):
        defaults = dict(
            task_id=f"t{i}", c=None, r=1.0, seed=0, bound_total=bound,
            tr_score=bound - 1.0, risk_without=1.0, risk_with=risk_with,
            empirical_tr=risk_with - 1.0,
        )
        defaults.update(kw)
        return SweepRow(**defaults)

    def test_perfect_correlation(self):
        rows = [self._row(i, b, b) for i, b in enumerate((0.2, 0.5, 0.9, 1.4))]
        ev = evaluate_sweep(rows)
        npt.assert_allclose(ev.pearson["bound_total"], 1.0)

    def test_constant_metric_flagged_none(self):
        rows = [self._row(i, 1.0, w) for i, w in enumerate((0.2, 0.5, 0.9))]
        ev = evaluate_sweep(rows)
        assert ev.pearson["bound_total"] is None

    def test_published_count_pattern_reproduced(self):
        rows = []
        i = 0
        for _ in range(3):  # empirically non-transferable, predicted non-transfer
            rows.append(self._row(i, 2.0, 1.5)); i += 1
        for _ in range(22):  # empirically transferable, predicted non-transfer
            rows.append(self._row(i, 2.0, 0.5)); i += 1
        for _ in range(24):  # empirically transferable, predicted transfer
            rows.append(self._row(i, 0.5, 0.5)); i += 1
        ev = evaluate_sweep(rows)
        cm = ev.confusion
        assert (cm.n_pp, cm.n_pm, cm.n_mp, cm.n_mm) == (3, 0, 22, 24)
        assert round(ev.ci.ci_table, 4) == 0.5217

    def test_insufficient_rows(self):
        with pytest.raises(ValidationError, match=">= 3"):
            evaluate_sweep([self._row(0, 1.0, 1.0)])

    def test_error_rows_excluded(self):
        rows = [self._row(i, b, b) for i, b in enumerate((0.2, 0.5, 0.9, 1.4))]
        rows.append(SweepRow(task_id="bad", c=None, r=1.0, seed=9,
                             status="error: boom"))
        ev = evaluate_sweep(rows)
        assert ev.confusion.total == 4

    def test_csv_escapes_error_messages(self):
        import csv as csv_mod
        import io

        row = SweepRow(task_id="bad", c=None, r=1.0, seed=9,
                       status='error: expected 3, got "4", aborting')
        text = dumps_csv([row])
        parsed = list(csv_mod.reader(io.StringIO(text)))
        assert parsed[1][-1] == 'error: expected 3, got "4", aborting'
