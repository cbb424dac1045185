import json

import numpy as np
import pytest

from wdje.cli import build_parser, main

pytestmark = pytest.mark.filterwarnings("ignore:LogME fixed point")


def _write_points(path, rows, header=None):
    cols = len(rows[0])
    header = header or ",".join(f"f{i}" for i in range(cols))
    lines = [header] + [",".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestWassersteinCommand:
    def test_two_atom_example(self, tmp_path, capsys):
        u = _write_points(tmp_path / "a.csv", [[0.0], [1.0]])
        v = _write_points(tmp_path / "b.csv", [[2.0], [3.0]])
        code = main(["wasserstein", "--u", u, "--v", v, "--p", "1",
                     "--solver", "exact"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert abs(payload["distance"] - 2.0) < 1e-9
        assert payload["solver"] == "exact"
        assert payload["config"]["p"] == 1.0

    def test_output_file_and_determinism(self, tmp_path):
        u = _write_points(tmp_path / "a.csv", [[0.0], [1.0]])
        v = _write_points(tmp_path / "b.csv", [[2.0], [3.0]])
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        for out in (out1, out2):
            assert main(["wasserstein", "--u", u, "--v", v,
                         "--output", str(out)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        code = main(["wasserstein", "--u", str(tmp_path / "no.csv"),
                     "--v", str(tmp_path / "no.csv")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_bad_numeric_range_fails_before_reading(self, tmp_path, capsys):
        code = main(["wasserstein", "--u", str(tmp_path / "absent.csv"),
                     "--v", str(tmp_path / "absent.csv"), "--p", "0.5"])
        assert code == 1
        err = capsys.readouterr().err
        assert "p must be >= 1" in err
        assert "absent.csv" not in err  # flag validation precedes file IO


class TestScoreCommand:
    def test_transfer_decision(self, capsys):
        code = main(["score", "--bound-total", "0.5", "--risk-without", "1.0"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["tr_score"] == -0.5
        assert payload["decision"] == "transfer"

    def test_tie_is_no_transfer(self, capsys):
        main(["score", "--bound-total", "1.0", "--risk-without", "1.0"])
        payload = json.loads(capsys.readouterr().out)
        assert payload["decision"] == "no_transfer"

    def test_reads_bound_report(self, tmp_path, capsys):
        report = tmp_path / "bound.json"
        report.write_text(json.dumps({"total": 2.0}))
        code = main(["score", "--bound-report", str(report),
                     "--risk-without", "0.1"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["tr_score"] == 1.9

    def test_requires_a_bound(self, capsys):
        assert main(["score", "--risk-without", "1.0"]) == 1


class TestConsistencyCommand:
    def test_published_counts(self, capsys):
        code = main(["consistency", "--counts", "3,0,22,24"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert round(payload["ci"]["ci_table"], 4) == 0.5217
        assert payload["ci"]["ci_definition"] == 1.0

    def test_wrong_arity(self, capsys):
        assert main(["consistency", "--counts", "1,2,3"]) == 1


class TestBoundCommand:
    def test_classification_bound(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        src = _write_points(tmp_path / "s.csv",
                            [list(rng.normal(size=2)) + [i % 2] for i in range(20)],
                            header="f0,f1,label")
        tgt = _write_points(tmp_path / "t.csv",
                            [list(rng.normal(size=2) + 1.0) + [i % 2] for i in range(10)],
                            header="f0,f1,label")
        code = main(["bound", "--source-features", src, "--target-features", tgt,
                     "--task", "classification", "--source-risk", "0.3"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        total = (payload["source_risk"] + payload["domain_term"]
                 + payload["task_term_w"] + payload["task_term_moment"]
                 + payload["slack_term"])
        assert payload["total"] == total
        assert payload["mode"] == "supervised"
        assert payload["task_term_moment"] == 1.0  # one-hot moment

    def test_unsupervised_route(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        src = _write_points(tmp_path / "s.csv",
                            [list(rng.normal(size=2)) + [i % 2] for i in range(12)],
                            header="f0,f1,label")
        tgt = _write_points(tmp_path / "t.csv",
                            [list(rng.normal(size=2)) for _ in range(8)])
        code = main(["bound", "--source-features", src, "--target-features", tgt,
                     "--task", "classification", "--n-t1", "0"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["mode"] == "unsupervised"
        assert payload["task_term_w"] == 0.0


class TestBaselineCommand:
    def test_pearson(self, tmp_path, capsys):
        a = _write_points(tmp_path / "a.csv", [[1.0], [2.0], [3.0]])
        b = _write_points(tmp_path / "b.csv", [[3.0], [2.0], [1.0]])
        code = main(["baseline", "--baseline-metric", "pearson",
                     "--a", a, "--b", b])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == -1.0

    def test_leep_requires_preds(self, tmp_path, capsys):
        tgt = _write_points(tmp_path / "t.csv", [[0.0, 0.0], [1.0, 1.0]],
                            header="f0,label")
        assert main(["baseline", "--baseline-metric", "leep",
                     "--target-features", tgt]) == 1

    def test_hscore(self, tmp_path, capsys):
        rows = [[1.0, 0.0, 0], [0.0, 1.0, 1], [1.0, 0.0, 0], [0.0, 1.0, 1]]
        tgt = _write_points(tmp_path / "t.csv", rows, header="f0,f1,label")
        code = main(["baseline", "--baseline-metric", "hscore",
                     "--target-features", tgt])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert abs(payload["value"] - 1.0) < 1e-9  # C - 1 with C = 2


class TestSynthAndSweep:
    def test_synth_writes_loadable_pair(self, tmp_path, capsys):
        out_s = tmp_path / "src.csv"
        out_t = tmp_path / "tgt.csv"
        code = main(["synth", "--classes", "3", "--dim", "4", "--samples", "30",
                     "--seed", "5", "--out-source", str(out_s),
                     "--out-target", str(out_t)])
        assert code == 0
        from wdje import load_dataset

        ds = load_dataset(out_s, "csv", "classification")
        assert ds.n_samples == 30 and ds.n_features == 4

    def test_synth_binary_format(self, tmp_path):
        out_s = tmp_path / "src.wdje"
        out_t = tmp_path / "tgt.wdje"
        assert main(["synth", "--samples", "12", "--out-source", str(out_s),
                     "--out-target", str(out_t), "--format", "binary",
                     "--output", str(tmp_path / "meta.json")]) == 0
        from wdje import load_dataset

        ds = load_dataset(out_t, "binary", "classification")
        assert ds.n_samples == 12

    def test_sweep_json_deterministic(self, tmp_path):
        args = ["sweep", "--classes", "3", "--dim", "3", "--samples", "40",
                "--mean-shift", "1.0", "--r-values", "0.5,1.0",
                "--seeds", "0,1", "--epochs", "30", "--finetune-epochs", "15"]
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        assert main(args + ["--output", str(out1)]) == 0
        assert main(args + ["--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        payload = json.loads(out1.read_text())
        assert len(payload["rows"]) == 4
        assert payload["evaluation"] is not None
        assert payload["config"]["pipeline"]["hyper"]["epochs"] == 30

    def test_sweep_csv_format(self, tmp_path):
        out = tmp_path / "rows.csv"
        assert main(["sweep", "--classes", "3", "--dim", "3", "--samples", "40",
                     "--r-values", "1.0", "--seeds", "0", "--epochs", "20",
                     "--finetune-epochs", "10", "--format", "csv",
                     "--output", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("task_id,c,r,seed,bound_total")
        assert len(lines) == 2


class TestHelp:
    @pytest.mark.parametrize(
        "command",
        ["wasserstein", "bound", "score", "baseline", "sweep", "consistency",
         "synth"],
    )
    def test_help_exits_zero_and_lists_defaults(self, command, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args([command, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "--output" in out

    def test_unknown_flag(self, capsys):
        assert main(["wasserstein", "--nonsense"]) == 1
