import csv
import json

import numpy as np
import pytest

from gausset.cli import main


def write_worked_csv(path):
    path.write_text("x0,label\n1,a\n3,a\n2,b\n")


def run(argv):
    return main([str(a) for a in argv])


class TestFit:
    def test_worked_example_model_file(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path, "--r", "1.0"]) == 0
        doc = json.loads(model_path.read_text())
        assert doc["a_star"] == 3.0
        assert doc["class_names"] == ["a", "b"]
        assert doc["b_star"] == [[pytest.approx(20.0 / 3.0, rel=1e-15)]]
        assert doc["c_star"] == [pytest.approx(1.0 / 3.0), pytest.approx(0.5)]
        out = capsys.readouterr().out
        assert "N=1 K=2 T=3" in out

    def test_empty_dataset_with_proper_prior_returns_prior(self, tmp_path):
        data = tmp_path / "empty.csv"
        data.write_text("x0,x1,label\n")
        model_path = tmp_path / "model.json"
        code = run(["fit", "--data", data, "--out", model_path,
                    "--label-col", "label", "--r", "2.0", "--a", "4.0",
                    "--b", "eps-identity", "--eps", "1.0",
                    "--declare-class", "a", "--declare-class", "b"])
        assert code == 0
        doc = json.loads(model_path.read_text())
        assert doc["a_star"] == 4.0
        assert doc["b_star"] == [[1.0, 0.0], [0.0, 1.0]]
        assert doc["mu_star"] == [[0.0, 0.0], [0.0, 0.0]]
        assert doc["c_star"] == [0.5, 0.5]

    def test_declared_class_gets_prior_column(self, tmp_path):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path, "--r", "4.0",
                    "--declare-class", "unknown"]) == 0
        doc = json.loads(model_path.read_text())
        assert doc["class_names"] == ["a", "b", "unknown"]
        assert doc["mu_star"][2] == [0.0]
        assert doc["c_star"][2] == 0.25  # 1/r

    def test_missing_file_is_input_error(self, tmp_path):
        assert run(["fit", "--data", tmp_path / "nope.csv",
                    "--out", tmp_path / "m.json"]) == 2

    def test_bad_cell_is_input_error(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("x0,label\noops,a\n")
        assert run(["fit", "--data", data, "--out", tmp_path / "m.json"]) == 2

    def test_degenerate_fit_exits_3_without_nan(self, tmp_path, capsys):
        # Two collinear 2-D points leave a rank-one scatter for any r.
        data = tmp_path / "data.csv"
        data.write_text("x0,x1,label\n1,1,a\n2,2,a\n")
        code = run(["fit", "--data", data, "--out", tmp_path / "m.json"])
        captured = capsys.readouterr()
        assert code == 3
        assert "degenera" in captured.err.lower()
        assert "nan" not in (captured.out + captured.err).lower()
        assert not (tmp_path / "m.json").exists()


class TestClassify:
    def fit_worked(self, tmp_path):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path, "--r", "1.0"]) == 0
        return model_path

    def test_equidistant_point_splits_evenly(self, tmp_path):
        # Symmetric two-class model scored at the midpoint.
        data = tmp_path / "train.csv"
        data.write_text("x0,label\n-1,a\n-3,a\n1,b\n3,b\n")
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path, "--r", "0.5"]) == 0
        queries = tmp_path / "queries.csv"
        queries.write_text("x0\n0.0\n")
        scored = tmp_path / "scored.csv"
        assert run(["classify", "--model", model_path, "--data", queries,
                    "--out", scored]) == 0
        with open(scored) as handle:
            row = next(csv.DictReader(handle))
        assert float(row["posterior_a"]) == pytest.approx(0.5, abs=1e-12)
        assert float(row["posterior_b"]) == pytest.approx(0.5, abs=1e-12)

    def test_posterior_rows_sum_to_one(self, tmp_path):
        model_path = self.fit_worked(tmp_path)
        queries = tmp_path / "queries.csv"
        queries.write_text("x0\n" + "\n".join(str(v) for v in
                                              np.linspace(-5, 5, 20)) + "\n")
        scored = tmp_path / "scored.csv"
        assert run(["classify", "--model", model_path, "--data", queries,
                    "--out", scored]) == 0
        with open(scored) as handle:
            for row in csv.DictReader(handle):
                total = float(row["posterior_a"]) + float(row["posterior_b"])
                assert total == pytest.approx(1.0, abs=1e-12)
                assert row["action"] in ("a", "b")

    def test_training_accuracy_beats_chance_on_separated_data(self, tmp_path):
        synth = tmp_path / "synth.csv"
        assert run(["gen-synth", "--out", synth, "--dim", "2", "--classes", "3",
                    "--per-class", "30", "--r-true", "0.01", "--seed", "5"]) == 0
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", synth, "--out", model_path, "--r", "1.0"]) == 0
        features = tmp_path / "features.csv"
        labels = []
        with open(synth) as handle:
            rows = list(csv.DictReader(handle))
        with open(features, "w") as handle:
            handle.write("x0,x1\n")
            for row in rows:
                handle.write(f"{row['x0']},{row['x1']}\n")
                labels.append(row["label"])
        scored = tmp_path / "scored.csv"
        assert run(["classify", "--model", model_path, "--data", features,
                    "--out", scored]) == 0
        with open(scored) as handle:
            decisions = [row["action"] for row in csv.DictReader(handle)]
        accuracy = np.mean([d == t for d, t in zip(decisions, labels)])
        assert accuracy > 0.6  # chance is 1/3

    def test_dim_mismatch_exits_2(self, tmp_path):
        model_path = self.fit_worked(tmp_path)
        queries = tmp_path / "queries.csv"
        queries.write_text("x0,x1\n1,2\n")
        assert run(["classify", "--model", model_path, "--data", queries,
                    "--out", tmp_path / "s.csv"]) == 2

    def test_explicit_class_prior(self, tmp_path):
        model_path = self.fit_worked(tmp_path)
        queries = tmp_path / "queries.csv"
        queries.write_text("x0\n2.0\n")
        scored = tmp_path / "scored.csv"
        assert run(["classify", "--model", model_path, "--data", queries,
                    "--out", scored, "--prior", "1,0"]) == 0
        with open(scored) as handle:
            row = next(csv.DictReader(handle))
        assert float(row["posterior_a"]) == 1.0
        assert row["action"] == "a"


class TestTuneR:
    def test_degenerate_data_exits_3(self, tmp_path):
        data = tmp_path / "tiny.csv"
        data.write_text("x0,x1,label\n1,2,a\n")
        assert run(["tune-r", "--data", data]) == 3

    def test_reports_finite_r_and_matching_grid_mode(self, tmp_path, capsys):
        synth = tmp_path / "synth.csv"
        assert run(["gen-synth", "--out", synth, "--dim", "2", "--classes", "6",
                    "--per-class", "8", "--r-true", "1.0", "--seed", "11"]) == 0
        curve_path = tmp_path / "curve.csv"
        code = run(["tune-r", "--data", synth, "--r-min", "1e-3",
                    "--r-max", "1e3", "--grid", "400", "--out", curve_path])
        assert code == 0
        out = capsys.readouterr().out
        tuned = float(out.split("tuned r = ")[1].split()[0])
        mode = float(out.split("grid mode r = ")[1].split()[0])
        cell = np.log(1e6) / 399
        assert abs(np.log(tuned) - np.log(mode)) <= cell
        with open(curve_path) as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 400

    def test_worked_dataset_reports_boundary_or_interior(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        assert run(["tune-r", "--data", data, "--r-min", "1e-2",
                    "--r-max", "1e2"]) == 0
        tuned = float(capsys.readouterr().out.split("tuned r = ")[1].split()[0])
        assert 1e-2 <= tuned <= 1e2


class TestEvidenceCurveCommand:
    def test_writes_grid(self, tmp_path):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        curve_path = tmp_path / "curve.csv"
        assert run(["evidence-curve", "--data", data, "--r-min", "0.1",
                    "--r-max", "10", "--grid", "25", "--out", curve_path]) == 0
        with open(curve_path) as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 25
        assert all(row["log_evidence"] for row in rows)


class TestVerify:
    def test_default_run_passes(self, tmp_path, capsys):
        assert run(["verify", "--samples", "20000"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out
        report = json.loads(out.strip().splitlines()[-1])
        assert report["all_pass"]
        for probe in report["probes"]:
            assert set(probe) == {"probe", "closed_form", "mc_estimate",
                                  "std_error", "pass"}

    def test_corrupted_model_exits_1(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path]) == 0
        doc = json.loads(model_path.read_text())
        doc["b_star"] = [[-v for v in row] for row in doc["b_star"]]
        model_path.write_text(json.dumps(doc))
        assert run(["verify", "--model", model_path, "--samples", "500"]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_intact_model_passes(self, tmp_path):
        data = tmp_path / "data.csv"
        write_worked_csv(data)
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path]) == 0
        assert run(["verify", "--model", model_path, "--samples", "20000"]) == 0

    def test_tiny_sample_count_reports_wider_error(self, tmp_path, capsys):
        assert run(["verify", "--samples", "100", "--seed", "20260808"]) in (0, 1)
        small = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert run(["verify", "--samples", "20000", "--seed", "20260808"]) == 0
        large = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        se_small = [p["std_error"] for p in small["probes"]
                    if p["probe"].startswith("mc-predictive")]
        se_large = [p["std_error"] for p in large["probes"]
                    if p["probe"].startswith("mc-predictive")]
        assert all(s > l for s, l in zip(se_small, se_large))


class TestGenSynth:
    def test_empty_class_in_sidecar_only(self, tmp_path):
        out = tmp_path / "synth.csv"
        assert run(["gen-synth", "--out", out, "--dim", "2", "--classes", "3",
                    "--per-class", "4,0,4", "--seed", "1"]) == 0
        truth = json.loads((tmp_path / "synth.csv.truth.json").read_text())
        assert truth["counts"]["class_1"] == 0
        assert len(truth["means"]) == 3
        with open(out) as handle:
            labels = {row["label"] for row in csv.DictReader(handle)}
        assert labels == {"class_0", "class_2"}

    def test_sample_mean_near_truth(self, tmp_path):
        out = tmp_path / "synth.csv"
        assert run(["gen-synth", "--out", out, "--dim", "1", "--classes", "1",
                    "--per-class", "400", "--seed", "2"]) == 0
        truth = json.loads((tmp_path / "synth.csv.truth.json").read_text())
        with open(out) as handle:
            values = [float(row["x0"]) for row in csv.DictReader(handle)]
        assert abs(np.mean(values) - truth["means"]["class_0"][0]) <= 4 / np.sqrt(400)

    def test_deterministic_given_seed(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            assert run(["gen-synth", "--out", out, "--dim", "2", "--classes", "2",
                        "--per-class", "5", "--seed", "33"]) == 0
        assert out1.read_text() == out2.read_text()

    def test_bad_count_spec(self, tmp_path):
        assert run(["gen-synth", "--out", tmp_path / "x.csv", "--dim", "2",
                    "--classes", "3", "--per-class", "1,2", "--seed", "0"]) == 2


class TestModelRoundTripThroughCli:
    def test_fit_save_load_classify_is_bit_identical(self, tmp_path):
        from gausset import (ClassPrior, PriorHyper, accumulate, build_model,
                             load_csv, load_model, posterior, score_batch)
        data = tmp_path / "train.csv"
        rng = np.random.default_rng(70)
        with open(data, "w") as handle:
            handle.write("x0,x1,label\n")
            for _ in range(50):
                k = rng.integers(0, 2)
                x = rng.normal(2.0 * k, 1.0, size=2)
                handle.write(f"{float(x[0])!r},{float(x[1])!r},c{k}\n")
        model_path = tmp_path / "model.json"
        assert run(["fit", "--data", data, "--out", model_path, "--r", "0.7"]) == 0

        ds = load_csv(data)
        post = posterior(accumulate(ds), PriorHyper.noninformative(0.7))
        in_memory = build_model(post, class_names=ds.class_names)
        loaded, _ = load_model(model_path)

        queries = rng.normal(1.0, 2.0, size=(40, 2))
        prior = ClassPrior.uniform(2)
        for mem, disk in zip(score_batch(in_memory, queries, prior),
                             score_batch(loaded, queries, prior)):
            np.testing.assert_array_equal(mem, disk)
