"""End-to-end runs of sumfree_cli.main with captured output."""

import csv
import io
import json

import pytest

from sumfree_cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv, "--format", "json", "--quiet")
    assert code == 0, err
    return json.loads(out)


def _column(report, key):
    return [f"{rec[key]:.6f}" if rec[key] is not None else None for rec in report["results"]]


class TestBoundsCommand:
    def test_discrete_table(self, capsys):
        report = _json(capsys, "bounds", "--k-min", "2", "--k-max", "6", "--l", "2", "--setting", "discrete")
        assert _column(report, "lower") == ["0.555556", "0.666667", "0.740741", "0.796639", "0.838889"]
        assert _column(report, "upper") == ["0.913875", "0.942361", "0.961192", "0.973763", "0.982208"]
        assert "variant_discrepancy" in report["metadata"]
        assert report["metadata"]["config"]["bisection_tolerance"] == 1e-12

    def test_continuous_table(self, capsys):
        report = _json(capsys, "bounds", "--k-min", "2", "--k-max", "6", "--setting", "continuous")
        assert _column(report, "upper") == ["0.727309", "0.840690", "0.899940", "0.935089", "0.957139"]

    def test_threefold_table(self, capsys):
        report = _json(capsys, "bounds", "--k-min", "2", "--k-max", "6", "--l", "3", "--setting", "continuous")
        assert _column(report, "lower") == ["0.750000", "0.859375", "0.916667", "0.949219", "0.968620"]
        assert _column(report, "upper") == ["0.828427", "0.913360", "0.956464", "0.978167", "0.989061"]
        assert report["metadata"]["lower_constant"] == "c~_{k,l}"

    def test_proof_variant(self, capsys):
        report = _json(capsys, "bounds", "--k-min", "2", "--k-max", "2", "--equation-variant", "proof")
        upper = report["results"][0]["upper"]
        assert upper == pytest.approx(0.787927, abs=1e-6)
        assert upper < 0.913875
        assert report["metadata"]["equation_variant"] == "proof"
        assert report["metadata"]["variant_discrepancy"]

    @pytest.mark.parametrize(
        "extra",
        [
            ("--setting", "continuous"),
            ("--l", "3"),
        ],
    )
    def test_proof_variant_ignored_outside_discrete_sumfree(self, capsys, extra):
        args = ["bounds", "--k-min", "2", "--k-max", "3", "--equation-variant", "proof", *extra]
        code, _, err = _run(capsys, *args)
        assert code == 0
        assert "only applies to the discrete l=2 upper bound" in err

        report = _json(capsys, *args)
        plain = _json(capsys, "bounds", "--k-min", "2", "--k-max", "3", *extra)
        assert report["metadata"]["equation_variant"] is None
        assert "variant_discrepancy" not in report["metadata"]
        assert report["results"] == plain["results"]

    def test_fourfold_emits_lower_only(self, capsys):
        code, out, err = _run(capsys, "bounds", "--k-min", "2", "--k-max", "3", "--l", "4", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["upper"] for r in rows] == ["", ""]
        assert all(r["lower"] for r in rows)
        assert "l >= 4" in err

    def test_text_and_csv_agree(self, capsys):
        _, text, _ = _run(capsys, "bounds", "--k-min", "2", "--k-max", "4", "--quiet")
        _, csv_text, _ = _run(capsys, "bounds", "--k-min", "2", "--k-max", "4", "--quiet", "--format", "csv")
        for rec in csv.DictReader(io.StringIO(csv_text)):
            assert rec["lower"] in text and rec["upper"] in text

    def test_json_round_trip(self, capsys):
        _, out, _ = _run(capsys, "bounds", "--k-min", "2", "--k-max", "3", "--format", "json", "--quiet")
        assert json.dumps(json.loads(out), indent=2, ensure_ascii=False) + "\n" == out

    def test_bad_range_is_rejected_without_output(self, capsys):
        code, out, err = _run(capsys, "bounds", "--k-min", "5", "--k-max", "2")
        assert code != 0
        assert out == ""
        assert "❌" in err

    def test_loose_tolerance_is_rejected(self, capsys):
        code, out, _ = _run(capsys, "bounds", "--k-min", "2", "--k-max", "2", "--tolerance", "0.01")
        assert code != 0 and out == ""


class TestOtherCommands:
    def test_sweep(self, capsys):
        report = _json(capsys, "sweep", "--k", "2", "--l", "2")
        rec = report["results"][0]
        assert rec["a_opt"] == pytest.approx(0.8, abs=1e-6)
        assert rec["volume"] == pytest.approx(0.6, abs=1e-6)
        assert rec["reference_volume"] == pytest.approx(0.555556, abs=1e-6)

    def test_sweep_k1_and_k3(self, capsys):
        report = _json(capsys, "sweep", "--k", "1", "--k-max", "3")
        by_k = {rec["k"]: rec for rec in report["results"]}
        assert by_k[1]["a_opt"] == pytest.approx(0.5, abs=1e-6)
        assert by_k[3]["volume"] >= 0.666667

    def test_sequence(self, capsys):
        report = _json(capsys, "sequence", "--terms", "8")
        values = [rec["a_i"] for rec in report["results"]]
        assert values[0] == 0.333333
        assert report["metadata"]["first_nonpositive_index"] == 7
        assert report["results"][7]["nonpositive"] is True

        report = _json(capsys, "sequence", "--terms", "2")
        assert report["results"][1]["a_i"] == pytest.approx(0.138672, abs=1e-5)
        assert report["metadata"]["first_nonpositive_index"] is None

    @pytest.mark.parametrize("n, k, size, density", [(2, 2, 3, 0.75), (4, 1, 2, 0.5), (1, 1, 1, 1.0)])
    def test_exact(self, capsys, n, k, size, density):
        report = _json(capsys, "exact", "--n", str(n), "--k", str(k))
        rec = report["results"][0]
        assert rec["max_size"] == size
        assert rec["density"] == density
        assert rec["exhaustive"] is True
        assert rec["best_stripe_count"] <= size

    def test_exact_parallel(self, capsys):
        seq = _json(capsys, "exact", "--n", "4", "--k", "2")["results"][0]
        par = _json(capsys, "exact", "--n", "4", "--k", "2", "--workers", "2")["results"][0]
        assert par["witness"] == seq["witness"]

    def test_exact_cap_message(self, capsys):
        code, out, err = _run(capsys, "exact", "--n", "5", "--k", "2")
        assert code != 0 and out == ""
        assert "24" in err

    @pytest.mark.parametrize("n, k, a, count", [(3, 2, 2, 3), (1, 2, 2, 1)])
    def test_stripe_count(self, capsys, n, k, a, count):
        report = _json(capsys, "stripe-count", "--n", str(n), "--k", str(k), "--a-numer", str(a))
        assert report["results"][0]["count"] == count

    def test_stripe_count_convergence(self, capsys):
        report = _json(capsys, "stripe-count", "--n", "120", "--k", "2", "--a-numer", "80")
        rec = report["results"][0]
        assert rec["volume"] == 0.555556
        assert abs(rec["count"] / 120**2 - 5 / 9) <= 4 / 120
        assert rec["normalized_error"] <= 4

    def test_stripe_count_rejects_nonpositive_offset(self, capsys):
        code, _, err = _run(capsys, "stripe-count", "--n", "3", "--k", "2", "--a-numer", "0")
        assert code != 0 and "❌" in err
        code, _, _ = _run(capsys, "stripe-count", "--n", "3", "--k", "2", "--a-numer", "1", "--a-denom", "0")
        assert code != 0


class TestVerifyCommand:
    def test_all_reference_values_pass(self, capsys):
        code, out, err = _run(capsys, "verify", "--format", "csv")
        assert code == 0, out
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 31
        assert {r["status"] for r in rows} == {"PASS"}
        assert "✅" in err

    def test_config_file(self, capsys, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"workers": 2}), encoding="utf-8")
        report = _json(capsys, "bounds", "--k-min", "2", "--k-max", "3", "--config", str(path))
        assert report["metadata"]["config"]["workers"] == 2
