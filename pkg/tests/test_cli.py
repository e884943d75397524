import json

import pytest

from agrnn.cli import main

FAST = ["--max-iter", "80", "--grad-tol", "1e-3"]


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_then_select_pipeline(tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    code, _, _ = run(capsys, ["simulate", "butterfly", "--n", "200", "--seed", "7", "--out", str(csv_path)])
    assert code == 0
    assert csv_path.exists()

    code, out, _ = run(capsys, ["select", str(csv_path), "--target", "Y", *FAST])
    assert code == 0
    payload = json.loads(out)
    assert payload["schema_version"] == 1
    assert len(payload["sigma_opt"]) == 8
    assert len(payload["feature_names"]) == 8
    assert set(payload["selected"]) <= set(payload["feature_names"])
    assert payload["optim"]["termination_reason"] in (
        "gradient-tolerance", "loss-stagnation", "max-iterations", "line-search-failure",
    )


def test_select_output_is_byte_identical_across_runs(tmp_path, capsys):
    argv = ["select", "--generate", "friedman", "--n", "120", "--d", "5",
            "--seed", "3", *FAST]
    code_a, out_a, _ = run(capsys, argv)
    code_b, out_b, _ = run(capsys, argv)
    assert code_a == code_b == 0
    assert out_a == out_b


def test_simulate_writes_csv_to_stdout(capsys):
    code, out, _ = run(capsys, ["simulate", "friedman", "--n", "5", "--d", "5", "--seed", "1"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x1,x2,x3,x4,x5,y"
    assert len(lines) == 6


def test_select_missing_file_is_io_error(capsys):
    code, _, err = run(capsys, ["select", "no_such_file.csv", "--target", "y"])
    assert code == 4
    assert "error" in err.lower()


def test_unknown_subcommand_exits_2(capsys):
    assert main(["frobnicate"]) == 2


def test_unknown_flag_exits_2(capsys):
    assert main(["select", "--bogus"]) == 2


def test_missing_input_is_input_error(capsys):
    code, _, err = run(capsys, ["select", "--target", "y"])
    assert code == 2
    assert "either a CSV path or --generate" in err


def test_unusable_csv_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,y\n1,?,2\n")
    with pytest.warns(Warning):
        code, _, _ = run(capsys, ["select", str(path), "--target", "y"])
    assert code == 2


def test_importance_command(capsys):
    code, out, _ = run(
        capsys,
        ["importance", "--generate", "butterfly", "--n", "150", "--feature", "X1",
         "--repeats", "2", "--seed", "5", *FAST],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["feature"] == "X1"
    assert payload["repeats"] == 2
    assert len(payload["baseline"]["mean"]) == 8
    assert len(payload["shuffled"]["ci_half"]) == 8


def test_baseline_command_with_top_k(capsys):
    code, out, _ = run(
        capsys,
        ["baseline", "--generate", "friedman", "--n", "300", "--d", "8",
         "--noise-sd", "0", "--seed", "2", "--method", "ftest", "--k", "2"],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["method"] == "ftest"
    assert len(payload["scores"]) == 8
    assert len(payload["selected"]) == 2


def test_baseline_cfs_command(capsys):
    code, out, _ = run(
        capsys,
        ["baseline", "--generate", "friedman", "--n", "300", "--d", "6",
         "--noise-sd", "0", "--seed", "2", "--method", "cfs"],
    )
    assert code == 0
    assert "selected" in json.loads(out)


def test_benchmark_deterministic_output(capsys):
    argv = ["benchmark", "--generate", "friedman", "--n", "120", "--d", "5",
            "--seed", "1", "--methods", "ftest,rrelieff", "--repeats", "2",
            "--format", "json"]
    code_a, out_a, _ = run(capsys, argv)
    code_b, out_b, _ = run(capsys, argv)
    assert code_a == code_b == 0
    assert out_a == out_b
    payload = json.loads(out_a)
    assert set(payload["methods"]) == {"ftest", "rrelieff"}


def test_benchmark_text_format(capsys):
    code, out, _ = run(
        capsys,
        ["benchmark", "--generate", "friedman", "--n", "120", "--d", "5",
         "--seed", "1", "--methods", "ftest", "--repeats", "2"],
    )
    assert code == 0
    assert out.splitlines()[1].startswith("method")


def test_out_flag_writes_file(tmp_path, capsys):
    out_path = tmp_path / "result.json"
    code, stdout, _ = run(
        capsys,
        ["select", "--generate", "friedman", "--n", "100", "--d", "5",
         "--seed", "4", *FAST, "--out", str(out_path)],
    )
    assert code == 0
    assert stdout == ""
    assert json.loads(out_path.read_text())["schema_version"] == 1
