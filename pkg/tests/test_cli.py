"""命令行入口与退出码"""
import io
import json
import math

import pandas as pd
import pytest

from caplab.cli import EXIT_INVALID, EXIT_OK, EXIT_UNCONVERGED, build_parser, main

from conftest import LN2, binary_entropy


def read_csv(text):
    return pd.read_csv(io.StringIO(text), comment="#", keep_default_na=False,
                       na_values=[""])


def values(text, column="value_nats"):
    frame = read_csv(text)
    return dict(zip(frame["name"], frame[column]))


def test_parser_lists_commands():
    parser = build_parser()
    args = parser.parse_args(["cutoff", "bsc:p=0.1", "--rho", "1"])
    assert (args.command, args.channel, args.rho) == ("cutoff", "bsc:p=0.1", 1.0)


def test_no_command_exits_invalid(capsys):
    assert main([]) == EXIT_INVALID


def test_capacity_with_header(capsys):
    assert main(["capacity", "bsc:p=0.1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# caplab capacity ")
    expected = LN2 - binary_entropy(0.1)
    assert values(out)["shannon_c"] == pytest.approx(expected, abs=1e-9)


def test_no_header(capsys):
    assert main(["cutoff", "noiseless:k=3", "--rho", "2", "--no-header"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("name,kind,value_nats")
    assert values(out)["cutoff_rate"] == pytest.approx(math.log(3), abs=1e-9)


def test_bits_converts_rates_only(capsys):
    assert main(["pi0", "noiseless:k=2", "--bits", "--no-header"]) == EXIT_OK
    result = values(capsys.readouterr().out, column="value_bits")
    assert result["neg_log_pi0"] == pytest.approx(1.0, abs=1e-9)
    assert result["pi0"] == pytest.approx(0.5, abs=1e-9)


def test_text_format(capsys):
    argv = ["e0", "bsc:p=0.1", "--rho", "1", "--p", "0.5,0.5", "--format", "text"]
    assert main(argv) == EXIT_OK
    out = capsys.readouterr().out
    assert "gallager_e0" in out


def test_report_fig1(capsys):
    assert main(["report", "fig1:eps=0.01", "--rho", "1", "--no-header"]) == EXIT_OK
    result = values(capsys.readouterr().out)
    assert LN2 < result["calf_exact"] < math.log(3)
    assert result["calf_upper"] == pytest.approx(result["calf_exact"])
    assert result["czero_positive"] == 1.0


def test_report_requires_rho(capsys):
    assert main(["report", "fig1"]) == EXIT_INVALID


def test_reduce_to_file(tmp_path):
    target = tmp_path / "out" / "reduced.json"
    assert main(["reduce", "fig1:eps=0.1", "-o", str(target)]) == EXIT_OK
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert len(doc["matrix"]) == 3
    assert all(len(row) == 2 for row in doc["matrix"])
    assert doc["matrix"][2] == [0, 1.0]


def test_channel_file_input(tmp_path, capsys):
    path = tmp_path / "channel.json"
    path.write_text(json.dumps({"matrix": [[1, 0], [0, 1]]}), encoding="utf-8")
    assert main(["capacity", str(path), "--no-header"]) == EXIT_OK
    assert values(capsys.readouterr().out)["shannon_c"] == pytest.approx(LN2, abs=1e-9)


@pytest.mark.parametrize("argv", [
    ["capacity", "nosuch"],
    ["capacity", "missing.json"],
    ["capacity", "bsc:x=1"],
    ["capacity", "bsc:p=abc"],
    ["cutoff", "bsc:p=0.1"],
    ["cutoff", "bsc:p=0.1", "--rho", "-1"],
    ["nletter", "noiseless:k=3", "--rho", "1", "--n", "3"],
])
def test_invalid_input_exits_2(argv, capsys):
    assert main(argv) == EXIT_INVALID


def test_invalid_channel_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"matrix": [[0.5, 0.6]]}), encoding="utf-8")
    assert main(["capacity", str(path)]) == EXIT_INVALID


def test_binomial(capsys):
    argv = ["binomial", "--n", "1", "--alpha", str(math.log(4)),
            "--beta", str(math.log(2)), "--rho", "1", "--no-header", "--bits"]
    assert main(argv) == EXIT_OK
    result = values(capsys.readouterr().out, column="value_bits")
    assert result["binomial_exact_shifted"] == pytest.approx(3.0)
    assert result["binomial_bound_shifted"] == pytest.approx(2 * math.exp(math.e - 1))


def test_binomial_large_n_skips_exact(capsys):
    argv = ["binomial", "--n", "1000", "--alpha", "1", "--beta", "2", "--rho", "1",
            "--no-header"]
    assert main(argv) == EXIT_OK
    result = values(capsys.readouterr().out, column="value_nats")
    assert result["binomial_bound_shifted"] == pytest.approx(1.0)
    assert "binomial_exact_shifted" not in result


def test_simulate_moments(tmp_path, capsys):
    code = tmp_path / "code.txt"
    code.write_text("n 1\ninputs 2\n0\n1\n", encoding="utf-8")
    argv = ["simulate", "bec:delta=0.5", "--scheme", "moments", "--code", str(code),
            "--rho", "1", "--no-header"]
    assert main(argv) == EXIT_OK
    frame = read_csv(capsys.readouterr().out).set_index("tag")
    assert frame.loc["list_moment_exact", "value_nats"] == pytest.approx(1.5)


def test_simulate_thm4(capsys):
    argv = ["simulate", "fig1:eps=0.1", "--rho", "1", "--rate", "0.3", "--n", "4",
            "--trials", "500", "--ell", "2", "--no-header"]
    assert main(argv) == EXIT_OK
    frame = read_csv(capsys.readouterr().out)
    assert list(frame.columns) == ["n", "R_eff", "rho", "moment", "se", "E1_freq",
                                   "E2_freq", "E3_freq", "seed"]
    assert frame.loc[0, "E2_freq"] == 0.0


def test_config_file(tmp_path, capsys):
    config = tmp_path / "caplab.yaml"
    config.write_text("output:\n  header: false\n  float_format: '%.3f'\n",
                      encoding="utf-8")
    assert main(["--config", str(config), "pi0", "noiseless:k=2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("name,")
    assert "0.500" in out


def test_missing_config_file(capsys):
    assert main(["--config", "/nonexistent/caplab.yaml", "pi0", "bsc"]) == EXIT_INVALID


def test_simulate_output_independent_of_threads(tmp_path, monkeypatch, capsys):
    config = tmp_path / "caplab.yaml"
    config.write_text("runtime:\n  mc_block_size: 64\n", encoding="utf-8")
    argv = ["--config", str(config), "simulate", "fig1:eps=0.1", "--rho", "1",
            "--rate", "0.3", "--n", "4", "--trials", "1000", "--ell", "2",
            "--seed", "11", "--no-header"]
    outputs = []
    for threads in ("1", "2", "4"):
        monkeypatch.setenv("CAPLAB_THREADS", threads)
        assert main(argv) == EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1] == outputs[2]
    assert outputs[0]


def test_unconverged_solver_exits_3(tmp_path, capsys):
    config = tmp_path / "caplab.yaml"
    config.write_text("solver:\n  ba_max_iter: 1\n", encoding="utf-8")
    argv = ["--config", str(config), "capacity", "z:q=0.1", "--tol", "1e-16",
            "--no-header"]
    assert main(argv) == EXIT_UNCONVERGED
    assert "shannon_c" in capsys.readouterr().out


def test_compare_random(capsys):
    argv = ["compare", "random", "--seeds", "1", "--rho", "1", "--p-count", "1",
            "--no-header"]
    assert main(argv) == EXIT_OK
    frame = read_csv(capsys.readouterr().out)
    assert list(frame.columns) == ["seed", "rho", "rows", "violations", "messages"]
    assert frame.loc[0, "violations"] == 0
