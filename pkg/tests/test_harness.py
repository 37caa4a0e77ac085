import json
import math

import numpy as np
import pytest

from qteleport.channel import ChannelSpec
from qteleport.cli import main
from qteleport.harness import (
    ConfigError,
    ExperimentConfig,
    channel_from_obj,
    message_from_obj,
    run_exact,
    run_sampled,
    run_verify,
)
from qteleport.netlist import netlist_from_text, netlist_matrix, recovery_matrix
from qteleport.report import dumps_canonical, format_float


# -- config and input validation ------------------------------------------

def test_config_rejects_bad_fields():
    with pytest.raises(ConfigError, match="n:"):
        ExperimentConfig(n=5)
    with pytest.raises(ConfigError, match="mode:"):
        ExperimentConfig(n=2, mode="guess")
    with pytest.raises(ConfigError, match="shots:"):
        ExperimentConfig(n=2, mode="sample", shots=0)
    with pytest.raises(ConfigError, match="un_path:"):
        ExperimentConfig(n=3, un_path="cnot")
    with pytest.raises(ConfigError, match="un_path:"):
        ExperimentConfig(n=2, un_path="tensor-network")


def test_channel_from_obj_cites_field_paths():
    with pytest.raises(ConfigError, match="channel.y\\[1\\]"):
        channel_from_obj({"n": 1, "y": [0.6, "x"]})
    with pytest.raises(ConfigError, match="channel.n"):
        channel_from_obj({"n": "two", "y": [1.0]})
    with pytest.raises(ConfigError, match="channel"):
        channel_from_obj([1, 2])
    ch = channel_from_obj({"n": 1, "y": [0.6, 0.8]})
    assert isinstance(ch, ChannelSpec)


def test_message_from_obj_cites_field_paths():
    with pytest.raises(ConfigError, match="message.x_im"):
        message_from_obj({"n": 1, "x_re": [1.0, 0.0], "x_im": [0.0]})
    with pytest.raises(ConfigError, match="message.x_re\\[0\\]"):
        message_from_obj({"n": 1, "x_re": [None, 0.0], "x_im": [0.0, 0.0]})
    msg = message_from_obj({"n": 1, "x_re": [1.0, 0.0], "x_im": [0.0, 0.0]})
    assert msg.n == 1


# -- canonical serialization ------------------------------------------------

def test_format_float_17_digits():
    assert format_float(0.72) == "0.71999999999999997"
    assert format_float(1.0) == "1"
    with pytest.raises(ValueError):
        format_float(float("nan"))


def test_dumps_canonical_stable():
    obj = {"b": [1, 2.5, True, None], "a": "x"}
    assert dumps_canonical(obj) == '{"b":[1,2.5,true,null],"a":"x"}'


# -- run_exact ---------------------------------------------------------

def test_run_exact_maximal_channel():
    cfg = ExperimentConfig(n=2, channel=ChannelSpec(2, (0.5, 0.5, 0.5, 0.5)), seed=1)
    rep = run_exact(cfg)
    assert rep.ok
    p = rep.payload
    assert p["success_probability_observed"] == pytest.approx(1.0, abs=1e-12)
    assert p["mean_success_fidelity"] == pytest.approx(1.0, abs=1e-12)
    assert len(p["branches"]) == 32
    assert all(p["checks"].values())


def test_run_exact_n3_y0_quarter():
    y0 = 0.25
    rest = math.sqrt((1 - y0 * y0) / 7)
    cfg = ExperimentConfig(n=3, channel=ChannelSpec(3, (y0,) + (rest,) * 7), seed=3)
    rep = run_exact(cfg)
    assert rep.payload["success_probability_observed"] == pytest.approx(0.5, abs=1e-10)
    assert rep.payload["success_probability_theoretical"] == pytest.approx(0.5, abs=1e-12)


def test_run_exact_cnot_path_matches_matrix_path():
    base = dict(n=2, channel="random", message="random", seed=11)
    rep_m = run_exact(ExperimentConfig(un_path="matrix", **base))
    rep_c = run_exact(ExperimentConfig(un_path="cnot", **base))
    bm, bc = rep_m.payload["branches"], rep_c.payload["branches"]
    assert len(bm) == len(bc) == 32
    for a, b in zip(bm, bc):
        assert (a["m"], a["nbits"], a["ancilla"]) == (b["m"], b["nbits"], b["ancilla"])
        assert a["probability"] == pytest.approx(b["probability"], abs=1e-10)
        assert a["fidelity"] == pytest.approx(b["fidelity"], abs=1e-10)


def test_run_exact_probabilities_sum_to_one():
    rep = run_exact(ExperimentConfig(n=2, seed=5))
    assert sum(b["probability"] for b in rep.payload["branches"]) == pytest.approx(
        1.0, abs=1e-10
    )


def test_run_exact_n4_within_budget():
    rep = run_exact(ExperimentConfig(n=4, seed=6))
    assert rep.ok
    assert len(rep.payload["branches"]) == 512
    assert rep.wall_time_s < 10.0


# -- run_sampled ----------------------------------------------------------

def test_run_sampled_single_shot_maximal():
    cfg = ExperimentConfig(
        n=1,
        channel=ChannelSpec(1, (1 / math.sqrt(2), 1 / math.sqrt(2))),
        mode="sample",
        shots=1,
        seed=2,
    )
    rep = run_sampled(cfg)
    tally = rep.payload["shot_tally"]
    assert tally["successes"] == 1
    assert rep.payload["mean_success_fidelity"] == pytest.approx(1.0, abs=1e-10)


def test_run_sampled_byte_identical_replay():
    cfg = dict(
        n=1, channel=ChannelSpec(1, (0.6, 0.8)), mode="sample", shots=3000, seed=77
    )
    a = run_sampled(ExperimentConfig(**cfg)).to_json()
    b = run_sampled(ExperimentConfig(**cfg)).to_json()
    assert a == b


# -- run_verify -----------------------------------------------------------

def test_run_verify_all_pass():
    rep = run_verify(max_n=2, trials=5, seed=4)
    assert rep.ok
    results = rep.payload["checks"]["results"]
    assert rep.payload["checks"]["all_passed"]
    assert {r["name"] for r in results} >= {
        "recovery-netlist-matches-matrix",
        "recovery-structure",
        "cnot-expansion",
        "correction-rule",
        "deferred-measurement-equivalence",
    }
    for r in results:
        assert r["passed"], r


# -- CLI ------------------------------------------------------------------

def _write_channel(tmp_path, name="ch.json", n=1, y=(0.6, 0.8)):
    path = tmp_path / name
    path.write_text(json.dumps({"n": n, "y": list(y)}))
    return str(path)


def test_cli_teleport_exact_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(
        [
            "teleport",
            "--n",
            "1",
            "--channel",
            _write_channel(tmp_path),
            "--mode",
            "exact",
            "--seed",
            "5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema"] == "qteleport-report@1"
    assert payload["success_probability_theoretical"] == pytest.approx(0.72)
    err = capsys.readouterr().err
    assert "wall_time_s=" in err


def test_cli_reports_are_byte_identical(tmp_path):
    args = [
        "teleport", "--n", "2", "--mode", "sample", "--shots", "500",
        "--seed", "99", "--channel", "random", "--message", "random",
    ]
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_csv_export(tmp_path):
    out = tmp_path / "branches.csv"
    code = main(
        ["teleport", "--n", "1", "--channel", _write_channel(tmp_path), "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "m,nbits,ancilla,probability,fidelity"
    assert len(lines) == 1 + 8
    total = sum(float(l.split(",")[3]) for l in lines[1:])
    assert total == pytest.approx(1.0, abs=1e-10)


def test_cli_csv_rejected_in_sample_mode(tmp_path, capsys):
    code = main(
        ["teleport", "--n", "1", "--mode", "sample", "--out", str(tmp_path / "x.csv")]
    )
    assert code == 2
    assert "CSV" in capsys.readouterr().err


def test_cli_bad_channel_file_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "y": [0.8, 0.6]}')  # min not first
    code = main(["teleport", "--n", "1", "--channel", str(bad)])
    assert code == 2
    assert "relabel" in capsys.readouterr().err


def test_cli_channel_n_mismatch(tmp_path, capsys):
    code = main(["teleport", "--n", "2", "--channel", _write_channel(tmp_path)])
    assert code == 2
    assert "channel.n" in capsys.readouterr().err


def test_cli_verify_exit_codes(tmp_path, capsys):
    code = main(["verify", "--n", "1", "--seed", "0", "--shots", "3"])
    assert code == 0
    err = capsys.readouterr().err
    assert "PASS" in err


def test_cli_synthesize_roundtrip(tmp_path, capsys):
    ch_path = _write_channel(tmp_path, n=2, y=(0.3, 0.3, 0.3, math.sqrt(0.73)))
    out = tmp_path / "un.txt"
    code = main(
        ["synthesize", "--n", "2", "--channel", ch_path, "--un-path", "netlist",
         "--out", str(out)]
    )
    assert code == 0
    nl = netlist_from_text(out.read_text())
    ch = ChannelSpec(2, (0.3, 0.3, 0.3, math.sqrt(0.73)))
    assert np.max(np.abs(netlist_matrix(nl) - recovery_matrix(ch))) < 1e-12


def test_cli_synthesize_cnot_form(tmp_path):
    ch_path = _write_channel(tmp_path, n=2, y=(0.3, 0.3, 0.3, math.sqrt(0.73)))
    out = tmp_path / "un_cnot.txt"
    assert main(
        ["synthesize", "--n", "2", "--channel", ch_path, "--un-path", "cnot",
         "--out", str(out)]
    ) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "qubits q5 q6 qa"
    assert "CU" not in text  # fully expanded to CNOT + singles + X lines
    nl = netlist_from_text(text)
    ch = ChannelSpec(2, (0.3, 0.3, 0.3, math.sqrt(0.73)))
    assert np.max(np.abs(netlist_matrix(nl) - recovery_matrix(ch))) < 1e-10


def test_cli_synthesize_matrix_path_rejected(tmp_path, capsys):
    code = main(["synthesize", "--n", "2", "--channel", "random", "--un-path", "matrix"])
    assert code == 2
    assert "netlist or cnot" in capsys.readouterr().err
