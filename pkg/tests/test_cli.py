import json

import numpy as np
import pytest

from detbal.cli import main
from detbal.factories import gen_example
from detbal.serialize import (
    channel_spec_dict,
    classical_spec_dict,
    decode_matrix,
    dump_payload,
    encode_matrix,
    load_payload,
    parse_channel_spec,
    parse_classical_spec,
)
from detbal.errors import SpecFileError
from detbal.factories import gad_kraus
from conftest import random_channel


def write_example(tmp_path, name, params=None):
    path = tmp_path / f"{name}.json"
    dump_payload(gen_example(name, params), str(path))
    return str(path)


def test_matrix_encoding_round_trip():
    A = np.array([[1.0 + 2.0j, -0.5], [0.0, 0.25 - 1e-17j]])
    B = decode_matrix(encode_matrix(A))
    assert np.array_equal(A, B)


def test_decode_matrix_rejects_malformed():
    with pytest.raises(SpecFileError):
        decode_matrix([[1.0, 2.0], [3.0, 4.0]])  # bare reals, no pairs
    with pytest.raises(SpecFileError):
        decode_matrix(None)
    with pytest.raises(SpecFileError):
        decode_matrix([[["x", 0]]])


def test_channel_spec_round_trip(tmp_path):
    K = random_channel(2, 3, 60)
    rho = np.eye(2, dtype=complex) / 2
    payload = channel_spec_dict(K, rho0=rho, Q=np.eye(3), Q_normalization="raw")
    path = tmp_path / "chan.json"
    dump_payload(payload, str(path))
    spec = parse_channel_spec(load_payload(str(path)))
    assert spec.d == 2
    for a, b in zip(spec.kraus.ops, K.ops):
        assert np.array_equal(a, b)  # json float round trip is exact
    assert np.array_equal(spec.rho0, rho)
    assert spec.Q_normalization == "raw"
    assert spec.options["max_level"] == 2


def test_parse_channel_spec_errors():
    K = gad_kraus(0.75, 0.5)
    good = channel_spec_dict(K)
    bad = dict(good)
    bad["format"] = "detbal-channel/9"
    with pytest.raises(SpecFileError):
        parse_channel_spec(bad)
    bad = dict(good)
    bad["d"] = 3
    with pytest.raises(SpecFileError):
        parse_channel_spec(bad)
    bad = dict(good)
    bad["rho0"] = encode_matrix(np.eye(3))
    with pytest.raises(SpecFileError):
        parse_channel_spec(bad)
    bad = dict(good)
    bad["kraus"] = []
    with pytest.raises(SpecFileError):
        parse_channel_spec(bad)
    with pytest.raises(SpecFileError):
        parse_channel_spec([1, 2, 3])


def test_classical_spec_round_trip(tmp_path):
    M = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    path = tmp_path / "chain.json"
    dump_payload(classical_spec_dict(M, np.ones(3) / 3), str(path))
    M2, pi2 = parse_classical_spec(load_payload(str(path)))
    assert np.array_equal(M, M2)
    assert np.array_equal(pi2, np.ones(3) / 3)


def test_analyze_commuting_db(tmp_path, capsys):
    path = write_example(tmp_path, "commuting_db")
    assert main(["analyze", path]) == 0
    out = capsys.readouterr().out
    assert "detailed balance verdict: true" in out


def test_analyze_gad_fails_with_sphere_reason(tmp_path, capsys):
    path = write_example(tmp_path, "gad")
    assert main(["analyze", path, "--json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] is False
    assert data["reason"] == "q_sphere"
    sphere = [c for c in data["checks"] if c["name"] == "q_sphere" and c["level"] == 1]
    assert abs(sphere[0]["residual"] - 0.5) < 1e-9


def test_analyze_missing_and_corrupt_files(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["analyze", str(bad)]) == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"format": "something-else"}))
    assert main(["analyze", str(wrong)]) == 2
    capsys.readouterr()


def test_analyze_rejects_operation(tmp_path, capsys):
    payload = channel_spec_dict([0.5 * np.eye(2, dtype=complex)])
    path = tmp_path / "op.json"
    dump_payload(payload, str(path))
    assert main(["analyze", str(path)]) == 2
    assert "channel" in capsys.readouterr().err


def test_reverse_crooks_mode(tmp_path, capsys):
    path = write_example(tmp_path, "gad")
    out_path = str(tmp_path / "rev.json")
    assert main(["reverse", path, "--mode", "crooks", "--depth", "2",
                 "-o", out_path, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["classification"] == "channel"
    assert data["crooks_residual"] < 1e-10
    rev = parse_channel_spec(load_payload(out_path))
    assert rev.kraus.n == 4
    assert rev.kraus.unital_residual < 1e-10


def test_reverse_qsphere_mode_warns(tmp_path, capsys):
    path = write_example(tmp_path, "gad")
    assert main(["reverse", path, "--mode", "qsphere"]) == 0
    captured = capsys.readouterr()
    assert "operation, not a channel" in captured.err
    assert (tmp_path / "gad.reversed.json").exists()


def test_reverse_default_output_path(tmp_path, capsys):
    path = write_example(tmp_path, "commuting_db")
    assert main(["reverse", path, "--mode", "qsphere", "--depth", "3"]) == 0
    out = capsys.readouterr().out
    assert "crooks check at depth 3" in out
    rev = parse_channel_spec(load_payload(str(tmp_path / "commuting_db.reversed.json")))
    assert rev.kraus.unital_residual < 1e-10


def test_stinespring_command(tmp_path, capsys):
    path = write_example(tmp_path, "commuting_db")
    assert main(["stinespring", path, "--max-level", "3", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] is True
    assert data["ranks"]["1"] == 2 or data["ranks"][1] == 2
    assert all(v < 1e-9 for v in data["inclusion_residuals"].values())
    assert isinstance(data["power_dilation_residuals"]["2"], str)  # hypothesis failure


def test_qgroup_check_suq2(tmp_path, capsys):
    path = write_example(tmp_path, "suq2")
    assert main(["qgroup-check", path, "--relation", "bu", "--json"]) == 1
    data = json.loads(capsys.readouterr().out)
    by_name = {c["name"]: c for c in data["checks"]}
    assert by_name["self_conjugacy"]["passed"] is True
    assert by_name["W_unitary_left"]["defect_rank"] == 1
    assert by_name["W_unitary_left"]["off_defect_residual"] < 1e-10
    assert abs(by_name["W_unitary_left"]["residual"] - (1 - 0.5 ** 12)) < 1e-10


def test_qgroup_check_au_with_F_file(tmp_path, capsys):
    path = write_example(tmp_path, "suq2")
    f_path = tmp_path / "F.json"
    f_path.write_text(json.dumps({"matrix": encode_matrix(np.diag([1.0, 0.5]))}))
    assert main(["qgroup-check", path, "--relation", "au", "--F", str(f_path)]) == 1
    out = capsys.readouterr().out
    assert "au relations: false" in out


def test_qgroup_check_dilation_key_preferred(tmp_path, capsys):
    # hand-built spec whose stored dilation satisfies the bu relations
    th = np.array([0.3, 1.1, 2.0])
    A = np.diag(np.cos(th)).astype(complex)
    B = np.diag(np.sin(th)).astype(complex)
    W = np.zeros((6, 6), dtype=complex)
    R = W.reshape(3, 2, 3, 2)
    R[:, 0, :, 0] = A
    R[:, 0, :, 1] = -B
    R[:, 1, :, 0] = B
    R[:, 1, :, 1] = A
    F = np.array([[0.0, 1.0], [-1.0, 0.0]])
    payload = channel_spec_dict([A, B], F=F, dilation=W)
    path = tmp_path / "su2.json"
    dump_payload(payload, str(path))
    assert main(["qgroup-check", str(path), "--relation", "bu"]) == 0
    assert "bu relations: true" in capsys.readouterr().out


def test_classical_command(tmp_path, capsys):
    path = write_example(tmp_path, "classical")
    out_path = str(tmp_path / "rev_chain.json")
    assert main(["classical", path, "--reverse", "-o", out_path, "--json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["detailed_balance"] is False
    assert abs(data["residual"] - 1.0 / 3.0) < 1e-12
    # uniform stationary distribution, so the reversal is the transpose
    M, pi = parse_classical_spec(load_payload(path))
    Mhat, _ = parse_classical_spec(load_payload(out_path))
    assert np.max(np.abs(Mhat - M.T)) < 1e-12


def test_classical_reversible_chain_exits_zero(tmp_path, capsys):
    M = [[0.7, 0.7], [0.3, 0.3]]
    path = tmp_path / "two.json"
    dump_payload(classical_spec_dict(np.array(M)), str(path))
    assert main(["classical", str(path)]) == 0
    capsys.readouterr()


def test_gen_example_all_names(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("measurement", "gad", "commuting_db", "suq2", "classical"):
        assert main(["gen-example", "--name", name]) == 0
        assert (tmp_path / f"{name}.json").exists()
    capsys.readouterr()
    spec = parse_channel_spec(load_payload(str(tmp_path / "commuting_db.json")))
    assert np.allclose(spec.kraus[0], np.diag([np.sqrt(3) / 2, 0.5]))
    assert spec.rho0 is not None
    suq2 = parse_channel_spec(load_payload(str(tmp_path / "suq2.json")))
    assert suq2.F is not None and suq2.dilation is not None


def test_gen_example_params_and_errors(tmp_path, capsys):
    out = str(tmp_path / "g.json")
    assert main(["gen-example", "--name", "gad",
                 "--params", '{"p": 0.6, "gamma": 0.25}', "-o", out]) == 0
    spec = parse_channel_spec(load_payload(out))
    assert abs(spec.rho0[0, 0].real - 0.6) < 1e-12
    assert main(["gen-example", "--name", "gad", "--params", "{bad", "-o", out]) == 2
    assert main(["gen-example", "--name", "gad",
                 "--params", '{"decay": 1}', "-o", out]) == 2
    capsys.readouterr()


def test_gen_example_measurement_rejects_decoupled_interaction(tmp_path, capsys):
    # a diagonal auxiliary operator produces a zero Kraus block
    out = str(tmp_path / "m.json")
    code = main(["gen-example", "--name", "measurement",
                 "--params", '{"B": [[1.0, 0.0], [0.0, -1.0]]}', "-o", out])
    assert code == 2
    capsys.readouterr()
