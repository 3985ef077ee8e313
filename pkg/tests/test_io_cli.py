import json
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np
import pytest

from factorizable import cli, io
from factorizable import (
    QuantumChannel,
    UnitaryTuple,
    classical_table,
    depolarizing,
    haar_unitary,
    holevo_werner,
    two_unitary_factorization,
)
from factorizable.errors import SchemaError
from factorizable.games import chsh_functional, reference_chsh_strategy, tensor_table

OMEGA = np.exp(2j * np.pi / 3)


@pytest.fixture(scope="module")
def schema():
    text = resources.files("factorizable").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, m in {"id3": np.eye(3), "omega3": np.diag([1, OMEGA, OMEGA.conjugate()]),
                    "omega1": OMEGA * np.eye(3)}.items():
        paths[name] = str(tmp_path / f"{name}.mat.json")
        io.write_matrix(paths[name], m)
    paths["dir"] = tmp_path
    return paths


def run(argv):
    report, code, message = cli.parse_and_dispatch(argv)
    return report, code, message


def test_matrix_roundtrip_bit_exact(tmp_path):
    u = haar_unitary(5, 3)
    p = tmp_path / "u.json"
    io.write_matrix(p, u)
    back = io.read_matrix(p)
    assert np.array_equal(back, u)
    io.write_matrix(tmp_path / "again.json", back)
    assert (tmp_path / "again.json").read_bytes() == p.read_bytes()


def test_channel_factorization_tuple_table_roundtrip(tmp_path):
    ch = holevo_werner(3)
    io.write_channel(tmp_path / "c.json", ch)
    assert np.array_equal(io.read_channel(tmp_path / "c.json").kraus, ch.kraus)

    _, f = two_unitary_factorization(np.eye(3), np.diag([1, OMEGA, OMEGA.conjugate()]),
                                     Fraction(1, 3), 6)
    io.write_factorization(tmp_path / "f.json", f)
    g = io.read_factorization(tmp_path / "f.json")
    assert g.weights == f.weights and np.array_equal(g.unitaries[0], f.unitaries[0])

    t = UnitaryTuple.matrix([np.eye(2), np.array([[0, 1], [1, 0]])])
    io.write_tuple(tmp_path / "t.json", t)
    assert np.array_equal(io.read_tuple(tmp_path / "t.json").unitaries[0][1], t.unitaries[0][1])

    tab = tensor_table(reference_chsh_strategy())
    io.write_table(tmp_path / "p.json", tab)
    assert np.array_equal(io.read_table(tmp_path / "p.json").p, tab.p)


def test_exact_weights_serialized_as_fraction():
    assert io.weight_to_json(Fraction(1, 3)) == {"num": 1, "den": 3}
    assert io.weight_from_json({"num": 1, "den": 3}, "/w") == Fraction(1, 3)


def test_w3_channel_file_matches_printed():
    obj = io.channel_to_json(holevo_werner(3))
    s = 1 / np.sqrt(2)
    assert obj["kraus"][0]["re"] == [[0, s, 0], [-s, 0, 0], [0, 0, 0]]
    assert obj["kraus"][2]["re"] == [[0, 0, 0], [0, 0, s], [0, -s, 0]]


def test_schema_errors_have_paths():
    with pytest.raises(SchemaError) as info:
        io.matrix_from_json({"rows": 2, "cols": 2, "re": [[1, 0], [0]], "im": [[0, 0], [0, 0]]})
    assert info.value.path == "/re/1"
    with pytest.raises(SchemaError) as info:
        io.channel_from_json({"dim": 2})
    assert info.value.path == "/kraus"


def test_malformed_weights_exit_2(files):
    _, f = two_unitary_factorization(np.eye(3), np.diag([1, OMEGA, OMEGA.conjugate()]),
                                     Fraction(1, 3), 6)
    obj = io.factorization_to_json(f)
    obj["weights"] = [0.9]
    bad = files["dir"] / "bad.fact.json"
    bad.write_text(json.dumps(obj))
    report, code, message = run(["fact", "eval", "--in", str(bad)])
    assert code == 2 and report is None
    assert "/weights" in message


def test_depolarizing_writes_file(files):
    out = str(files["dir"] / "s3.chan.json")
    report, code, _ = run(["zoo", "depolarizing", "--n", "3", "--out", out])
    assert code == 0 and report.passed
    ch = io.read_channel(out)
    assert ch.num_kraus == 9


def test_two_unitary_command(files):
    report, code, _ = run(["fact", "two-unitary", "--u1", files["id3"], "--u2", files["omega3"],
                           "--t", "1/3", "--kmax", "6"])
    assert code == 0
    assert report.results["verdict"] == "Constructed" and report.results["k"] == 3


def test_two_unitary_obstructed_command(files):
    report, code, _ = run(["fact", "two-unitary", "--u1", files["id3"], "--u2", files["omega3"],
                           "--t", "2/5", "--kmax", "4"])
    assert code == 0 and report.results["verdict"] == "Obstructed"


def test_classical_chsh_command(schema):
    report, code, _ = run(["game", "chsh", "--mode", "classical", "--json"])
    assert code == 0 and report.results["value"] == 2.0
    jsonschema.validate(report.to_json(), schema)


def test_verification_failure_exit_1(files):
    b = files["dir"] / "b.mat.json"
    io.write_matrix(b, np.array([[1, 2], [2, 1]]))
    report, code, _ = run(["zoo", "schur", "--b", str(b)])
    assert code == 1 and not report.passed


def test_usage_errors_exit_2(capsys):
    assert run(["chan", "verify"])[1] == 2
    assert run(["nonsense"])[1] == 2
    assert run(["chan", "verify", "--in", "/nonexistent.json"])[1] == 2
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert run(["--help"])[1] == 0
    capsys.readouterr()


def test_numerical_failure_exit_3(files, monkeypatch):
    out = str(files["dir"] / "s2.chan.json")
    run(["zoo", "depolarizing", "--n", "2", "--out", out])

    def boom(*a, **k):
        raise np.linalg.LinAlgError("eigensolver did not converge")

    monkeypatch.setattr(np.linalg, "eigh", boom)
    _, code, message = run(["chan", "verify", "--in", out])
    assert code == 3 and "converge" in message


def test_reports_validate_against_schema(files, schema):
    d = files["dir"]
    depol = str(d / "s2.chan.json")
    fact = str(d / "f.fact.json")
    tup = str(d / "t.tuple.json")
    table = str(d / "p.table.json")
    strat = str(d / "s.strategy.json")
    run(["zoo", "depolarizing", "--n", "2", "--out", depol])
    run(["fact", "two-unitary", "--u1", files["id3"], "--u2", files["omega3"], "--t", "1/3",
         "--kmax", "3", "--out", fact])
    io.write_tuple(tup, UnitaryTuple.matrix([np.eye(2), np.array([[0, 1], [1, 0]])]))
    io.write_table(table, classical_table(np.full(16, 1 / 16), 2, 2))
    io.save_json(strat, io.strategy_to_json(reference_chsh_strategy()))
    io.save_json(str(d / "chsh.func.json"), io.functional_to_json(chsh_functional()))
    commands = [
        ["chan", "verify", "--in", depol],
        ["chan", "choi", "--in", depol],
        ["chan", "compose", "--first", depol, "--second", depol],
        ["chan", "adjoint", "--in", depol],
        ["zoo", "holevo-werner", "--n", "3"],
        ["zoo", "haar", "--d", "2", "--seed", "4"],
        ["zoo", "mixture", "--unitaries", files["id3"], files["omega3"], "--weights", "1/2", "1/2"],
        ["fact", "eval", "--in", fact],
        ["fact", "check", "--in", fact],
        ["fact", "compose", "--first", fact, "--second", fact],
        ["fact", "mix", "--in", fact, fact, "--weights", "1/3", "2/3"],
        ["fact", "split", "--in", fact],
        ["fact", "stinespring", "--in", depol, "--mode", "ucp"],
        ["fact", "recover-eq2", "--in", fact],
        ["corr", "gram", "--in", tup],
        ["corr", "embed", "--in", tup, "--k-target", "4"],
        ["corr", "mix", "--first", tup, "--second", tup, "--lam", "1/2"],
        ["corr", "sample", "--n", "3", "--k", "2", "--count", "3"],
        ["game", "table", "--in", strat],
        ["game", "member-cc", "--in", table],
        ["game", "bell", "--table", table],
        ["game", "bell", "--table", table, "--functional", str(d / "chsh.func.json")],
        ["game", "synchronous", "--in", table],
    ]
    for argv in commands:
        report, code, message = run(argv + ["--json"])
        assert code in (0, 1), (argv, message)
        doc = json.loads(io.dumps(report.to_json()))
        jsonschema.validate(doc, schema)
        assert doc["pass"] == all(doc["results"].get("checks", {}).values())


def test_main_prints_json(files, capsys):
    code = cli.main(["zoo", "holevo-werner", "--n", "3", "--json"])
    out = capsys.readouterr().out
    assert code == 0 and json.loads(out)["results"]["extreme"] is True


def test_text_output_respects_no_color(monkeypatch, capsys):
    monkeypatch.setenv("NO_COLOR", "1")
    cli.main(["game", "chsh", "--mode", "classical"])
    out = capsys.readouterr().out
    assert "\033[" not in out and "PASS" in out


def test_library_verification_error_exit_1(files):
    damp = files["dir"] / "damp.chan.json"
    io.save_json(damp, io.channel_to_json(
        QuantumChannel(2, [np.diag([1, np.sqrt(0.5)]), np.array([[0, np.sqrt(0.5)], [0, 0]])])))
    report, code, message = run(["fact", "stinespring", "--in", str(damp), "--mode", "ucp"])
    assert code == 1 and "verification failed" in message
    assert run(["fact", "stinespring", "--in", str(damp), "--mode", "cptp"])[1] == 0
