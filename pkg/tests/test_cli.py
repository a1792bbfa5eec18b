import json
from importlib import resources

import jsonschema
import pytest
import referencing

from dicke_protocols import cli
from dicke_protocols.dicke_space import SymmetricState, dicke_state, random_state
from dicke_protocols.protocols import make_rng
from dicke_protocols.verify import TOLERANCE_ENV


def _schemas():
    out = {}
    for entry in resources.files("dicke_protocols").joinpath("schemas").iterdir():
        if entry.name.endswith(".json"):
            out[entry.name] = json.loads(entry.read_text())
    return out


SCHEMAS = _schemas()
REGISTRY = referencing.Registry().with_resources(
    (s["$id"], referencing.Resource.from_contents(s)) for s in SCHEMAS.values()
)


def validate(data, name):
    schema = SCHEMAS[name]
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(data)


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    data = json.loads(captured.out) if captured.out.strip() else None
    return code, data, captured.err


@pytest.fixture
def state_file(tmp_path):
    def write(state, name="state.json"):
        path = tmp_path / name
        path.write_text(json.dumps(state.to_json()))
        return str(path)

    return write


def test_schemas_are_valid():
    for schema in SCHEMAS.values():
        jsonschema.Draft202012Validator.check_schema(schema)


def test_state_schema_accepts_state_json():
    validate(random_state(3, make_rng(0)).to_json(), "state.schema.json")


def test_prepare_w_state(capsys, state_file):
    code, data, _ = run(capsys, "prepare", "--target", state_file(dicke_state(3, 1)))
    assert code == 0
    validate(data, "prepare.schema.json")
    assert data["fidelity"] == pytest.approx(1.0, abs=1e-12)
    assert data["probability"] == pytest.approx(1 / 3)
    assert data["infinity_count"] == 2


def test_prepare_sampled_is_deterministic(capsys, state_file):
    path = state_file(dicke_state(4, 2))
    first = run(capsys, "prepare", "--target", path, "--sample", "--seed", "7")
    second = run(capsys, "prepare", "--target", path, "--sample", "--seed", "7")
    assert first == second
    assert first[0] in (0, 3)
    validate(first[1], "prepare.schema.json")
    assert first[1]["seed"] == 7 and not first[1]["nondeterministic"]


def test_prepare_sampled_failure_exit_code(capsys, state_file):
    path = state_file(dicke_state(6, 3))
    codes = {run(capsys, "prepare", "--target", path, "--sample", "--seed", str(s))[0] for s in range(20)}
    assert 3 in codes


def test_prepare_tolerance_failure(capsys, state_file):
    path = state_file(random_state(5, make_rng(1)))
    code, data, _ = run(capsys, "--tol", "preparation_roundtrip=0", "prepare", "--target", path)
    # rounding leaves some nonzero infidelity unless the run happens to be exact
    assert code in (0, 2)
    if code == 2:
        assert 1 - data["fidelity"] > 0


def test_prepare_unnormalized_target(capsys, state_file):
    code, _, err = run(capsys, "prepare", "--target", state_file(SymmetricState(1, [1, 1])))
    assert code == 1 and "normalized" in err


def test_malformed_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "transform", "--state", str(bad))[0] == 1
    bad.write_text(json.dumps({"n": 2, "amplitudes": [[1, 0]]}))
    assert run(capsys, "transform", "--state", str(bad))[0] == 1
    assert run(capsys, "transform", "--state", str(tmp_path / "missing.json"))[0] == 1


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["fixed-points", "--n", "2", "--p1", "nonsense", "--p2", "1,0"])
    assert info.value.code == 1



def test_non_physical_gate_rejected_by_protocols(capsys, state_file):
    code, _, err = run(capsys, "simulate", "--state", state_file(dicke_state(2, 1)), "--p1", "1,1")
    assert code == 1 and err


def test_simulate_exact(capsys, state_file):
    code, data, _ = run(capsys, "simulate", "--state", state_file(dicke_state(2, 1)), "--rounds", "3")
    assert code == 0
    validate(data, "simulate.schema.json")
    assert len(data["probabilities"]) == 3 and data["completed"]


def test_simulate_sampled_deterministic(capsys, state_file):
    path = state_file(random_state(4, make_rng(2)))
    argv = ("simulate", "--state", path, "--rounds", "5", "--sample", "--seed", "123")
    first, second = run(capsys, *argv), run(capsys, *argv)
    assert first == second
    assert first[0] in (0, 3)
    validate(first[1], "simulate.schema.json")
    assert "PCG64" in first[1]["rng_algorithm"]


def test_simulate_single_protocol(capsys, state_file):
    code, data, _ = run(capsys, "simulate", "--state", state_file(dicke_state(3, 1)), "--protocol", "1", "--rounds", "2")
    assert code == 0 and data["final_state"]["n"] == 1
    code, data, _ = run(capsys, "simulate", "--state", state_file(dicke_state(1, 1)), "--protocol", "2", "--p2", "0,1")
    assert code == 0 and data["final_state"]["n"] == 2


def test_simulate_degenerate_run(capsys, state_file):
    code, _, err = run(capsys, "simulate", "--state", state_file(dicke_state(1, 1)), "--p1", "1,0", "--p2", "1,0")
    assert code == 2 and "round" in err


def test_fixed_points(capsys):
    code, data, _ = run(capsys, "fixed-points", "--n", "3", "--p1", "0.6,0.8", "--p2", "0.8,0.6j")
    assert code == 0
    validate(data, "fixed_points.schema.json")
    assert data["method"] == "exponential"
    assert len(data["basis_columns"]) == 4


def test_fixed_points_hadamard_has_unitary_gate(capsys):
    h = "0.70710678118654752,0.70710678118654752"
    code, data, _ = run(capsys, "fixed-points", "--n", "2", "--p1", h, "--p2", h)
    assert code == 0 and data["unitary_gate"] is not None


def test_fixed_points_degenerate(capsys):
    code, _, _ = run(capsys, "fixed-points", "--n", "2", "--p1", "1,0", "--p2", "0,1")
    assert code == 2


def test_fixed_points_fallback_warns(capsys):
    with pytest.warns(RuntimeWarning):
        code, data, _ = run(capsys, "fixed-points", "--n", "2", "--p1", "0.6,0.8", "--p2", "1,0")
    assert code == 0 and data["method"] == "eigendecomposition" and data["angles"] is None


def test_transform(capsys, state_file):
    code, data, _ = run(capsys, "transform", "--state", state_file(dicke_state(1, 0)))
    assert code == 0
    validate(data, "state.schema.json")
    assert data["amplitudes"][0][0] == pytest.approx(2 ** -0.5)


def test_output_file(capsys, tmp_path, state_file):
    out = tmp_path / "out.json"
    code = cli.main(["--output", str(out), "transform", "--state", state_file(dicke_state(2, 2))])
    assert code == 0 and capsys.readouterr().out == ""
    assert json.loads(out.read_text())["n"] == 2


def test_floats_written_with_17_digits(capsys, state_file):
    cli.main(["transform", "--state", state_file(dicke_state(1, 0))])
    text = capsys.readouterr().out
    first = text.split("[", 2)[2].split(",")[0]
    assert len(first.replace("0.", "", 1)) == 17 and float(first) == pytest.approx(2 ** -0.5, abs=1e-15)


def test_verify_qpe(capsys):
    code, data, _ = run(capsys, "verify", "--suite", "qpe", "--max-n", "5")
    assert code == 0
    validate(data, "verify.schema.json")
    assert "qpe_false_accept_gap" in {c["name"] for c in data["checks"]}


def test_verify_tolerance_override_fails(capsys):
    code, data, _ = run(capsys, "--tol", "*=1e-30", "verify", "--suite", "algebra", "--max-n", "3")
    assert code == 2 and not data["passed"]


def test_verify_tolerance_env_file(capsys, tmp_path, monkeypatch):
    path = tmp_path / "tol.json"
    path.write_text(json.dumps({"casimir": 1e-40, "su2_relations": 1e-40}))
    monkeypatch.setenv(TOLERANCE_ENV, str(path))
    code, data, _ = run(capsys, "verify", "--suite", "algebra", "--max-n", "3")
    by_name = {c["name"]: c for c in data["checks"]}
    assert by_name["casimir"]["tolerance"] == 1e-40
    assert code == (0 if data["passed"] else 2)


def test_verify_unknown_tolerance(capsys):
    code, _, err = run(capsys, "--tol", "nope=1", "verify", "--suite", "algebra")
    assert code == 1 and "nope" in err


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "dicke_protocols", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "prepare" in proc.stdout
