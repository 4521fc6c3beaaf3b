import json
from fractions import Fraction

import pytest
from oracles import nearest_distance

from uniform_forge.checker import check_certificate_data, check_trace
from uniform_forge.cli import main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


@pytest.fixture(scope="module")
def trace_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "t.json"
    code = main(["construct", "--sys", "std:1,2", "--f", "pow:1,5", "--steps", "10", "--window", "[0,1]^2",
                 "--out", str(path)])
    assert code == 0
    return path


def test_construct_writes_a_checkable_trace(trace_file):
    data = json.loads(trace_file.read_text())
    assert data["kind"] == "trace" and len(data["steps"]) == 10
    assert check_trace(data)


def test_verify_trace_emits_certificates(trace_file, tmp_path, capsys):
    out = tmp_path / "v.json"
    code, _ = run(["verify", "--trace", str(trace_file), "--out", str(out)], capsys)
    assert code == 0
    report = json.loads(out.read_text())
    assert report["ok"] and len(report["certificates"]) == 1
    cert = report["certificates"][0]
    assert check_certificate_data(cert)
    single = tmp_path / "c.json"
    single.write_text(json.dumps(cert))
    assert main(["verify", "--certificate", str(single)]) == 0


def test_tampered_certificate_is_a_negative(trace_file, tmp_path, capsys):
    out = tmp_path / "v.json"
    main(["verify", "--trace", str(trace_file), "--out", str(out)])
    cert = json.loads(out.read_text())["certificates"][0]
    cert["covers"][0]["witness"]["p"][0] += 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(cert))
    code, text = run(["verify", "--certificate", str(bad)], capsys)
    assert code == 2
    assert json.loads(text)["ok"] is False


def test_psi_table_for_a_convergent(capsys):
    code, text = run(["psi", "--sys", "std:1,1", "--point", "577/408", "--T", "5"], capsys)
    assert code == 0
    rows = text.strip().split("\n")
    assert rows[0] == "t,psi_sup" and len(rows) == 6
    x = Fraction(577, 408)
    assert rows[-1] == f"5,{min(nearest_distance(q * x) for q in range(1, 6))}" == "5,29/408"


def test_missing_dual_point_is_reported(capsys):
    code, text = run(["transfer", "dual", "--n", "2", "--g", "1", "--t", "10", "--eta", "1/1000",
                      "--point", "1/97,1/89"], capsys)
    assert code == 2
    report = json.loads(text)
    assert report["kind"] == "negative" and report["error"] == "NotFound"
    assert report["instance"]["x"] == ["1/97", "1/89"]


def test_transfer_params_and_dual_point(capsys):
    code, text = run(["transfer", "params", "--n", "2", "--g", "1", "--t", "4096", "--eta", "1/4096"], capsys)
    params = json.loads(text)
    assert code == 0 and params["params"]["tau"] == "1/4096" and params["volume_identity"]
    code, text = run(["transfer", "dual", "--n", "2", "--g", "1", "--t", "4096", "--eta", "1/4096",
                      "--point", "1/3,2/3"], capsys)
    assert code == 0 and json.loads(text)["z"] == [3, 1, 2]


def test_exhausted_domination_budget(capsys):
    code, _ = run(["dominate", "--point", "577/408", "--T", "50", "--max-steps", "1"], capsys)
    assert code == 3


def test_domination_succeeds(tmp_path, capsys):
    out = tmp_path / "d.json"
    code, _ = run(["dominate", "--point", "577/408", "--T", "50", "--out", str(out)], capsys)
    assert code == 0
    payload = json.loads(out.read_text())
    assert check_certificate_data(payload["certificate"]) and check_trace(payload["trace"])


@pytest.mark.parametrize("argv", [
    ["construct", "--sys", "std:1,2", "--f", "pow:1,5", "--steps", "3"],
    ["construct", "--sys", "bogus:1", "--f", "pow:1,5", "--steps", "3", "--window", "[0,1]^2"],
    ["construct", "--sys", "std:1,2", "--f", "pow:1,5", "--steps", "0", "--window", "[0,1]^2"],
    ["psi", "--sys", "std:1,1", "--point", "0.5", "--T", "5"],
    ["transfer", "params", "--n", "2"],
    ["transfer", "params", "--n", "2", "--g", "2", "--t", "8192", "--eta", "1"],
    ["sumset", "--z", "1/7,2/7", "--f1", "pow:1,4"],
    ["exponents"],
    ["no-such-command"],
])
def test_configuration_errors(argv, capsys):
    code, _ = run(argv, capsys)
    assert code == 4


def test_rational_input_to_dominate_is_a_negative(capsys):
    code, text = run(["dominate", "--sys", "std:1,1", "--point", "2/3", "--T", "20"], capsys)
    assert code == 2 and json.loads(text)["error"] == "ResonantInput"


def test_dirichlet_audit_and_exponents(capsys):
    code, text = run(["dirichlet-audit", "--points", "5", "--t-max", "10"], capsys)
    assert code == 0 and json.loads(text)["checked"] == 50
    code, text = run(["exponents", "--jarnik", "1/2,1/2"], capsys)
    assert code == 0 and json.loads(text)["dual_hat"] == ["2", "2"]
    code, text = run(["exponents", "--cf", "355/113"], capsys)
    assert code == 0 and json.loads(text)["digits"] == [3, 7, 16]


def test_sumset_with_zero_shift(tmp_path, capsys):
    prefix = tmp_path / "s"
    code, _ = run(["sumset", "--z", "0,0,0", "--f1", "pow:1,4", "--steps", "3", "--out-prefix", str(prefix)], capsys)
    assert code == 0
    first = json.loads((tmp_path / "s.x.certificate.json").read_text())
    second = json.loads((tmp_path / "s.x_plus_z.certificate.json").read_text())
    assert first == second and check_certificate_data(first)
