import json

import pytest

import surf4d.cli as cli

SPEC = """
name = demo
x1 = u
x2 = v
x3 = "u*v"
x4 = "u*u/2"
u_range = -1, 1
v_range = -1, 1
"""


def spec_file(tmp_path, text=SPEC, name="demo.surf"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_catalog_output(capsys):
    assert cli.main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "clifford" in out and "rot-generic" in out


def test_scan_csv_shape(capsys):
    assert cli.main(["scan", "--fixture", "clifford",
                     "--nu", "3", "--nv", "2"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.strip().split("\n")
    assert lines[0] == "u,v,E,F,G,L,M,N,k,kappa,K,class"
    assert len(lines) == 7
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0"
    assert first[8] == "-1"  # k
    assert first[-1] == "hyperbolic"
    assert "hyperbolic=6" in captured.err


def test_scan_is_deterministic(capsys):
    args = ["scan", "--fixture", "rot-generic", "--nu", "5", "--nv", "4"]
    assert cli.main(args) == 0
    first = capsys.readouterr().out
    assert cli.main(args) == 0
    second = capsys.readouterr().out
    assert first == second


def test_scan_to_file(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert cli.main(["scan", "--fixture", "plane", "--nu", "2", "--nv", "2",
                     "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    text = out.read_text()
    assert text.startswith("u,v,E,F,G,L,M,N,k,kappa,K,class\n")
    assert text.endswith("\n")
    assert len(text.strip().split("\n")) == 5


def test_scan_json_mode(capsys):
    assert cli.main(["scan", "--fixture", "plane", "--nu", "2", "--nv", "2",
                     "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["histogram"] == {"flat": 4}


def test_scan_from_spec_file(tmp_path, capsys):
    path = spec_file(tmp_path)
    assert cli.main(["scan", "--input", path, "--nu", "2", "--nv", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 5


def test_info_text(capsys):
    assert cli.main(["info", "--fixture", "clifford",
                     "--u", "0", "--v", "0"]) == 0
    out = capsys.readouterr().out
    assert "k=-1" in out
    assert "class" in out and "hyperbolic" in out
    assert "principal x" in out


def test_info_json(capsys):
    assert cli.main(["info", "--fixture", "sphere", "--u", "0.3",
                     "--v", "1.0", "--json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["flat_analysis"]["verdict"] == "Planar"


def test_validate_pass(capsys):
    assert cli.main(["validate", "--fixture", "clifford",
                     "--nu", "5", "--nv", "5"]) == 0
    out = capsys.readouterr().out
    assert "result: PASS" in out
    assert "PASS" in out and "FAIL" not in out.replace("result: PASS", "")


def test_validate_failure_exit_code(monkeypatch, capsys):
    body = {"chart": "x", "passed": False,
            "checks": [{"name": "spectral-characteristic", "status": "fail",
                        "worst": 1.0, "detail": "bad"}]}
    monkeypatch.setattr(cli, "_request", lambda *a, **kw: (200, body))
    assert cli.main(["validate", "--fixture", "clifford"]) == 1
    assert "result: FAIL" in capsys.readouterr().out


def test_unknown_fixture_exits_1(capsys):
    assert cli.main(["scan", "--fixture", "nope"]) == 1
    assert "UnknownFixture" in capsys.readouterr().err


def test_degenerate_point_exits_2(tmp_path, capsys):
    path = spec_file(tmp_path, SPEC.replace("x1 = u", 'x1 = "u*u"')
                     .replace("x2 = v", 'x2 = "u*u"')
                     .replace('x3 = "u*v"', "x3 = v")
                     .replace('x4 = "u*u/2"', "x4 = 0"), "pinch.surf")
    assert cli.main(["info", "--input", path, "--u", "0", "--v", "0"]) == 2
    assert "DegenerateMetric" in capsys.readouterr().err


def test_missing_spec_file_exits_1(capsys):
    assert cli.main(["scan", "--input", "/no/such/file"]) == 1
    assert "SpecFileError" in capsys.readouterr().err


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["scan"])  # no surface source
    assert ei.value.code == 1
    with pytest.raises(SystemExit) as ei:
        cli.main([])
    assert ei.value.code == 1


def test_unreachable_server_exits_2(capsys):
    assert cli.main(["--server", "http://127.0.0.1:9",
                     "catalog"]) == 2
    assert "connection" in capsys.readouterr().err
