import json

import pytest

from bundleindex import cli


def run(tmp_path, *argv, fmt="json", name="out"):
    out = tmp_path / f"{name}.{fmt}"
    code = cli.main(list(argv) + ["--format", fmt, "--out", str(out)])
    text = out.read_text() if out.exists() else None
    return code, text


def test_verlinde_values(tmp_path):
    code, text = run(tmp_path, "verlinde", "--group", "A1", "--level", "1",
                     "--genus", "2")
    assert code == 0
    doc = json.loads(text)
    assert doc["value"] == 4 and doc["oracle_value"] == 4
    assert doc["point_count"] == 6

    code, text = run(tmp_path, "verlinde", "--group", "A1", "--level", "1",
                     "--genus", "1")
    assert code == 0 and json.loads(text)["value"] == 2

    code, text = run(tmp_path, "verlinde", "--group", "A2", "--level", "1",
                     "--genus", "2")
    assert code == 0
    doc = json.loads(text)
    assert doc["value"] == 9 and doc["oracle_value"] == 9


def test_index_empty_deformation_reproduces_verlinde(tmp_path):
    code, text = run(tmp_path, "index", "--group", "A1", "--level", "2",
                     "--genus", "2")
    assert code == 0
    doc = json.loads(text)
    const = [r for r in doc["coefficients"] if r["exponent"] == []]
    assert len(const) == 1 and abs(const[0]["re"] - 10) < 1e-9


def test_index_with_deformation_config(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "group": "A1", "level": 2, "genus": 2, "order": 3,
        "deformation": [{"variable": "t", "highest_weight": [2]}],
    }))
    code, text = run(tmp_path, "index", "--config", str(cfgfile))
    assert code == 0
    doc = json.loads(text)
    assert doc["variables"] == ["t"]
    const = [r for r in doc["coefficients"] if r["exponent"] == [0]]
    assert abs(const[0]["re"] - 10) < 1e-9
    for r in doc["coefficients"]:
        assert r["diag_int_defect"] is not None
        assert r["diag_int_defect"] < 1e-5


def test_kaehler_command(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "group": "A1", "level": 2, "genus": 2, "t": -0.5,
        "deformation": [{"highest_weight": [2]}],
    }))
    code, text = run(tmp_path, "kaehler", "--config", str(cfgfile))
    assert code == 0
    doc = json.loads(text)
    assert doc["max_residual"] < 1e-10
    cfgfile.write_text(json.dumps({
        "group": "A1", "level": 2, "genus": 2, "taylor": True, "order": 3,
        "deformation": [{"highest_weight": [2]}],
    }))
    code, text = run(tmp_path, "kaehler", "--config", str(cfgfile),
                     name="taylor")
    assert code == 0
    doc = json.loads(text)
    rows = {tuple(r["exponent"]): r["re"] for r in doc["coefficients"]}
    assert round(rows[(0,)]) == 10 and round(rows[(2,)]) == -10


def test_newstead_command(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "group": "A1", "level": 2, "genus": 2,
        "deformation": [{"highest_weight": [2]}],
    }))
    code, text = run(tmp_path, "newstead", "--config", str(cfgfile))
    assert code == 0
    doc = json.loads(text)
    assert doc["vanishing_order"] == 1
    assert doc["flag"] == "outside_hessian_guarantee"


def test_witten_command(tmp_path):
    code, text = run(tmp_path, "witten", "--group", "A1", "--level", "0",
                     "--genus", "2")
    assert code == 0
    doc = json.loads(text)
    devs = [r["deviation"] for r in doc["results"]]
    assert devs == sorted(devs, reverse=True)
    assert abs(doc["target"] - 4 / 3) < 1e-12


def test_oracle_command(tmp_path):
    code, text = run(tmp_path, "oracle", "--group", "A1", "--level", "2",
                     "--genus", "2")
    assert code == 0 and json.loads(text)["value"] == 10


def test_exit_code_config_errors(tmp_path):
    assert run(tmp_path, "verlinde", "--group", "B7")[0] == 2
    assert run(tmp_path, "verlinde", "--group", "A1", "--level", "-5")[0] == 2
    assert run(tmp_path, "verlinde", "--genus", "-1")[0] == 2
    assert run(tmp_path, "oracle", "--group", "C2", "--level", "1",
               "--genus", "2")[0] == 2
    cfgfile = tmp_path / "bad.json"
    cfgfile.write_text(json.dumps({"group": "A1", "no_such_field": 1}))
    assert run(tmp_path, "verlinde", "--config", str(cfgfile))[0] == 2
    cfgfile.write_text("{not json")
    assert run(tmp_path, "verlinde", "--config", str(cfgfile))[0] == 2


def test_level_matrix_flag(tmp_path):
    code, text = run(tmp_path, "verlinde", "--group", "A2",
                     "--level-matrix", "2,-1,-1,2", "--genus", "2")
    assert code == 0
    assert json.loads(text)["value"] == 9
    assert run(tmp_path, "verlinde", "--group", "A2",
               "--level-matrix", "2,-1,-1")[0] == 2


def test_byte_identical_output(tmp_path):
    for fmt in ("json", "csv"):
        _, a = run(tmp_path, "verlinde", "--group", "A2", "--level", "2",
                   "--genus", "3", fmt=fmt, name="a")
        _, b = run(tmp_path, "verlinde", "--group", "A2", "--level", "2",
                   "--genus", "3", fmt=fmt, name="b")
        assert a == b
    _, a = run(tmp_path, "index", "--group", "A1", "--level", "2",
               "--genus", "2", fmt="csv", name="ia")
    _, b = run(tmp_path, "index", "--group", "A1", "--level", "2",
               "--genus", "2", fmt="csv", name="ib")
    assert a == b


def test_csv_schema(tmp_path):
    code, text = run(tmp_path, "verlinde", "--group", "A1", "--level", "3",
                     "--genus", "2", fmt="csv")
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0] == ("command,group,level,genus,exponent,re,im,"
                        "diag_residual,diag_int_defect")
    assert lines[1].startswith("verlinde,A1,3,2,")


def test_stdout_default(capsys):
    code = cli.main(["verlinde", "--group", "A1", "--level", "1",
                     "--genus", "2"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == 4
