import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from anosovsh.cli import main, parse_grid
from anosovsh.errors import ConfigError


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


CAT = {"type": "cat-suspension", "matrix": [2, 1, 1, 1], "roof": {"kind": "const", "value": 1}}
NEG_CAT = {"type": "cat-suspension", "matrix": [-2, -1, -1, -1]}
ELLIPSOID = {"type": "ellipsoid", "a": 1.0, "b": 1.4142135623730951}


@pytest.fixture
def cat_path(tmp_path):
    return write(tmp_path, "cat.json", CAT)


# --- grid ------------------------------------------------------------------------

def test_grid_inclusive():
    assert parse_grid("5:30:5") == [5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    assert parse_grid("1:2:0.1")[-1] == 2.0


@pytest.mark.parametrize("text", ["5:30", "a:b:c", "5:1:1", "0:5:1", "1:5:0", "1:1:1"])
def test_grid_errors(text):
    with pytest.raises(ConfigError, match="grid"):
        parse_grid(text)


@given(st.integers(1, 50), st.integers(1, 40), st.integers(1, 9))
def test_grid_property(a, n, step):
    grid = parse_grid(f"{a}:{a + n * step}:{step}")
    assert len(grid) == n + 1 and grid[0] == a and grid[-1] == a + n * step


# --- commands ----------------------------------------------------------------------

def test_census_to_file(cat_path, tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["census", "--model", cat_path, "--tmax", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 10
    assert "P=10 Pg=10" in capsys.readouterr().out


def test_census_with_holonomy(tmp_path, capsys):
    path = write(tmp_path, "n.json", NEG_CAT)
    assert main(["census", "--model", path, "--tmax", "2", "--holonomy"]) == 0
    rows = [json.loads(x) for x in capsys.readouterr().out.splitlines()[1:]]
    assert {(r["class_label"], r["holonomy_sign"]) for r in rows} == {(1, -1), (2, 1)}


def test_entropy_summary(cat_path, tmp_path, capsys):
    out = tmp_path / "counts.csv"
    assert main(["entropy", "--model", cat_path, "--grid", "5:30:1", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert abs(summary["rate"] - 0.962424) <= 0.05
    assert summary["flag"] == "infinite"
    assert out.read_text().startswith("T,P,Pg,rate_est,slope_est\n")


def test_gamma_flat_torus(tmp_path, capsys):
    path = write(tmp_path, "t.json", {"type": "flat-torus", "n": 2})
    assert main(["gamma", "--model", path, "--grid", "10:200:10"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert abs(summary["slope"] - 2) <= 0.3 and summary["flag"] == "finite"


def test_e2page_csv(tmp_path, capsys):
    path = write(tmp_path, "e.json", ELLIPSOID)
    assert main(["e2page", "--model", path, "--tmax", "2.1"]) == 0
    assert capsys.readouterr().out == "class_label,degree,rank\n0,3,1\n0,5,1\n0,7,1\n"


def test_e2page_from_census_file(cat_path, tmp_path, capsys):
    c = tmp_path / "c.json"
    main(["census", "--model", cat_path, "--tmax", "3", "--out", str(c)])
    out = tmp_path / "p.csv"
    assert main(["e2page", "--census", str(c), "--out", str(out)]) == 0
    assert out.read_text() == "class_label,degree,rank\n1,0,1\n2,0,3\n3,0,6\n"
    verdict = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert all(v["coherent"] for v in verdict["classes"])


def test_verify_cz(capsys):
    assert main(["verify", "cz", "--trials", "100", "--seed", "7"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "check,trials,passed,worst,status"
    assert lines[1].startswith("rotation_index,100,100,")
    assert all(line.endswith(",pass") for line in lines[1:])


def test_verify_blockform_fails_with_zero_tolerance(capsys):
    assert main(["verify", "blockform", "--trials", "50", "--tol-det", "-1"]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_verify_parity_per_orbit(tmp_path, capsys):
    path = write(tmp_path, "n.json", NEG_CAT)
    assert main(["verify", "parity", "--model", path, "--tmax", "3"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "simple_id,iterate,class_label,cz_parity,holonomy_sign,agree"
    assert "verdict: pass" in out and ",NO" not in out


def test_obstruct_sphere_even(tmp_path, capsys):
    census = tmp_path / "even.json"
    path = write(tmp_path, "s.json", {"type": "synthetic", "orbits": [{"index": 2, "period": 1.0}]})
    main(["census", "--model", path, "--tmax", "5", "--out", str(census)])
    capsys.readouterr()
    assert main(["obstruct", "sphere", "--census", str(census), "--max-degree", "51"]) == 2
    report = json.loads(capsys.readouterr().out)
    assert "PARITY_CONTRADICTION" in [f["code"] for f in report["findings"]]


def test_obstruct_sphere_ellipsoid_match(tmp_path, capsys):
    path = write(tmp_path, "e.json", ELLIPSOID)
    assert main(["obstruct", "sphere", "--model", path, "--max-degree", "101"]) == 0
    assert [f["code"] for f in json.loads(capsys.readouterr().out)["findings"]] == ["MATCH"]


def test_obstruct_bounded(tmp_path, capsys):
    spec = {"type": "synthetic",
            "orbits": [{"index": i, "period": 1.0 + 0.01 * i} for i in (2, 4, 6, 8, 10, 12)]}
    path = write(tmp_path, "six.json", spec)
    assert main(["obstruct", "bounded", "--model", path, "--tmax", "2", "--bound", "5"]) == 2
    (f,) = json.loads(capsys.readouterr().out)["findings"]
    assert f["code"] == "OBSTRUCTION_CONFIRMED" and f["degree"] == 120 and f["count"] >= 6


def test_squeeze(tmp_path, capsys):
    spec = dict(CAT, roof={"kind": "trig", "constant": 1.0, "terms": [{"k": [1, 0], "cos": 0.3}]})
    path = write(tmp_path, "trig.json", spec)
    assert main(["squeeze", "--model", path, "--grid", "1:9.8:0.2"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "pass"


# --- errors ------------------------------------------------------------------------

def test_bad_matrix_names_field(tmp_path, capsys):
    path = write(tmp_path, "bad.json", {"type": "cat-suspension", "matrix": [2, 1, 1]})
    assert main(["census", "--model", path, "--tmax", "3"]) == 1
    assert "matrix" in capsys.readouterr().err


def test_missing_model_file(capsys):
    assert main(["census", "--model", "/nonexistent.json", "--tmax", "3"]) == 1
    assert "model" in capsys.readouterr().err


@pytest.mark.parametrize("argv, field", [
    (["census", "--tmax", "-1"], "tmax"),
    (["entropy", "--grid", "5:1:1"], "grid"),
    (["census", "--tmax", "3", "--workers", "0"], "workers"),
    (["obstruct", "sphere", "--tmax", "3"], "max-degree"),
])
def test_config_errors(cat_path, argv, field, capsys):
    assert main(argv + ["--model", cat_path]) == 1
    assert field in capsys.readouterr().err


def test_flat_torus_census_is_an_error(tmp_path, capsys):
    path = write(tmp_path, "t.json", {"type": "flat-torus", "n": 2})
    assert main(["census", "--model", path, "--tmax", "3"]) == 1


def test_unknown_flag_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["census", "--bogus"])
    assert exc.value.code == 1
