import io
import json
from fractions import Fraction

import pytest

from glustab.cli import EX_USAGE, run
from glustab.klattice import CentralCharge, Gauss, standard_charge


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


@pytest.fixture
def write_json(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


@pytest.mark.parametrize("n", [1, 2, 3])
def test_classify_standard_charge(write_json, n):
    code, text = invoke("classify", "--charge", write_json("std.json", standard_charge(n).to_json()))
    assert code == 0
    data = json.loads(text)
    assert data["partition"]["I0"] == list(range(1, n + 1))
    assert data["partition"]["I+"] == [] and data["partition"]["I-"] == []
    assert data["ubar"]["ok"]


def test_classify_output_round_trips(write_json, tmp_path):
    Z = CentralCharge.from_parts(Gauss(1, 3), -1, [Gauss(-1, -1), Gauss(0, 1)])
    code, text = invoke("classify", "--charge", write_json("z.json", Z.to_json()), "--genus", "1")
    assert code == 0
    first = json.loads(text)
    assert json.loads(json.dumps(first, sort_keys=True)) == first
    path = tmp_path / "s.json"
    path.write_text(text)
    code, theta = invoke("theta", "--stability", str(path))
    assert code == 0 and json.loads(theta)["in_theta0"]


def test_build_with_partition(write_json):
    Z = CentralCharge.from_parts(Gauss(0, 3), -1, [Gauss(-1, -1), Gauss(Fraction(-1, 2))])
    code, text = invoke("build", "--charge", write_json("z.json", Z.to_json()), "--partition", "0:I0 2,+:1")
    assert code == 0
    part = json.loads(text)["partition"]
    assert part["I+"] == [1] and part["I0"] == [2]


def test_hn_of_torsion_object(write_json, tmp_path):
    code, text = invoke("classify", "--charge", write_json("std.json", standard_charge(2).to_json()))
    path = tmp_path / "s.json"
    path.write_text(text)
    code, hn = invoke("hn", "--object", "2*Torsion(1,2,zeta)[0]", "--stability", str(path))
    assert code == 0
    factors = json.loads(hn)["factors"]
    assert len(factors) == 1 and factors[0]["phase"] == "1"


def test_theta_needs_positive_genus(write_json, tmp_path):
    code, text = invoke("classify", "--charge", write_json("std.json", standard_charge(1).to_json()))
    path = tmp_path / "s.json"
    path.write_text(text)
    assert invoke("theta", "--stability", str(path))[0] == 3


def test_classify_outside_ubar_exits_2(write_json):
    Z = CentralCharge.from_parts(Gauss(0, -1), -1, [Gauss(-1, 1)])
    assert invoke("classify", "--charge", write_json("bad.json", Z.to_json()))[0] == 2


def test_chambers_grid_four(tmp_path):
    code, text = invoke("chambers", "--local", "--grid", "4")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "re,im,O_p,zeta*O_p,O_2p,zeta*O_2p"
    rows = lines[1:]
    assert len(rows) == 16
    assert all(set(r.split(",")[2:]) <= {"S", "s", "U"} for r in rows)
    svg = tmp_path / "c.svg"
    assert invoke("chambers", "--local", "--grid", "4", "--svg", str(svg))[0] == 0
    assert svg.read_text().count("<rect") == 16


def test_usage_errors():
    assert invoke("classify", "--charge", "x.json", "--bogus")[0] == EX_USAGE
    assert invoke("no-such-command")[0] == EX_USAGE
    assert invoke("chambers", "--grid", "4")[0] == EX_USAGE


def test_glue_check(write_json):
    data = {"G1": ["A"], "G2": ["B", "C"], "homs": [{"from": 0, "to": 0, "degrees": [2]}],
            "s1": {"simples": [{"label": "A", "charge": ["-1", "0"]}]},
            "s2": {"simples": [{"label": "B", "charge": ["0", "1"]}, {"label": "C", "charge": ["-1", "1"]}]}}
    code, text = invoke("glue-check", "--pattern", write_json("p.json", data))
    assert code == 0
    res = json.loads(text)
    assert res["orthogonal"] and res["condition_b"]
    assert res["parameter"]["case"] == "case1"


def test_missing_file_is_precondition_failure():
    assert invoke("classify", "--charge", "/nonexistent/file.json")[0] == 3
