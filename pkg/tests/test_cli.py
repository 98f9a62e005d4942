import json
import shutil
import subprocess

import pytest

from toricchow import product as prod
from toricchow.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def result(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)["result"]


@pytest.fixture
def files(tmp_path, capsys):
    def gen(name, *params):
        code, out, _ = run(capsys, "gen", name, *params)
        assert code == 0
        p = tmp_path / f"{name}{''.join(params)}.json"
        p.write_text(out)
        return p

    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return p

    return gen, write, tmp_path


def test_gen_and_validate(files, capsys):
    gen, _, _ = files
    r = result(capsys, "validate", gen("p2"))
    assert r["smooth"] and r["complete"] and r["f_vector"] == [1, 3, 3]
    r = result(capsys, "validate", gen("example13", "2"))
    assert not r["simplicial"]


def test_betti(files, capsys):
    gen, _, _ = files
    r = result(capsys, "betti", gen("hypersimplex", "2", "4"))
    assert [row["rank_A^k"] for row in r["table"]] == [1, 1, 5, 1]
    r = result(capsys, "betti", gen("example13", "3"))
    assert r["table"][1]["torsion_A_k"] == [3]


def test_weights_and_cup(files, capsys):
    gen, write, _ = files
    p2 = gen("p2")
    h = write("h.json", {"codim": 1, "values": {"[0]": 1, "[1]": 1, "[2]": 1}})
    assert result(capsys, "weights", "check", p2, h)["balanced"]
    bad = write("bad.json", {"[0]": 1, "[1]": 2, "[2]": 1})
    r = result(capsys, "weights", "check", p2, bad)
    assert not r["balanced"] and r["violations"]
    basis = result(capsys, "weights", "basis", p2, "--codim", 1)
    assert len(basis["1"]) == 1
    r = result(capsys, "cup", p2, h, h)
    assert r["weight"]["values"] == {"[]": "1"}
    r = result(capsys, "cup", p2, h, h, "--displacement", "1,2")
    assert r["certificates"][0]["v"] == [1, 2]


def test_manifest_is_deterministic(files, capsys):
    gen, write, _ = files
    f = gen("hirzebruch", "2")
    w = write("w.json", {"[0]": 1, "[1]": 0, "[2]": 1, "[3]": 2})
    _, out1, _ = run(capsys, "cup", f, w, w, "--seed", 9)
    _, out2, _ = run(capsys, "cup", f, w, w, "--seed", 9)
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["seed"] == 9 and doc["version"] and len(doc["inputs"]) == 2
    assert doc["displacements_used"]


def test_manifest_accepted_as_input(files, capsys, tmp_path):
    gen, write, _ = files
    p2 = gen("p2")
    h = write("h.json", {"[0]": 1, "[1]": 1, "[2]": 1})
    _, out, _ = run(capsys, "cup", p2, h, h)
    m = tmp_path / "m.json"
    m.write_text(out)
    pt = write("pt.json", {"codim": 2, "values": {"[]": 1}})
    r = result(capsys, "cap", p2, m, pt)
    assert sum(int(v) for v in r["cycle"]["values"].values()) == 1


def test_pullback_and_closure(files, capsys):
    gen, write, _ = files
    f2, p1 = gen("hirzebruch", "2"), gen("p1")
    pt = write("pt.json", {"codim": 1, "values": {"[]": 1}})
    r = result(capsys, "pullback", "--source", f2, "--target", p1, "--map", "1,0", pt)
    # the fiber class: it meets the sections D_2, D_4 once and misses the fibers D_1, D_3
    assert r["weight"]["values"] == {"[0]": "0", "[1]": "1", "[2]": "0", "[3]": "1"}
    r = result(capsys, "closure", gen("p2"), "--lattice", "2,1")
    assert sum(int(v) for v in r["cycle"]["values"].values()) == 2


def test_todd_commands(files, capsys):
    gen, _, _ = files
    assert result(capsys, "todd", "ehrhart", gen("p1"))["polynomial"] == "a1 + a2 + 1"
    r = result(capsys, "todd", "count", gen("hirzebruch", "1"), "--a", "1,1,1,1")
    assert r["count"] == 9
    r = result(capsys, "todd", "obstruction", gen("example56"))
    assert r["status"] == "Obstructed" and r["determinant"] == 176
    w = result(capsys, "todd", "weight", gen("p2"))
    assert w["2"]["values"] == {"[]": "1"}
    assert w["1"]["values"]["[0]"] == "3/2"


def test_points_and_polytopes(files, capsys):
    gen, write, _ = files
    sq = write("sq.json", {"vertices": [[0, 0], [2, 0], [0, 2], [2, 2]]})
    assert result(capsys, "points", "count", sq)["count"] == 9
    tri = write("tri.json", {"facets": [{"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
                                        {"normal": [-1, -1], "offset": 1}]})
    assert result(capsys, "points", "list", tri)["points"] == [[0, 0], [0, 1], [1, 0]]
    nf = result(capsys, "polytope", "normalfan", sq)
    assert nf["rank"] == 2 and len(nf["rays"]) == 4
    r = result(capsys, "polytope", "divisor", gen("hirzebruch", "2"), "--a", "0,1,0,0")
    assert r["in_K"] is False


def test_pretty_output(files, capsys):
    gen, _, _ = files
    code, out, _ = run(capsys, "betti", gen("p2"), "--pretty")
    assert code == 0 and "result:" in out and not out.startswith("{")


def test_exit_codes(files, capsys, monkeypatch):
    gen, write, tmp = files
    p2 = gen("p2")
    h = write("h.json", {"[0]": 1, "[1]": 1, "[2]": 1})
    assert run(capsys, "validate", tmp / "missing.json")[0] == 2
    (tmp / "junk.json").write_text("{not json")
    assert run(capsys, "validate", tmp / "junk.json")[0] == 2
    overlap = write("o.json", {"rank": 2, "rays": [[1, 0], [0, 1], [1, 1]], "max_cones": [[0, 1], [0, 2]]})
    assert run(capsys, "validate", overlap)[0] == 2
    assert run(capsys, "gen", "nosuchfan")[0] == 2
    half = write("half.json", {"rank": 2, "rays": [[1, 0], [0, 1]], "max_cones": [[0, 1]]})
    assert run(capsys, "weights", "basis", half)[0] == 3
    assert run(capsys, "todd", "weight", gen("example56"))[0] == 3
    assert run(capsys, "cup", p2, h, h, "--displacement", "0,0")[0] == 3
    q = write("q.json", {"[0]": "1/2", "[1]": "1/2", "[2]": "1/2"})
    assert run(capsys, "weights", "check", p2, q)[0] == 2
    assert run(capsys, "weights", "check", p2, q, "--rational")[0] == 0
    monkeypatch.setattr(prod, "MAX_ATTEMPTS", 0)
    assert run(capsys, "cup", p2, h, h)[0] == 4


@pytest.mark.skipif(shutil.which("toricchow") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["toricchow", "gen", "p2"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["rank"] == 2
