import json
import os

from hyperperc.cli import main


def run(args):
    return main([str(a) for a in args])


def test_generate_and_reports(tmp_path):
    os.chdir(tmp_path)
    assert run(["generate", "--p", 3, "--q", 7, "--radius", 2,
                "--out", "ball.json"]) == 0
    obj = json.load(open("ball.json"))
    assert obj["vertex_count"] == 29

    assert run(["walk", "--graph", "ball.json", "--rule", "3",
                "--start", "0,1", "--steps", "5", "--out", "walk.json"]) == 0
    w = json.load(open("walk.json"))
    assert len(w["vertices"]) == len(set(w["vertices"]))

    assert run(["tree", "--graph", "ball.json", "--depth", "1",
                "--svg", "tree.svg", "--out", "tree.json"]) == 0
    t = json.load(open("tree.json"))
    assert t["levels"] == [1, 2, 5]
    svg = open("tree.svg").read()
    assert "#cc1111" in svg and "<svg" in svg

    assert run(["matching", "--graph", "ball.json", "--out", "mg.json"]) == 0
    mg = json.load(open("mg.json"))
    assert mg["star_edges"] == []


def test_percolate_reproducible(tmp_path):
    os.chdir(tmp_path)
    run(["generate", "--p", 3, "--q", 7, "--radius", 3, "--out", "b.json"])
    args = ["percolate", "--graph", "b.json", "--p", "0.5", "--samples", "20",
            "--seed", "42", "--report", "a.csv"]
    assert run(args) == 0
    first = open("a.csv", "rb").read()
    os.unlink("a.csv")
    assert run(args) == 0
    second = open("a.csv", "rb").read()
    assert first == second
    lines = first.decode().splitlines()
    assert lines[0].startswith("# hyperperc-config ")
    assert lines[2] == "p,sample,state,clusters_touching,largest_size"


def test_percolate_p0(tmp_path):
    os.chdir(tmp_path)
    run(["generate", "--p", 3, "--q", 7, "--radius", 2, "--out", "b.json"])
    run(["percolate", "--graph", "b.json", "--p", "0", "--samples", "1",
         "--report", "zero.csv"])
    rows = [l for l in open("zero.csv").read().splitlines()
            if l and not l.startswith("#")][1:]
    by_state = {r.split(",")[2]: r for r in rows}
    assert by_state["1"].split(",")[3:] == ["0", "0"]


def test_two_point_decay_phi_certify_contour(tmp_path):
    os.chdir(tmp_path)
    run(["generate", "--p", 3, "--q", 7, "--radius", 7, "--out", "b.json"])
    assert run(["two-point", "--graph", "b.json", "--p", "0.5", "--u", "0",
                "--v", "3", "--samples", "500", "--out", "tp.json"]) == 0
    tp = json.load(open("tp.json"))
    assert 0 <= tp["p_hat"] <= 1

    assert run(["decay", "--graph", "b.json", "--p", "0.5", "--d-min", "1",
                "--d-max", "3", "--samples", "400", "--csv", "d.csv",
                "--out", "d.json"]) == 0
    assert json.load(open("d.json"))["slope"] < 0

    assert run(["phi", "--graph", "b.json", "--v", "0", "--radius", "2",
                "--p", "0.2", "--method", "exact", "--out", "phi.json"]) == 0
    assert json.load(open("phi.json"))["method"] == "exact"

    assert run(["certify", "--graph", "b.json", "--p", "0.1",
                "--max-radius", "3", "--out", "c.json"]) == 0
    assert json.load(open("c.json"))["certificate"] is not None

    assert run(["contour", "--graph", "b.json", "--p", "0.7", "--seed", "3",
                "--out", "k.json"]) == 0
    k = json.load(open("k.json"))
    assert all(c["encloses"] for c in k["contours"])

    assert run(["render", "--graph", "b.json", "--out", "pic.svg"]) == 0
    assert "<svg" in open("pic.svg").read()


def test_config_rerun(tmp_path):
    os.chdir(tmp_path)
    run(["generate", "--p", 3, "--q", 7, "--radius", 2, "--out", "b.json"])
    cfg = {"command": "percolate", "graph": "b.json", "p": 0.4, "samples": 5,
           "seed": 7, "threads": 1, "budget": 2_000_000, "out": None,
           "report": "r1.csv"}
    json.dump(cfg, open("cfg.json", "w"))
    assert run(["--config", "cfg.json"]) == 0
    cfg["report"] = "r2.csv"
    json.dump(cfg, open("cfg.json", "w"))
    assert run(["--config", "cfg.json"]) == 0
    a = open("r1.csv").read().replace("r1.csv", "X")
    b = open("r2.csv").read().replace("r2.csv", "X")
    # identical except the self-referential report path inside the stamp
    assert [l for l in a.splitlines() if not l.startswith("#")] == \
        [l for l in b.splitlines() if not l.startswith("#")]


def test_exit_codes(tmp_path):
    os.chdir(tmp_path)
    assert run(["generate", "--p", 3, "--q", 7, "--radius", 30,
                "--out", "x.json"]) == 3
    run(["generate", "--p", 3, "--q", 7, "--radius", 2, "--out", "b.json"])
    assert run(["walk", "--graph", "b.json", "--rule", "5",
                "--start", "0,1"]) == 2
    assert run(["walk", "--graph", "b.json", "--rule", "3",
                "--start", "0"]) == 2
