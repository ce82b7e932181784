"""Command-line orchestration for the experiments.

Every subcommand resolves its arguments into a serializable config dict,
hashes it, and stamps the hash into all file outputs, so a saved config
reruns bit-identically. Exit codes: 0 ok, 2 usage error, 3 resource budget
exceeded, 4 invariant violation (a guaranteed property failed: a bug).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys

import numpy as np

from . import critical, percolation
from .embedded_tree import build_chandelier, chandelier_sequence, grow_tree, tree_pc
from .errors import InvariantViolation, ResourceBudgetError, StructuralError
from .matching import MatchingGraph, matching_graph
from .planar import RotationGraph, graph_from_obj, save_graph, shortest_path
from .render import render_svg
from .tiling import DEFAULT_BUDGET, TilingSpec, build_ball, build_path, build_reference_tree
from .walks import WalkRule, turn_walk

__all__ = ["main", "run", "config_hash"]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _load_graph(path):
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("star_edges") is not None:
        return MatchingGraph.from_obj(obj)
    return graph_from_obj(obj)


def _base_graph(graph):
    return graph.base if isinstance(graph, MatchingGraph) else graph


def _write_csv(path, header, rows, chash, config):
    with open(path, "w", newline="") as fh:
        fh.write(f"# hyperperc-config {chash}\n")
        fh.write(f"# {json.dumps(config, sort_keys=True)}\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _run_generate(cfg):
    if cfg.get("ref_tree_degree") is not None:
        g = build_reference_tree(cfg["ref_tree_degree"], cfg["radius"],
                                 budget=cfg["budget"])
    elif cfg.get("path_length") is not None:
        g = build_path(cfg["path_length"])
    else:
        spec = TilingSpec(cfg["p_face"], cfg["q_vertex"], cfg["radius"],
                          non_paper_regime=cfg["non_paper_regime"])
        g = build_ball(spec, budget=cfg["budget"])
    out = cfg["out"] or "graph.json"
    save_graph(g, out)
    _emit({"config_hash": config_hash(cfg), "vertices": g.n,
           "edges": g.n_edges, "boundary": int(g.boundary.sum()),
           "file": out}, None)
    return 0


def _run_walk(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    rule = WalkRule.label_shift(cfg["rule"])
    u, v = cfg["start"]
    res = turn_walk(g, (u, v), rule, cfg["steps"])
    _emit({"config_hash": config_hash(cfg), "vertices": res.vertices,
           "truncated": res.truncated, "steps": len(res.vertices) - 1},
          cfg["out"])
    return 0


def _run_tree(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    t = grow_tree(g, cfg["root"], cfg["condition"], cfg["depth"],
                  start_slot=cfg["start_slot"])
    t.validate()
    pc = tree_pc()
    summary = {
        "config_hash": config_hash(cfg),
        "root": t.root,
        "levels": [len(lv) for lv in t.levels()],
        "vertices": len(t.vertices()),
        "truncated": t.truncated,
        "tree_pc": pc.p_c,
        "tree_pc_closed_form_bound": pc.closed_form_bound,
    }
    if cfg["svg"]:
        render_svg(g, cfg["svg"], overlay_edges=t.tree_edges, root=cfg["root"],
                   comment=f"hyperperc-config {config_hash(cfg)}")
        summary["svg"] = cfg["svg"]
    _emit(summary, cfg["out"])
    return 0


def _run_chandelier(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    if cfg.get("geodesic_to") is not None:
        geo = shortest_path(g, cfg["root"], cfg["geodesic_to"])
        seq = chandelier_sequence(g, geo, depth_cap=cfg["depth"])
        edges = set()
        for ch in seq.left + seq.right:
            v, v1, v2 = ch.spine
            edges |= {(min(v, v1), max(v, v1)), (min(v1, v2), max(v1, v2))}
            edges |= ch.subtree.tree_edges
        summary = {
            "config_hash": config_hash(cfg),
            "geodesic": geo,
            "left_roots": [c.root for c in seq.left],
            "right_roots": [c.root for c in seq.right],
            "pairs": seq.pair_count,
        }
    else:
        ch = build_chandelier(g, cfg["root"], cfg["side"], cfg["depth"],
                              start_slot=cfg["start_slot"])
        edges = {(min(a, b), max(a, b)) for a, b in
                 [(ch.spine[0], ch.spine[1]), (ch.spine[1], ch.spine[2])]}
        edges |= ch.subtree.tree_edges
        summary = {
            "config_hash": config_hash(cfg),
            "spine": list(ch.spine),
            "side": ch.side,
            "vertices": len(ch.vertex_set()),
        }
    if cfg["svg"]:
        render_svg(g, cfg["svg"], overlay_edges=edges,
                   comment=f"hyperperc-config {config_hash(cfg)}")
        summary["svg"] = cfg["svg"]
    _emit(summary, cfg["out"])
    return 0


def _run_matching(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    mg = matching_graph(g)
    out = cfg["out"] or "matching.json"
    with open(out, "w") as fh:
        json.dump(mg.to_obj(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    _emit({"config_hash": config_hash(cfg), "vertices": mg.n,
           "edges": mg.base.n_edges, "star_edges": len(mg.star_edges),
           "file": out}, None)
    return 0


def _run_percolate(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    rows = []
    for i in range(cfg["samples"]):
        conf = percolation.sample(g, cfg["p"], cfg["seed"], i)
        for state in (1, 0):
            lab = percolation.label_clusters(g, conf, state, "graph")
            rows.append([f"{cfg['p']:.10g}", i, state,
                         int(lab.touches_boundary.sum()), lab.largest_size()])
    out = cfg["report"] or "percolation.csv"
    _write_csv(out, ["p", "sample", "state", "clusters_touching",
                     "largest_size"], rows, config_hash(cfg), cfg)
    _emit({"config_hash": config_hash(cfg), "file": out,
           "samples": cfg["samples"]}, None)
    return 0


def _run_two_point(cfg):
    graph = _load_graph(cfg["graph"])
    if cfg["mode"] == "star" or cfg["endpoints"] == "star_boundary":
        if not isinstance(graph, MatchingGraph):
            graph = matching_graph(_base_graph(graph))
    est = percolation.two_point(graph, cfg["p"], cfg["u"], cfg["v"],
                                cfg["samples"], seed=cfg["seed"],
                                mode=cfg["mode"], endpoints=cfg["endpoints"],
                                threads=cfg["threads"])
    _emit({"config_hash": config_hash(cfg), "p_hat": est.p_hat,
           "stderr": est.stderr, "hits": est.hits,
           "n_samples": est.n_samples}, cfg["out"])
    return 0


def _run_decay(cfg):
    graph = _load_graph(cfg["graph"])
    if not isinstance(graph, MatchingGraph):
        graph = matching_graph(_base_graph(graph))
    pairs = critical.auto_pair_schedule(graph, cfg["d_min"], cfg["d_max"])
    fit = critical.decay_fit(graph, cfg["p"], pairs, cfg["samples"],
                             seed=cfg["seed"], mode=cfg["mode"],
                             endpoints=cfg["endpoints"],
                             threads=cfg["threads"])
    if cfg["csv"]:
        rows = [[d, h, fit.n_samples, f"{e:.10g}",
                 f"{np.sqrt(e * (1 - e) / fit.n_samples):.10g}"]
                for d, h, e in zip(fit.distances, fit.hits, fit.estimates)]
        _write_csv(cfg["csv"], ["distance", "hits", "samples", "p_hat", "se"],
                   rows, config_hash(cfg), cfg)
    _emit({"config_hash": config_hash(cfg), "slope": fit.slope,
           "c_p": fit.c_p, "stderr": fit.stderr, "ci95": list(fit.ci95),
           "r2": fit.r2, "distances": fit.distances,
           "estimates": fit.estimates}, cfg["out"])
    return 0


def _run_phi(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    region = critical.PhiRegion.ball(g, cfg["v"], cfg["radius"])
    est = critical.phi(g, cfg["p"], region, method=cfg["method"],
                       n_samples=cfg["samples"], seed=cfg["seed"])
    _emit({"config_hash": config_hash(cfg), "phi": est.value,
           "stderr": est.stderr, "method": est.method,
           "interior": len(region.interior),
           "frontier": len(region.frontier)}, cfg["out"])
    return 0


def _run_certify(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    cert = critical.subcritical_certificate(
        g, cfg["p"], cfg["v"], cfg["max_radius"], epsilon=cfg["epsilon"],
        n_samples=cfg["samples"], seed=cfg["seed"])
    obj = {"config_hash": config_hash(cfg), "certificate": None}
    if cert is not None:
        obj["certificate"] = {"v": cert.v, "radius": cert.radius,
                              "phi": cert.phi_value, "stderr": cert.phi_stderr,
                              "epsilon": cert.epsilon, "method": cert.method}
    _emit(obj, cfg["out"])
    return 0


def _run_contour(cfg):
    graph = _load_graph(cfg["graph"])
    mg = graph if isinstance(graph, MatchingGraph) \
        else matching_graph(_base_graph(graph))
    conf = percolation.sample(mg.base, cfg["p"], cfg["seed"], cfg["sample"])
    clusters = percolation.finite_interior_zero_star_clusters(mg, conf)
    contours = []
    for cl in clusters:
        walk = percolation.outer_boundary(mg, conf, cl)
        enclosed = percolation.verify_enclosure(mg, walk, cl)
        contours.append({"cluster_size": int(len(cl)),
                         "contour": [int(x) for x in walk],
                         "encloses": bool(enclosed)})
    _emit({"config_hash": config_hash(cfg), "p": cfg["p"],
           "clusters": len(contours), "contours": contours}, cfg["out"])
    return 0


def _run_render(cfg):
    g = _base_graph(_load_graph(cfg["graph"]))
    overlay = set()
    if cfg["tree_depth"] is not None:
        t = grow_tree(g, cfg["root"], 1, cfg["tree_depth"])
        overlay = t.tree_edges
    out = cfg["out"] or "patch.svg"
    render_svg(g, out, overlay_edges=overlay, root=cfg["root"],
               comment=f"hyperperc-config {config_hash(cfg)}")
    _emit({"config_hash": config_hash(cfg), "file": out}, None)
    return 0


_RUNNERS = {
    "generate": _run_generate,
    "walk": _run_walk,
    "tree": _run_tree,
    "chandelier": _run_chandelier,
    "matching": _run_matching,
    "percolate": _run_percolate,
    "two-point": _run_two_point,
    "decay": _run_decay,
    "phi": _run_phi,
    "certify": _run_certify,
    "contour": _run_contour,
    "render": _run_render,
}


def run(config: dict) -> int:
    """Execute a resolved experiment config (as produced by the parser)."""
    cmd = config.get("command")
    if cmd not in _RUNNERS:
        raise StructuralError(f"unknown command {cmd!r}")
    return _RUNNERS[cmd](config)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser():
    ap = argparse.ArgumentParser(
        prog="hyperperc",
        description="Percolation experiments on negatively curved planar patches")
    ap.add_argument("--config", help="run a saved config JSON and exit")
    sub = ap.add_subparsers(dest="command")

    def common(sp, graph=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        sp.add_argument("--out", default=None)
        if graph:
            sp.add_argument("--graph", required=True)

    sp = sub.add_parser("generate", help="build a {p,q} ball / tree / path")
    sp.add_argument("--p", dest="p_face", type=int, default=3)
    sp.add_argument("--q", dest="q_vertex", type=int, default=7)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--non-paper-regime", action="store_true",
                    help="allow flat controls such as {4,4}")
    sp.add_argument("--ref-tree-degree", type=int, default=None,
                    help="build the reference tree with this root degree")
    sp.add_argument("--path-length", type=int, default=None)
    common(sp, graph=False)

    sp = sub.add_parser("walk", help="run a turn-rule walk")
    sp.add_argument("--rule", type=int, required=True,
                    help="label shift: +3, -3, +2 or -2")
    sp.add_argument("--start", required=True, help="directed edge 'u,v'")
    sp.add_argument("--steps", type=int, default=100)
    common(sp)

    sp = sub.add_parser("tree", help="grow an embedded tree")
    sp.add_argument("--root", type=int, default=0)
    sp.add_argument("--condition", type=int, choices=(1, 2), default=1)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--start-slot", type=int, default=0)
    sp.add_argument("--svg", default=None)
    common(sp)

    sp = sub.add_parser("chandelier", help="build chandeliers")
    sp.add_argument("--root", type=int, default=0)
    sp.add_argument("--side", choices=("left", "right"), default="left")
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--start-slot", type=int, default=0)
    sp.add_argument("--geodesic-to", type=int, default=None,
                    help="build the alternating sequence along a geodesic")
    sp.add_argument("--svg", default=None)
    common(sp)

    sp = sub.add_parser("matching", help="build the star adjacency")
    common(sp)

    sp = sub.add_parser("percolate", help="sample and label clusters")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--report", default=None)
    common(sp)

    sp = sub.add_parser("two-point", help="Monte Carlo connection probability")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--u", type=int, required=True)
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--mode", choices=("graph", "star"), default="graph")
    sp.add_argument("--endpoints", choices=("vertex", "star_boundary"),
                    default="vertex")
    common(sp)

    sp = sub.add_parser("decay", help="fit the two-point decay rate")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--pairs", default="auto",
                    help="currently only 'auto' schedules")
    sp.add_argument("--d-min", type=int, default=1)
    sp.add_argument("--d-max", type=int, default=5)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--mode", choices=("graph", "star"), default="graph")
    sp.add_argument("--endpoints", choices=("vertex", "star_boundary"),
                    default="vertex")
    sp.add_argument("--csv", default=None)
    common(sp)

    sp = sub.add_parser("phi", help="the sharp-threshold functional on a ball")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--v", type=int, default=0)
    sp.add_argument("--radius", type=int, default=2)
    sp.add_argument("--method", choices=("exact", "monte_carlo", "auto"),
                    default="auto")
    sp.add_argument("--samples", type=int, default=20000)
    common(sp)

    sp = sub.add_parser("certify", help="search for a subcritical certificate")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--v", type=int, default=0)
    sp.add_argument("--max-radius", type=int, default=4)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--samples", type=int, default=20000)
    common(sp)

    sp = sub.add_parser("contour", help="outer boundaries of closed star-clusters")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--sample", type=int, default=0)
    common(sp)

    sp = sub.add_parser("render", help="SVG picture of a patch")
    sp.add_argument("--root", type=int, default=0)
    sp.add_argument("--tree-depth", type=int, default=None,
                    help="overlay an embedded tree of this depth")
    common(sp)
    return ap


def _resolve(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "config"}
    if cfg.get("command") == "walk":
        parts = cfg["start"].split(",")
        if len(parts) != 2:
            raise StructuralError("--start must be 'u,v'")
        cfg["start"] = [int(parts[0]), int(parts[1])]
    return cfg


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = json.load(fh)
        else:
            if not args.command:
                ap.print_help()
                return 2
            cfg = _resolve(args)
        return run(cfg)
    except (StructuralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceBudgetError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant violation (bug): {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
