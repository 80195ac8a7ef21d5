"""Command-line interface.

Subcommands: solve (single fixed-point run), reproduce (experiment
runners), sweep (edge-weakening driver), graph (dump Laplacian and
spectrum). Exit codes are the machine contract: 0 success, 1 input
error, 2 numerical non-convergence. All artifact files are written
atomically (temp file + rename).

Builtin graph mini-grammar:
    path:N
    path:N:weaken=u,v,eps
    river:stem,attach1,len1[,attach2,len2,...]
    trunk:len,rootfan,branchfan
Anything else is treated as a path to a graph JSON file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments, field, graph as graphmod, stability
from .diagnostics import DEFAULT_ALARM_MARGIN, diagnostics_record
from .errors import KernelFieldError, NumericalError
from .experiments import EPS_GRID, EXP7_TOPOLOGIES, RUNNERS, _write_atomic
from .field import SourceSpec, WeightRule
from .spectral import eig_symmetric, eigenbasis_to_csv

# Stressed edges for the builtin sweep targets.
_SWEEP_EDGES = {
    "path": (2, 3),
    "river": EXP7_TOPOLOGIES["river"][1],
    "trunk": EXP7_TOPOLOGIES["trunk"][1],
}


def parse_graph_spec(spec: str) -> graphmod.Graph:
    """Resolve a builtin graph spec or load a graph JSON file."""
    head, _, rest = spec.partition(":")
    try:
        if head == "path":
            n_str, _, mod = rest.partition(":")
            g = graphmod.build_path(int(n_str))
            if mod:
                if not mod.startswith("weaken="):
                    raise ValueError(f"unknown path modifier {mod!r}")
                u, v, eps = mod[len("weaken="):].split(",")
                g = graphmod.weaken_edge(g, int(u), int(v), float(eps))
            return g
        if head == "river":
            parts = [x for x in rest.split(",") if x]
            if len(parts) % 2 != 1:
                raise ValueError("river spec needs stem,attach1,len1,...")
            stem = int(parts[0])
            tribs = [(int(a), int(b)) for a, b in zip(parts[1::2], parts[2::2])]
            return graphmod.build_river_channel(stem, tribs)
        if head == "trunk":
            tl, rf, bf = (int(x) for x in rest.split(","))
            return graphmod.build_trunk_roots(tl, rf, bf)
    except (ValueError, KernelFieldError) as exc:
        raise KernelFieldError(f"bad graph spec {spec!r}: {exc}") from exc
    try:
        with open(spec) as fh:
            return graphmod.from_json(fh.read())
    except OSError as exc:
        raise KernelFieldError(f"cannot read graph file {spec!r}: {exc}") from exc


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise KernelFieldError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(obj, dict):
        raise KernelFieldError("config must be a JSON object")
    return obj


def _setting(args, config: dict, key: str, default):
    """CLI flag wins over config field wins over default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    return config.get(key, default)


def _make_spec(args, config, basis, g) -> SourceSpec:
    sigma2 = float(_setting(args, config, "sigma2", 1.0))
    mu2 = float(_setting(args, config, "mu2", 2.0))
    weights = str(_setting(args, config, "weights", "uniform"))
    eta = float(_setting(args, config, "eta", 0.0))
    rule = WeightRule(weights)
    coupling = field.build_coupling(basis, g) if eta > 0 else None
    return SourceSpec(sigma2=sigma2, mu2=mu2, weight_rule=rule, eta=eta, coupling=coupling)


def cmd_solve(args) -> int:
    config = _load_config(args.config)
    g = parse_graph_spec(str(_setting(args, config, "graph", "path:8")))
    basis = eig_symmetric(graphmod.laplacian(g))
    spec = _make_spec(args, config, basis, g)
    tol = float(_setting(args, config, "tol", 1e-12))
    max_iter = int(_setting(args, config, "max_iter", 200))
    out = str(_setting(args, config, "out", "."))
    os.makedirs(out, exist_ok=True)

    report = field.solve_fixed_point(spec, basis, np.ones(basis.n), tol=tol, max_iter=max_iter)
    srep = stability.stability_report(spec, basis, report.h_star)
    drec = diagnostics_record(report.h_star.h, report.h_star.h0, margin=DEFAULT_ALARM_MARGIN)
    _write_atomic(os.path.join(out, "fixed_point.json"), report.to_json())
    _write_atomic(os.path.join(out, "stability.json"), srep.to_json())
    _write_atomic(os.path.join(out, "diagnostics.json"), drec.to_json())
    print(f"converged={report.converged} iterations={report.iterations} "
          f"residual={report.residual_inf:.6g} ratio={report.contraction_ratio:.6g}")
    return 0 if report.converged else 2


def cmd_reproduce(args) -> int:
    if args.experiment == "all":
        names = list(RUNNERS)
    elif args.experiment in RUNNERS:
        names = [args.experiment]
    else:
        print(f"unknown experiment {args.experiment!r}; "
              f"choose from {', '.join(RUNNERS)} or 'all'", file=sys.stderr)
        return 1
    all_passed = True
    for name in names:
        result = RUNNERS[name](args.out)
        all_passed &= result.passed
        print(f"{name}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if all_passed else 2


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    target = str(_setting(args, config, "graph", "path"))
    eps_values = _setting(args, config, "eps_values", None)
    if eps_values is None:
        eps_values = list(EPS_GRID)
    elif isinstance(eps_values, str):
        eps_values = [float(x) for x in eps_values.split(",")]
    coupled = bool(_setting(args, config, "coupled", False))
    eta = float(_setting(args, config, "eta", 0.05))
    out = str(_setting(args, config, "out", "."))

    if target == "path":
        base = graphmod.build_path(8)
    elif target in ("river", "trunk"):
        base = EXP7_TOPOLOGIES[target][0]()
    else:
        base = parse_graph_spec(target)
        if target not in _SWEEP_EDGES:
            print(f"sweep needs a builtin graph (path, river, trunk), got {target!r}",
                  file=sys.stderr)
            return 1
    u, v = _SWEEP_EDGES[target]
    records = experiments.sweep_graph(base, u, v, eps_values, coupled=coupled, eta=eta)
    os.makedirs(out, exist_ok=True)
    prefix = f"sweep_{target}" + ("_coupled" if coupled else "")
    experiments._emit_sweep_files(records, out, prefix)
    for r in records:
        flag = "" if r.converged else "  [not converged]"
        print(f"eps={r.eps:.6g} lambda1={r.lambda1:.6g} entropy={r.entropy:.6g} "
              f"delta_fiedler={r.delta_fiedler:.6g} coupling_entropy={r.coupling_entropy:.6g}{flag}")
    return 0


def cmd_graph(args) -> int:
    g = parse_graph_spec(args.graph)
    basis = eig_symmetric(graphmod.laplacian(g))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_atomic(os.path.join(args.out, "graph.json"), graphmod.to_json(g))
        _write_atomic(os.path.join(args.out, "eigenbasis.csv"), eigenbasis_to_csv(basis))
    print(f"n={g.n} edges={len(g.edges)} connected={graphmod.is_connected(g)}")
    print("eigenvalues: " + " ".join(f"{x:.6g}" for x in basis.lambdas))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kernelfield", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve the field equation on one graph")
    p_solve.add_argument("--config")
    p_solve.add_argument("--graph")
    p_solve.add_argument("--sigma2", type=float)
    p_solve.add_argument("--mu2", type=float)
    p_solve.add_argument("--weights", choices=["uniform", "eigenvalue"])
    p_solve.add_argument("--eta", type=float)
    p_solve.add_argument("--tol", type=float)
    p_solve.add_argument("--max-iter", dest="max_iter", type=int)
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=cmd_solve)

    p_rep = sub.add_parser("reproduce", help="run experiment reproductions")
    p_rep.add_argument("experiment")
    p_rep.add_argument("--out")
    p_rep.set_defaults(func=cmd_reproduce)

    p_sweep = sub.add_parser("sweep", help="edge-weakening diagnostic sweep")
    p_sweep.add_argument("--config")
    p_sweep.add_argument("--graph")
    p_sweep.add_argument("--eps-values", dest="eps_values")
    p_sweep.add_argument("--coupled", action="store_true", default=None)
    p_sweep.add_argument("--eta", type=float)
    p_sweep.add_argument("--out")
    p_sweep.set_defaults(func=cmd_sweep)

    p_graph = sub.add_parser("graph", help="dump a graph and its spectrum")
    p_graph.add_argument("graph")
    p_graph.add_argument("--out")
    p_graph.set_defaults(func=cmd_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (KernelFieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
