"""Deterministic reproduction runners for the numbered experiments and the
edge-weakening sweep driver.

Every runner is pure computation plus optional artifact files; there is no
randomness anywhere, so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import field, graph, stability
from .diagnostics import spectral_entropy
from .field import SourceSpec, WeightRule
from .spectral import SpectralKernel, eig_symmetric, heat_kernel_weights

# Edge-weakening grid used throughout the sweeps.
EPS_GRID = (1.000, 0.644, 0.287, 0.109, 0.020)

# Reference sweep values: (eps, lambda1, entropy, fiedler_gap).
REFERENCE_SWEEP = (
    (1.000, 0.1522, 1.596, 2.962),
    (0.644, 0.1355, 1.627, 2.933),
    (0.287, 0.0949, 1.658, 2.865),
    (0.109, 0.0481, 1.668, 2.790),
    (0.020, 0.0103, 1.670, 2.733),
)

HEAT_TAUS = (0.1, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class SweepRecord:
    """One row of an edge-weakening sweep."""

    eps: float
    lambda1: float
    h_star: np.ndarray
    entropy: float
    delta_fiedler: float
    coupling_entropy: float
    converged: bool


@dataclass
class ExperimentResult:
    id: str
    passed: bool
    metrics: dict = dc_field(default_factory=dict)
    artifacts: list = dc_field(default_factory=list)


def _write_atomic(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(result: ExperimentResult, out_dir: str | None, table_rows: list[list] | None = None,
          table_header: list[str] | None = None):
    if out_dir is None:
        return
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, f"{result.id}_results.json")
    _write_atomic(json_path, json.dumps(
        {"id": result.id, "passed": result.passed, "metrics": result.metrics}, indent=2))
    result.artifacts.append(json_path)
    if table_rows is not None:
        csv_path = os.path.join(out_dir, f"{result.id}_table.csv")
        lines = [",".join(table_header)] if table_header else []
        for row in table_rows:
            lines.append(",".join(f"{x:.6g}" if isinstance(x, float) else str(x) for x in row))
        _write_atomic(csv_path, "\n".join(lines) + "\n")
        result.artifacts.append(csv_path)


def _p8_setup(weight_rule: WeightRule = WeightRule.UNIFORM):
    g = graph.build_path(8)
    basis = eig_symmetric(graph.laplacian(g))
    spec = SourceSpec(sigma2=1.0, mu2=2.0, weight_rule=weight_rule)
    return g, basis, spec


def run_exp1(out_dir: str | None = None) -> ExperimentResult:
    """Gradient check: analytic geometric response vs central finite differences."""
    _, basis, _ = _p8_setup()
    h0 = np.ones(basis.n)
    kernel = SpectralKernel(h0.copy(), h0)
    analytic = field.geometric_R(kernel)
    step = 1e-6
    fd = np.empty(basis.n)
    for l in range(basis.n):
        hp, hm = h0.copy(), h0.copy()
        hp[l] += step
        hm[l] -= step
        f = lambda h: float(-(h[l]) * np.log(h[l] / h0[l]))
        fd[l] = (f(hp) - f(hm)) / (2 * step)
    err = float(np.max(np.abs(analytic - fd)))
    result = ExperimentResult(
        id="exp1",
        passed=err <= 1e-8,
        metrics={"max_abs_error": err, "fd_step": step, "R_values": list(analytic)},
    )
    _emit(result, out_dir,
          table_rows=[[l, analytic[l], fd[l]] for l in range(basis.n)],
          table_header=["mode", "analytic", "finite_difference"])
    return result


def run_exp2(out_dir: str | None = None) -> ExperimentResult:
    """Fixed-point convergence with the uniform-weight source."""
    _, basis, spec = _p8_setup()
    report = field.solve_fixed_point(spec, basis, np.ones(basis.n))
    h = report.h_star.h
    passed = (
        report.converged
        and bool(np.all(np.abs(h - 0.15470) <= 1e-3))
        and report.residual_inf <= 1e-10
        and 0.09 <= report.contraction_ratio <= 0.15
        and report.iterations <= 30
    )
    result = ExperimentResult(
        id="exp2",
        passed=passed,
        metrics={"h_star": list(h), "iterations": report.iterations,
                 "residual_inf": report.residual_inf,
                 "contraction_ratio": report.contraction_ratio},
    )
    _emit(result, out_dir,
          table_rows=[[l, float(h[l])] for l in range(basis.n)],
          table_header=["mode", "h_star"])
    return result


def run_exp3(out_dir: str | None = None) -> ExperimentResult:
    """Vacuum solution ratio and geodesic log-linearity."""
    _, basis, _ = _p8_setup()
    h0 = np.ones(basis.n)
    vac = field.vacuum_solution(h0)
    vac_err = float(np.max(np.abs(vac.h / h0 - np.exp(-1.0))))

    a = np.zeros(basis.n)
    b = -basis.lambdas
    path = [field.geodesic(a, b, t) for t in (0.0, 1.0, 2.0, 3.0)]
    ratios = np.array([path[i + 1] / path[i] for i in range(3)])
    ratio_dev = float(np.max(np.abs(ratios - ratios[0])))
    rate_err = float(np.max(np.abs(ratios[0] - np.exp(b))))

    passed = vac_err < 1e-6 and ratio_dev <= 1e-12 and rate_err <= 1e-12
    result = ExperimentResult(
        id="exp3",
        passed=passed,
        metrics={"vacuum_ratio_error": vac_err,
                 "geodesic_ratio_deviation": ratio_dev,
                 "geodesic_rate_error": rate_err},
    )
    _emit(result, out_dir,
          table_rows=[[l, float(path[0][l]), float(path[1][l]), float(path[2][l])]
                      for l in range(basis.n)],
          table_header=["mode", "t0", "t1", "t2"])
    return result


def run_exp4(out_dir: str | None = None) -> ExperimentResult:
    """Hessian structure and stability margins at the uniform-source fixed point."""
    _, basis, spec = _p8_setup()
    report = field.solve_fixed_point(spec, basis, np.ones(basis.n))
    srep = stability.stability_report(spec, basis, report.h_star)
    off = srep.hessian - np.diag(np.diag(srep.hessian))
    off_max = float(np.max(np.abs(off)))
    eig_err = float(np.max(np.abs(srep.eigenvalues - (-5.714))))
    margin_err = float(np.max(np.abs(srep.margins - 5.714)))
    scoup_err = abs(srep.coupling_entropy - np.log(7))
    passed = (
        off_max <= 1e-12
        and eig_err <= 0.01
        and margin_err <= 0.01
        and abs(srep.hessian_gap - 5.71) <= 0.01
        and scoup_err <= 1e-9
        and srep.stable
    )
    result = ExperimentResult(
        id="exp4",
        passed=passed,
        metrics={"hessian_offdiag_max": off_max,
                 "eigenvalues": list(srep.eigenvalues),
                 "margins": list(srep.margins),
                 "hessian_gap": srep.hessian_gap,
                 "coupling_entropy": srep.coupling_entropy,
                 "stable": srep.stable},
    )
    _emit(result, out_dir,
          table_rows=[[l, float(srep.eigenvalues[l]), float(srep.margins[l])]
                      for l in range(basis.n)],
          table_header=["mode", "hessian_eigenvalue", "margin"])
    return result


def run_exp5(out_dir: str | None = None) -> ExperimentResult:
    """Heat-kernel field-equation residuals over increasing diffusion time."""
    _, basis, spec = _p8_setup()
    residuals = [field.residual_inf(spec, basis, heat_kernel_weights(basis, tau))
                 for tau in HEAT_TAUS]
    monotone = all(b > a for a, b in zip(residuals, residuals[1:]))
    passed = (monotone
              and abs(residuals[0] - 1.50) <= 0.01
              and abs(residuals[-1] - 17.24) <= 0.05)
    result = ExperimentResult(
        id="exp5",
        passed=passed,
        metrics={"taus": list(HEAT_TAUS), "residuals": residuals,
                 "strictly_increasing": monotone},
    )
    _emit(result, out_dir,
          table_rows=[[tau, r] for tau, r in zip(HEAT_TAUS, residuals)],
          table_header=["tau", "residual_inf"])
    return result


def sweep_graph(base: graph.Graph, u: int, v: int, eps_values,
                coupled: bool = False, eta: float = 0.05,
                weight_rule: WeightRule = WeightRule.EIGENVALUE) -> list[SweepRecord]:
    """Weaken edge (u, v) over eps_values and re-solve the field equation each time.

    The coupling matrix, when requested, is rebuilt per eps from the
    perturbed adjacency. Rows that fail to converge are recorded with
    converged=False, not raised.
    """
    records = []
    for eps in eps_values:
        g = graph.weaken_edge(base, u, v, eps)
        basis = eig_symmetric(graph.laplacian(g))
        if coupled:
            spec = SourceSpec(sigma2=1.0, mu2=2.0, weight_rule=weight_rule,
                              eta=eta, coupling=field.build_coupling(basis, g))
        else:
            spec = SourceSpec(sigma2=1.0, mu2=2.0, weight_rule=weight_rule)
        report = field.solve_fixed_point(spec, basis, np.ones(basis.n))
        srep = stability.stability_report(spec, basis, report.h_star)
        records.append(SweepRecord(
            eps=float(eps),
            lambda1=float(basis.lambdas[1]),
            h_star=report.h_star.h,
            entropy=spectral_entropy(report.h_star.h),
            delta_fiedler=srep.fiedler_gap,
            coupling_entropy=srep.coupling_entropy,
            converged=report.converged,
        ))
    return records


def run_sweep(eps_values=EPS_GRID, coupled: bool = False,
              out_dir: str | None = None, prefix: str = "sweep") -> list[SweepRecord]:
    """Edge-weakening sweep on the 8-node path, edge (2, 3)."""
    records = sweep_graph(graph.build_path(8), 2, 3, eps_values, coupled=coupled)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _emit_sweep_files(records, out_dir, prefix)
    return records


def _emit_sweep_files(records: list[SweepRecord], out_dir: str, prefix: str) -> list[str]:
    cols = {
        "eps": [r.eps for r in records],
        "lambda1": [r.lambda1 for r in records],
        "entropy": [r.entropy for r in records],
        "delta_fiedler": [r.delta_fiedler for r in records],
        "coupling_entropy": [r.coupling_entropy for r in records],
    }

    def normalize(xs):
        lo, hi = min(xs), max(xs)
        if hi - lo == 0:
            return [0.0 for _ in xs]
        return [(x - lo) / (hi - lo) for x in xs]

    header = list(cols) + [f"{k}_norm" for k in cols if k != "eps"]
    lines = [",".join(header)]
    norms = {k: normalize(v) for k, v in cols.items() if k != "eps"}
    for i in range(len(records)):
        row = [f"{cols[k][i]:.17g}" for k in cols]
        row += [f"{norms[k][i]:.17g}" for k in norms]
        lines.append(",".join(row))
    plot_path = os.path.join(out_dir, f"{prefix}_plotdata.csv")
    _write_atomic(plot_path, "\n".join(lines) + "\n")

    json_path = os.path.join(out_dir, f"{prefix}_records.json")
    _write_atomic(json_path, json.dumps([
        {"eps": r.eps, "lambda1": r.lambda1, "h_star": list(r.h_star),
         "entropy": r.entropy, "delta_fiedler": r.delta_fiedler,
         "coupling_entropy": r.coupling_entropy, "converged": r.converged}
        for r in records], indent=2))
    return [plot_path, json_path]


def run_exp6(out_dir: str | None = None) -> ExperimentResult:
    """Reference-sweep reproduction with the eigenvalue-aware source."""
    records = run_sweep(out_dir=out_dir, prefix="sweep")
    rows, ok = [], True
    for rec, (eps, lam1, ent, gap) in zip(records, REFERENCE_SWEEP):
        d_lam = abs(rec.lambda1 - lam1)
        d_ent = abs(rec.entropy - ent)
        d_gap = abs(rec.delta_fiedler - gap)
        ok &= rec.converged and d_lam <= 2e-3 and d_ent <= 5e-3 and d_gap <= 5e-3
        rows.append([eps, rec.lambda1, rec.entropy, rec.delta_fiedler, rec.coupling_entropy])
    result = ExperimentResult(
        id="exp6",
        passed=bool(ok),
        metrics={"rows": [[r.eps, r.lambda1, r.entropy, r.delta_fiedler] for r in records]},
    )
    _emit(result, out_dir, table_rows=rows,
          table_header=["eps", "lambda1", "entropy", "delta_fiedler", "coupling_entropy"])
    return result


def run_exp6b(out_dir: str | None = None) -> ExperimentResult:
    """Coupled-source sweep: coupling entropy becomes eps-dependent."""
    records = run_sweep(coupled=True, out_dir=out_dir, prefix="sweep_coupled")
    scoup = [r.coupling_entropy for r in records]
    entropy = [r.entropy for r in records]
    gaps = [r.delta_fiedler for r in records]
    scoup_range = max(scoup) - min(scoup)
    entropy_up = all(b >= a for a, b in zip(entropy, entropy[1:]))
    gap_down = all(b <= a for a, b in zip(gaps, gaps[1:]))
    passed = (all(r.converged for r in records)
              and scoup_range > 1e-3 and entropy_up and gap_down)
    result = ExperimentResult(
        id="exp6b",
        passed=bool(passed),
        metrics={"coupling_entropy": scoup, "coupling_entropy_range": scoup_range,
                 "entropy_nondecreasing": entropy_up, "gap_nonincreasing": gap_down},
    )
    _emit(result, out_dir,
          table_rows=[[r.eps, r.lambda1, r.entropy, r.delta_fiedler, r.coupling_entropy]
                      for r in records],
          table_header=["eps", "lambda1", "entropy", "delta_fiedler", "coupling_entropy"])
    return result


# Exp. 7 synthetic topologies with their stressed bridge edges: the stem
# edge just past the first tributary, and the mid-trunk edge.
EXP7_TOPOLOGIES = {
    "river": (lambda: graph.build_river_channel(6, [(1, 2), (3, 2)]), (1, 2)),
    "trunk": (lambda: graph.build_trunk_roots(4, 3, 3), (1, 2)),
}


def run_exp7(out_dir: str | None = None) -> ExperimentResult:
    """Constriction sweeps on the river-channel and trunk+roots topologies."""
    metrics: dict = {}
    passed = True
    rows = []
    drops = {}
    for name, (builder, (u, v)) in EXP7_TOPOLOGIES.items():
        base = builder()
        records = sweep_graph(base, u, v, EPS_GRID)
        lam = [r.lambda1 for r in records]
        ent = [r.entropy for r in records]
        gap = [r.delta_fiedler for r in records]
        checks = {
            "lambda1_strictly_decreasing": all(b < a for a, b in zip(lam, lam[1:])),
            "entropy_nondecreasing": all(b >= a for a, b in zip(ent, ent[1:])),
            "gap_nonincreasing": all(b <= a for a, b in zip(gap, gap[1:])),
        }
        passed &= all(checks.values()) and all(r.converged for r in records)
        coupled = sweep_graph(base, u, v, EPS_GRID, coupled=True)
        scoup = [r.coupling_entropy for r in coupled]
        drops[name] = scoup[0] - scoup[-1]
        metrics[name] = {"lambda1": lam, "entropy": ent, "delta_fiedler": gap,
                         "coupling_entropy_coupled": scoup, **checks}
        rows += [[name, r.eps, r.lambda1, r.entropy, r.delta_fiedler] for r in records]
    # Cross-topology comparison is reported, not gating: the topology
    # parameters are package defaults rather than anything canonical.
    metrics["river_scoup_drop_ge_trunk"] = bool(drops["river"] >= drops["trunk"])
    metrics["scoup_drops"] = drops
    result = ExperimentResult(id="exp7", passed=bool(passed), metrics=metrics)
    _emit(result, out_dir, table_rows=rows,
          table_header=["topology", "eps", "lambda1", "entropy", "delta_fiedler"])
    return result


RUNNERS = {
    "exp1": run_exp1,
    "exp2": run_exp2,
    "exp3": run_exp3,
    "exp4": run_exp4,
    "exp5": run_exp5,
    "exp6": run_exp6,
    "exp6b": run_exp6b,
    "exp7": run_exp7,
}


def run_all(out_dir: str | None = None) -> dict[str, ExperimentResult]:
    return {name: runner(out_dir) for name, runner in RUNNERS.items()}
