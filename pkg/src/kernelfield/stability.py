"""Second-order structure at a kernel: Hessian, stability margins, gaps,
and the inter-mode coupling entropy.

The Hessian H_lm = -delta_lm / h_l - J_lm can be asymmetric when the
source couples modes through a non-symmetric C. The quadratic form only
sees the symmetric part, so the definiteness verdict (and the gap Delta)
are computed from (H + H^T) / 2; the Fiedler-mode gap Delta' uses the raw
diagonal entries over nonzero modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .field import SourceSpec, source_jacobian
from .spectral import EigenBasis, SpectralKernel, eig_symmetric

_ZERO_MODE_TOL = 1e-10
_EMPTY_ROW_TOL = 1e-14


@dataclass(frozen=True)
class StabilityReport:
    """Full stability diagnostics at one kernel.

    `eigenvalues` are those of the symmetrized Hessian, ascending;
    `symmetrized` records that convention.
    """

    hessian: np.ndarray
    eigenvalues: np.ndarray
    margins: np.ndarray
    hessian_gap: float
    fiedler_gap: float
    coupling_entropy: float
    stable: bool
    symmetrized: bool = True

    def to_json(self, include_hessian: bool = True) -> str:
        obj = {
            "eigenvalues": list(self.eigenvalues),
            "margins": list(self.margins),
            "hessian_gap": self.hessian_gap,
            "fiedler_gap": self.fiedler_gap,
            "coupling_entropy": self.coupling_entropy,
            "stable": self.stable,
            "symmetrized": self.symmetrized,
        }
        if include_hessian and self.hessian.shape[0] <= 64:
            obj["hessian"] = [list(row) for row in self.hessian]
        return json.dumps(obj)


def hessian(spec: SourceSpec, basis: EigenBasis, kernel: SpectralKernel) -> np.ndarray:
    """H_lm = -delta_lm / h_l - J_lm."""
    return -np.diag(1.0 / kernel.h) - source_jacobian(spec, basis, kernel.h)


def per_mode_margin(spec: SourceSpec, basis: EigenBasis, kernel: SpectralKernel) -> np.ndarray:
    """margin_l = J_ll + 1/h_l; positive means the mode is diagonally stable."""
    jac = source_jacobian(spec, basis, kernel.h)
    return np.diag(jac) + 1.0 / kernel.h


def hessian_gap(hess: np.ndarray, lambdas: np.ndarray) -> tuple[float, float]:
    """(Delta, Delta'): min eigenvalue of -sym(H), and min -H_ll over nonzero modes."""
    sym = (hess + hess.T) / 2.0
    eigs = eig_symmetric(-sym).lambdas
    delta = float(eigs[0])
    nonzero = lambdas > _ZERO_MODE_TOL
    delta_fiedler = float(np.min(-np.diag(hess)[nonzero]))
    return delta, delta_fiedler


def coupling_entropy(spec: SourceSpec, basis: EigenBasis, kernel: SpectralKernel) -> float:
    """Mean Shannon entropy of normalized off-diagonal Jacobian magnitudes.

    Rows with no off-diagonal mass carry the maximal entropy ln(N-1),
    the convention under which a strictly diagonal source reports the
    maximum (no preferential coupling).
    """
    jac = np.abs(source_jacobian(spec, basis, kernel.h))
    n = jac.shape[0]
    total = 0.0
    for l in range(n):
        off = np.delete(jac[l], l)
        mass = off.sum()
        if mass < _EMPTY_ROW_TOL:
            total += np.log(n - 1)
            continue
        p = off / mass
        p = p[p > 0]
        total += float(-(p * np.log(p)).sum())
    return total / n


def stability_report(spec: SourceSpec, basis: EigenBasis, kernel: SpectralKernel) -> StabilityReport:
    """Assemble Hessian, eigenvalues, margins, gaps, and coupling entropy."""
    hess = hessian(spec, basis, kernel)
    sym = (hess + hess.T) / 2.0
    eigs = eig_symmetric(sym).lambdas
    delta, delta_fiedler = hessian_gap(hess, basis.lambdas)
    return StabilityReport(
        hessian=hess,
        eigenvalues=eigs,
        margins=per_mode_margin(spec, basis, kernel),
        hessian_gap=delta,
        fiedler_gap=delta_fiedler,
        coupling_entropy=coupling_entropy(spec, basis, kernel),
        stable=bool(eigs[-1] < 0),
    )
