"""Entanglement bounds and verdicts built on the product numerical radius.

The central quantity is R_m = sqrt(1 - L_m) - sqrt(1 - Tr rho^2): its square
(after clipping at zero) lower-bounds the geometric measure of entanglement
of the mixed state, while 1 - L_m is a natural (typically rough) upper
bound.  L_m < Tr rho^2 certifies that the state is not m-separable.  Closed
forms for the isotropic family allow entanglement-ordering scans that
certify one state to be more entangled than a reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prodrad import SeeSawConfig, product_radius
from .qstate import (
    TOL_PSD,
    DensityMatrix,
    partial_trace,
    partial_transpose,
    purity,
)

__all__ = [
    "BoundReport",
    "OrderingPoint",
    "bound_report",
    "exact_E_isotropic",
    "R_generalized_werner",
    "ordering_region",
    "isotropic_separability_point",
]

# Strict margin distinguishing a genuine L < purity gap from round-off.
_CRITERION_MARGIN = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """All bound and test outputs for one state at one separability level.

    criterion_13 is None ("inconclusive") when the optimizer did not
    converge: an underestimated radius could flag entanglement spuriously,
    so the verdict is withheld rather than weakened.
    """

    m: int
    L: float
    purity: float
    R: float
    lower: float
    upper: float
    criterion_13: bool | None
    purity_test: bool
    purity_test_parties: tuple[bool, ...]
    ppt: bool | None
    converged: bool

    def to_json_dict(self) -> dict:
        crit = "inconclusive" if self.criterion_13 is None else self.criterion_13
        return {
            "m": self.m,
            "L": self.L,
            "purity": self.purity,
            "R": self.R,
            "lower": self.lower,
            "upper": self.upper,
            "criterion_13": crit,
            "purity_test": self.purity_test,
            "purity_test_parties": list(self.purity_test_parties),
            "ppt": self.ppt,
            "converged": self.converged,
        }


def bound_report(
    rho: DensityMatrix, m: int, cfg: SeeSawConfig | None = None
) -> BoundReport:
    """Radius, purity, both entanglement bounds and every test verdict.

    The purity test flags entanglement when any single party's marginal is
    less pure than the global state; the PPT flag is evaluated for
    bipartite systems only.
    """
    res = product_radius(rho, m, cfg)
    pur = purity(rho)
    L = res.L
    R = float(np.sqrt(max(1.0 - L, 0.0)) - np.sqrt(max(1.0 - pur, 0.0)))
    lower = max(R, 0.0) ** 2
    upper = 1.0 - L
    criterion: bool | None = bool(pur - L > _CRITERION_MARGIN)
    if not res.converged:
        criterion = None
    party_flags = tuple(
        purity(partial_trace(rho, {i})) < pur - _CRITERION_MARGIN
        for i in range(rho.n_parties)
    )
    ppt: bool | None = None
    if rho.n_parties == 2:
        ppt = bool(np.linalg.eigvalsh(partial_transpose(rho, 1))[0] >= -TOL_PSD)
    return BoundReport(
        m=m,
        L=L,
        purity=pur,
        R=R,
        lower=lower,
        upper=upper,
        criterion_13=criterion,
        purity_test=any(party_flags),
        purity_test_parties=party_flags,
        ppt=ppt,
        converged=res.converged,
    )


def isotropic_separability_point(d: int) -> float:
    """Noise weight beyond which the isotropic d x d family is separable."""
    return d / (d + 1.0)


def exact_E_isotropic(d: int, p: float) -> float:
    """Geometric measure of entanglement of the isotropic d x d state.

    Closed form in the maximally entangled fidelity F = 1 - p (d^2-1)/d^2,
    clipped at zero on the separable side of the family.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    F = 1.0 - p * (d * d - 1.0) / (d * d)
    E = 1.0 - (np.sqrt(F) + np.sqrt((d - 1.0) * (1.0 - F))) ** 2 / d
    return max(float(E), 0.0)


def R_generalized_werner(d: int, pprime: float, Lambda: float) -> float:
    """Closed-form R for the generalized d x d noisy-pure-state family.

    Lambda is the largest Schmidt weight of the pure component; the radius
    and purity of the family depend on the weight vector only through it.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if not 0.0 <= pprime <= 1.0:
        raise ValueError(f"pprime={pprime} outside [0, 1]")
    if not 1.0 / d - 1e-12 <= Lambda <= 1.0 + 1e-12:
        raise ValueError(f"Lambda={Lambda} outside [1/{d}, 1]")
    one_minus_L = 1.0 - pprime / (d * d) - (1.0 - pprime) * Lambda
    mixed_term = np.sqrt(max(2.0 * pprime - pprime * pprime, 0.0) * (d * d - 1.0)) / d
    return float(np.sqrt(max(one_minus_L, 0.0)) - mixed_term)


@dataclass(frozen=True)
class OrderingPoint:
    pprime: float
    Lambda: float
    R: float
    lower: float
    E_ref: float
    dominates: bool


def ordering_region(
    d: int,
    p_ref: float,
    pprime_grid: int | np.ndarray = 41,
    lambda_grid: int | np.ndarray = 41,
    literal_supplement: bool = False,
) -> list[OrderingPoint]:
    """Grid scan certifying states more entangled than an isotropic reference.

    Each grid point (p', Lambda) is marked dominating when the certified
    lower bound max(R, 0)^2 exceeds the reference's exact entanglement.
    ``literal_supplement`` switches to comparing R itself against the
    reference value instead of the squared form.
    """
    p_cr = isotropic_separability_point(d)
    if not 0.0 <= p_ref < p_cr:
        raise ValueError(f"p_ref={p_ref} outside [0, {p_cr})")
    if isinstance(pprime_grid, int):
        pprime_grid = np.linspace(0.0, 1.0, pprime_grid)
    if isinstance(lambda_grid, int):
        lambda_grid = np.linspace(1.0 / d, 1.0, lambda_grid)
    E_ref = exact_E_isotropic(d, p_ref)
    out = []
    for pprime in np.asarray(pprime_grid, dtype=float):
        for lam in np.asarray(lambda_grid, dtype=float):
            R = R_generalized_werner(d, float(pprime), float(lam))
            lower = max(R, 0.0) ** 2
            score = R if literal_supplement else lower
            out.append(
                OrderingPoint(
                    float(pprime), float(lam), R, lower, E_ref, bool(score > E_ref)
                )
            )
    return out
