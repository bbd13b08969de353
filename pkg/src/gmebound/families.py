"""Constructors and closed-form reference values for the benchmark families.

Four families cover every analytic anchor used by the test suite:

* ``gwerner``  -- a d x d pure state with Schmidt weights lambda mixed with
  white noise of weight p (the isotropic state for uniform weights),
* ``owerner``  -- the swap-symmetric d x d family (I + alpha V)/(d^2 + alpha d),
* ``boundent`` -- the two-qutrit family with a PPT-but-entangled window,
* ``ghz``      -- a K-qubit GHZ projector mixed with white noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import gme
from .qstate import DensityMatrix, density_matrix

__all__ = [
    "GeneralizedWerner",
    "OriginalWerner",
    "BoundEntangled",
    "GhzMixture",
    "FamilySpec",
    "ReferenceValues",
    "build",
    "reference_values",
    "parse_family",
    "swap_operator",
    "maximally_entangled_vector",
]

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class GeneralizedWerner:
    d: int
    p: float
    lam: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if len(self.lam) != self.d:
            raise ValueError(f"need {self.d} Schmidt weights, got {len(self.lam)}")
        if any(x < 0.0 for x in self.lam):
            raise ValueError("Schmidt weights must be nonnegative")
        if abs(sum(self.lam) - 1.0) > _SUM_TOL:
            raise ValueError(f"Schmidt weights sum to {sum(self.lam)}, not 1")


@dataclass(frozen=True)
class OriginalWerner:
    d: int
    alpha: float

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not -1.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha={self.alpha} outside [-1, 1]")


@dataclass(frozen=True)
class BoundEntangled:
    alpha: float

    def __post_init__(self) -> None:
        if not 2.0 <= self.alpha <= 5.0:
            raise ValueError(f"alpha={self.alpha} outside [2, 5]")


@dataclass(frozen=True)
class GhzMixture:
    K: int
    p: float

    def __post_init__(self) -> None:
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")


FamilySpec = Union[GeneralizedWerner, OriginalWerner, BoundEntangled, GhzMixture]


def maximally_entangled_vector(d: int) -> np.ndarray:
    """sum_i |ii> / sqrt(d)."""
    vec = np.zeros(d * d, dtype=complex)
    vec[:: d + 1] = 1.0 / np.sqrt(d)
    return vec


def swap_operator(d: int) -> np.ndarray:
    """V |kl> = |lk> on C^d x C^d; satisfies Tr(A x B V) = Tr(A B)."""
    eye = np.eye(d)
    return np.einsum("il,jk->ijkl", eye, eye).reshape(d * d, d * d)


def build(spec: FamilySpec) -> DensityMatrix:
    """Density matrix of the family member, tagged with its party dims."""
    if isinstance(spec, GeneralizedWerner):
        d = spec.d
        vec = np.zeros(d * d, dtype=complex)
        vec[:: d + 1] = np.sqrt(np.asarray(spec.lam, dtype=float))
        m = (1.0 - spec.p) * np.outer(vec, vec.conj())
        m += spec.p * np.eye(d * d) / (d * d)
        return density_matrix(m, (d, d))
    if isinstance(spec, OriginalWerner):
        d = spec.d
        m = (np.eye(d * d) + spec.alpha * swap_operator(d)) / (d * d + spec.alpha * d)
        return density_matrix(m, (d, d))
    if isinstance(spec, BoundEntangled):
        vec = maximally_entangled_vector(3)
        sigma_plus = np.diag([0.0, 1, 0, 0, 0, 1, 1, 0, 0]).astype(complex)
        sigma_minus = np.diag([0.0, 0, 1, 1, 0, 0, 0, 1, 0]).astype(complex)
        m = (2.0 / 7.0) * np.outer(vec, vec.conj())
        m += (spec.alpha / 21.0) * sigma_plus
        m += ((5.0 - spec.alpha) / 21.0) * sigma_minus
        return density_matrix(m, (3, 3))
    if isinstance(spec, GhzMixture):
        K, p = spec.K, spec.p
        dim = 2**K
        vec = np.zeros(dim, dtype=complex)
        vec[0] = vec[-1] = 1.0 / np.sqrt(2.0)
        m = (1.0 - p) * np.outer(vec, vec.conj()) + (p / dim) * np.eye(dim)
        return density_matrix(m, (2,) * K)
    raise TypeError(f"unknown family spec {spec!r}")


@dataclass(frozen=True)
class ReferenceValues:
    """Closed-form anchors for a family member; absent values are None."""

    purity: float | None
    L: float | None
    E_exact: float | None
    thresholds: dict[str, float]


def _is_uniform(lam: tuple[float, ...]) -> bool:
    return max(lam) - min(lam) <= _SUM_TOL


def reference_values(spec: FamilySpec) -> ReferenceValues:
    """Every closed-form value and detection threshold known for the family."""
    if isinstance(spec, GeneralizedWerner):
        d, p = spec.d, spec.p
        Lam = max(spec.lam)
        pur = 1.0 + (p * p - 2.0 * p) * (d * d - 1.0) / (d * d)
        L = p / (d * d) + (1.0 - p) * Lam
        E = gme.exact_E_isotropic(d, p) if _is_uniform(spec.lam) else None
        thr: dict[str, float] = {"p_cr": gme.isotropic_separability_point(d)}
        if d == 2:
            eta = 2.0 * np.sqrt(spec.lam[0] * spec.lam[1])
            thr["ppt_sep"] = 1.0 - 1.0 / (1.0 + 2.0 * eta)
            thr["criterion"] = 4.0 * (1.0 - Lam) / 3.0
            if _is_uniform(spec.lam):
                thr["purity_test"] = 1.0 - 1.0 / np.sqrt(3.0)
                thr["restricted_g"] = 0.5
        return ReferenceValues(pur, L, E, thr)
    if isinstance(spec, OriginalWerner):
        d = spec.d
        thr = {"exact": -1.0 / d, "bloch_bound": -d / (d + 2.0)}
        return ReferenceValues(None, None, None, thr)
    if isinstance(spec, BoundEntangled):
        a = spec.alpha
        pur = (37.0 + 2.0 * a * (a - 5.0)) / 147.0
        L = max(11.0 / 3.0, a) / 21.0
        thr = {"alpha_det": (15.0 + np.sqrt(21.0)) / 6.0}
        return ReferenceValues(pur, L, None, thr)
    if isinstance(spec, GhzMixture):
        K, p = spec.K, spec.p
        L = (1.0 - p) / 2.0 + p / 2**K
        thr = {"p_gme": 1.0 / (2.0 * (1.0 - 2.0**-K))}
        return ReferenceValues(None, L, None, thr)
    raise TypeError(f"unknown family spec {spec!r}")


def parse_family(text: str) -> FamilySpec:
    """Parse a CLI family string.

    Examples: ``gwerner:d=3,p=0.2,lambda=0.5/0.3/0.2``,
    ``owerner:d=4,alpha=-0.8``, ``boundent:alpha=3.5``, ``ghz:K=4,p=0.3``.
    """
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"family string {text!r} has no ':' separator")
    fields: dict[str, str] = {}
    for item in rest.split(","):
        if not item:
            continue
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"malformed field {item!r} in {text!r}")
        fields[key.strip()] = val.strip()
    try:
        if kind == "gwerner":
            lam = tuple(float(x) for x in fields["lambda"].split("/"))
            return GeneralizedWerner(int(fields["d"]), float(fields["p"]), lam)
        if kind == "owerner":
            return OriginalWerner(int(fields["d"]), float(fields["alpha"]))
        if kind == "boundent":
            return BoundEntangled(float(fields["alpha"]))
        if kind == "ghz":
            return GhzMixture(int(fields["K"]), float(fields["p"]))
    except KeyError as exc:
        raise ValueError(f"family {kind!r} is missing field {exc}") from exc
    raise ValueError(f"unknown family kind {kind!r}")
