"""Multipartite quantum-state containers and elementary operations.

States are dense complex matrices (or amplitude vectors) tagged with an
ordered tuple of local Hilbert-space dimensions.  Party indices are
0-based throughout the library API; the command-line front end accepts
1-based labels and converts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "MultipartiteDims",
    "PureState",
    "DensityMatrix",
    "StateValidationError",
    "pure_state",
    "density_matrix",
    "projector",
    "maximally_mixed",
    "purity",
    "fidelity_pure",
    "root_infidelity",
    "partial_trace",
    "partial_transpose",
    "permute_parties",
    "state_to_json",
    "state_from_json",
    "save_state",
    "load_state",
]

# Validation tolerances, sized ~100x the typical double-precision
# eigensolver error at ambient dimension <= 64.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9  # eigenvalue floor
TOL_NORM = 1e-10

# Dense storage only; everything in scope fits well below this.
MAX_AMBIENT_DIM = 1024


class StateValidationError(ValueError):
    """A state object failed one of its structural invariants."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MultipartiteDims:
    """Ordered local dimensions (d_1, ..., d_K) of a multipartite system."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.dims:
            raise StateValidationError("need at least one party")
        if any(d < 2 for d in self.dims):
            raise StateValidationError(
                f"local dimensions must be >= 2, got {self.dims}"
            )
        if self.ambient > MAX_AMBIENT_DIM:
            raise StateValidationError(
                f"ambient dimension {self.ambient} exceeds cap {MAX_AMBIENT_DIM}"
            )

    @classmethod
    def of(cls, dims: "MultipartiteDims | Sequence[int]") -> "MultipartiteDims":
        if isinstance(dims, MultipartiteDims):
            return dims
        return cls(tuple(int(d) for d in dims))

    @property
    def ambient(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self) -> Iterator[int]:
        return iter(self.dims)

    def __getitem__(self, i: int) -> int:
        return self.dims[i]


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a multipartite system."""

    amplitudes: np.ndarray
    dims: MultipartiteDims

    @property
    def ambient(self) -> int:
        return self.dims.ambient


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace (and normally PSD) matrix on a multipartite system."""

    matrix: np.ndarray
    dims: MultipartiteDims

    @property
    def ambient(self) -> int:
        return self.dims.ambient

    @property
    def n_parties(self) -> int:
        return self.dims.n_parties


def pure_state(amplitudes: Sequence[complex] | np.ndarray, dims) -> PureState:
    """Build a :class:`PureState`, validating length and normalization."""
    md = MultipartiteDims.of(dims)
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if vec.size != md.ambient:
        raise StateValidationError(
            f"amplitude vector of length {vec.size} does not match dims {md.dims}"
        )
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > TOL_NORM:
        raise StateValidationError(f"state vector norm {norm} is not 1")
    return PureState(_freeze(vec / norm), md)


def density_matrix(matrix: np.ndarray, dims, require_psd: bool = True) -> DensityMatrix:
    """Build a :class:`DensityMatrix`, validating its invariants.

    The input is symmetrized as (m + m^dag)/2 after the hermiticity check so
    that downstream eigensolvers always receive an exactly Hermitian matrix.
    Set ``require_psd=False`` for matrices that are Hermitian and unit-trace
    by construction but may leave the state set (e.g. raw correlation-tensor
    reconstructions).
    """
    md = MultipartiteDims.of(dims)
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] != md.ambient:
        raise StateValidationError(
            f"matrix dimension {m.shape[0]} does not match dims {md.dims}"
        )
    herm_defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if herm_defect > TOL_HERM:
        raise StateValidationError(f"matrix is not Hermitian (defect {herm_defect:.3e})")
    m = (m + m.conj().T) / 2.0
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > TOL_TRACE:
        raise StateValidationError(f"trace {tr} is not 1")
    if require_psd:
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -TOL_PSD:
            raise StateValidationError(f"matrix is not PSD (min eigenvalue {lo:.3e})")
    return DensityMatrix(_freeze(m), md)


def projector(psi: PureState) -> DensityMatrix:
    """Rank-one density matrix |psi><psi|."""
    m = np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityMatrix(_freeze(m), psi.dims)


def maximally_mixed(dims) -> DensityMatrix:
    md = MultipartiteDims.of(dims)
    m = np.eye(md.ambient, dtype=complex) / md.ambient
    return DensityMatrix(_freeze(m), md)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2).  Equals the squared Frobenius norm for Hermitian input."""
    return float(np.real(np.vdot(rho.matrix, rho.matrix)))


def fidelity_pure(rho: DensityMatrix, psi: PureState) -> float:
    """<psi|rho|psi>, clamped into [0, 1] against round-off."""
    if rho.ambient != psi.ambient:
        raise StateValidationError(
            f"dimension mismatch: state on {rho.dims.dims}, vector on {psi.dims.dims}"
        )
    f = float(np.real(np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)))
    return min(max(f, 0.0), 1.0)


def root_infidelity(rho: DensityMatrix, psi: PureState) -> float:
    """sqrt(1 - <psi|rho|psi>); a metric when restricted to these arguments."""
    return float(np.sqrt(1.0 - fidelity_pure(rho, psi)))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (original party order).

    Parameters
    ----------
    rho : DensityMatrix
    keep : iterable of 0-based party indices, nonempty

    Returns
    -------
    DensityMatrix on the kept parties; the trace is preserved.
    """
    kept = sorted(set(int(k) for k in keep))
    n = rho.n_parties
    if not kept:
        raise ValueError("keep set must be nonempty")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"party index out of range in keep={kept} (K={n})")
    traced = [i for i in range(n) if i not in kept]
    dims = list(rho.dims)
    tensor = rho.matrix.reshape(dims + dims)
    for idx in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=idx, axis2=idx + len(dims))
        dims.pop(idx)
    d_out = int(np.prod(dims))
    return density_matrix(tensor.reshape(d_out, d_out), dims)


def partial_transpose(rho: DensityMatrix, party: int) -> np.ndarray:
    """Transpose of one party's indices; Hermitian and unit-trace but
    possibly non-PSD, hence returned as a plain array."""
    n = rho.n_parties
    if not 0 <= party < n:
        raise ValueError(f"party {party} out of range (K={n})")
    dims = list(rho.dims)
    tensor = rho.matrix.reshape(dims + dims)
    tensor = np.swapaxes(tensor, party, party + n)
    return tensor.reshape(rho.ambient, rho.ambient)


def permute_parties(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    """Relabel parties so that new party j is old party ``order[j]``."""
    n = rho.n_parties
    perm = list(order)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"order {perm} is not a permutation of 0..{n - 1}")
    dims = list(rho.dims)
    tensor = rho.matrix.reshape(dims + dims)
    tensor = tensor.transpose(perm + [p + n for p in perm])
    new_dims = [dims[p] for p in perm]
    return DensityMatrix(
        _freeze(np.ascontiguousarray(tensor.reshape(rho.ambient, rho.ambient))),
        MultipartiteDims.of(new_dims),
    )


def state_to_json(rho: DensityMatrix) -> dict:
    """Row-major real/imaginary JSON form: {"dims", "re", "im"}."""
    return {
        "dims": list(rho.dims),
        "re": rho.matrix.real.tolist(),
        "im": rho.matrix.imag.tolist(),
    }


def state_from_json(data: dict) -> DensityMatrix:
    """Inverse of :func:`state_to_json`; all invariants re-validated."""
    try:
        dims = data["dims"]
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateValidationError(f"malformed state record: {exc}") from exc
    if re.shape != im.shape:
        raise StateValidationError("re/im blocks differ in shape")
    return density_matrix(re + 1j * im, dims)


def save_state(rho: DensityMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_json(rho), fh)


def load_state(path) -> DensityMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return state_from_json(json.load(fh))
