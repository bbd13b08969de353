"""Generator bases, Bloch decomposition and the correlation-tensor tests.

A bipartite M x N state is expanded over traceless Hermitian generators of
SU(M) and SU(N) (normalized to Tr s_i s_j = 2 delta_ij) as

    rho = [ I + k_M sum_i q_i s_i x I + k_N sum_j p_j I x t_j
              + k_M k_N sum_ij B_ij s_i x t_j ] / (M N),

with k_M = sqrt(M(M-1)/2).  Under this scaling every valid state has local
Bloch vectors of norm at most 1, with equality exactly for pure marginals.
The correlation Gram matrix C = B^T B (or B B^T, same nonzero spectrum)
drives a closed-form upper bound on the product numerical radius and the
entanglement test built from it, including a reduced-knowledge variant that
needs only the top-left 2x2 block of C and a ten-parameter two-qubit
measurement scheme that supplies exactly that block.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .qstate import (
    TOL_PSD,
    DensityMatrix,
    PureState,
    StateValidationError,
    density_matrix,
)

__all__ = [
    "GeneratorBasis",
    "BlochForm",
    "CorrelationGram",
    "TomoParams",
    "TomoReconstruction",
    "CriterionResult",
    "make_basis",
    "bloch_scale",
    "bloch_decompose",
    "bloch_reconstruct",
    "bloch_vector",
    "pure_bloch_membership",
    "numerical_radius_bloch_objective",
    "upper_bound_L",
    "purity_bloch",
    "criterion_bloch",
    "correlation_gram",
    "restricted_g",
    "tomo_simulate",
    "tomo_verdict",
]

_ORTHO_TOL = 1e-12
_PURITY_MEMBER_TOL = 1e-9


@dataclass(frozen=True)
class GeneratorBasis:
    """The M^2 - 1 traceless Hermitian generators for one local dimension.

    Ordering: symmetric pair matrices E_jk + E_kj for j < k (lexicographic),
    then antisymmetric -i E_jk + i E_kj, then the diagonal ladder.  The
    tensor ``generators`` has shape (M^2 - 1, M, M).
    """

    dim: int
    generators: np.ndarray

    @property
    def count(self) -> int:
        return self.dim * self.dim - 1


def bloch_scale(dim: int) -> float:
    """Scale factor k = sqrt(dim (dim-1) / 2) of the generator expansion."""
    return float(np.sqrt(dim * (dim - 1) / 2.0))


@lru_cache(maxsize=None)
def make_basis(dim: int) -> GeneratorBasis:
    """Generator basis for SU(dim); for dim=2 these are the Pauli matrices."""
    if dim < 2:
        raise ValueError(f"generator basis needs dim >= 2, got {dim}")
    mats = []
    for j in range(dim):
        for k in range(j + 1, dim):
            g = np.zeros((dim, dim), dtype=complex)
            g[j, k] = 1.0
            g[k, j] = 1.0
            mats.append(g)
    for j in range(dim):
        for k in range(j + 1, dim):
            g = np.zeros((dim, dim), dtype=complex)
            g[j, k] = -1.0j
            g[k, j] = 1.0j
            mats.append(g)
    for level in range(1, dim):
        diag = np.zeros(dim)
        diag[:level] = 1.0
        diag[level] = -level
        mats.append(np.diag(diag * np.sqrt(2.0 / (level * (level + 1)))).astype(complex))
    gens = np.stack(mats)
    gens.setflags(write=False)
    gram = np.einsum("iab,jba->ij", gens, gens).real
    if np.max(np.abs(gram - 2.0 * np.eye(len(mats)))) > _ORTHO_TOL:
        raise RuntimeError(f"generator basis for dim={dim} lost orthogonality")
    return GeneratorBasis(dim, gens)


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors q, p and correlation tensor B of an M x N state."""

    M: int
    N: int
    q: np.ndarray
    p: np.ndarray
    B: np.ndarray
    basisA: GeneratorBasis
    basisB: GeneratorBasis


@dataclass(frozen=True)
class CorrelationGram:
    """The smaller of B^T B and B B^T with its top eigenvalue and trace."""

    C: np.ndarray
    xi1: float
    trC: float


class CriterionResult(NamedTuple):
    lhs: float
    entangled: bool


def bloch_decompose(rho: DensityMatrix, M: int, N: int) -> BlochForm:
    """Expand a bipartite state over the local generator bases."""
    if M * N != rho.ambient:
        raise StateValidationError(
            f"ambient dimension {rho.ambient} is not {M} x {N}"
        )
    basisA = make_basis(M)
    basisB = make_basis(N)
    kM, kN = bloch_scale(M), bloch_scale(N)
    rho4 = rho.matrix.reshape(M, N, M, N)
    rhoA = np.einsum("abcb->ac", rho4)
    rhoB = np.einsum("abad->bd", rho4)
    q = (M / (2.0 * kM)) * np.einsum("ac,ica->i", rhoA, basisA.generators).real
    p = (N / (2.0 * kN)) * np.einsum("bd,jdb->j", rhoB, basisB.generators).real
    B = (M * N / (4.0 * kM * kN)) * np.einsum(
        "abcd,ica,jdb->ij", rho4, basisA.generators, basisB.generators
    ).real
    for arr in (q, p, B):
        arr.setflags(write=False)
    return BlochForm(M, N, q, p, B, basisA, basisB)


def bloch_reconstruct(bf: BlochForm) -> DensityMatrix:
    """Rebuild the matrix from Bloch data.

    The result is Hermitian with unit trace by construction, but arbitrary
    Bloch data may leave the state set, so positivity is not enforced.
    """
    M, N = bf.M, bf.N
    if bf.q.shape != (M * M - 1,) or bf.p.shape != (N * N - 1,):
        raise ValueError("Bloch vector length does not match local dimension")
    if bf.B.shape != (M * M - 1, N * N - 1):
        raise ValueError("correlation tensor shape does not match local dimensions")
    kM, kN = bloch_scale(M), bloch_scale(N)
    sA, sB = bf.basisA.generators, bf.basisB.generators
    out = np.eye(M * N, dtype=complex)
    out += kM * np.kron(np.einsum("i,iab->ab", bf.q, sA), np.eye(N))
    out += kN * np.kron(np.eye(M), np.einsum("j,jcd->cd", bf.p, sB))
    out += kM * kN * np.einsum("ij,iab,jcd->acbd", bf.B, sA, sB).reshape(M * N, M * N)
    out /= M * N
    return density_matrix(out, (M, N), require_psd=False)


def bloch_vector(psi: PureState | np.ndarray, dim: int | None = None) -> np.ndarray:
    """Bloch vector of a single-party pure state (unit norm for any dim)."""
    if isinstance(psi, PureState):
        vec = psi.amplitudes
        dim = psi.ambient
    else:
        vec = np.asarray(psi, dtype=complex).reshape(-1)
        dim = vec.size if dim is None else dim
    if vec.size != dim:
        raise ValueError(f"vector length {vec.size} does not match dim {dim}")
    basis = make_basis(dim)
    rho = np.outer(vec, vec.conj())
    return (dim / (2.0 * bloch_scale(dim))) * np.einsum(
        "ac,ica->i", rho, basis.generators
    ).real


def _single_party_reconstruct(v: np.ndarray, dim: int) -> np.ndarray:
    basis = make_basis(dim)
    return (
        np.eye(dim, dtype=complex)
        + bloch_scale(dim) * np.einsum("i,iab->ab", v, basis.generators)
    ) / dim


def pure_bloch_membership(v: np.ndarray, dim: int) -> bool:
    """Whether v is the Bloch vector of a pure state of the given dimension.

    Operationally: reconstruct rho_v = (I + k v.s)/dim and test rho_v^2 =
    rho_v, which packs the unit-norm and quadratic constraints of the pure
    Bloch variety into a single idempotence check.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != dim * dim - 1:
        raise ValueError(f"expected length {dim * dim - 1}, got {v.size}")
    rho = _single_party_reconstruct(v, dim)
    return float(np.max(np.abs(rho @ rho - rho))) <= _PURITY_MEMBER_TOL


def numerical_radius_bloch_objective(
    bf: BlochForm, v: np.ndarray, w: np.ndarray
) -> float:
    """Expectation value <chi x psi|rho|chi x psi> written in Bloch data.

    v and w are the Bloch vectors of the two local pure states; membership
    of v, w in the pure-state varieties is not checked here.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    w = np.asarray(w, dtype=float).reshape(-1)
    if v.size != bf.M * bf.M - 1 or w.size != bf.N * bf.N - 1:
        raise ValueError("Bloch vector length does not match local dimension")
    Mm, Nm = bf.M - 1.0, bf.N - 1.0
    val = 1.0 + Mm * float(v @ bf.q) + Nm * float(w @ bf.p)
    val += Mm * Nm * float(v @ bf.B @ w)
    return val / (bf.M * bf.N)


def correlation_gram(B: np.ndarray) -> CorrelationGram:
    """Gram matrix of the correlation tensor (smaller of B^T B, B B^T)."""
    B = np.asarray(B, dtype=float)
    C = B.T @ B if B.shape[1] <= B.shape[0] else B @ B.T
    evals = np.linalg.eigvalsh(C)
    C.setflags(write=False)
    return CorrelationGram(C, max(float(evals[-1]), 0.0), float(np.trace(C)))


def upper_bound_L(bf: BlochForm) -> float:
    """Closed-form upper bound on the product numerical radius."""
    g = correlation_gram(bf.B)
    Mm, Nm = bf.M - 1.0, bf.N - 1.0
    val = 1.0 + Nm * float(np.linalg.norm(bf.p)) + Mm * float(np.linalg.norm(bf.q))
    val += Mm * Nm * np.sqrt(g.xi1)
    return val / (bf.M * bf.N)


def purity_bloch(bf: BlochForm) -> float:
    """Tr(rho^2) evaluated directly on the Bloch data."""
    g = correlation_gram(bf.B)
    Mm, Nm = bf.M - 1.0, bf.N - 1.0
    val = 1.0 + Nm * float(bf.p @ bf.p) + Mm * float(bf.q @ bf.q) + Mm * Nm * g.trC
    return val / (bf.M * bf.N)


def criterion_bloch(bf: BlochForm) -> CriterionResult:
    """Entanglement test from local norms and the correlation Gram matrix.

    A negative left-hand side certifies entanglement; algebraically this is
    exactly the statement that the closed-form upper bound on the product
    numerical radius falls below the purity.
    """
    g = correlation_gram(bf.B)
    Mm, Nm = bf.M - 1.0, bf.N - 1.0
    nq = float(np.linalg.norm(bf.q))
    np_ = float(np.linalg.norm(bf.p))
    f_C = np.sqrt(g.xi1) - g.trC
    lhs = Mm * nq * max(1.0 - nq, 0.0) + Nm * np_ * max(1.0 - np_, 0.0) + Mm * Nm * f_C
    return CriterionResult(float(lhs), bool(lhs < 0.0))


_C33_MAX = 1.0  # two-qubit correlation Gram entries never exceed 1
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def restricted_g(C11: float, C12: float, C22: float) -> float:
    """Maximum of f(C) = sqrt(xi1(C)) - Tr C over PSD completions of C.

    Only the top-left 2x2 block of the symmetric 3x3 Gram matrix is known;
    the remaining entries C13, C23, C33 are optimized over while keeping C
    positive semidefinite.  Rotating the known block to diagonal form shows
    that for fixed C33 the inner maximum of xi1 over (C13, C23) on the PSD
    boundary is a1 + C33, with a1 the block's top eigenvalue.  The outer
    one-dimensional concave problem in C33 is solved by golden-section
    search on [0, 1].
    """
    tr_block = C11 + C22
    hyp = np.sqrt((C11 - C22) ** 2 + 4.0 * C12 * C12)
    a1 = (tr_block + hyp) / 2.0
    a2 = (tr_block - hyp) / 2.0
    if a2 < -TOL_PSD:
        raise ValueError(
            f"measured block is not PSD (eigenvalues {a1:.3e}, {a2:.3e})"
        )
    a1 = max(a1, 0.0)

    def h(c33: float) -> float:
        return np.sqrt(a1 + c33) - tr_block - c33

    lo, hi = 0.0, _C33_MAX
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    h1, h2 = h(x1), h(x2)
    while hi - lo > 1e-12:
        if h1 < h2:
            lo, x1, h1 = x1, x2, h2
            x2 = lo + _GOLDEN * (hi - lo)
            h2 = h(x2)
        else:
            hi, x2, h2 = x2, x1, h1
            x1 = hi - _GOLDEN * (hi - lo)
            h1 = h(x1)
    return float(h((lo + hi) / 2.0))


@dataclass(frozen=True)
class TomoReconstruction:
    """Quantities recovered from the ten measured parameters."""

    normP2: float
    normQ2: float
    C11: float
    C22: float
    C12: float


@dataclass(frozen=True)
class TomoParams:
    """Ten measured two-qubit parameters plus the reconstructed quantities.

    T holds the three single-channel traces; Pp/Pm the +/- branch purities
    of measurement channels 1 and 2; F12 the cross-channel overlap; G the
    two same-channel cross terms.
    """

    T: tuple[float, float, float]
    Pp: tuple[float, float]
    Pm: tuple[float, float]
    F12: float
    G: tuple[float, float]
    reconstructed: TomoReconstruction

    def measured(self) -> dict[str, float]:
        """The ten measured parameters, keyed by name."""
        return {
            "T1": self.T[0],
            "T2": self.T[1],
            "T3": self.T[2],
            "G1": self.G[0],
            "G2": self.G[1],
            "P1+": self.Pp[0],
            "P1-": self.Pm[0],
            "P2+": self.Pp[1],
            "P2-": self.Pm[1],
            "F12": self.F12,
        }

    def to_json_dict(self) -> dict:
        out: dict = dict(self.measured())
        out["reconstructed"] = {
            "normP2": self.reconstructed.normP2,
            "normQ2": self.reconstructed.normQ2,
            "C11": self.reconstructed.C11,
            "C22": self.reconstructed.C22,
            "C12": self.reconstructed.C12,
        }
        return out


_CHANNEL_CONSISTENCY_TOL = 1e-9


def tomo_simulate(rho: DensityMatrix) -> TomoParams:
    """Simulate the ten-parameter measurement scheme on a two-qubit state.

    The second qubit is projected onto the +/- eigenstates of each Pauli
    channel; traces, purities, one cross-channel overlap and two cross
    terms of the resulting conditional operators on the first qubit make up
    the ten measured numbers, from which the local Bloch norms and the
    top-left block of the correlation Gram matrix are recovered.
    """
    if tuple(rho.dims) != (2, 2):
        raise StateValidationError(f"tomography scheme needs a 2x2 system, got {rho.dims.dims}")
    paulis = make_basis(2).generators
    rho4 = rho.matrix.reshape(2, 2, 2, 2)
    eye = np.eye(2, dtype=complex)

    def omega(k: int, sign: float) -> np.ndarray:
        proj = (eye + sign * paulis[k]) / 2.0
        return np.einsum("abcv,vb->ac", rho4, proj)

    T = tuple(float(np.trace(omega(k, +1.0)).real) for k in range(3))
    Pp = tuple(float(np.trace(omega(k, +1.0) @ omega(k, +1.0)).real) for k in range(2))
    Pm = tuple(float(np.trace(omega(k, -1.0) @ omega(k, -1.0)).real) for k in range(2))
    F12 = float(np.trace(omega(0, +1.0) @ omega(1, +1.0)).real)
    G = tuple(float(np.trace(omega(k, +1.0) @ omega(k, -1.0)).real) for k in range(2))

    normP2 = sum((2.0 * t - 1.0) ** 2 for t in T)
    q2_1 = 4.0 * G[0] + 2.0 * (Pp[0] + Pm[0]) - 1.0
    q2_2 = 4.0 * G[1] + 2.0 * (Pp[1] + Pm[1]) - 1.0
    if abs(q2_1 - q2_2) > _CHANNEL_CONSISTENCY_TOL:
        raise StateValidationError(
            f"channel estimates of the local Bloch norm disagree: {q2_1} vs {q2_2}"
        )
    normQ2 = q2_1
    b1, b2 = 2.0 * T[0] - 1.0, 2.0 * T[1] - 1.0
    C11 = 4.0 * (Pp[0] + Pm[0]) - b1 * b1 - normQ2 - 1.0
    C22 = 4.0 * (Pp[1] + Pm[1]) - b2 * b2 - normQ2 - 1.0
    C12 = (
        8.0 * F12
        - b1 * b2
        - normQ2
        - 1.0
        - 2.0 * (Pp[0] - Pm[0])
        - 2.0 * (Pp[1] - Pm[1])
    )
    recon = TomoReconstruction(float(normP2), float(normQ2), C11, C22, C12)
    return TomoParams(T, Pp, Pm, F12, G, recon)


def tomo_verdict(tp: TomoParams) -> CriterionResult:
    """Entanglement test using only the ten measured parameters.

    The unknown Gram entries are replaced by their PSD-constrained maximum
    (:func:`restricted_g`), so a negative left-hand side still certifies
    entanglement.
    """
    rec = tp.reconstructed
    for name, val in (("normP2", rec.normP2), ("normQ2", rec.normQ2)):
        if not -1e-9 <= val <= 1.0 + 1e-9:
            raise ValueError(f"reconstructed {name}={val} outside [0, 1]")
    nq = np.sqrt(max(rec.normQ2, 0.0))
    np_ = np.sqrt(max(rec.normP2, 0.0))
    g = restricted_g(max(rec.C11, 0.0), rec.C12, max(rec.C22, 0.0))
    lhs = nq * max(1.0 - nq, 0.0) + np_ * max(1.0 - np_, 0.0) + g
    return CriterionResult(float(lhs), bool(lhs < 0.0))
