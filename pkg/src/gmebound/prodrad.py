"""Product numerical radius via multistart see-saw optimization.

The product numerical radius L_m of a K-party state is the maximal
expectation value over pure states that factor into m tensor blocks, for
some grouping of the parties into m nonempty sets.  The see-saw fixes all
blocks but one and replaces the free factor by the top eigenvector of the
conditional operator, which makes the objective nondecreasing step by
step; random restarts cover the nonconvex landscape.  A sampling oracle
(Haar product states plus one refinement sweep) gives an independent lower
estimate for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qstate import DensityMatrix, PureState, permute_parties, pure_state
from .sampling import haar_pure_state

__all__ = [
    "Partition",
    "ProductState",
    "SeeSawConfig",
    "RadiusResult",
    "partition",
    "enumerate_partitions",
    "seesaw_L",
    "product_radius",
    "oracle_L",
]

# Set-partition counts grow as Bell numbers; everything in scope needs K <= 6.
MAX_PARTIES = 12

_MONOTONE_TOL = 1e-12
_DEGENERACY_TOL = 1e-12
_RESULT_CHECK_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty party blocks covering 0..K-1, in canonical order."""

    blocks: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def n_parties(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return "|".join("".join(str(p) for p in b) for b in self.blocks)


def partition(blocks: Sequence[Sequence[int]]) -> Partition:
    """Canonicalize and validate a grouping of party indices."""
    blk = tuple(tuple(sorted(int(p) for p in b)) for b in blocks)
    blk = tuple(sorted(blk, key=lambda b: b[0] if b else -1))
    flat = [p for b in blk for p in b]
    if not blk or any(len(b) == 0 for b in blk):
        raise ValueError("blocks must be nonempty")
    if sorted(flat) != list(range(len(flat))):
        raise ValueError(f"blocks {blk} do not partition 0..{len(flat) - 1}")
    return Partition(blk)


def enumerate_partitions(K: int, m: int) -> list[Partition]:
    """All set partitions of 0..K-1 into exactly m blocks, canonical order.

    Generated from restricted-growth strings in lexicographic order, so the
    list is deterministic and blocks are ordered by their smallest element.
    """
    if K > MAX_PARTIES:
        raise ValueError(f"refusing K={K} parties (limit {MAX_PARTIES})")
    if not 1 <= m <= K:
        raise ValueError(f"need 1 <= m <= K, got m={m}, K={K}")
    out: list[Partition] = []
    code = [0] * K

    def grow(i: int, used: int) -> None:
        if i == K:
            if used == m:
                blocks: list[list[int]] = [[] for _ in range(m)]
                for party, b in enumerate(code):
                    blocks[b].append(party)
                out.append(partition(blocks))
            return
        # prune: remaining slots must still allow reaching exactly m blocks
        if used + (K - i) < m:
            return
        for b in range(min(used + 1, m)):
            code[i] = b
            grow(i + 1, max(used, b + 1))

    grow(0, 0)
    return out


@dataclass(frozen=True)
class ProductState:
    """One pure factor per partition block; together a full pure state."""

    partition: Partition
    factors: tuple[PureState, ...]

    def assemble(self) -> PureState:
        """Tensor the factors and restore canonical party order."""
        order = [p for b in self.partition.blocks for p in b]
        vec = np.ones(1, dtype=complex)
        party_dims: list[int] = []
        for f in self.factors:
            vec = np.kron(vec, f.amplitudes)
            party_dims.extend(f.dims)
        inv = np.argsort(order)
        tensor = vec.reshape(party_dims).transpose(inv)
        canonical_dims = [party_dims[i] for i in inv]
        return pure_state(tensor.reshape(-1), canonical_dims)


@dataclass(frozen=True)
class SeeSawConfig:
    """Optimizer budget and determinism knobs.

    restarts=None resolves to 40 + 10 * ambient_dim at run time, which is
    sized so the analytic families in the test suite hit their closed-form
    radii to 1e-6.
    """

    restarts: int | None = None
    max_sweeps: int = 500
    tol: float = 1e-12
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


@dataclass(frozen=True)
class RadiusResult:
    L: float
    argmax: ProductState
    partition_used: Partition
    sweeps_used: int
    converged: bool


def _objective(rho_t: np.ndarray, factors: list[np.ndarray]) -> float:
    m = len(factors)
    ops: list = [rho_t, list(range(2 * m))]
    for s, f in enumerate(factors):
        ops.extend([f.conj(), [s], f, [m + s]])
    return float(np.real(np.einsum(*ops, [])))


def _conditional_operator(rho_t: np.ndarray, factors: list[np.ndarray], t: int) -> np.ndarray:
    m = len(factors)
    ops: list = [rho_t, list(range(2 * m))]
    for s, f in enumerate(factors):
        if s == t:
            continue
        ops.extend([f.conj(), [s], f, [m + s]])
    op = np.einsum(*ops, [t, m + t])
    return (op + op.conj().T) / 2.0


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    ph = vec[k] / abs(vec[k])
    return vec * ph.conjugate()


def _update_block(
    rho_t: np.ndarray, factors: list[np.ndarray], t: int, current_obj: float
) -> float:
    op = _conditional_operator(rho_t, factors, t)
    try:
        evals, evecs = np.linalg.eigh(op)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed on block {t}") from exc
    top = evals[-1]
    cand = np.nonzero(evals >= top - _DEGENERACY_TOL * max(1.0, abs(top)))[0]
    if len(cand) > 1:
        overlaps = np.abs(evecs[:, cand].conj().T @ factors[t])
        idx = int(cand[int(np.argmax(overlaps))])
    else:
        idx = int(cand[0])
    new_obj = float(evals[idx])
    if new_obj < current_obj - _MONOTONE_TOL:
        raise RuntimeError(
            f"see-saw objective decreased on block {t}: {current_obj} -> {new_obj}"
        )
    factors[t] = _canonical_phase(np.ascontiguousarray(evecs[:, idx]))
    return new_obj


def _sweep(rho_t: np.ndarray, factors: list[np.ndarray], obj: float) -> float:
    for t in range(len(factors)):
        obj = _update_block(rho_t, factors, t, obj)
    return obj


def _run(
    rho_t: np.ndarray,
    factors: list[np.ndarray],
    max_sweeps: int,
    tol: float,
) -> tuple[float, list[np.ndarray], int, bool]:
    obj = _objective(rho_t, factors)
    sweeps = 0
    converged = False
    for _ in range(max_sweeps):
        before = obj
        obj = _sweep(rho_t, factors, obj)
        sweeps += 1
        if obj - before < tol:
            converged = True
            break
    return obj, factors, sweeps, converged


def _block_layout(
    rho: DensityMatrix, part: Partition
) -> tuple[np.ndarray, list[tuple[int, ...]], list[int]]:
    if part.n_parties != rho.n_parties:
        raise ValueError(
            f"partition covers {part.n_parties} parties, state has {rho.n_parties}"
        )
    order = [p for b in part.blocks for p in b]
    rho_perm = permute_parties(rho, order)
    dims = list(rho.dims)
    block_party_dims = [tuple(dims[p] for p in b) for b in part.blocks]
    block_dims = [int(np.prod(bd)) for bd in block_party_dims]
    rho_t = rho_perm.matrix.reshape(block_dims + block_dims)
    return rho_t, block_party_dims, block_dims


def seesaw_L(
    rho: DensityMatrix,
    part: Partition,
    cfg: SeeSawConfig | None = None,
    starts: Sequence[Sequence[np.ndarray]] | None = None,
) -> RadiusResult:
    """Maximize <phi|rho|phi> over pure states factoring along ``part``.

    Each restart alternates over the blocks in round-robin order, setting
    the active factor to the top eigenvector of the operator obtained by
    contracting rho with all other factors.  Ties in a degenerate top
    eigenspace go to the eigenvector with the largest overlap with the
    previous factor (then lowest index), keeping runs deterministic for a
    fixed seed.  ``starts`` overrides the random initial factors; each
    entry is one factor vector per block.
    """
    cfg = cfg or SeeSawConfig()
    rho_t, block_party_dims, block_dims = _block_layout(rho, part)
    n_restarts = len(starts) if starts is not None else (
        cfg.restarts if cfg.restarts is not None else 40 + 10 * rho.ambient
    )
    best: tuple[float, list[np.ndarray], int, bool] | None = None
    for r in range(n_restarts):
        if starts is not None:
            factors = [
                np.asarray(v, dtype=complex).reshape(-1).copy() for v in starts[r]
            ]
            factors = [f / np.linalg.norm(f) for f in factors]
        else:
            rng = np.random.default_rng([cfg.seed % 2**63, r])
            factors = [haar_pure_state(d, rng) for d in block_dims]
        run = _run(rho_t, factors, cfg.max_sweeps, cfg.tol)
        if best is None or run[0] > best[0]:
            best = run
    assert best is not None
    L, factors, sweeps, converged = best
    prod = ProductState(
        part,
        tuple(pure_state(f, bd) for f, bd in zip(factors, block_party_dims)),
    )
    full = prod.assemble().amplitudes
    check = float(np.real(np.vdot(full, rho.matrix @ full)))
    if abs(check - L) > _RESULT_CHECK_TOL:
        raise RuntimeError(
            f"assembled product state disagrees with objective: {check} vs {L}"
        )
    return RadiusResult(L, prod, part, sweeps, converged)


def product_radius(
    rho: DensityMatrix, m: int, cfg: SeeSawConfig | None = None
) -> RadiusResult:
    """L_m: the best see-saw value over every partition into exactly m blocks."""
    K = rho.n_parties
    if not 2 <= m <= K:
        raise ValueError(f"need 2 <= m <= K={K}, got m={m}")
    best: RadiusResult | None = None
    for part in enumerate_partitions(K, m):
        res = seesaw_L(rho, part, cfg)
        if best is None or res.L > best.L:
            best = res
    assert best is not None
    return best


def oracle_L(
    rho: DensityMatrix, part: Partition, samples: int, seed: int
) -> float:
    """Sampling lower estimate of the product numerical radius.

    Evaluates <phi|rho|phi> on Haar-random product states, then runs one
    local eigenvector-refinement pass (block updates iterated to
    stagnation) from the single best sample.  Every evaluated point is a
    valid product state, so the result lower-bounds the true radius.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rho_t, _, block_dims = _block_layout(rho, part)
    rho_perm = rho_t.reshape(int(np.prod(block_dims)), -1)
    rng = np.random.default_rng(seed % 2**63)
    best_val = -np.inf
    best_factors: list[np.ndarray] | None = None
    chunk = 8192
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        blocks = []
        for d in block_dims:
            z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
            blocks.append(z / np.linalg.norm(z, axis=1, keepdims=True))
        phi = blocks[0]
        for b in blocks[1:]:
            phi = np.einsum("ni,nj->nij", phi, b).reshape(n, -1)
        vals = np.real(np.einsum("ni,ij,nj->n", phi.conj(), rho_perm, phi))
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_factors = [b[k].copy() for b in blocks]
        done += n
    assert best_factors is not None
    obj = best_val
    for _ in range(5000):
        before = obj
        obj = _sweep(rho_t, best_factors, obj)
        if obj - before < 1e-13:
            break
    return max(best_val, float(obj))
