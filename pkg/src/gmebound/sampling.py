"""Seeded random states and unitaries (Ginibre / Haar constructions)."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def haar_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unit vector: normalized complex Gaussian."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def haar_product_state(dims: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    """Tensor product of independent Haar factors, one per entry of dims."""
    out = np.ones(1, dtype=complex)
    for d in dims:
        out = np.kron(out, haar_pure_state(d, rng))
    return out


def random_density_matrix(
    dim: int, rng: np.random.Generator, rank: int | None = None
) -> np.ndarray:
    """Ginibre-induced random density matrix of the given rank (full by default)."""
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
