"""Normalization, similarity, and truncated SVD kernels.

Dense matrices are plain float64 ``numpy.ndarray`` values throughout.
The SVD switches from an exact dense decomposition to a seeded
randomized range finder once the smaller matrix dimension exceeds
``DENSE_SVD_LIMIT``; both paths are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Above this min(rows, cols), use the randomized path.
DENSE_SVD_LIMIT = 2000
_OVERSAMPLE = 10
_POWER_ITERATIONS = 4


@dataclass(frozen=True)
class SvdResult:
    """Leading left-singular subspace of a matrix.

    ``u_d`` has orthonormal columns; ``singular_values`` are sorted in
    non-increasing order.  Column signs are fixed so that the
    largest-magnitude entry of each column is positive.
    """

    u_d: np.ndarray
    singular_values: np.ndarray
    d: int


def normalize_rows(m: np.ndarray) -> np.ndarray:
    """Scale each row to unit L2 norm; all-zero rows are left unchanged."""
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    return m / np.where(norms == 0.0, 1.0, norms)


def normalize_columns(m: np.ndarray) -> np.ndarray:
    """Scale each column to unit L2 norm; all-zero columns are left unchanged."""
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=0, keepdims=True)
    return m / np.where(norms == 0.0, 1.0, norms)


def dot_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Inner product of two vectors; equals cosine for unit-norm inputs."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    return float(np.dot(u, v))


def _fix_signs(u: np.ndarray) -> np.ndarray:
    # SVD sign is arbitrary; pin each column for determinism.
    lead = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def _randomized_svd(m: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(0)
    k = min(d + _OVERSAMPLE, min(m.shape))
    q, _ = np.linalg.qr(m @ rng.standard_normal((m.shape[1], k)))
    for _ in range(_POWER_ITERATIONS):
        q, _ = np.linalg.qr(m.T @ q)
        q, _ = np.linalg.qr(m @ q)
    u_small, s, _ = np.linalg.svd(q.T @ m, full_matrices=False)
    return (q @ u_small)[:, :d], s[:d]


def truncated_svd(m: np.ndarray, d: int) -> SvdResult:
    """Leading ``d`` left-singular vectors and values of ``m``."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not 1 <= d <= min(m.shape):
        raise ValueError(f"d={d} out of range for a {m.shape[0]}x{m.shape[1]} matrix")
    if min(m.shape) <= DENSE_SVD_LIMIT:
        u, s, _ = np.linalg.svd(m, full_matrices=False)
        u, s = u[:, :d], s[:d]
    else:
        u, s = _randomized_svd(m, d)
    return SvdResult(u_d=_fix_signs(u), singular_values=s, d=d)
