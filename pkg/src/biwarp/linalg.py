"""Small dense linear algebra: Gram-Schmidt frames and symmetric spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NotPositiveDefinite, RankDeficient
from .tolerances import DEFAULT_TOLERANCES


@dataclass(frozen=True)
class SymMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if np.abs(a - a.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("matrix is not symmetric")
        object.__setattr__(self, "entries", 0.5 * (a + a.T))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def require_positive_definite(self, pd_tol: float = DEFAULT_TOLERANCES.pd_tol) -> "SymMatrix":
        lam = self.min_eigenvalue()
        if lam <= pd_tol:
            raise NotPositiveDefinite(f"smallest eigenvalue {lam:.3e} <= {pd_tol:.1e}")
        return self


@dataclass(frozen=True)
class Basis:
    """Orthonormal vectors, stored as rows, under the inner product ``gram``.

    ``gram`` is None for the Euclidean inner product.
    """

    vectors: np.ndarray
    gram: np.ndarray | None = None

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def columns(self) -> np.ndarray:
        return self.vectors.T

    def inner_products(self) -> np.ndarray:
        v = self.vectors
        return v @ v.T if self.gram is None else v @ self.gram @ v.T


def _inner(gram):
    if gram is None:
        return lambda x, y: float(x @ y)
    return lambda x, y: float(x @ gram @ y)


def orthonormalize(vectors, gram=None, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> Basis:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    ``vectors`` is a sequence of equal-length vectors (rows). Raises
    RankDeficient when a vector loses all but ``rank_tol`` of its length to
    the span of its predecessors.
    """
    a = np.array(vectors, dtype=float, ndmin=2)
    if a.size == 0:
        return Basis(np.zeros((0, a.shape[-1] if a.ndim == 2 else 0)), gram)
    ip = _inner(gram)
    out = []
    for i, v in enumerate(a):
        norm0 = np.sqrt(max(ip(v, v), 0.0))
        w = v.copy()
        for _ in range(2):
            for q in out:
                w = w - ip(q, w) * q
        norm = np.sqrt(max(ip(w, w), 0.0))
        if norm0 == 0.0 or norm <= rank_tol * norm0:
            raise RankDeficient(f"vector {i} is numerically dependent on its predecessors")
        out.append(w / norm)
    return Basis(np.array(out), gram)


def complete_basis(frame: np.ndarray, accept: float = 1e-6) -> np.ndarray:
    """Orthonormal complement of the columns of ``frame`` (assumed orthonormal).

    Candidates are the standard basis vectors in index order; a candidate is
    kept when its residual after projection exceeds ``accept``. Returns an
    (N, N - k) array of columns.
    """
    n, k = frame.shape
    have = [frame[:, j] for j in range(k)]
    out = []
    for i in range(n):
        if len(out) == n - k:
            break
        w = np.zeros(n)
        w[i] = 1.0
        for _ in range(2):
            for q in have:
                w = w - (q @ w) * q
        norm = np.linalg.norm(w)
        if norm > accept:
            w = w / norm
            have.append(w)
            out.append(w)
    if len(out) != n - k:
        raise RankDeficient("could not complete the frame to a basis")
    return np.array(out).T.reshape(n, n - k)


def sym_eigen(s, eig_tol: float = DEFAULT_TOLERANCES.eig_tol):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a symmetric matrix."""
    s = s.entries if isinstance(s, SymMatrix) else np.asarray(s, dtype=float)
    scale = max(1.0, float(np.abs(s).max(initial=0.0)))
    if np.abs(s - s.T).max(initial=0.0) > eig_tol * scale:
        raise ValueError("sym_eigen needs a symmetric matrix")
    try:
        lam, vecs = np.linalg.eigh(0.5 * (s + s.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from None
    if not np.all(np.isfinite(lam)):
        raise ConvergenceFailure("non-finite eigenvalues")
    return lam, vecs


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    if n == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
