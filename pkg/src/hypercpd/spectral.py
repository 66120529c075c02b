"""Stationary distributions, symmetrised Laplacians and top-k spectra."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
import scipy.sparse.linalg

from .reduction import UndirectedGraph

DENSE_STATIONARY_LIMIT = 2000
DENSE_EIGEN_LIMIT = 500
EIGEN_SEED = 12345

COMBINATORIAL = "combinatorial-directed"
NORMALIZED_DIRECTED = "normalized-directed"
NORMALIZED_UNDIRECTED = "normalized-undirected"


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, residual: float | np.ndarray):
        super().__init__(f"{message} (residual {residual})")
        self.residual = residual


@dataclass(frozen=True)
class SymmetricLaplacian:
    matrix: scipy.sparse.csr_matrix
    kind: str

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _as_csr(p) -> scipy.sparse.csr_matrix:
    return scipy.sparse.csr_matrix(p) if not scipy.sparse.issparse(p) else p.tocsr()


def stationary_residual(p, phi: np.ndarray) -> float:
    """L1 norm of phi P - phi."""
    p = _as_csr(p)
    return float(np.abs(p.T @ phi - phi).sum())


def dense_stationary(p) -> np.ndarray:
    """Solve (P^T - I) phi = 0 with sum(phi) = 1 by least squares."""
    p = _as_csr(p).toarray()
    n = p.shape[0]
    a = np.vstack([p.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    phi, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    return phi


def stationary_distribution(
    p,
    tol: float = 1e-12,
    max_iter: int | None = None,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Stationary vector of an irreducible row-stochastic matrix.

    Iterates the lazy chain (P + I) / 2, which shares its fixed point with P
    but is aperiodic; the gadget walk is 3-periodic when all weights are 1.
    Stops when the L1 change per step falls below ``tol``. If the budget of
    ``max_iter`` steps (default 100 * n) runs out, falls back to a dense
    solve for n <= 2000 and otherwise raises :class:`ConvergenceError`.
    Reducible chains raise the same error.
    """
    p = _as_csr(p)
    n = p.shape[0]
    ncomp, _ = scipy.sparse.csgraph.connected_components(p, directed=True, connection="strong")
    if ncomp > 1:
        raise ConvergenceError(f"transition matrix is reducible ({ncomp} strong components)", np.nan)
    if max_iter is None:
        max_iter = 100 * n
    pt = p.T.tocsr()
    x = np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=float) / np.sum(x0)
    step = np.inf
    for _ in range(max_iter):
        nxt = 0.5 * (x + pt @ x)
        nxt /= nxt.sum()
        step = np.abs(nxt - x).sum()
        x = nxt
        if step <= tol:
            break
    # the lazy-chain step equals half the P-residual
    residual = stationary_residual(p, x)
    if residual > 1e-10 or x.min() <= 0:
        if n <= DENSE_STATIONARY_LIMIT:
            x = dense_stationary(p)
            residual = stationary_residual(p, x)
        if residual > 1e-10 or x.min() <= 0:
            raise ConvergenceError("stationary distribution did not converge", residual)
    return x


def gadget_initial_guess(h) -> np.ndarray:
    """Closed-form stationary vector of the unit-weight gadget walk.

    (incident counts, edge sizes, edge sizes) / total; exact when all
    weights are 1 and a good starting point otherwise.
    """
    counts = h.incident_counts().astype(float)
    sizes = h.edge_sizes().astype(float)
    x = np.concatenate([counts, sizes, sizes])
    return x / x.sum()


def combinatorial_laplacian(p, phi: np.ndarray) -> SymmetricLaplacian:
    """Phi - (Phi P + P^T Phi) / 2."""
    p = _as_csr(p)
    phi = np.asarray(phi, dtype=float)
    if p.shape != (phi.size, phi.size):
        raise ValueError(f"dimension mismatch: P is {p.shape}, phi has {phi.size} entries")
    fp = scipy.sparse.diags(phi) @ p
    sym = (fp + fp.T) * 0.5
    lap = (scipy.sparse.diags(phi) - sym).tocsr()
    # enforce exact symmetry against rounding in the sparse sum
    lap = ((lap + lap.T) * 0.5).tocsr()
    lap.sum_duplicates()
    return SymmetricLaplacian(lap, COMBINATORIAL)


def normalized_laplacian(lap: SymmetricLaplacian, phi: np.ndarray) -> SymmetricLaplacian:
    """Phi^{-1/2} L Phi^{-1/2}."""
    phi = np.asarray(phi, dtype=float)
    if np.any(phi <= 0):
        raise ValueError("stationary distribution has a nonpositive entry")
    s = scipy.sparse.diags(1.0 / np.sqrt(phi))
    out = (s @ lap.matrix @ s).tocsr()
    out = ((out + out.T) * 0.5).tocsr()
    return SymmetricLaplacian(out, NORMALIZED_DIRECTED)


def undirected_normalized_laplacian(g: UndirectedGraph) -> SymmetricLaplacian:
    """I - D^{-1/2} W D^{-1/2}; isolated nodes get an identity row."""
    w = g.adjacency.tocsr()
    deg = np.asarray(w.sum(axis=1)).ravel()
    inv = np.zeros_like(deg)
    inv[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    s = scipy.sparse.diags(inv)
    lap = (scipy.sparse.identity(w.shape[0], format="csr") - s @ w @ s).tocsr()
    lap = ((lap + lap.T) * 0.5).tocsr()
    return SymmetricLaplacian(lap, NORMALIZED_UNDIRECTED)


def top_k_eigenvalues(lap: SymmetricLaplacian | np.ndarray, k: int) -> np.ndarray:
    """The ``min(k, dim)`` largest eigenvalues in descending order.

    Dense symmetric solver up to dimension 500; above that, implicitly
    restarted Lanczos through matrix-vector products only, with a fixed
    starting vector.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    mat = lap.matrix if isinstance(lap, SymmetricLaplacian) else lap
    dim = mat.shape[0]
    if dim == 0:
        return np.zeros(0)
    k = min(k, dim)
    if dim <= DENSE_EIGEN_LIMIT or k >= dim - 1:
        dense = mat.toarray() if scipy.sparse.issparse(mat) else np.asarray(mat)
        vals = scipy.linalg.eigh(dense, eigvals_only=True, subset_by_index=[dim - k, dim - 1])
        return vals[::-1].copy()
    mat = _as_csr(mat)
    op = scipy.sparse.linalg.LinearOperator(mat.shape, matvec=mat.dot, dtype=float)
    v0 = np.random.default_rng(EIGEN_SEED).standard_normal(dim)
    try:
        vals, vecs = scipy.sparse.linalg.eigsh(op, k=k, which="LA", v0=v0, tol=1e-12)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise ConvergenceError("Lanczos eigensolver did not converge", np.nan) from exc
    res = np.linalg.norm(mat @ vecs - vecs * vals, axis=0)
    if np.any(res > 1e-8 * max(1.0, np.abs(vals).max())):
        raise ConvergenceError("Lanczos eigenpairs failed the residual check", res)
    return np.sort(vals)[::-1]


def pad_spectrum(values: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros(k)
    m = min(k, len(values))
    out[:m] = values[:m]
    return out


def write_spectra_csv(path, times, spectra) -> None:
    """One row per snapshot: t, lambda_1..lambda_K."""
    k = max((len(s) for s in spectra), default=0)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(["t"] + [f"lambda_{i + 1}" for i in range(k)])
        for t, s in zip(times, spectra):
            writer.writerow([t] + [repr(float(x)) for x in pad_spectrum(np.asarray(s), k)])
