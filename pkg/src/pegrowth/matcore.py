"""Dense real-matrix primitives: norms, conorm, spectra, matrix exponential,
and the rank of finite matrix families.

Everything operates on plain float64 ``numpy`` arrays.  The vector norm is
Euclidean throughout and the matrix norm is the induced spectral norm; all
rate and certificate computations elsewhere in the package inherit this
choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "DEFAULT_RANK_TOL",
    "as_matrix",
    "require_square",
    "opnorm",
    "fronorm",
    "conorm",
    "expm",
    "span_rank",
    "SpectrumReport",
    "spectrum",
    "eig_match_tol",
    "multiset_residual",
    "multisets_match",
    "nilpotent_shift",
    "parity_matrix",
    "unit_vector",
    "matrix_to_json",
    "matrix_from_json",
]

# Relative SVD cutoff; matches the double-precision noise floor for d <= 10.
DEFAULT_RANK_TOL = 1e-9


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite float64 2-D array (1-D input becomes a row)."""
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got {m.ndim}-D")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def require_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def opnorm(M) -> float:
    """Spectral operator norm (largest singular value)."""
    return float(np.linalg.norm(as_matrix(M), 2))


def fronorm(M) -> float:
    return float(np.linalg.norm(as_matrix(M)))


def conorm(M) -> float:
    """Smallest singular value of a square matrix.

    For invertible ``M`` this equals ``1 / opnorm(inv(M))``: it is the
    minimum of ``|Mx|`` over unit vectors ``x``.
    """
    m = require_square(M)
    return float(scipy.linalg.svdvals(m)[-1])


def expm(M, t: float = 1.0) -> np.ndarray:
    """Matrix exponential ``e^{tM}`` (scaling-and-squaring with Pade)."""
    m = require_square(M)
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    return scipy.linalg.expm(t * m)


def span_rank(family, tol: float = DEFAULT_RANK_TOL) -> int:
    """Dimension of the linear span of a family of same-shaped matrices.

    Each matrix is vectorised; the rank is the number of singular values of
    the stacked family exceeding ``tol`` times the largest one.
    """
    mats = [as_matrix(m, f"family[{i}]") for i, m in enumerate(family)]
    if not mats:
        return 0
    shape = mats[0].shape
    for i, m in enumerate(mats):
        if m.shape != shape:
            raise ValueError(f"family[{i}] has shape {m.shape}, expected {shape}")
    stacked = np.vstack([m.ravel() for m in mats])
    sv = scipy.linalg.svdvals(stacked)
    smax = sv[0] if sv.size else 0.0
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * smax))


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues clustered into (value, algebraic multiplicity) pairs."""

    eigenvalues: tuple  # of (complex, int)
    min_real: float
    max_real: float

    def as_multiset(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, as a complex array."""
        out = []
        for val, mult in self.eigenvalues:
            out.extend([val] * mult)
        return np.asarray(out, dtype=complex)


def eig_match_tol(M) -> float:
    """Absolute tolerance used to match or cluster eigenvalues of ``M``."""
    return 1e-6 * (1.0 + opnorm(M))


def spectrum(M, cluster_tol: float | None = None) -> SpectrumReport:
    """Eigenvalues of a square matrix with multiplicities.

    Nearby eigenvalues (within ``cluster_tol``, default the scale-aware
    matching tolerance) are merged into one entry whose value is the cluster
    mean.
    """
    m = require_square(M)
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise RuntimeError(f"eigenvalue solver failed: {exc}") from exc
    tol = eig_match_tol(m) if cluster_tol is None else cluster_tol
    order = np.lexsort((ev.imag, ev.real))
    ev = ev[order]
    clusters: list[list[complex]] = []
    for lam in ev:
        if clusters and abs(lam - np.mean(clusters[-1])) <= tol:
            clusters[-1].append(lam)
        else:
            clusters.append([lam])
    pairs = tuple((complex(np.mean(c)), len(c)) for c in clusters)
    return SpectrumReport(
        eigenvalues=pairs,
        min_real=float(ev.real.min()),
        max_real=float(ev.real.max()),
    )


def multiset_residual(a, b) -> float:
    """Greedy nearest-pair matching distance between two complex multisets.

    Returns the largest ``|a_i - b_match(i)|`` over the greedy matching;
    robust to conjugate-pair ordering.  Requires equal lengths.
    """
    av = np.asarray(a, dtype=complex).ravel()
    bv = np.asarray(b, dtype=complex).ravel()
    if av.size != bv.size:
        raise ValueError("multisets must have equal size")
    order = np.lexsort((av.imag, av.real))
    used = np.zeros(bv.size, dtype=bool)
    worst = 0.0
    for i in order:
        dist = np.abs(bv - av[i])
        dist[used] = np.inf
        j = int(np.argmin(dist))
        used[j] = True
        worst = max(worst, float(dist[j]))
    return worst


def multisets_match(a, b, tol: float) -> bool:
    return multiset_residual(a, b) <= tol


def nilpotent_shift(d: int) -> np.ndarray:
    """The d x d upper shift: ones on the first superdiagonal."""
    return np.eye(d, k=1)


def parity_matrix(d: int) -> np.ndarray:
    """diag(1, -1, 1, ...) with alternating signs."""
    return np.diag([(-1.0) ** i for i in range(d)])


def unit_vector(d: int, i: int) -> np.ndarray:
    """Canonical basis vector e_i (0-based) of R^d."""
    v = np.zeros(d)
    v[i] = 1.0
    return v


def matrix_to_json(M) -> dict:
    """Encode a matrix as ``{"rows": d, "cols": m, "data": [row-major]}``."""
    m = as_matrix(M)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": [float(x) for x in m.ravel()]}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {obj!r}") from exc
    if rows <= 0 or cols <= 0:
        raise ValueError("matrix dimensions must be positive")
    arr = np.asarray(data, dtype=float)
    if arr.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {arr.size}")
    return as_matrix(arr.reshape(rows, cols))
