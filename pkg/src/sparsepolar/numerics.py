"""Dense real linear algebra and the tolerance policy shared by every module.

Everything here is a pure function of its inputs.  Arrays are returned as
fresh, read-only numpy arrays so results can be shared between callers
without defensive copies.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Absolute/relative thresholds used to turn exact-arithmetic statements
    into floating-point decisions.

    Parameters
    ----------
    rank_tol : float
        Singular values below ``rank_tol * s_max`` are treated as zero.
    strict_tol : float
        An inequality ``v < 1`` holds only when ``v < 1 - strict_tol``.
    dedupe_tol : float
        Two points closer than this are the same point; coefficients smaller
        than this are zero.
    residual_tol : float
        Relative residual at which a pursuit stops.
    """

    rank_tol: float = 1e-10
    strict_tol: float = 1e-9
    dedupe_tol: float = 1e-8
    residual_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_tol", "strict_tol", "dedupe_tol", "residual_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")


DEFAULT_TOL = Tolerances()


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_matrix(M):
    """Validate and copy ``M`` into a finite, read-only 2-D float array."""
    M = np.array(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    M.setflags(write=False)
    return M


def as_vector(v, length=None):
    """Validate and copy ``v`` into a finite, read-only 1-D float array."""
    v = np.array(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if length is not None and v.shape[0] != length:
        raise ValueError(f"expected length {length}, got {v.shape[0]}")
    v.setflags(write=False)
    return v


def _svd_cutoff(s, tol):
    if s.size == 0 or s[0] == 0.0:
        return np.inf
    return tol.rank_tol * s[0]


def rank(M, tol=DEFAULT_TOL):
    """Numerical rank: number of singular values above ``rank_tol * s_max``."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.count_nonzero(s > _svd_cutoff(s, tol)))


def pseudoinverse(M, tol=DEFAULT_TOL):
    """Moore-Penrose pseudoinverse through a truncated SVD.

    Singular values at or below ``rank_tol * s_max`` are discarded, so the
    result is the exact pseudoinverse of the nearest matrix of the detected
    numerical rank.

    Examples
    --------
    >>> pseudoinverse([[2.0], [2.0]])
    array([[0.25, 0.25]])
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > _svd_cutoff(s, tol)
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return _frozen((Vt.T * inv) @ U.T)


def solve_least_squares(M, b, tol=DEFAULT_TOL):
    """Minimum-norm least-squares solution ``M^+ b``."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if M.shape[0] != b.shape[0]:
        raise ValueError(f"row count {M.shape[0]} does not match rhs length {b.shape[0]}")
    return _frozen(pseudoinverse(M, tol) @ b)


def norm1(v):
    return float(np.sum(np.abs(v)))


def norm2(v):
    return float(np.linalg.norm(v))


def norm_inf(v):
    v = np.asarray(v, dtype=float)
    return float(np.max(np.abs(v))) if v.size else 0.0
