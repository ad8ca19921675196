"""Certificates of unique l1 optimality and l1/l0 equivalence.

Three tests of decreasing strength are provided for a representation
``y = A x0``:

* :func:`check_fuchs` searches for *any* dual vector with the right tight
  set and strict slack elsewhere.  It is exact: it holds iff ``x0`` is the
  unique minimiser of ``||x||_1`` subject to ``A x = y``.
* :func:`check_fuchs_corollary` probes one particular dual vector, the
  basis vertex ``pinv(A_opt).T @ sign(x_opt)``.
* :func:`check_erc` bounds the probe over all sign patterns at once, so it
  depends on the support only.

ERC implies the corollary for every sign pattern, which implies Fuchs.
:func:`brute_force_l1_oracle` is an independent enumeration used to check
all of the above.
"""

import itertools
from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np

from .errors import GuardExceededError
from .numerics import DEFAULT_TOL, as_vector, pseudoinverse, rank
from .polytope import (
    ENUMERATION_GUARD,
    SignedSupport,
    atom_matrix,
    face_exists,
    spark,
)


@dataclass(frozen=True)
class Representation:
    """Coefficient vector together with its thresholded signed support."""

    coeffs: np.ndarray
    support: SignedSupport

    @classmethod
    def from_coeffs(cls, x, tol=DEFAULT_TOL):
        x = as_vector(x)
        return cls(x, SignedSupport.from_coeffs(x, tol))

    @property
    def m(self):
        return len(self.support)


def _representation(x0, tol):
    return x0 if isinstance(x0, Representation) else Representation.from_coeffs(x0, tol)


def _off_support(n, indices):
    chosen = set(indices)
    return [j for j in range(n) if j not in chosen]


class FuchsResult(NamedTuple):
    holds: bool
    witness: np.ndarray
    margin: float


class CorollaryResult(NamedTuple):
    holds: bool
    c_opt: np.ndarray
    max_dot: float


class ErcResult(NamedTuple):
    holds: bool
    coefficient: float


class SignEnumerationResult(NamedTuple):
    holds: bool
    vertex_count: int


class OracleResult(NamedTuple):
    min_cost: float
    optimal_points: list


def check_fuchs(A, x0, tol=DEFAULT_TOL):
    """Exact test of unique l1 optimality for ``x0``.

    Holds iff the support columns are independent and some ``c`` has
    ``A_opt.T c = sign(x_opt)`` and ``|a_j.T c| < 1`` off the support.
    The witness maximises the off-support slack, returned as ``margin``.
    The zero representation always holds.
    """
    A = atom_matrix(A)
    x0 = _representation(x0, tol)
    if x0.m == 0:
        return FuchsResult(True, np.zeros(A.d), 1.0)
    result = face_exists(A, x0.support, tol)
    return FuchsResult(result.exists, result.witness, float(result.margin))


def check_fuchs_corollary(A, x0, tol=DEFAULT_TOL):
    A = atom_matrix(A)
    x0 = _representation(x0, tol)
    idx = list(x0.support.indices)
    if not idx:
        return CorollaryResult(True, np.zeros(A.d), 0.0)
    A_opt = A.atoms[:, idx]
    c_opt = pseudoinverse(A_opt, tol).T @ x0.support.signs
    off = _off_support(A.n, idx)
    max_dot = float(np.max(np.abs(A.atoms[:, off].T @ c_opt))) if off else 0.0
    if rank(A_opt, tol) < len(idx):
        return CorollaryResult(False, c_opt, max_dot)
    return CorollaryResult(max_dot < 1.0 - tol.strict_tol, c_opt, max_dot)


def check_erc(A, support_indices, tol=DEFAULT_TOL):
    """Exact recovery coefficient ``max_{j off support} ||pinv(A_opt) a_j||_1``.

    A rank-deficient support gets coefficient ``inf`` and fails.  With no
    off-support atoms the coefficient is 0 and the condition holds.
    """
    A = atom_matrix(A)
    idx = sorted(int(i) for i in support_indices)
    if not idx:
        raise ValueError("ERC needs a nonempty support")
    A_opt = A.atoms[:, idx]
    if rank(A_opt, tol) < len(idx):
        return ErcResult(False, float("inf"))
    off = _off_support(A.n, idx)
    if not off:
        return ErcResult(True, 0.0)
    coeffs = pseudoinverse(A_opt, tol) @ A.atoms[:, off]
    coefficient = float(np.max(np.sum(np.abs(coeffs), axis=0)))
    return ErcResult(coefficient < 1.0 - tol.strict_tol, coefficient)


def check_erc_by_sign_enumeration(A, support_indices, tol=DEFAULT_TOL):
    """ERC decided by testing every basis vertex ``pinv(A_opt).T @ sigma``.

    Only the ``2**(m-1)`` sign vectors with a leading ``+`` are built; the
    flipped vectors give the negated vertex and the same verdict because the
    off-support test is symmetric.
    """
    A = atom_matrix(A)
    idx = sorted(int(i) for i in support_indices)
    if not idx:
        raise ValueError("ERC needs a nonempty support")
    m = len(idx)
    count = 2 ** (m - 1)
    A_opt = A.atoms[:, idx]
    if rank(A_opt, tol) < m:
        return SignEnumerationResult(False, count)
    off = A.atoms[:, _off_support(A.n, idx)]
    P = pseudoinverse(A_opt, tol)
    holds = True
    for tail in itertools.product((1.0, -1.0), repeat=m - 1):
        c = P.T @ np.array((1.0,) + tail)
        dots = off.T @ c
        # Both signed copies of each off-support atom: +-a_j.T c < 1.
        if dots.size and np.max(np.abs(dots)) >= 1.0 - tol.strict_tol:
            holds = False
    return SignEnumerationResult(holds, count)


def l0_unique(A, m, tol=DEFAULT_TOL):
    """Sparsest-representation guarantee ``m < spark(A) / 2``."""
    return 2 * int(m) < spark(A, tol)


def coherence(A):
    """Largest ``|<a_i, a_j>|`` over distinct columns after normalising them."""
    A = atom_matrix(A).atoms
    U = A / np.linalg.norm(A, axis=0)
    G = np.abs(U.T @ U)
    np.fill_diagonal(G, 0.0)
    return float(G.max()) if G.size > 1 else 0.0


@dataclass(frozen=True)
class CertificateReport:
    m: int
    full_rank: bool
    fuchs: FuchsResult
    fuchs_corollary: CorollaryResult
    erc: ErcResult
    spark_value: int
    l0_unique: bool
    l1_unique: bool
    l1l0_equivalent: bool


def certify(A, x0, tol=DEFAULT_TOL):
    """Run every check on one representation and assemble a report.

    The implication chain ERC => corollary => Fuchs is exact in theory but
    the three checks use different numerical routes.  When the corollary
    probe already certifies the condition, it is used as the Fuchs witness
    so the report never contradicts itself near the tolerance boundary.
    """
    A = atom_matrix(A)
    x0 = _representation(x0, tol)
    idx = x0.support.indices
    fuchs = check_fuchs(A, x0, tol)
    corollary = check_fuchs_corollary(A, x0, tol)
    if idx:
        erc = check_erc(A, idx, tol)
        full_rank = rank(A.atoms[:, list(idx)], tol) == len(idx)
    else:
        erc = ErcResult(True, 0.0)
        full_rank = True

    if erc.holds and not corollary.holds:
        corollary = corollary._replace(holds=True)
    if corollary.holds and not fuchs.holds:
        fuchs = FuchsResult(True, corollary.c_opt, 1.0 - corollary.max_dot)

    sp = spark(A, tol)
    l0 = 2 * x0.m < sp
    return CertificateReport(
        m=x0.m,
        full_rank=full_rank,
        fuchs=fuchs,
        fuchs_corollary=corollary,
        erc=erc,
        spark_value=sp,
        l0_unique=l0,
        l1_unique=fuchs.holds,
        l1l0_equivalent=fuchs.holds and l0,
    )


def brute_force_l1_oracle(A, y, tol=DEFAULT_TOL):
    """Minimum l1 cost and *all* minimisers among basic feasible solutions.

    Enumerates every linearly independent set of at most ``rank(A)`` doubled
    columns, solves for the coefficients, keeps the nonnegative exact
    solutions and folds them back to signed vectors.  Because the feasible
    set of the l1 problem is bounded in the cost direction, the optimum is
    unique exactly when a single basic point attains it.
    """
    A = atom_matrix(A)
    y = as_vector(y, A.d)
    n = A.n
    r = rank(A.atoms, tol)
    total = sum(comb(n, k) * 2**k for k in range(r + 1))
    if total > ENUMERATION_GUARD:
        raise GuardExceededError(f"oracle needs {total} supports")
    y_scale = 1.0 + float(np.linalg.norm(y))

    candidates = []
    if np.linalg.norm(y) <= tol.dedupe_tol:
        candidates.append(np.zeros(n))
    for k in range(1, r + 1):
        for idx in itertools.combinations(range(n), k):
            cols = A.atoms[:, idx]
            if rank(cols, tol) < k:
                continue
            coef = np.linalg.lstsq(cols, y, rcond=None)[0]
            if np.linalg.norm(cols @ coef - y) > 1e-9 * y_scale:
                continue
            if np.any(np.abs(coef) <= tol.dedupe_tol):
                # Lies on a smaller support, found there.
                continue
            x = np.zeros(n)
            x[list(idx)] = coef
            candidates.append(x)
    if not candidates:
        return OracleResult(float("inf"), [])

    costs = np.array([np.abs(x).sum() for x in candidates])
    best = float(costs.min())
    optimal = []
    for x, cost in zip(candidates, costs):
        if cost <= best + 1e-9 * (1.0 + best):
            if not any(np.linalg.norm(x - p) <= tol.dedupe_tol * y_scale for p in optimal):
                optimal.append(x)
    return OracleResult(best, optimal)
