"""Polar-polytope geometry of a doubled atom set.

For atoms ``a_1..a_n`` (columns of ``A``) the primal polytope is
``conv{+-a_i}`` and the polar polytope is ``P* = {c : |a_i.T c| <= 1}``.
A signed support picks one signed copy of some atoms; it spans a face of
the primal polytope exactly when the matching tight set of ``P*`` is a
face of the right dimension, which is what :func:`face_exists` tests.

Indices are 0-based here.  Doubled column ``j < n`` is ``+a_j`` and
column ``n + j`` is ``-a_j``.
"""

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import GuardExceededError, InfeasibleError, UnboundedPolarError
from .lp import StandardLp, solve_margin_lp, solve_standard
from .numerics import DEFAULT_TOL, as_matrix, pseudoinverse, rank

ENUMERATION_GUARD = 10**7


@dataclass(frozen=True)
class AtomMatrix:
    """A ``d x n`` atom set with nonzero (not necessarily unit-norm) columns."""

    atoms: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.atoms)
        norms = np.linalg.norm(A, axis=0)
        if np.any(norms <= DEFAULT_TOL.dedupe_tol):
            zero = [int(i) + 1 for i in np.flatnonzero(norms <= DEFAULT_TOL.dedupe_tol)]
            raise ValueError(f"atoms must be nonzero; zero columns: {zero}")
        object.__setattr__(self, "atoms", A)

    @property
    def d(self):
        return self.atoms.shape[0]

    @property
    def n(self):
        return self.atoms.shape[1]

    def column(self, j):
        """Doubled column ``j`` (``+a_j`` for ``j < n``, ``-a_{j-n}`` otherwise)."""
        return self.atoms[:, j] if j < self.n else -self.atoms[:, j - self.n]


def atom_matrix(A):
    return A if isinstance(A, AtomMatrix) else AtomMatrix(A)


@dataclass(frozen=True)
class DoubledMatrix:
    base: AtomMatrix
    columns: np.ndarray

    def fold(self, x_tilde):
        """Map a nonnegative doubled vector back to signed coefficients."""
        x_tilde = np.asarray(x_tilde, dtype=float)
        n = self.base.n
        return x_tilde[:n] - x_tilde[n:]


def double(A):
    """Return ``[A, -A]`` wrapped with its base atom set."""
    A = atom_matrix(A)
    cols = np.hstack([A.atoms, -A.atoms])
    cols.setflags(write=False)
    return DoubledMatrix(A, cols)


@dataclass(frozen=True, order=True)
class SignedSupport:
    """Ordered ``(index, sign)`` pairs with strictly increasing 0-based indices."""

    pairs: tuple = ()

    def __post_init__(self):
        pairs = tuple((int(i), int(s)) for i, s in self.pairs)
        idx = [i for i, _ in pairs]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"support indices must be strictly increasing: {idx}")
        if any(i < 0 for i in idx):
            raise ValueError("support indices must be nonnegative")
        if any(s not in (1, -1) for _, s in pairs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_coeffs(cls, x, tol=DEFAULT_TOL):
        x = np.asarray(x, dtype=float).reshape(-1)
        return cls(tuple((int(i), 1 if x[i] > 0 else -1)
                         for i in np.flatnonzero(np.abs(x) > tol.dedupe_tol)))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def indices(self):
        return tuple(i for i, _ in self.pairs)

    @property
    def signs(self):
        return np.array([s for _, s in self.pairs], dtype=float)

    def flipped(self):
        return SignedSupport(tuple((i, -s) for i, s in self.pairs))

    def doubled_indices(self, n):
        return tuple(i if s > 0 else n + i for i, s in self.pairs)

    def signed_columns(self, A):
        A = atom_matrix(A)
        if not self.pairs:
            return np.zeros((A.d, 0))
        return A.atoms[:, list(self.indices)] * self.signs

    def label(self):
        """1-based label such as ``"+1,-3"``."""
        return ",".join(f"{'+' if s > 0 else '-'}{i + 1}" for i, s in self.pairs)


def doubled_label(j, n):
    return f"+{j + 1}" if j < n else f"-{j - n + 1}"


@dataclass(frozen=True)
class PolarVertex:
    point: np.ndarray
    active_set: frozenset = field(default_factory=frozenset)

    def labels(self, n):
        ordered = sorted(self.active_set, key=lambda j: (j % n, j >= n))
        return ",".join(doubled_label(j, n) for j in ordered)


@dataclass(frozen=True)
class FaceQueryResult:
    exists: bool
    witness: np.ndarray = None
    margin: float = 0.0


def _check_guard(count, what):
    if count > ENUMERATION_GUARD:
        raise GuardExceededError(
            f"{what} needs {count} subsets, above the guard of {ENUMERATION_GUARD}")


def enumerate_polar_vertices(A, tol=DEFAULT_TOL):
    """All vertices of ``P* = {c : [A, -A].T c <= 1}`` by brute force.

    Every ``d``-subset of doubled columns with a nonsingular tight system is
    solved; feasible solutions are kept, coincident points are merged (their
    active sets unioned), and the result is sorted lexicographically.

    Raises
    ------
    UnboundedPolarError
        If ``rank(A) < d``.
    GuardExceededError
        If ``C(2n, d)`` exceeds the enumeration guard.
    """
    A = atom_matrix(A)
    d, n = A.d, A.n
    if rank(A.atoms, tol) < d:
        raise UnboundedPolarError(f"atoms span rank {rank(A.atoms, tol)} < d={d}")
    _check_guard(comb(2 * n, d), "vertex enumeration")
    At = double(A).columns

    # Antipodal pairs make the tight system inconsistent, so choose d distinct
    # atoms and then a sign for each.
    points = []
    for idx in itertools.combinations(range(n), d):
        M = A.atoms[:, idx].T
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= tol.rank_tol * s[0]:
            continue
        Minv = np.linalg.inv(M)
        for signs in itertools.product((1.0, -1.0), repeat=d):
            c = Minv @ np.array(signs)
            if np.all(At.T @ c <= 1.0 + tol.strict_tol):
                points.append(c)

    merged = []
    for c in points:
        for group in merged:
            if np.linalg.norm(group[0] - c) <= tol.dedupe_tol:
                break
        else:
            merged.append([c])

    vertices = []
    for group in merged:
        c = group[0]
        active = np.flatnonzero(np.abs(At.T @ c - 1.0) <= tol.strict_tol * max(1.0, np.abs(c).max()))
        # Refine on the full active set so degenerate vertices are not biased
        # towards whichever tight subset was found first.
        c = pseudoinverse(At[:, active].T, tol) @ np.ones(active.size)
        c.setflags(write=False)
        vertices.append(PolarVertex(c, frozenset(int(j) for j in active)))
    vertices.sort(key=lambda v: tuple(np.round(v.point, 12)))
    return vertices


def face_exists(A, s, tol=DEFAULT_TOL):
    """Does the signed support ``s`` index a face of the polar polytope of full
    dimension ``d - m``?

    True exactly when the signed columns are linearly independent and the
    max-margin LP finds a point where they are tight while every other
    doubled constraint is strictly slack.  The witness is that point.
    """
    A = atom_matrix(A)
    s = s if isinstance(s, SignedSupport) else SignedSupport(s)
    m = len(s)
    if m == 0 or m > A.d:
        return FaceQueryResult(False, None, 0.0)
    S = s.signed_columns(A)
    if rank(S, tol) < m:
        return FaceQueryResult(False, None, 0.0)
    tight = set(s.doubled_indices(A.n))
    others = [j for j in range(2 * A.n) if j not in tight]
    At = double(A).columns
    try:
        margin, witness = solve_margin_lp(S, At[:, others], tol)
    except InfeasibleError:
        return FaceQueryResult(False, None, 0.0)
    return FaceQueryResult(margin > tol.strict_tol, witness, margin)


def signed_supports(n, k, fix_first_sign=True):
    """Signed supports of size ``k`` in lexicographic order, ``+`` before ``-``."""
    for idx in itertools.combinations(range(n), k):
        tail = itertools.product((1, -1), repeat=k - 1) if fix_first_sign and k \
            else itertools.product((1, -1), repeat=k)
        for signs in tail:
            signs = ((1,) + signs) if fix_first_sign and k else signs
            yield SignedSupport(tuple(zip(idx, signs)))


def is_k_neighbourly(A, k, tol=DEFAULT_TOL):
    """Check every ``k`` signed atoms (no antipodal pair) span a face.

    Central symmetry halves the work: a support and its global sign flip
    give the same verdict, so only patterns with a leading ``+`` are tried.

    Returns
    -------
    verdict : bool
    first_failure : SignedSupport or None
    """
    A = atom_matrix(A)
    if not 1 <= k <= A.d:
        raise ValueError(f"k must lie in 1..{A.d}, got {k}")
    if k > A.n:
        return True, None
    _check_guard(comb(A.n, k) * 2 ** (k - 1), "neighbourliness check")
    for s in signed_supports(A.n, k):
        if not face_exists(A, s, tol).exists:
            return False, s
    return True, None


def spark(A, tol=DEFAULT_TOL):
    """Smallest number of linearly dependent atoms (``n + 1`` if none)."""
    A = atom_matrix(A)
    for size in range(1, min(A.d + 1, A.n) + 1):
        _check_guard(comb(A.n, size), "spark")
        for idx in itertools.combinations(range(A.n), size):
            if rank(A.atoms[:, idx], tol) < size:
                return size
    return A.n + 1


def cone_contains(A, s, c, tol=DEFAULT_TOL):
    """Is ``c`` inside the cone generated by the signed atoms of ``s``?

    ``c`` is first projected onto the span of those atoms; it is in the cone
    when its off-span residual is negligible and the projection is a
    nonnegative combination of them.
    """
    A = atom_matrix(A)
    s = s if isinstance(s, SignedSupport) else SignedSupport(s)
    c = np.asarray(c, dtype=float).reshape(-1)
    c_norm = float(np.linalg.norm(c))
    if c_norm == 0.0:
        return True
    S = s.signed_columns(A)
    proj = S @ (pseudoinverse(S, tol) @ c)
    if np.linalg.norm(c - proj) > tol.dedupe_tol * c_norm:
        return False
    sol = solve_standard(StandardLp(S, proj, np.ones(S.shape[1])), tol)
    return sol.optimal
