"""Sparse recovery: basis pursuit (LP and vertex search), OMP and MP.

Greedy selection uses raw inner products ``|a_j.T r|`` with no atom
normalisation, so atoms with large norm are favoured.  Ties go to the
lowest atom index.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentCertificateError, InfeasibleError
from .lp import StandardLp, solve_standard
from .numerics import DEFAULT_TOL, as_vector, pseudoinverse, rank, solve_least_squares
from .polytope import atom_matrix, double, enumerate_polar_vertices


@dataclass(frozen=True)
class BpResult:
    coeffs: np.ndarray
    objective: float
    dual_point: np.ndarray
    unique_hint: bool


@dataclass(frozen=True)
class PursuitStep:
    chosen_index: int
    """Doubled column index: ``j`` for ``+a_j``, ``n + j`` for ``-a_j``."""
    correlation: float
    coeffs_after: np.ndarray
    residual_norm: float


@dataclass(frozen=True)
class PursuitTrace:
    steps: list = field(default_factory=list)
    final_coeffs: np.ndarray = None
    converged: bool = False

    @property
    def steps_used(self):
        return len(self.steps)

    @property
    def support(self):
        """Atom indices of the pruned final coefficients."""
        return tuple(int(i) for i in np.flatnonzero(self.final_coeffs))


def _solve_nonnegative(cols, y, tol):
    """Nonnegative ``z`` with ``cols @ z == y``, or ``None``.

    The minimum-norm solution is tried first; if it has negative entries a
    phase-one LP on the same columns looks for another one.
    """
    scale = 1e-8 * (1.0 + float(np.linalg.norm(y)))
    if cols.shape[1] == 0:
        return np.zeros(0) if np.linalg.norm(y) <= scale else None
    z = pseudoinverse(cols, tol) @ y
    if np.linalg.norm(cols @ z - y) <= scale and np.all(z >= -scale):
        return np.clip(z, 0.0, None)
    sol = solve_standard(StandardLp(cols, y, np.zeros(cols.shape[1])), tol)
    if sol.optimal and np.linalg.norm(cols @ sol.primal - y) <= scale:
        return np.asarray(sol.primal)
    return None


def _fold(x_tilde, n, tol):
    x = np.asarray(x_tilde[:n]) - np.asarray(x_tilde[n:])
    x = np.where(np.abs(x) <= tol.dedupe_tol * max(1.0, np.abs(x).max(initial=0.0)), 0.0, x)
    x.setflags(write=False)
    return x


def basis_pursuit(A, y, tol=DEFAULT_TOL):
    """Minimise ``||x||_1`` subject to ``A x = y`` with the simplex solver.

    Raises
    ------
    InfeasibleError
        If ``y`` is not in the range of ``A``.
    """
    A = atom_matrix(A)
    y = as_vector(y, A.d)
    At = double(A).columns
    sol = solve_standard(StandardLp(At, y, np.ones(2 * A.n)), tol)
    if not sol.optimal:
        raise InfeasibleError("observation is not in the span of the atoms")
    x = _fold(sol.primal, A.n, tol)
    return BpResult(x, float(np.abs(x).sum()), sol.dual, sol.unique_hint)


def basis_pursuit_brute(A, y, tol=DEFAULT_TOL):
    """Basis pursuit by searching the polar vertices for ``argmax c.T y``.

    The winning vertex's tight constraints name the optimal signed atoms;
    the coefficients on them are then solved for directly.  Ties in
    ``c.T y`` go to the lexicographically first vertex.
    """
    A = atom_matrix(A)
    y = as_vector(y, A.d)
    vertices = enumerate_polar_vertices(A, tol)
    scores = np.array([v.point @ y for v in vertices])
    best = scores.max()
    window = tol.strict_tol * (1.0 + abs(best))
    vertex = next(v for v, s in zip(vertices, scores) if s >= best - window)
    try:
        x = recover_primal_from_dual(A, y, vertex.point, tol)
    except InconsistentCertificateError as exc:
        raise InfeasibleError(str(exc)) from exc
    active = sorted(vertex.active_set)
    At = double(A).columns
    unique = rank(At[:, active], tol) == len(active)
    return BpResult(x, float(np.abs(x).sum()), vertex.point, unique)


def recover_primal_from_dual(A, y, c, tol=DEFAULT_TOL):
    """Primal coefficients from an optimal dual point via complementary slackness.

    Only doubled columns tight at ``c`` may carry weight; a nonnegative
    solution on them reconstructing ``y`` is optimal.

    Raises
    ------
    InconsistentCertificateError
        If ``c`` is infeasible for the dual or no such solution exists.
    """
    A = atom_matrix(A)
    y = as_vector(y, A.d)
    c = as_vector(c, A.d)
    At = double(A).columns
    dots = At.T @ c
    slack_tol = tol.strict_tol * max(1.0, float(np.abs(c).max()))
    if np.any(dots > 1.0 + slack_tol):
        raise InconsistentCertificateError("dual point lies outside the polar polytope")
    active = np.flatnonzero(np.abs(dots - 1.0) <= slack_tol)
    z = _solve_nonnegative(At[:, active], y, tol)
    if z is None:
        raise InconsistentCertificateError("dual point is not optimal for this observation")
    x_tilde = np.zeros(2 * A.n)
    x_tilde[active] = z
    return _fold(x_tilde, A.n, tol)


def _pick(correlations, candidates, tol):
    """Index into ``candidates`` of the largest ``|correlation|``; lowest index wins ties."""
    mags = np.abs(correlations[candidates])
    top = mags.max()
    return candidates[int(np.flatnonzero(mags >= top - tol.strict_tol * (1.0 + top))[0])]


def omp(A, y, max_steps, tol=DEFAULT_TOL):
    """Orthogonal matching pursuit.

    Each step adds the unselected atom most correlated with the residual and
    refits all selected atoms by least squares.  Stops once the residual is
    below ``residual_tol * (1 + ||y||)`` or after ``max_steps`` steps.
    """
    A = atom_matrix(A)
    y = as_vector(y, A.d)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    n = A.n
    threshold = tol.residual_tol * (1.0 + np.linalg.norm(y))
    selected = []
    coeffs = np.zeros(n)
    r = np.array(y)
    steps = []
    while np.linalg.norm(r) > threshold and len(steps) < max_steps and len(selected) < n:
        corr = A.atoms.T @ r
        free = np.array([j for j in range(n) if j not in selected])
        j = _pick(corr, free, tol)
        if abs(corr[j]) <= threshold:
            break
        selected.append(int(j))
        sub = solve_least_squares(A.atoms[:, selected], y, tol)
        coeffs = np.zeros(n)
        coeffs[selected] = sub
        r = y - A.atoms @ coeffs
        after = coeffs.copy()
        after.setflags(write=False)
        steps.append(PursuitStep(int(j) if corr[j] >= 0 else n + int(j),
                                 float(corr[j]), after, float(np.linalg.norm(r))))
    final = np.where(np.abs(coeffs) <= tol.dedupe_tol, 0.0, coeffs)
    final.setflags(write=False)
    return PursuitTrace(steps, final, bool(np.linalg.norm(r) <= threshold))


def omp_eventual(A, y, k_max, tol=DEFAULT_TOL):
    """OMP allowed ``k_max`` steps, with zero coefficients dropped at the end.

    ``trace.support`` is the recovered support.  This can find an ``m``-term
    representation in more than ``m`` steps when ERC fails at level ``m``
    but holds on a larger support containing it.
    """
    return omp(A, y, k_max, tol)


def mp(A, y, max_iters, tol=DEFAULT_TOL):
    """Plain matching pursuit: one coefficient update per iteration, atoms may repeat."""
    A = atom_matrix(A)
    y = as_vector(y, A.d)
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    n = A.n
    sq_norms = np.sum(A.atoms**2, axis=0)
    threshold = tol.residual_tol * (1.0 + np.linalg.norm(y))
    coeffs = np.zeros(n)
    r = np.array(y)
    steps = []
    while np.linalg.norm(r) > threshold and len(steps) < max_iters:
        corr = A.atoms.T @ r
        j = _pick(corr, np.arange(n), tol)
        if abs(corr[j]) <= threshold:
            break
        delta = corr[j] / sq_norms[j]
        coeffs[j] += delta
        r = r - delta * A.atoms[:, j]
        after = coeffs.copy()
        after.setflags(write=False)
        steps.append(PursuitStep(int(j) if corr[j] >= 0 else n + int(j),
                                 float(corr[j]), after, float(np.linalg.norm(r))))
    final = np.where(np.abs(coeffs) <= tol.dedupe_tol, 0.0, coeffs)
    final.setflags(write=False)
    return PursuitTrace(steps, final, bool(np.linalg.norm(r) <= threshold))
