"""Dense two-phase simplex for standard-form LPs, plus the max-margin LP.

The solver works on ``min cost @ x  s.t.  A x = b, x >= 0`` with a full
tableau and Bland's smallest-index rule, so it always terminates and
identical inputs give identical pivots.  It is meant for the desk-scale
problems that come out of a doubled dictionary, not for large models.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .numerics import DEFAULT_TOL, as_matrix, as_vector

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# Margin cap: keeps the max-margin LP bounded.  Only the sign of the margin matters.
MARGIN_CAP = 2.0


@dataclass(frozen=True)
class StandardLp:
    """``min objective @ x`` subject to ``constraint_matrix @ x == rhs``, ``x >= 0``."""

    constraint_matrix: np.ndarray
    rhs: np.ndarray
    objective: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.constraint_matrix)
        b = as_vector(self.rhs, A.shape[0])
        c = as_vector(self.objective, A.shape[1])
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "objective", c)


@dataclass(frozen=True)
class LpSolution:
    status: str
    primal: np.ndarray = None
    dual: np.ndarray = None
    objective_value: float = float("nan")
    reduced_costs: np.ndarray = None
    unique_hint: bool = False
    basis: tuple = ()

    @property
    def optimal(self):
        return self.status == OPTIMAL


class _Tableau:
    """Canonical-form tableau ``[B^-1 A | B^-1 b]`` with its basis list."""

    def __init__(self, T, basis, eps):
        self.T = T
        self.basis = list(basis)
        self.eps = eps

    def pivot(self, row, col):
        T = self.T
        T[row] /= T[row, col]
        others = np.arange(T.shape[0]) != row
        T[others] -= np.outer(T[others, col], T[row])
        self.basis[row] = col

    def reduced_costs(self, cost):
        return cost - cost[self.basis] @ self.T[:, :-1]

    def run(self, cost, allowed, max_iter):
        """Bland-rule primal simplex restricted to the ``allowed`` columns."""
        T = self.T
        for _ in range(max_iter):
            r = self.reduced_costs(cost)
            entering = None
            for j in allowed:
                if r[j] < -self.eps:
                    entering = j
                    break
            if entering is None:
                return OPTIMAL
            col = T[:, entering]
            rows = np.flatnonzero(col > self.eps)
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            # Bland: among tied ratios leave the smallest basic variable index.
            tied = rows[ratios <= best + self.eps * max(1.0, abs(best))]
            leave = min(tied, key=lambda i: self.basis[i])
            self.pivot(leave, entering)
        raise RuntimeError("simplex iteration limit reached")


def solve_standard(lp, tol=DEFAULT_TOL):
    """Solve a :class:`StandardLp` to a basic optimal pair.

    Returns an :class:`LpSolution` whose ``status`` is ``"optimal"``,
    ``"infeasible"`` or ``"unbounded"``.  On optimality the primal point is
    basic, the dual vector comes from the final basis, and ``unique_hint``
    is set when every nonbasic reduced cost exceeds ``strict_tol`` (a
    sufficient condition for a unique primal optimum).
    """
    A = lp.constraint_matrix
    b = lp.rhs
    cost = lp.objective
    m, n = A.shape
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(b))) if m else 1.0)
    eps = 1e-11 * scale
    feas_tol = 1e-9 * (1.0 + float(np.linalg.norm(b)))
    max_iter = 50 * (m + n) + 1000

    sign = np.where(b < 0, -1.0, 1.0)
    T = np.hstack([A * sign[:, None], np.eye(m), (b * sign)[:, None]])
    tab = _Tableau(T, range(n, n + m), eps)

    phase1_cost = np.concatenate([np.zeros(n), np.ones(m)])
    tab.run(phase1_cost, range(n + m), max_iter)
    if phase1_cost[tab.basis] @ tab.T[:, -1] > feas_tol:
        return LpSolution(status=INFEASIBLE)

    # Drive artificials out of the basis; rows where that fails are redundant.
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            candidates = np.flatnonzero(np.abs(tab.T[i, :n]) > eps)
            if candidates.size:
                j = candidates[np.argmax(np.abs(tab.T[i, candidates]))]
                tab.pivot(i, j)
                keep.append(i)
        else:
            keep.append(i)
    rows = np.array(keep, dtype=int)
    tab.T = np.delete(tab.T, np.arange(n, n + m), axis=1)[rows]
    tab.basis = [tab.basis[i] for i in rows]

    status = tab.run(cost, range(n), max_iter)
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED)

    basis = list(tab.basis)
    x = np.zeros(n)
    if basis:
        B = A[np.ix_(rows, basis)]
        x_B = np.linalg.solve(B, b[rows])
        x[basis] = np.where(x_B < 0, np.where(x_B > -feas_tol, 0.0, x_B), x_B)
        dual = np.linalg.lstsq(A[:, basis].T, cost[basis], rcond=None)[0]
    else:
        dual = np.zeros(m)
    reduced = cost - A.T @ dual
    nonbasic = np.setdiff1d(np.arange(n), basis)
    unique_hint = bool(np.all(reduced[nonbasic] > tol.strict_tol))
    for arr in (x, dual, reduced):
        arr.setflags(write=False)
    return LpSolution(
        status=OPTIMAL,
        primal=x,
        dual=dual,
        objective_value=float(cost @ x),
        reduced_costs=reduced,
        unique_hint=unique_hint,
        basis=tuple(sorted(int(j) for j in basis)),
    )


def solve_margin_lp(equality_atoms, inequality_atoms, tol=DEFAULT_TOL):
    """Largest uniform slack for a system of tight and strict constraints.

    Solves::

        max t   s.t.  E.T @ c == 1,   I.T @ c <= 1 - t,   0 <= t <= 2

    over free ``c``, where ``E`` and ``I`` hold constraint normals as columns.
    The strict system ``E.T c = 1, I.T c < 1`` is solvable exactly when the
    returned margin exceeds ``tol.strict_tol``.

    Returns
    -------
    margin : float
    witness : ndarray
        A point attaining the margin.

    Raises
    ------
    InfeasibleError
        If no ``c`` satisfies the equalities together with ``I.T c <= 1``.
    """
    E = np.asarray(equality_atoms, dtype=float)
    I = np.asarray(inequality_atoms, dtype=float)
    d = E.shape[0] if E.size else I.shape[0]
    E = E.reshape(d, -1)
    I = I.reshape(d, -1)
    m, k = E.shape[1], I.shape[1]

    # Variables: u (d), w (d), t, s (k), q ; c = u - w.
    nvar = 2 * d + 1 + k + 1
    rows = []
    rhs = []
    for i in range(m):
        row = np.zeros(nvar)
        row[:d] = E[:, i]
        row[d:2 * d] = -E[:, i]
        rows.append(row)
        rhs.append(1.0)
    for i in range(k):
        row = np.zeros(nvar)
        row[:d] = I[:, i]
        row[d:2 * d] = -I[:, i]
        row[2 * d] = 1.0
        row[2 * d + 1 + i] = 1.0
        rows.append(row)
        rhs.append(1.0)
    cap = np.zeros(nvar)
    cap[2 * d] = 1.0
    cap[-1] = 1.0
    rows.append(cap)
    rhs.append(MARGIN_CAP)

    objective = np.zeros(nvar)
    objective[2 * d] = -1.0
    sol = solve_standard(StandardLp(np.array(rows), np.array(rhs), objective), tol)
    if not sol.optimal:
        raise InfeasibleError("tight constraints cannot be met inside the polytope")
    c = sol.primal[:d] - sol.primal[d:2 * d]
    margin = float(sol.primal[2 * d])
    c.setflags(write=False)
    return margin, c
