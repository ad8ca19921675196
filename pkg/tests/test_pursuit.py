import itertools

import numpy as np
import pytest

from sparsepolar.certificates import brute_force_l1_oracle, check_erc
from sparsepolar.errors import InconsistentCertificateError, InfeasibleError
from sparsepolar.pursuit import (
    basis_pursuit,
    basis_pursuit_brute,
    mp,
    omp,
    omp_eventual,
    recover_primal_from_dual,
)

from instances import instance_set, random_representation

SQ2 = np.sqrt(2.0)


# -- basis pursuit -----------------------------------------------------------

def test_bp_two_atom(two_atom):
    res = basis_pursuit(two_atom, [1.0, 0.0])
    np.testing.assert_allclose(res.coeffs, [1, 0], atol=1e-12)
    assert res.objective == pytest.approx(brute_force_l1_oracle(two_atom, [1.0, 0.0]).min_cost)


def test_bp_unit_norm(unit_norm_d3):
    res = basis_pursuit(unit_norm_d3, unit_norm_d3 @ [1.0, 1.0, 0.0])
    np.testing.assert_allclose(res.coeffs, [1, 1, 0], atol=1e-12)
    assert res.objective == pytest.approx(2.0)


def test_bp_zero(unit_norm_d3):
    res = basis_pursuit(unit_norm_d3, np.zeros(3))
    np.testing.assert_array_equal(res.coeffs, np.zeros(3))
    assert res.objective == 0.0


def test_bp_infeasible():
    A = np.array([[1.0, 2.0], [0.0, 0.0]])
    with pytest.raises(InfeasibleError):
        basis_pursuit(A, [0.0, 1.0])


def test_bp_dual_certifies(rng):
    for A, x0 in instance_set(seed=21, count=60):
        y = A @ x0
        res = basis_pursuit(A, y)
        assert np.max(np.abs(A.T @ res.dual_point)) <= 1 + 1e-8
        assert res.dual_point @ y == pytest.approx(res.objective, abs=1e-8)
        assert np.max(np.abs(A @ res.coeffs - y)) <= 1e-8 * (1 + np.max(np.abs(y)))


def test_bp_brute_tie_vertices(two_atom):
    beta = 1.7
    y = beta * two_atom[:, 0]
    res = basis_pursuit_brute(two_atom, y)
    np.testing.assert_allclose(res.coeffs, [beta, 0], atol=1e-12)
    # Both tie vertices recover the same point.
    for c in ([1.0, 1 / SQ2 - 1], [1.0, -1 / SQ2 - 1]):
        np.testing.assert_allclose(recover_primal_from_dual(two_atom, y, c), [beta, 0], atol=1e-12)


def test_bp_brute_examples(two_atom):
    np.testing.assert_allclose(basis_pursuit_brute(two_atom, [1.0, 0.0]).coeffs, [1, 0], atol=1e-12)
    np.testing.assert_allclose(basis_pursuit_brute(np.eye(2), [0.3, -0.7]).coeffs, [0.3, -0.7])


def test_bp_brute_matches_lp(rng):
    for _ in range(80):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(d, 7))
        A, x0 = random_representation(rng, d, n, int(rng.integers(1, d + 1)))
        y = A @ x0 if rng.random() < 0.7 else rng.standard_normal(d)
        lp = basis_pursuit(A, y)
        brute = basis_pursuit_brute(A, y)
        assert brute.objective == pytest.approx(lp.objective, rel=1e-8, abs=1e-8)
        if lp.unique_hint:
            np.testing.assert_allclose(brute.coeffs, lp.coeffs, atol=1e-7)


def test_bp_matches_oracle(rng):
    for A, x0 in instance_set(seed=23, count=100):
        y = A @ x0
        assert basis_pursuit(A, y).objective == pytest.approx(
            brute_force_l1_oracle(A, y).min_cost, rel=1e-8, abs=1e-8)


# -- recovery from a dual point ----------------------------------------------

def test_recover_identity():
    np.testing.assert_allclose(recover_primal_from_dual(np.eye(2), [0.4, 0.0], [1.0, 0.0]), [0.4, 0])


def test_recover_zero_dual_inconsistent():
    with pytest.raises(InconsistentCertificateError):
        recover_primal_from_dual(np.eye(2), [1.0, 0.0], [0.0, 0.0])


def test_recover_infeasible_dual():
    with pytest.raises(InconsistentCertificateError):
        recover_primal_from_dual(np.eye(2), [1.0, 0.0], [2.0, 0.0])


def test_recover_wrong_vertex(two_atom):
    # c_-+ is a vertex but not optimal for y = a1.
    with pytest.raises(InconsistentCertificateError):
        recover_primal_from_dual(two_atom, [1.0, 0.0], [-1.0, 1 / SQ2 + 1])


# -- OMP ---------------------------------------------------------------------

def test_omp_first_step_picks_large_atom(two_atom):
    trace = omp(two_atom, [1.0, 0.0], 1)
    assert trace.steps_used == 1
    step = trace.steps[0]
    assert step.chosen_index == 1
    assert step.correlation == pytest.approx(SQ2)
    np.testing.assert_allclose(step.coeffs_after, [0, 1 / (2 * SQ2)], atol=1e-15)
    residual = np.array([1.0, 0.0]) - two_atom @ step.coeffs_after
    np.testing.assert_allclose(residual, [0.5, -0.5], atol=1e-15)
    assert not trace.converged


def test_omp_two_steps(two_atom):
    trace = omp(two_atom, [1.0, 0.0], 2)
    assert [s.chosen_index for s in trace.steps] == [1, 0]
    assert trace.steps[1].correlation == pytest.approx(0.5)
    np.testing.assert_allclose(trace.final_coeffs, [1, 0], atol=1e-15)
    assert trace.final_coeffs[1] == 0.0
    assert trace.converged and trace.steps_used == 2


def test_omp_identity():
    trace = omp(np.eye(3), [1.0, 0.0, 0.0], 3)
    assert trace.steps_used == 1
    np.testing.assert_array_equal(trace.final_coeffs, [1, 0, 0])


def test_omp_negative_sign_index():
    trace = omp(np.eye(2), [0.0, -2.0], 2)
    assert trace.steps[0].chosen_index == 3


def test_omp_tie_goes_to_lowest_index():
    trace = omp(np.eye(2), [1.0, 1.0], 1)
    assert trace.steps[0].chosen_index == 0


def test_omp_rejects_zero_steps():
    with pytest.raises(ValueError):
        omp(np.eye(2), [1.0, 0.0], 0)


def test_omp_orthogonality_and_monotone_residual(rng):
    for _ in range(100):
        d = int(rng.integers(2, 6))
        A = rng.standard_normal((d, int(rng.integers(d, 9))))
        y = rng.standard_normal(d)
        trace = omp(A, y, d)
        norms = [s.residual_norm for s in trace.steps]
        assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
        chosen = [s.chosen_index % A.shape[1] for s in trace.steps]
        assert len(set(chosen)) == len(chosen)
        for k, step in enumerate(trace.steps):
            S = chosen[: k + 1]
            r = y - A @ step.coeffs_after
            assert np.max(np.abs(A[:, S].T @ r)) <= 1e-8 * np.linalg.norm(y)


def test_erc_implies_m_step_recovery(rng):
    hits = 0
    for A, x0 in instance_set(seed=31, count=300):
        support = np.flatnonzero(x0)
        if not check_erc(A, support).holds:
            continue
        hits += 1
        trace = omp(A, A @ x0, len(support))
        assert trace.support == tuple(support)
        np.testing.assert_allclose(trace.final_coeffs, x0, atol=1e-8)
    assert hits > 30


# -- eventual recovery -------------------------------------------------------

def test_eventual_two_atom(two_atom):
    trace = omp_eventual(two_atom, [1.0, 0.0], 2)
    assert trace.support == (0,)
    assert trace.steps_used == 2


def test_eventual_erc_instance_uses_m_steps(two_atom):
    trace = omp_eventual(two_atom, 0.8 * two_atom[:, 1], 2)
    assert trace.support == (1,) and trace.steps_used == 1


def test_eventual_zero():
    trace = omp_eventual(np.eye(2), [0.0, 0.0], 3)
    assert trace.support == () and trace.steps_used == 0 and trace.converged


def covering_instances(rng, count):
    """(A, x0, m1): ERC fails on support(x0) but holds on a superset of size m1."""
    found = []
    while len(found) < count:
        d = int(rng.integers(2, 5))
        n = int(rng.integers(d + 1, 8))
        A = rng.standard_normal((d, n)) * rng.uniform(0.3, 3.0, n)
        m0 = int(rng.integers(1, d))
        S0 = tuple(sorted(int(i) for i in rng.choice(n, size=m0, replace=False)))
        if check_erc(A, S0).holds:
            continue
        rest = [j for j in range(n) if j not in S0]
        for extra in range(1, d - m0 + 1):
            cover = next((S0 + e for e in itertools.combinations(rest, extra)
                          if check_erc(A, sorted(S0 + e)).holds), None)
            if cover is not None:
                x0 = np.zeros(n)
                x0[list(S0)] = rng.choice([-1, 1], m0) * rng.uniform(0.5, 2.0, m0)
                found.append((A, x0, len(cover)))
                break
    return found


def test_eventual_recovery_on_covering_supports(rng):
    for A, x0, m1 in covering_instances(rng, 60):
        trace = omp_eventual(A, A @ x0, m1)
        assert trace.converged
        assert trace.support == tuple(np.flatnonzero(x0))
        np.testing.assert_allclose(trace.final_coeffs, x0, atol=1e-8)


# -- MP ----------------------------------------------------------------------

def test_mp_identity():
    trace = mp(np.eye(2), [1.0, 0.0], 5)
    assert trace.steps_used == 1
    np.testing.assert_array_equal(trace.final_coeffs, [1, 0])


def test_mp_zero():
    trace = mp(np.eye(2), [0.0, 0.0], 5)
    assert trace.steps_used == 0
    np.testing.assert_array_equal(trace.final_coeffs, [0, 0])


def test_mp_two_atom_iterates(two_atom):
    # Hand iteration: a2 gives r=[.5,-.5]; a1 gives r=[0,-.5]; -a2 gives r=[.25,-.25]; ...
    # residual norms 2**(-k/2); a1 coefficient after step 2k is 1 - 2**-k.
    trace = mp(two_atom, [1.0, 0.0], 8)
    norms = [s.residual_norm for s in trace.steps]
    np.testing.assert_allclose(norms, [2 ** (-k / 2) for k in range(1, 9)], atol=1e-14)
    assert [s.chosen_index for s in trace.steps] == [1, 0, 3, 0, 3, 0, 3, 0]
    np.testing.assert_allclose(trace.final_coeffs, [1 - 2**-4, 1 / (2 * SQ2) / 8], atol=1e-14)
    assert all(b < a for a, b in zip(norms, norms[1:]))
    assert not trace.converged


def test_mp_residual_decreases(rng):
    for _ in range(50):
        A = rng.standard_normal((3, 5))
        trace = mp(A, rng.standard_normal(3), 30)
        norms = [s.residual_norm for s in trace.steps]
        assert all(b < a for a, b in zip(norms, norms[1:]))
