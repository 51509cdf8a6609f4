import numpy as np
import pytest

from src.utils import lu
from src.utils.constants import PAULI, PRINTED_U, PRINTED_V
from src.utils.errors import NotUnitary


def test_rho_star_sigma_equivalence_with_witness():
    ok, residual = lu.verify_rho_sigma_equivalence()
    assert ok
    assert residual <= 1e-12


def test_printed_witness_misses_sigma():
    ok, residual = lu.verify_rho_sigma_equivalence(PRINTED_U, PRINTED_V)
    assert not ok
    assert residual == pytest.approx(1 / np.sqrt(2), abs=1e-9)


def test_apply_local_unitary_rejects_non_unitary(rho_star):
    with pytest.raises(NotUnitary):
        lu.apply_local_unitary(rho_star, 2 * np.eye(2), np.eye(2))
    with pytest.raises(NotUnitary):
        lu.apply_local_unitary(rho_star, np.eye(3), np.eye(2))


def test_local_unitaries_preserve_invariants(rng, random_states):
    from src.utils.discord import geometric_discord
    from src.utils.qstate import numerical_rank
    from src.utils.separability import min_pt_eigenvalue

    for rho in random_states(20):
        U, V = lu.haar_unitary(rng), lu.haar_unitary(rng)
        moved = lu.apply_local_unitary(rho, U, V)
        assert geometric_discord(moved) == pytest.approx(geometric_discord(rho), abs=1e-12)
        assert min_pt_eigenvalue(moved) == pytest.approx(min_pt_eigenvalue(rho), abs=1e-12)
        assert numerical_rank(moved) == numerical_rank(rho)
        assert lu.lu_fingerprint(moved).matches(lu.lu_fingerprint(rho))


def test_haar_unitary_is_unitary(rng):
    for _ in range(10):
        u = lu.haar_unitary(rng)
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


def test_su2_euler_angles():
    assert np.allclose(lu.su2(0, 0, 0), np.eye(2))
    u = lu.su2(0.3, 1.1, -0.4)
    assert np.allclose(u.conj().T @ u, np.eye(2))
    assert np.linalg.det(u) == pytest.approx(1.0)


def test_fingerprint_separates_inequivalent_states(rho_star):
    from src.utils.qstate import make_named

    assert not lu.lu_fingerprint(rho_star).matches(lu.lu_fingerprint(make_named("werner", 0.5)))


def test_lu_search_finds_sigma_x_flip():
    from src.utils.qstate import x_state
    from src.utils.xmax import max_separable_x_discord

    _, (plus, minus) = max_separable_x_discord()
    result = lu.lu_search(x_state(plus.params), x_state(minus.params))
    assert result.found and result.heuristic
    assert result.residual <= 1e-6
    moved = lu.conjugate(x_state(plus.params).entries, result.U, result.V)
    assert np.allclose(moved, x_state(minus.params).entries, atol=1e-6)


def test_lu_search_recovers_known_rotation(rho_star):
    target = lu.apply_local_unitary(rho_star, PAULI[1], PAULI[3])
    result = lu.lu_search(rho_star, target)
    assert result.found
