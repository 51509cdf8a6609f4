import math

import numpy as np
import pytest

from src.utils import xmax
from src.utils.constants import RHO_STAR
from src.utils.errors import DomainError


def test_f_values_and_symmetry():
    assert xmax.f_appendix(1.0) == pytest.approx(0.125)
    assert xmax.f_appendix(3.0) == pytest.approx(xmax.f_appendix(1 / 3))
    assert xmax.f_prime(1.0) == 0.0
    assert xmax.f_prime(0.5) > 0 > xmax.f_prime(2.0)
    with pytest.raises(DomainError):
        xmax.f_appendix(0.0)
    with pytest.raises(DomainError):
        xmax.f_appendix(float("nan"))


def test_maximize_f_bracket():
    k_star, f_star = xmax.maximize_f()
    assert abs(k_star - 1.0) <= 1e-8
    assert abs(f_star - 0.125) <= 1e-12


@pytest.mark.parametrize("tol", [1e-6, 1e-10, 1e-12, 1e-15])
def test_maximize_f_bracket_converges_at_tight_tolerances(tol):
    k_star, _ = xmax.maximize_f(tol=tol)
    assert abs(k_star - 1.0) <= max(tol, 1e-14) * 2


@pytest.mark.parametrize("method", ["golden", "grid"])
def test_maximize_f_comparison_methods_agree_on_value(method):
    k_star, f_star = xmax.maximize_f(method=method)
    assert abs(f_star - 0.125) <= 1e-12
    assert abs(k_star - 1.0) <= 1e-2


def test_fourth_derivative_at_optimum():
    assert xmax.f_fourth_derivative(1.0) == pytest.approx(-3 / 16, abs=1e-5)
    with pytest.raises(DomainError):
        xmax.f_fourth_derivative(0.05)


def test_solve_constraints_branches():
    plus = xmax.solve_constraints(1.0, "plus")
    minus = xmax.solve_constraints(1.0, "minus")
    assert plus.discord == pytest.approx(0.25, abs=1e-12)
    assert minus.discord == pytest.approx(0.25, abs=1e-12)
    assert plus.params.a >= plus.params.c
    assert minus.params.a <= minus.params.c
    for residual in xmax.constraint_residuals(plus).values():
        assert residual <= 1e-12


@pytest.mark.parametrize("k", [0.1, 0.5, 2.0, 10.0])
def test_solve_constraints_discord_is_twice_f(k):
    sol = xmax.solve_constraints(k)
    assert sol.discord == pytest.approx(2 * xmax.f_appendix(k), abs=1e-12)
    assert xmax.constraint_residuals(sol)["boundary"] <= 1e-12


def test_max_separable_x_discord_reproduces_rho_star():
    from src.utils.qstate import numerical_rank, x_state

    value, (plus, minus) = xmax.max_separable_x_discord()
    assert value == pytest.approx(0.25, abs=1e-12)
    rho_plus = x_state(plus.params)
    assert np.max(np.abs(rho_plus.entries - RHO_STAR)) <= 1e-12
    assert numerical_rank(rho_plus) == 2


def test_minus_branch_is_lu_equivalent():
    from src.utils.lu import apply_local_unitary
    from src.utils.qstate import x_state

    _, (plus, minus) = xmax.max_separable_x_discord()
    U, V = xmax.minus_branch_lu_witness()
    flipped = apply_local_unitary(x_state(plus.params), U, V)
    assert np.allclose(flipped.entries, x_state(minus.params).entries, atol=1e-12)


def test_derivation_chain_on_rho_star():
    _, (plus, _) = xmax.max_separable_x_discord()
    chain = xmax.derivation_chain(plus.params)
    assert chain.sum_smallest == pytest.approx(0.5, abs=1e-12)
    assert chain.sum_smallest <= chain.pq_bound + 1e-12
    assert chain.pq_bound <= chain.population_bound + 1e-12


def test_derivation_chain_bounds_hold_on_random_separable_x_states():
    from src.utils.models import XStateParams

    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(200):
        a, b, c, d = rng.dirichlet(np.ones(4))
        bound = math.sqrt(min(a * d, b * c))
        p, q = rng.uniform(0, bound, size=2)
        chain = xmax.derivation_chain(XStateParams(a=a, b=b, c=c, d=d, p=p, q=q))
        assert chain.sum_smallest <= chain.pq_bound + 1e-12
        assert chain.pq_bound <= chain.population_bound + 1e-12


def test_grid_certify_small_lattice():
    best, params = xmax.grid_certify(n=12, workers=2)
    assert 0.2 <= best <= 0.25 + 1e-12
    assert params.p <= math.sqrt(min(params.a * params.d, params.b * params.c)) + 1e-12


def test_grid_certify_reduced_never_beats_full():
    full, _ = xmax.grid_certify(n=16, mode="full", workers=1)
    reduced, _ = xmax.grid_certify(n=16, mode="reduced", workers=1)
    assert reduced <= full + 1e-12
    assert 0.2 <= reduced


def test_grid_certify_rejects_coarse_lattice():
    with pytest.raises(DomainError):
        xmax.grid_certify(n=5)


@pytest.mark.slow
def test_grid_certify_acceptance():
    n = 40
    best, params = xmax.grid_certify(n=n)
    assert 0.24 <= best <= 0.25 + 1e-12
    assert abs(params.a * params.d - params.b * params.c) <= 0.05
    assert abs(params.p - params.q) <= 1 / n
    assert abs(params.p - math.sqrt(min(params.a * params.d, params.b * params.c))) <= 1 / n


def test_derivation_chain_equality_flag():
    from src.utils.models import XStateParams

    balanced = XStateParams(a=0.4, b=0.1, c=0.1, d=0.4, p=0.05, q=0.05)
    assert balanced.p < math.sqrt(balanced.b * balanced.c)
    assert xmax.derivation_chain(balanced).first_equality_expected
    coherent = XStateParams(a=0.3, b=0.2, c=0.2, d=0.3, p=0.2, q=0.2)
    chain = xmax.derivation_chain(coherent)
    assert not chain.first_equality_expected
    assert chain.sum_smallest < chain.pq_bound
