import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.utils import search
from src.utils.discord import conjecture_gap, geometric_discord
from src.utils.separability import is_separable, t_trace_norm


def test_product_ensemble_is_deterministic():
    first = search.random_product_ensemble(42)
    second = search.random_product_ensemble(42)
    assert np.array_equal(first.weights, second.weights)
    assert np.array_equal(first.a_vecs, second.a_vecs)
    assert len(first.terms) == 6


def test_single_term_ensemble_has_zero_discord():
    rho = search.ensemble_to_state(search.random_product_ensemble(3, K=1))
    assert geometric_discord(rho) == pytest.approx(0.0, abs=1e-14)


def test_random_product_ensemble_rejects_empty():
    from src.utils.errors import DomainError

    with pytest.raises(DomainError):
        search.random_product_ensemble(0, K=0)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**63 - 1))
def test_product_ensembles_are_separable(seed):
    from src.utils.qstate import to_bloch

    rho = search.ensemble_to_state(search.random_product_ensemble(seed))
    assert is_separable(rho)
    assert t_trace_norm(to_bloch(rho)) <= 1.0 + 1e-12
    assert conjecture_gap(rho) >= -1e-6


def test_rho_star_ensemble_realizes_rho_star(rho_star):
    rho = search.ensemble_to_state(search.rho_star_ensemble())
    assert np.max(np.abs(rho.entries - rho_star.entries)) <= 1e-14


def test_ppt_sampler_is_deterministic_and_separable():
    first = search.random_ppt_state(5)
    assert is_separable(first)
    assert np.array_equal(first.entries, search.random_ppt_state(5).entries)


def test_ppt_sampler_exhausts():
    from src.utils.errors import SamplerExhausted

    rejected = [s for s in range(200) if not is_separable(_first_draw(s))]
    with pytest.raises(SamplerExhausted):
        search.random_ppt_state(rejected[0], max_attempts=1)


def _first_draw(seed):
    from src.utils.qstate import random_state

    return random_state(np.random.Generator(np.random.PCG64(seed)))


def test_packed_objective_matches_state_discord():
    ensembles = [search.random_product_ensemble(s) for s in range(8)]
    packed = np.stack([search._pack(e) for e in ensembles])
    values = search._objectives(packed, 6)
    for value, ensemble in zip(values, ensembles):
        assert value == pytest.approx(geometric_discord(search.ensemble_to_state(ensemble)), abs=1e-12)
    packed[0, :6] = 0.0
    assert search._objectives(packed[:1], 6)[0] == -np.inf


def test_refine_stays_at_rho_star():
    record = search.refine(search.rho_star_ensemble(), max_iters=50)
    assert record.discord == pytest.approx(0.25, abs=1e-9)
    assert record.method == "refined"
    assert record.separable


def test_refine_is_monotone_and_feasible():
    record = search.refine(search.random_product_ensemble(9), max_iters=60)
    assert all(b >= a for a, b in zip(record.trace, record.trace[1:]))
    assert record.discord >= record.trace[0] - 1e-12
    assert record.separable
    assert record.gap >= -1e-6
    assert record.gap == pytest.approx(0.5 - 2 * record.discord, abs=1e-12)
    assert 0 < record.iterations <= 60


def test_stationarity_residual_examples(rho_star):
    from src.utils.models import DensityMatrix
    from src.utils.qstate import KET_00, projector

    zero = search.stationarity_residual(DensityMatrix(entries=projector(KET_00)))
    assert zero.r_x == pytest.approx(0.0, abs=1e-12)
    assert zero.r_T == pytest.approx(0.0, abs=1e-12)
    mixed = search.stationarity_residual(DensityMatrix(entries=np.eye(4) / 4))
    assert mixed.total == pytest.approx(0.0, abs=1e-12)
    star = search.stationarity_residual(rho_star)
    assert star.r_x + star.r_T > 0.5


def test_prop2_objective_and_oracle():
    assert search.prop2_objective(1 / 3, 1 / 3, 1 / 3) == pytest.approx(2 / 9, abs=1e-15)
    assert search.prop2_objective(0, 0, 0) == 0
    assert search.prop2_objective(0.5, 0.5, 0) == 0.25
    value = search.prop2_simplex_oracle(300)
    assert 0.25 - 2e-3 <= value <= 0.25
    assert value > 2 / 9


def test_zero_x_separable_states_obey_eighth_bound(rng):
    from src.utils.lu import apply_local_unitary, haar_unitary
    from src.utils.qstate import bell_diagonal, to_bloch

    for _ in range(200):
        t = rng.standard_normal(3)
        t *= rng.uniform(0, 1) / np.sum(np.abs(t))
        rho = apply_local_unitary(bell_diagonal(*t), haar_unitary(rng), haar_unitary(rng))
        assert np.allclose(to_bloch(rho).x, 0.0, atol=1e-12)
        assert is_separable(rho)
        assert geometric_discord(rho) <= 0.125 + 1e-10
    assert geometric_discord(bell_diagonal(0.5, 0.5, 0.0)) == pytest.approx(0.125, abs=1e-12)


def test_isotropic_correlations_stay_below_quarter():
    from src.utils.qstate import werner

    for p in np.linspace(0, 1 / 3, 11):
        assert geometric_discord(werner(p)) < 0.25


def test_isotropic_correlations_with_local_vector_stay_below_quarter(rng):
    from src.utils.errors import StateValidationError
    from src.utils.lu import apply_local_unitary, haar_unitary
    from src.utils.models import BlochForm
    from src.utils.qstate import from_bloch, to_bloch

    discords = []
    for _ in range(400):
        lam = rng.uniform(0.0, 0.4)
        x = rng.standard_normal(3)
        x *= rng.uniform(0.05, 0.6) / np.linalg.norm(x)
        T = rng.choice([-1.0, 1.0]) * lam * np.eye(3)
        try:
            rho = from_bloch(BlochForm(x=x, y=np.zeros(3), T=T))
        except StateValidationError:
            continue
        if not is_separable(rho):
            continue
        rho = apply_local_unitary(rho, haar_unitary(rng), haar_unitary(rng))
        T_rot = to_bloch(rho).T
        assert np.allclose(T_rot @ T_rot.T, lam**2 * np.eye(3), atol=1e-12)
        assert np.linalg.norm(to_bloch(rho).x) > 0.0
        value = geometric_discord(rho)
        assert value == pytest.approx(lam**2, abs=1e-12)
        discords.append(value)
    assert len(discords) >= 50
    margin = 0.25 - max(discords)
    assert margin >= 0.25 - 1 / 9 - 1e-9, f"margin below 1/4: {margin:.6g}"


def test_campaign_is_sorted_and_deterministic():
    first = search.campaign(range(6), K=3, refine_iters=5, workers=1)
    second = search.campaign(range(6), K=3, refine_iters=5, workers=1)
    assert [r.seed for r in first] == [r.seed for r in second]
    assert [r.discord for r in first] == [r.discord for r in second]
    assert all(a.discord >= b.discord for a, b in zip(first, first[1:]))
    assert sorted(r.seed for r in first) == list(range(6))
    assert all(r.separable and not r.counterexample_candidate for r in first)


def test_campaign_process_pool_matches_serial():
    serial = search.campaign(range(4), K=2, refine_iters=3, workers=1)
    pooled = search.campaign(range(4), K=2, refine_iters=3, workers=2)
    assert [(r.seed, r.discord) for r in serial] == [(r.seed, r.discord) for r in pooled]


def test_campaign_warm_start_reaches_quarter():
    records = search.campaign(range(2), K=2, refine_iters=5, warm_start=search.rho_star_ensemble(), workers=1)
    assert records[0].seed == search.WARM_START_SEED
    assert records[0].discord >= 0.25 - 1e-6


def test_campaign_ppt_sampler():
    records = search.campaign(range(3), sampler="ppt", workers=1)
    assert all(r.method == "random" and r.separable for r in records)


def test_campaign_logs_counterexample_candidates(monkeypatch, caplog):
    from src.utils.models import SearchRecord

    real = search._campaign_task

    def fake_task(seed, K, refine_iters, sampler, step0):
        record = real(seed, K, refine_iters, sampler, step0)
        return record.model_copy(update={"gap": -1.0})

    monkeypatch.setattr(search, "_campaign_task", fake_task)
    with caplog.at_level("WARNING", logger="src.utils.search"):
        records = search.campaign(range(1), K=2, refine_iters=0, workers=1)
    assert isinstance(records[0], SearchRecord)
    assert records[0].counterexample_candidate
    assert "counterexample candidate" in caplog.text


def test_record_exports(tmp_path):
    records = search.campaign(range(3), K=2, refine_iters=2, workers=1)
    csv_path = search.write_records_csv(records, tmp_path / "out.csv")
    json_path = search.write_records_json(records, tmp_path / "out.json")

    raw = csv_path.read_bytes()
    assert b"\r\n" not in raw
    rows = list(csv.DictReader(raw.decode().splitlines()))
    assert list(rows[0]) == list(search.CSV_COLUMNS)
    assert float(rows[0]["discord"]) == records[0].discord

    payload = json.loads(json_path.read_text())
    assert len(payload) == 3
    assert len(payload[0]["state"]["entries"]) == 4
    assert payload[0]["counterexample_candidate"] is False


@pytest.mark.slow
def test_conjecture_monitoring_campaign():
    records = search.campaign(range(10_000), K=6, refine_iters=500, workers=4)
    assert min(r.gap for r in records) >= -1e-6
    assert max(r.discord for r in records) <= 0.25 + 5e-7


@pytest.mark.slow
def test_random_refinements_get_close_to_quarter():
    records = search.campaign(range(200), K=6, refine_iters=500)
    best = records[0].discord
    if best < 0.24:
        pytest.xfail(f"best refined discord {best:.6f} below the expected 0.24")
