# test_simulate.py

import numpy as np
import pytest

from canonical import CanonicalProblem, GaussianSpec, canonicalize
from errors import InvalidRange, NegativePower, TooFewSamples
from shared import reference_problem
from simulate import (
    CouplingSpec,
    coupling_from_allocation,
    rates_from_rho,
    rho_from_rates,
    simulate_coupling,
    simulate_dim_plan,
    simulate_optimal_map,
    simulate_uncoded,
)
from test_canonical import random_rotation
from transport_core import w2sq
from waterfill import rate_cr, rate_greedy, rate_no_cr


def test_rho_rate_inverse():
    rates = np.array([0.0, 0.1, 1.0, 4.1])
    np.testing.assert_allclose(rates_from_rho(rho_from_rates(rates)), rates, atol=1e-12)
    assert rho_from_rates(np.array([1.0]))[0] == pytest.approx(np.sqrt(0.75))


@pytest.mark.parametrize("solver", [rate_cr, rate_no_cr])
def test_coupling_reproduces_allocation_distortion(solver):
    allocation = solver(reference_problem, 2.1)
    spec = coupling_from_allocation(reference_problem, allocation)
    assert spec.theoretical_distortion == pytest.approx(allocation.distortion, abs=1e-12)


def test_coupling_rejects_greedy():
    with pytest.raises(InvalidRange):
        coupling_from_allocation(reference_problem, rate_greedy(reference_problem, 1.0))


def test_coupling_spec_validation():
    with pytest.raises(InvalidRange):
        CouplingSpec(rho=[1.5], source_var=[1.0], recon_var=[1.0])
    with pytest.raises(InvalidRange):
        CouplingSpec(rho=[0.5, 0.5], source_var=[1.0], recon_var=[1.0])
    with pytest.raises(InvalidRange):
        CouplingSpec(rho=[0.5], source_var=[0.0], recon_var=[1.0])


def test_identity_coupling_has_zero_error():
    spec = CouplingSpec(rho=[1.0, 1.0], source_var=[2.0, 0.5], recon_var=[2.0, 0.5])
    report = simulate_coupling(spec, 5000, seed=1)
    assert report.empirical_distortion == 0.0
    assert report.distortion_pass


def test_independent_coupling():
    spec = CouplingSpec(rho=[0.0, 0.0], source_var=[2.0, 3.0], recon_var=[3.0, 1.0])
    report = simulate_coupling(spec, 100_000, seed=2)
    assert report.theoretical_distortion == pytest.approx(9.0)
    assert report.passed


def test_too_few_samples():
    spec = CouplingSpec(rho=[0.5], source_var=[1.0], recon_var=[1.0])
    with pytest.raises(TooFewSamples):
        simulate_coupling(spec, 999, seed=0)


def test_negative_seed():
    spec = CouplingSpec(rho=[0.5], source_var=[1.0], recon_var=[1.0])
    with pytest.raises(InvalidRange):
        simulate_coupling(spec, 1000, seed=-1)


def test_serial_and_threaded_runs_are_identical():
    spec = coupling_from_allocation(reference_problem, rate_cr(reference_problem, 1.0))
    serial = simulate_coupling(spec, 300_000, seed=9, jobs=1)
    threaded = simulate_coupling(spec, 300_000, seed=9, jobs=4)
    assert serial == threaded


def test_seed_changes_samples():
    spec = coupling_from_allocation(reference_problem, rate_cr(reference_problem, 1.0))
    first = simulate_coupling(spec, 10_000, seed=1)
    second = simulate_coupling(spec, 10_000, seed=2)
    assert first.empirical_distortion != second.empirical_distortion


def test_uncoded_rejects_nonpositive_power():
    with pytest.raises(NegativePower):
        simulate_uncoded(reference_problem, 0.0, 1000, seed=0)


def test_uncoded_matches_closed_form():
    report = simulate_uncoded(reference_problem, 1.0, 200_000, seed=4)
    assert report.theoretical_distortion == pytest.approx(11.0 - 2.0 * np.sqrt(3.0))
    assert report.passed


def test_dim_plan_matches_closed_form():
    report = simulate_dim_plan(reference_problem, 1, 200_000, seed=5)
    assert report.theoretical_distortion == pytest.approx(6.101020514, abs=1e-8)
    assert report.passed


def test_mean_offset_removed_from_theory():
    a = GaussianSpec.diagonal([2.0, 3.0, 1.0], mean=[2.0, 0.0, 0.0])
    b = GaussianSpec.diagonal([3.0, 1.0, 1.0])
    report = simulate_dim_plan(canonicalize(a, b), 1, 50_000, seed=6)
    assert report.theoretical_distortion == pytest.approx(6.101020514, abs=1e-8)


def test_optimal_map_in_original_coordinates():
    rng = np.random.default_rng(8)
    q = random_rotation(3, rng)
    a = GaussianSpec(np.array([1.0, -1.0, 0.5]), q @ np.diag([2.0, 0.5, 4.0]) @ q.T)
    b = GaussianSpec(np.array([0.0, 2.0, 0.0]), q @ np.diag([1.0, 2.0, 3.0]) @ q.T)
    report = simulate_optimal_map(a, b, 200_000, seed=10)
    assert report.theoretical_distortion == pytest.approx(w2sq(canonicalize(a, b)))
    assert report.passed


def test_report_serializes_with_camel_case():
    spec = CouplingSpec(rho=[0.5], source_var=[1.0], recon_var=[1.0])
    payload = simulate_coupling(spec, 2000, seed=3).model_dump(by_alias=True)
    assert {"empiricalDistortion", "theoreticalDistortion", "stderr", "distortionPass", "marginalPass"} <= set(payload)


def test_single_component_problem():
    p = CanonicalProblem.from_eigenvalues([1.0], [4.0])
    report = simulate_uncoded(p, 3.0, 50_000, seed=12)
    assert report.theoretical_distortion == pytest.approx(5.0 - 2.0 * np.sqrt(0.75 * 4.0))
