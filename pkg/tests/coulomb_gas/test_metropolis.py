import logging
import math

import numpy as np
import pytest
from scipy import stats

from loewner_forge.core import ArtifactError, ParameterError
from loewner_forge.coulomb_gas import GasChain, GasState, initial_state, metropolis_run
from loewner_forge.drivers import RngSeed


@pytest.fixture(scope="module")
def single_particle_chain():
    state = GasState(positions=[0j], hbar=0.5)
    return metropolis_run(state, 40_000, seed=RngSeed(seed=17), burn_in=200)


def batch_standard_error(samples, batches=50):
    means = np.array([batch.mean() for batch in np.array_split(samples, batches)])
    return means.std(ddof=1) / math.sqrt(batches)


def test_single_particle_mean_square_radius(single_particle_chain):
    r2 = np.abs(single_particle_chain.positions[:, 0]) ** 2
    assert abs(r2.mean() - 0.5) < 3 * batch_standard_error(r2)


def test_single_particle_law(single_particle_chain):
    r2 = np.abs(single_particle_chain.positions[::40, 0]) ** 2 / 0.5
    assert stats.kstest(r2, "expon").pvalue > 0.01


def test_tiny_proposals_are_accepted():
    state = initial_state(4, 0.1, RngSeed(seed=1))
    chain = metropolis_run(state, 50, proposal_scale=1e-8, seed=RngSeed(seed=1))
    assert chain.acceptance > 0.99


def test_energy_cache_bookkeeping():
    state = initial_state(6, 0.1, RngSeed(seed=5), potential_coeffs=[0.0, 0.05])
    chain = metropolis_run(state, 10_000, seed=RngSeed(seed=5), thin=100)
    assert chain.diagnostics["cache_drift"] < 1e-8
    assert chain.final.recompute() == pytest.approx(chain.energies[-1], rel=1e-8, abs=1e-8)


def test_burn_in_tunes_acceptance():
    state = initial_state(8, 0.05, RngSeed(seed=8))
    chain = metropolis_run(state, 200, proposal_scale=5.0, seed=RngSeed(seed=8), burn_in=400)
    assert chain.proposal_scale < 5.0
    assert 0.2 < chain.acceptance < 0.6
    assert chain.sweeps[0] == 401


def test_low_acceptance_is_flagged(log_event_catcher):
    logs = log_event_catcher(logging.getLogger("loewner_forge.coulomb_gas.metropolis"), level=logging.WARNING)
    state = initial_state(4, 0.01, RngSeed(seed=2))
    chain = metropolis_run(state, 20, proposal_scale=100.0, seed=RngSeed(seed=2))
    assert chain.acceptance < 0.01
    assert chain.diagnostics["low_acceptance"] == 1.0
    assert len(logs) == 1


def test_walls_are_respected():
    state = initial_state(5, 0.05, RngSeed(seed=3), sampling_radius=0.6)
    chain = metropolis_run(state, 300, proposal_scale=0.3, seed=RngSeed(seed=3))
    assert np.all(np.abs(chain.positions) <= 0.6)


def test_kp_gas_stays_in_upper_half_plane():
    state = initial_state(6, 0.1, RngSeed(seed=4), kernel="kp")
    chain = metropolis_run(state, 300, seed=RngSeed(seed=4))
    assert np.all(chain.positions.imag > 0)
    assert chain.diagnostics["cache_drift"] < 1e-8


def test_same_seed_same_chain():
    state = initial_state(5, 0.1, RngSeed(seed=6))
    first = metropolis_run(state, 50, seed=RngSeed(seed=6, stream=3))
    second = metropolis_run(state, 50, seed=RngSeed(seed=6, stream=3))
    assert np.array_equal(first.positions, second.positions)


def test_chain_csv(tmp_path):
    state = initial_state(3, 0.1, RngSeed(seed=9))
    chain = metropolis_run(state, 20, seed=RngSeed(seed=9), thin=5)
    frame = chain.to_frame()
    assert list(frame.columns) == ["sweep", "i", "x", "y"]
    assert len(frame) == 4 * 3
    restored = GasChain.load_csv(chain.dump_csv(tmp_path / "chain.csv"), state)
    assert np.array_equal(restored.positions, chain.positions)
    assert np.allclose(restored.energies, chain.energies, rtol=1e-8)
    with pytest.raises(ArtifactError):
        GasChain.load_csv(tmp_path / "missing.csv", state)


@pytest.mark.parametrize("sweeps,thin,burn_in", [(0, 1, 0), (5, 6, 0), (5, 1, -1)])
def test_invalid_run_parameters(sweeps, thin, burn_in):
    with pytest.raises(ParameterError):
        metropolis_run(GasState(positions=[0j], hbar=1.0), sweeps, thin=thin, burn_in=burn_in)


def test_forbidden_start_is_rejected():
    with pytest.raises(ParameterError):
        metropolis_run(GasState(positions=[0j, 0j], hbar=1.0), 10)
