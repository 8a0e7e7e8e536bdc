import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, random_state
from kickchain.bath import BathSpec, generate_schedule
from kickchain.chain import DOWN, UP, ChainConfig, product_state
from kickchain.observables import (
    HusimiGrid,
    ObservableRecord,
    average_spin,
    chain_entropy,
    coherence,
    husimi,
    husimi_norm,
    population_up,
    read_chain_csv,
    read_husimi_csv,
    read_spins_csv,
    reduce,
    vn_entropy,
    write_chain_csv,
    write_husimi_csv,
    write_spins_csv,
)
from kickchain.propagator import iter_trajectory

BELL = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)


# ---------------------------------------------------------------- reduce

def test_reduce_product_state_sites():
    psi = product_state([UP, DOWN])
    np.testing.assert_allclose(reduce(psi, 1), np.diag([1.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(reduce(psi, 2), np.diag([0.0, 1.0]), atol=1e-14)


def test_reduce_bell_state_maximally_mixed():
    for site in (1, 2):
        np.testing.assert_allclose(reduce(BELL, site), np.eye(2) / 2, atol=1e-14)


def test_reduce_matches_full_density_contraction(rng):
    psi = random_state(rng, 8)
    rho_full = np.outer(psi, psi.conj()).reshape(2, 2, 2, 2, 2, 2)
    oracles = [np.einsum("abcdbc->ad", rho_full),
               np.einsum("abcadc->bd", rho_full),
               np.einsum("abcabd->cd", rho_full)]
    for site, oracle in zip((1, 2, 3), oracles):
        np.testing.assert_allclose(reduce(psi, site), oracle, atol=1e-12)


@given(seed=st.integers(0, 999), site=st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_reduce_is_density_matrix(seed, site):
    rng = np.random.default_rng(seed)
    rho = reduce(random_state(rng, 8), site)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    evals = np.linalg.eigvalsh(rho)
    assert evals.min() > -1e-10 and evals.max() < 1 + 1e-10


def test_reduce_site_out_of_range(rng):
    with pytest.raises(ValueError):
        reduce(random_state(rng, 8), 0)
    with pytest.raises(ValueError):
        reduce(random_state(rng, 8), 4)


# ---------------------------------------------------------- average_spin

def test_average_spin_identical_inputs(rng):
    rho = random_density(rng)
    np.testing.assert_allclose(average_spin([rho, rho, rho]), rho, atol=1e-15)


def test_average_spin_opposite_poles():
    got = average_spin([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    np.testing.assert_allclose(got, np.eye(2) / 2, atol=0)


def test_average_spin_empty_rejected():
    with pytest.raises(ValueError):
        average_spin([])


@given(seed=st.integers(0, 999))
@settings(max_examples=25, deadline=None)
def test_mean_of_coherences_bounds_coherence_of_mean(seed):
    rng = np.random.default_rng(seed)
    rhos = [random_density(rng) for _ in range(4)]
    mean_coh = np.mean([coherence(r) for r in rhos])
    assert coherence(average_spin(rhos)) <= mean_coh + 1e-12


# ------------------------------------------------------------ vn_entropy

def test_vn_entropy_pure_state_zero(rng):
    psi = random_state(rng, 2)
    assert vn_entropy(np.outer(psi, psi.conj())) == pytest.approx(0.0, abs=1e-12)


def test_vn_entropy_maximally_mixed_one():
    assert vn_entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-14)


def test_vn_entropy_frozen_value():
    assert vn_entropy(np.diag([0.9, 0.1])) == pytest.approx(0.4689955935892812,
                                                            abs=1e-12)


def test_vn_entropy_clamps_tiny_negatives():
    assert vn_entropy(np.diag([1.0, -1e-14])) == pytest.approx(0.0, abs=1e-12)


def test_vn_entropy_rejects_negative_eigenvalue():
    with pytest.raises(ValueError):
        vn_entropy(np.diag([1.2, -0.2]))


def test_vn_entropy_larger_dimension():
    assert vn_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-13)


# --------------------------------------------------------- chain_entropy

def test_chain_entropy_identical_product_zero(rng):
    single = random_state(rng, 2)
    assert chain_entropy(product_state([single] * 3)) == pytest.approx(0.0, abs=1e-10)


def test_chain_entropy_half_up_half_down_is_one():
    psi = product_state([UP, DOWN, UP, DOWN])
    assert chain_entropy(psi) == pytest.approx(1.0, abs=1e-12)


def test_chain_entropy_matches_brute_force(rng):
    psi = random_state(rng, 8)
    rho_tot = sum(reduce(psi, s) for s in (1, 2, 3)) / 3.0
    p = np.linalg.eigvalsh(rho_tot)
    p = p[p > 1e-14]
    expected = float(-(p * np.log2(p)).sum())
    assert chain_entropy(psi) == pytest.approx(expected, abs=1e-12)


@given(seed=st.integers(0, 999))
@settings(max_examples=25, deadline=None)
def test_two_spin_schmidt_symmetry(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, 4)
    s1 = vn_entropy(reduce(psi, 1))
    s2 = vn_entropy(reduce(psi, 2))
    assert abs(s1 - s2) < 1e-10


@given(seed=st.integers(0, 999))
@settings(max_examples=25, deadline=None)
def test_coherence_bounded_by_populations(seed):
    rng = np.random.default_rng(seed)
    rho = reduce(random_state(rng, 8), 2)
    bound = math.sqrt(max(population_up(rho), 0.0)
                      * max(rho[1, 1].real, 0.0))
    assert coherence(rho) <= bound + 1e-12


# ----------------------------------------------------------------- husimi

def test_husimi_pole_values():
    grid = husimi(np.diag([1.0, 0.0]), theta_res=5, phi_res=8)
    np.testing.assert_allclose(grid.values[0], 1.0, atol=1e-14)   # theta = 0
    np.testing.assert_allclose(grid.values[-1], 0.0, atol=1e-14)  # theta = pi
    np.testing.assert_allclose(grid.values[2], 0.5, atol=1e-14)   # theta = pi/2


def test_husimi_maximally_mixed_exactly_half():
    grid = husimi(np.eye(2) / 2, theta_res=7, phi_res=9)
    assert np.all(grid.values == 0.5)


def test_husimi_values_in_unit_interval(rng):
    for _ in range(5):
        grid = husimi(random_density(rng), theta_res=40, phi_res=40)
        assert grid.values.min() >= -1e-12
        assert grid.values.max() <= 1 + 1e-12


def test_husimi_matches_coherent_state_overlap(rng):
    rho = random_density(rng)
    grid = husimi(rho, theta_res=9, phi_res=11)
    for i in (0, 3, 8):
        for j in (0, 5):
            t, p = grid.theta[i], grid.phi[j]
            ket = np.array([math.cos(t / 2),
                            math.sin(t / 2) * np.exp(1j * p)])
            expected = (ket.conj() @ rho @ ket).real
            assert grid.values[i, j] == pytest.approx(expected, abs=1e-12)


def test_husimi_linearity(rng):
    r1, r2 = random_density(rng), random_density(rng)
    alpha = 0.3
    mix = husimi(alpha * r1 + (1 - alpha) * r2, theta_res=12, phi_res=12)
    combo = alpha * husimi(r1, 12, 12).values + (1 - alpha) * husimi(r2, 12, 12).values
    np.testing.assert_allclose(mix.values, combo, atol=1e-12)


def test_husimi_rejects_tiny_grid():
    with pytest.raises(ValueError):
        husimi(np.eye(2) / 2, theta_res=1, phi_res=8)
    # 2x2 is the smallest legal grid
    husimi(np.eye(2) / 2, theta_res=2, phi_res=2)


def test_husimi_norm_small_grid(rng):
    grid = husimi(random_density(rng), theta_res=101, phi_res=64)
    assert husimi_norm(grid) == pytest.approx(1.0, abs=1e-6)


def test_husimi_disk_coordinates():
    grid = husimi(np.eye(2) / 2, theta_res=3, phi_res=4)
    x, y = grid.disk_coords()
    assert x.shape == (3, 4)
    # north pole row collapses to the origin
    np.testing.assert_allclose(x[0], 0.0, atol=1e-15)
    # phi = 0 column points along +x at radius theta
    np.testing.assert_allclose(x[:, 0], grid.theta, atol=1e-15)
    np.testing.assert_allclose(y[:, 0], 0.0, atol=1e-15)
    # rim sits at radius pi
    np.testing.assert_allclose(np.hypot(x[-1], y[-1]), math.pi, atol=1e-12)


def test_free_precession_rate():
    # with no kicks and no coupling a cat state precesses about z; the
    # Husimi azimuthal maximum moves by -(w1 / 2 w0) per unit reduced time
    w1 = 0.25
    cfg = ChainConfig(n_spins=2, coupling="none", j_over_w0=0.0, w1_over_w0=w1)
    sched = generate_schedule(BathSpec(kind="stationary", d0=0.0), 2, 3)
    sched = type(sched)(np.zeros_like(sched.lam), sched.phi)  # zero strengths
    states = dict(iter_trajectory(cfg, sched))
    phi_res = 720
    for k in (1, 2, 3):
        rho = reduce(states[k], 1)
        grid = husimi(rho, theta_res=3, phi_res=phi_res)  # row 1 is theta=pi/2
        j = int(np.argmax(grid.values[1]))
        expected = (-0.5 * w1 * k * 2 * math.pi) % (2 * math.pi)
        got = grid.phi[j]
        delta = abs(got - expected)
        delta = min(delta, 2 * math.pi - delta)
        assert delta <= 2 * math.pi / phi_res + 1e-9


# ------------------------------------------------------- ObservableRecord

@pytest.fixture(scope="module")
def small_record():
    cfg = ChainConfig(n_spins=3, coupling="ising_z", j_over_w0=0.6)
    sched = generate_schedule(BathSpec(kind="drift", d0=1.0, seed=6), 3, 10)
    pairs = list(iter_trajectory(cfg, sched))
    return ObservableRecord.from_states(pairs, 3), pairs


def test_record_shapes_and_ranges(small_record):
    record, _ = small_record
    assert record.n_spins == 3
    assert record.pop_up.shape == (11, 3)
    assert np.array_equal(record.periods, np.arange(11))
    for arr in (record.pop_up, record.coherence, record.entropy,
                record.s_tot, record.pop_avg, record.coh_avg):
        assert np.all(np.isfinite(arr))
    assert record.pop_up.min() >= 0 and record.pop_up.max() <= 1
    assert record.coherence.max() <= 0.5 + 1e-12
    assert record.entropy.min() >= 0 and record.entropy.max() <= 1 + 1e-12
    assert record.s_tot.min() >= 0 and record.s_tot.max() <= 1 + 1e-12
    # mean spin entropy also stays inside [0, 1]
    assert record.entropy.mean(axis=1).max() <= 1 + 1e-12


def test_record_matches_direct_computation(small_record):
    record, pairs = small_record
    k, psi = pairs[7]
    rhos = [reduce(psi, s, 3) for s in (1, 2, 3)]
    assert record.pop_up[7, 1] == pytest.approx(population_up(rhos[1]), abs=1e-14)
    assert record.coherence[7, 2] == pytest.approx(coherence(rhos[2]), abs=1e-14)
    assert record.s_tot[7] == pytest.approx(vn_entropy(average_spin(rhos)), abs=1e-13)
    assert record.s_tot[7] == pytest.approx(chain_entropy(psi), abs=1e-13)


def test_spins_csv_round_trip(tmp_path, small_record):
    record, _ = small_record
    path = tmp_path / "spins.csv"
    write_spins_csv(path, record)
    cols = read_spins_csv(path)
    assert cols["period"].shape == (33,)
    np.testing.assert_array_equal(cols["pop_up"].reshape(11, 3), record.pop_up)
    np.testing.assert_array_equal(cols["entropy_spin"].reshape(11, 3),
                                  record.entropy)


def test_chain_csv_round_trip(tmp_path, small_record):
    record, _ = small_record
    path = tmp_path / "chain.csv"
    write_chain_csv(path, record)
    cols = read_chain_csv(path)
    np.testing.assert_array_equal(cols["S_tot"], record.s_tot)
    np.testing.assert_array_equal(cols["coh_avg"], record.coh_avg)


def test_chain_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("period,S,pop,coh\n0,0,0,0\n")
    with pytest.raises(ValueError, match="header"):
        read_chain_csv(path)


def test_husimi_csv_round_trip(tmp_path, rng):
    grid = husimi(random_density(rng), theta_res=6, phi_res=10, spin=4, period=17)
    path = tmp_path / "husimi.csv"
    write_husimi_csv(path, grid)
    back = read_husimi_csv(path)
    assert (back.spin, back.period) == (4, 17)
    np.testing.assert_array_equal(back.values, grid.values)
    np.testing.assert_allclose(back.theta, grid.theta, atol=0)


def test_husimi_csv_rejects_shape_mismatch(tmp_path, rng):
    grid = husimi(random_density(rng), theta_res=4, phi_res=4)
    path = tmp_path / "husimi.csv"
    write_husimi_csv(path, grid)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ValueError, match="grid"):
        read_husimi_csv(path)
