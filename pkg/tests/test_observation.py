import math

import numpy as np
import pytest

from fracinv.basis import MidpointGrid
from fracinv.forward import evaluate_uT
from fracinv.observation import (
    NoiseSpec,
    Observations,
    draw_noise,
    observe,
    read_observations_csv,
    replicate_rng,
    write_observations_csv,
)

F = [0.3, 1.0, -0.4, 0.2]


def test_zero_noise_gives_clean_samples(spec_half):
    obs = observe(spec_half, F, 64, NoiseSpec(v_max=0.0, seed=5))
    clean = evaluate_uT(spec_half, F, MidpointGrid(64).nodes)
    assert np.array_equal(obs.values, clean)
    assert np.all(obs.sigmas == 0.0)


def test_same_seed_is_bit_identical(spec_half):
    noise = NoiseSpec(v_max=0.2, sigma_mode="uniform", seed=123)
    a = observe(spec_half, F, 100, noise, replicate=3)
    b = observe(spec_half, F, 100, noise, replicate=3)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.sigmas.tobytes() == b.sigmas.tobytes()
    c = observe(spec_half, F, 100, noise, replicate=4)
    assert not np.array_equal(a.values, c.values)


def test_sample_variance_of_pure_noise(spec_half):
    n = 10_000
    sigma = 0.05
    obs = observe(spec_half, [0.0], n, NoiseSpec(v_max=2 * sigma, seed=7))
    assert np.all(obs.sigmas == sigma)
    var = np.mean(obs.values**2)
    assert abs(var - sigma**2) <= 3 * sigma**2 * math.sqrt(2 / n)


def test_standard_normal_moments_and_lag_one_correlation():
    eps = replicate_rng(2024, 0).standard_normal(100_000)
    assert abs(eps.mean()) <= 0.02
    assert abs(eps.var() - 1.0) <= 0.02
    centred = eps - eps.mean()
    lag1 = np.dot(centred[:-1], centred[1:]) / np.dot(centred, centred)
    assert abs(lag1) <= 0.02


def test_replicate_streams_are_uncorrelated():
    a = replicate_rng(9, 0).standard_normal(100_000)
    b = replicate_rng(9, 1).standard_normal(100_000)
    assert abs(np.corrcoef(a, b)[0, 1]) <= 0.02


@pytest.mark.parametrize("mode", ["constant", "uniform"])
def test_sigma_respects_bound(mode):
    noise = NoiseSpec(v_max=0.3, sigma_mode=mode, seed=1)
    sigma, _ = draw_noise(noise, 5000, replicate_rng(1))
    assert np.all((sigma >= 0) & (sigma < 0.3))


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(v_max=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec(sigma_mode="laplace")
    with pytest.raises(ValueError):
        NoiseSpec(seed=-1)


def test_observe_rejects_tiny_grid(spec_half):
    with pytest.raises(ValueError):
        observe(spec_half, F, 1, NoiseSpec())


def test_observations_validate_shape():
    g = MidpointGrid(4)
    with pytest.raises(ValueError):
        Observations(g, np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        Observations(g, np.array([0, 1, np.nan, 0.0]), np.zeros(4))


def test_csv_round_trip(tmp_path, spec_sin):
    obs = observe(spec_sin, F, 33, NoiseSpec(v_max=0.1, sigma_mode="uniform", seed=77))
    path = tmp_path / "obs.csv"
    write_observations_csv(obs, path, metadata={"alpha": 0.5})
    text = path.read_text()
    assert text.startswith("# seed=77\n")
    assert "k,x_k,u_tilde,sigma" in text
    back = read_observations_csv(path)
    assert back.seed == 77 and back.n == 33
    assert back.values.tobytes() == obs.values.tobytes()
    assert back.sigmas.tobytes() == obs.sigmas.tobytes()


def test_csv_rejects_foreign_grid(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("k,x_k,u_tilde,sigma\n1,0.1,0,0\n2,0.2,0,0\n")
    with pytest.raises(ValueError):
        read_observations_csv(path)
