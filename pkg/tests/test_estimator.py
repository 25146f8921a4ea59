import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma

from fracinv.basis import MidpointGrid, aliasing_term, synthesize
from fracinv.errors import NumericalError
from fracinv.estimator import (
    ErrorBoundInputs,
    Estimate,
    bound_terms,
    choose_M,
    error_decomposition,
    estimate,
    estimate_coefficients,
    exact_representation,
    l2_error_sq,
    noise_variance,
    theorem_bound,
)
from fracinv.forward import ProblemSpec, forward_map, kernel, kernels
from fracinv.observation import NoiseSpec, Observations, observe

# (alpha=0.5, T=1, R0=Rmax=1, V=0.1, E=1, beta=2, n=4096, M=2), evaluated with mpmath at 30 digits
BOUND_REGRESSION = 0.06490745200614586135885
BOUND_TERMS_REGRESSION = (5.421535620801650e-05, 0.002353236649937845, 0.0625)

F_BAND = np.array([0.4, 1.0, -0.5, 0.25, 0.1])


def clean_obs(spec, f, n):
    return observe(spec, f, n, NoiseSpec(v_max=0.0))


@pytest.mark.parametrize("spec_name", ["spec_half", "spec_sin"])
def test_noise_free_round_trip(spec_name, request):
    spec = request.getfixturevalue(spec_name)
    est = estimate(clean_obs(spec, F_BAND, 64), spec, 6)
    assert est.coeffs.size == 7
    np.testing.assert_allclose(est.coeffs[:5], F_BAND, rtol=0, atol=1e-8)
    np.testing.assert_allclose(est.coeffs[5:], 0.0, atol=1e-8)


def test_zero_observations(spec_half):
    obs = Observations(MidpointGrid(16), np.zeros(16), np.zeros(16))
    assert np.all(estimate(obs, spec_half, 5).coeffs == 0.0)


def test_single_high_mode_aliases_into_first(spec_half):
    n = 8
    q = 2 * n - 1
    f = np.zeros(q + 1)
    f[q] = 1.0
    est = estimate(clean_obs(spec_half, f, n), spec_half, n - 1)
    u = forward_map(spec_half, f)
    expected = aliasing_term(u, 1, n) / kernel(spec_half, 1)
    assert expected == pytest.approx(-kernel(spec_half, q) / kernel(spec_half, 1))
    assert est.coeffs[1] == pytest.approx(expected, rel=1e-10)
    # the rest of the retained modes see no resonance from q = 2n-1 except p = 1
    np.testing.assert_allclose(est.coeffs[2:], 0.0, atol=1e-14)


@pytest.mark.parametrize("n, beta, M", [(10_000, 2.0, 2), (2, 0.3, 1), (2, 7.0, 1), (10**6, 0.5, 10)])
def test_choose_M_examples(n, beta, M):
    assert choose_M(n, beta) == M


def test_choose_M_is_monotone_and_clamped():
    prev = 1
    for n in range(2, 5000, 37):
        M = choose_M(n, 0.01)
        assert 1 <= M <= n - 1 and M >= prev
        prev = M


def test_truncation_bounds_enforced(spec_half):
    obs = clean_obs(spec_half, F_BAND, 8)
    with pytest.raises(ValueError):
        estimate(obs, spec_half, 8)
    with pytest.raises(ValueError):
        estimate(obs, spec_half, 0)
    with pytest.raises(ValueError):
        estimate(obs, spec_half, 3, mode="other")


def test_kernel_underflow_is_reported(spec_half):
    b = kernels(spec_half, 4)
    b[2] *= 1e-3
    with pytest.raises(NumericalError):
        estimate_coefficients(np.ones(8), spec_half, 3, b=b)


def test_exact_representation(spec_sin):
    f = np.array([0.3, -1.0, 0.5, 0.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.7, 0.0, -0.3])
    u = forward_map(spec_sin, f)
    for n, M in [(8, 3), (8, 7), (16, 2)]:
        rec = exact_representation(u, spec_sin, n, M)
        np.testing.assert_allclose(rec[: f.size], f, rtol=0, atol=1e-8)
    assert np.all(exact_representation(np.zeros(5), spec_sin, 8, 3) == 0.0)


def test_exact_representation_tail_only(spec_half):
    f = np.zeros(10)
    f[9] = 2.0
    rec = exact_representation(forward_map(spec_half, f), spec_half, 8, 4)
    np.testing.assert_allclose(rec[:5], 0.0, atol=1e-12)
    assert rec[9] == pytest.approx(2.0, rel=1e-12)


def inputs(**kw):
    base = dict(alpha=0.5, T=1.0, R0=1.0, Rmax=1.0, v_max=0.1, E=1.0, beta=2.0, n=4096, M=2)
    base.update(kw)
    return ErrorBoundInputs(**base)


def test_error_bound_regression():
    assert choose_M(4096, 2.0) == 2
    assert theorem_bound(inputs()) == pytest.approx(BOUND_REGRESSION, rel=1e-12)
    for got, want in zip(bound_terms(inputs()), BOUND_TERMS_REGRESSION):
        assert got == pytest.approx(want, rel=1e-12)


def test_error_bound_vanishes_without_noise_or_signal():
    assert theorem_bound(inputs(v_max=0.0, E=0.0)) == 0.0


def test_error_bound_term_monotonicity_in_M():
    terms = np.array([bound_terms(inputs(M=M)) for M in range(1, 40)])
    assert np.all(np.diff(terms[:, 0]) == 0)
    assert np.all(np.diff(terms[:, 1]) > 0)
    assert np.all(np.diff(terms[:, 2]) < 0)
    totals = [theorem_bound(inputs(M=M)) for M in range(5, 40)]
    assert np.all(np.diff(totals) > 0)


def test_error_bound_inputs_validation():
    with pytest.raises(ValueError):
        inputs(R0=0.0)
    with pytest.raises(ValueError):
        inputs(v_max=-1.0)


def test_error_decomposition_examples(spec_half):
    est = estimate(clean_obs(spec_half, F_BAND, 64), spec_half, 6)
    I1, I2, I3 = error_decomposition(est, F_BAND)
    assert I1 <= 1e-16 and I2 == 0.0 and I3 <= 1e-16

    f = np.zeros(12)
    f[10] = 0.3
    est = estimate(clean_obs(spec_half, f, 64), spec_half, 4)
    I1, I2, I3 = error_decomposition(est, f)
    assert I2 == pytest.approx(0.09, rel=1e-15)
    assert I1 + I3 <= 1e-20

    c = np.array([1.0, 2.0, 3.0])
    t = np.array([0.5, 2.0, 1.0, 4.0])
    assert error_decomposition(c, t) == (0.25, 16.0, 4.0)
    assert l2_error_sq(c, t) == 20.25


def test_noise_only_variance_matches_closed_form(spec_half):
    n, M, sigma, reps = 128, 4, 0.1, 3000
    b = kernels(spec_half, M + 1)
    noise = NoiseSpec(v_max=2 * sigma, seed=31)
    totals = []
    for r in range(reps):
        obs = observe(spec_half, [0.0], n, noise, replicate=r, clean=np.zeros(n))
        I1, I2, I3 = error_decomposition(estimate(obs, spec_half, M, b=b), [0.0])
        assert I2 == 0.0
        totals.append(I1 + I3)
    totals = np.array(totals)
    expected = noise_variance(b, sigma, n, M)
    assert abs(totals.mean() - expected) <= 4 * totals.std(ddof=1) / math.sqrt(reps)


def test_linearity(spec_sin):
    rng = np.random.default_rng(0)
    v1, v2 = rng.normal(size=(2, 40))
    b = kernels(spec_sin, 8)
    lhs = estimate_coefficients(2.5 * v1 - 0.75 * v2, spec_sin, 7, b=b)
    rhs = 2.5 * estimate_coefficients(v1, spec_sin, 7, b=b) - 0.75 * estimate_coefficients(v2, spec_sin, 7, b=b)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * np.max(np.abs(rhs)))


def test_stacked_estimation_matches_rowwise(spec_half):
    rng = np.random.default_rng(3)
    vals = rng.normal(size=(5, 32))
    stack = estimate_coefficients(vals, spec_half, 4)
    for row, v in zip(stack, vals):
        np.testing.assert_allclose(row, estimate_coefficients(v, spec_half, 4), atol=1e-15)


def test_unbiased_on_bandlimited_truth(spec_half):
    n, M, reps = 64, 5, 2000
    b = kernels(spec_half, M + 1)
    grid = MidpointGrid(n)
    clean = synthesize(forward_map(spec_half, F_BAND, b[: F_BAND.size]), grid.nodes)
    noise = NoiseSpec(v_max=0.2, sigma_mode="uniform", seed=99)
    stack = np.array(
        [estimate(observe(spec_half, F_BAND, n, noise, replicate=r, clean=clean), spec_half, M, b=b).coeffs
         for r in range(reps)]
    )
    mean = stack.mean(axis=0)
    se = stack.std(axis=0, ddof=1) / math.sqrt(reps)
    truth = np.pad(F_BAND, (0, M + 1 - F_BAND.size))
    assert np.all(np.abs(mean - truth) <= 4 * se)


def test_parseval_against_dense_quadrature():
    rng = np.random.default_rng(11)
    for P, M in [(3, 2), (9, 12), (16, 16)]:
        f = rng.normal(size=P + 1)
        c = rng.normal(size=M + 1)
        est = Estimate(c, M, 64)
        dense, _ = quad(lambda x: (est(x) - synthesize(f, x)) ** 2, 0, math.pi, limit=500,
                        epsabs=1e-12, epsrel=1e-12)
        assert l2_error_sq(est, f) == pytest.approx(dense, abs=1e-6)


def test_paper_literal_zero_mode_differs_by_gamma(spec_sin):
    obs = clean_obs(spec_sin, F_BAND, 64)
    cons = estimate(obs, spec_sin, 6)
    lit = estimate(obs, spec_sin, 6, mode="paper-literal")
    assert lit.mode == "paper-literal"
    np.testing.assert_array_equal(lit.coeffs[1:], cons.coeffs[1:])
    assert lit.coeffs[0] == pytest.approx(cons.coeffs[0] / gamma(spec_sin.alpha), rel=1e-10)


def test_estimate_is_callable(spec_half):
    est = estimate(clean_obs(spec_half, F_BAND, 32), spec_half, 5)
    x = np.linspace(0, math.pi, 9)
    np.testing.assert_allclose(est(x), synthesize(F_BAND, x), atol=1e-8)
