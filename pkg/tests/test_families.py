import numpy as np
import pytest

from gtisp.exceptions import DataError, ParameterError
from gtisp.families import (
    Family,
    bernoulli,
    check_support,
    cumulant,
    fisher_information,
    gaussian,
    log_likelihood,
    mean_vector,
    poisson,
    scaling_bound,
    variance_vector,
)
from gtisp.linalg import normalize_columns, spectral_norm
from gtisp.rules import hard, soft

from oracles import fd_grad, fd_hess, jacobi_eigenvalues, spectral_norm_dense

FAMILIES = [gaussian(), bernoulli(), poisson()]


def random_data(fam, rng, n=12, p=4):
    X = rng.normal(size=(n, p)) / np.sqrt(n)
    beta = rng.normal(size=p) * 0.5
    eta = X @ beta
    if fam.name == "gaussian":
        y = eta + rng.normal(size=n)
    elif fam.name == "bernoulli":
        y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    else:
        y = rng.poisson(np.exp(eta)).astype(float)
    return X, y, beta


def test_mean_vector_values():
    assert mean_vector(bernoulli(), np.array([0.0]))[0] == 0.5
    assert mean_vector(poisson(), np.array([1.0]))[0] == pytest.approx(np.e)
    assert np.allclose(mean_vector(gaussian(), np.array([1.0, 2.0])), [1.0, 2.0])


def test_mean_vector_stability():
    eta = np.array([-800.0, 800.0])
    mu = mean_vector(bernoulli(), eta)
    assert np.all(np.isfinite(mu)) and mu[0] == 0.0 and mu[1] == 1.0
    with pytest.warns(UserWarning, match="capped"):
        mu = mean_vector(poisson(), np.array([900.0]), max_mean=1e12)
    assert mu[0] == pytest.approx(1e12)


def test_log_likelihood_values():
    assert log_likelihood(bernoulli(), np.array([1.0]), np.array([0.0])) == (
        pytest.approx(np.log(0.5))
    )
    assert log_likelihood(poisson(), np.array([2.0]), np.array([0.0])) == (
        pytest.approx(-1.0 - np.log(2.0))
    )
    # exact fit at unit variance: log density is -log(2 pi)/2
    assert log_likelihood(gaussian(), np.array([1.0]), np.array([1.0])) == (
        pytest.approx(-0.5 * np.log(2.0 * np.pi))
    )


def test_support_checks():
    with pytest.raises(DataError, match=r"y\[1\]"):
        check_support(bernoulli(), np.array([0.0, 0.5]))
    with pytest.raises(DataError, match=r"y\[0\]"):
        check_support(poisson(), np.array([-1.0, 2.0]))
    with pytest.raises(DataError, match="not finite"):
        check_support(gaussian(), np.array([np.nan]))
    with pytest.raises(DataError, match="shape"):
        log_likelihood(gaussian(), np.zeros(3), np.zeros(4))
    with pytest.raises(ParameterError):
        Family("cauchy")


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_canonical_link_roundtrip(fam):
    t = np.linspace(-3, 3, 41)
    mu = mean_vector(fam, t)
    if fam.name == "gaussian":
        back = mu
    elif fam.name == "bernoulli":
        back = np.log(mu / (1.0 - mu))
    else:
        back = np.log(mu)
    assert np.allclose(back, t, atol=1e-10)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_cumulant_derivatives(fam, rng):
    t = rng.uniform(-2, 2, 30)
    h = 1e-6
    d1 = (cumulant(fam, t + h) - cumulant(fam, t - h)) / (2 * h)
    h = 1e-4  # wider step for the second difference (roundoff ~ eps/h^2)
    d2 = (cumulant(fam, t + h) - 2 * cumulant(fam, t) + cumulant(fam, t - h)) / h**2
    assert np.allclose(d1, mean_vector(fam, t), rtol=1e-6, atol=1e-8)
    assert np.allclose(d2, variance_vector(fam, t), rtol=1e-3, atol=1e-5)
    assert np.all(variance_vector(fam, t) > 0)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_gradient_matches_score(fam, rng):
    # d/dbeta of the log-likelihood is X'(y - mu)
    for _ in range(20):
        X, y, beta = random_data(fam, rng)
        f = lambda b: log_likelihood(fam, y, X @ b)
        want = X.T @ (y - mean_vector(fam, X @ beta))
        got = fd_grad(f, beta)
        assert np.allclose(got, want, rtol=1e-5, atol=1e-7)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_hessian_matches_information(fam, rng):
    X, y, beta = random_data(fam, rng)
    f = lambda b: log_likelihood(fam, y, X @ b)
    H = fd_hess(f, beta)
    info = fisher_information(fam, X, beta)
    assert np.allclose(-H, info, rtol=1e-4, atol=1e-6)
    ev = np.linalg.eigvalsh(info)
    assert np.all(ev > -1e-10)


def test_fisher_information_values():
    X = np.array([[1.0]])
    assert fisher_information(gaussian(), X, np.zeros(1))[0, 0] == 1.0
    assert fisher_information(bernoulli(), X, np.zeros(1))[0, 0] == 0.25
    assert fisher_information(poisson(), X, np.zeros(1))[0, 0] == 1.0
    with pytest.raises(DataError):
        fisher_information(gaussian(), X, np.zeros(2))


def test_scaling_bound_values(rng):
    X = rng.normal(size=(20, 6))
    nx = spectral_norm_dense(X)
    assert scaling_bound(gaussian(), X, [hard()]) == pytest.approx(nx, rel=1e-8)
    s_soft = scaling_bound(gaussian(), X, [soft()])
    assert s_soft == pytest.approx(nx / np.sqrt(2.0), rel=1e-8)
    s_hard = scaling_bound(gaussian(), X, [hard()])
    assert s_soft < s_hard
    assert s_hard / s_soft == pytest.approx(np.sqrt(2.0), abs=1e-10)
    assert scaling_bound(bernoulli(), X, soft()) == pytest.approx(
        nx / (2.0 * np.sqrt(2.0)), rel=1e-8
    )


def test_scaling_bound_poisson(rng):
    X = rng.normal(size=(30, 5)) / 6.0
    y = rng.poisson(1.0, size=30).astype(float)
    with pytest.raises(ParameterError):
        scaling_bound(poisson(), X, [soft()])
    with pytest.warns(UserWarning, match="heuristic"):
        k0 = scaling_bound(poisson(), X, [soft()], y=y)
    assert np.isfinite(k0) and k0 > spectral_norm(X)
    with pytest.raises(DataError):
        scaling_bound(gaussian(), np.zeros((4, 3)), [soft()])


def test_power_iteration_matches_jacobi(rng):
    for _ in range(5):
        X = rng.normal(size=(10, 15))
        ev = jacobi_eigenvalues(X.T @ X)
        want = np.sqrt(max(ev[0], 0.0))
        assert spectral_norm(X) == pytest.approx(want, rel=1e-8)
    assert spectral_norm(np.zeros((3, 2))) == 0.0


def test_normalize_columns(rng):
    X = rng.normal(size=(9, 4))
    Xn, scales = normalize_columns(X)
    assert np.allclose(np.linalg.norm(Xn, axis=0), 1.0)
    assert np.allclose(Xn * scales, X)
    X[:, 2] = 0.0
    with pytest.warns(UserWarning, match="all-zero"):
        Xn, scales = normalize_columns(X)
    assert scales[2] == 1.0 and np.all(Xn[:, 2] == 0.0)
