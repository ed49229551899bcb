import numpy as np
import pytest

from multicoap.core.config import FitConfig, FitResult
from multicoap.core.errors import DimensionMismatchError, InvalidConfigError, RankDeficientEstimateError
from multicoap.core.params import ModelParams, StudyPosterior, VariationalParams
from multicoap.engine import fit
from multicoap.metrics import beta_error, score, trace_statistic


def _projection_oracle(D_hat, D):
    P = D_hat @ np.linalg.pinv(D_hat)
    return np.trace(D.T @ P @ D) / np.trace(D.T @ D)


def test_trace_statistic_examples():
    D = np.eye(4)[:, :2]
    assert trace_statistic(D, D) == pytest.approx(1.0)
    assert trace_statistic(np.eye(4)[:, 2:], D) == pytest.approx(0.0)
    assert trace_statistic(np.eye(4)[:, 1:3], D) == pytest.approx(0.5)
    assert trace_statistic(np.zeros((4, 0)), D) == 0.0


def test_trace_statistic_matches_projection(rng):
    for _ in range(5):
        D_hat = rng.standard_normal((30, 3))
        D = rng.standard_normal((30, 2))
        assert trace_statistic(D_hat, D) == pytest.approx(_projection_oracle(D_hat, D), rel=1e-10)


def test_trace_statistic_invariances(rng):
    D_hat = rng.standard_normal((25, 3))
    D = rng.standard_normal((25, 2))
    G = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    value = trace_statistic(D_hat, D)
    assert trace_statistic(D_hat @ G, D) == pytest.approx(value, rel=1e-9)
    assert trace_statistic(D_hat, 7.0 * D) == pytest.approx(value, rel=1e-12)
    assert trace_statistic(D @ G[:2, :2], D) == pytest.approx(1.0, rel=1e-10)
    assert 0.0 <= value <= 1.0


def test_trace_statistic_errors(rng):
    D = rng.standard_normal((10, 2))
    with pytest.raises(InvalidConfigError):
        trace_statistic(D, np.zeros((10, 2)))
    with pytest.raises(DimensionMismatchError):
        trace_statistic(D, rng.standard_normal((9, 2)))
    with pytest.raises(RankDeficientEstimateError):
        trace_statistic(np.column_stack([D[:, 0], D[:, 0]]), D)


def test_beta_error_examples():
    assert beta_error(np.zeros((2, 3)), np.ones((2, 3))) == pytest.approx(1.0)
    assert beta_error(np.ones((2, 3)), np.ones((2, 3))) == 0.0
    assert beta_error(np.array([[3.0, 0.0]]), np.zeros((1, 2))) == pytest.approx(np.sqrt(4.5))
    with pytest.raises(DimensionMismatchError):
        beta_error(np.zeros((2, 3)), np.zeros((3, 2)))


def _fit_from_truth(truth, data):
    studies = []
    for s, study in enumerate(data):
        q, q_s = truth.F[s].shape[1], truth.H[s].shape[1]
        studies.append(
            StudyPosterior(
                M=np.zeros((study.n, study.p)),
                V=np.ones((study.n, study.p)),
                Mf=truth.F[s],
                Sf=np.eye(q),
                Mh=truth.H[s],
                Sh=np.eye(q_s),
            )
        )
    params = ModelParams(beta=truth.beta0, A=truth.A0, B=truth.B0, lam=np.ones(data.S))
    return FitResult(
        params=params,
        vparams=VariationalParams(studies=studies),
        elbo_trace=np.zeros(1),
        converged=True,
        iterations=1,
    )


def test_score_of_the_truth(small_sim):
    config, data, truth = small_sim
    report = score(_fit_from_truth(truth, data), truth)
    for name in ("A_tr", "B_tr", "F_tr", "H_tr"):
        assert report.metrics()[name] == pytest.approx(1.0)
    assert report.beta_er == 0.0
    assert len(report.F_tr_study) == config.S
    assert report.f_baseline == pytest.approx(np.mean([2 / 20, 2 / 20]))
    assert not report.near_baseline


def test_score_of_a_fit(small_sim):
    config, data, truth = small_sim
    result = fit(data, FitConfig(q=config.q, qs=config.qs, rank=config.r0))
    report = score(result, truth)
    assert report.A_tr > 0.7
    assert report.F_tr > 0.7
    assert set(report.metrics()) == {"A_tr", "B_tr", "F_tr", "H_tr", "beta_er"}
