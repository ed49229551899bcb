from typing import List

import numpy as np

from ..core.config import FitResult
from ..core.errors import DimensionMismatchError, InvalidConfigError, RankDeficientEstimateError
from ..core.schema import Schema
from ..simgen.generator import SimTruth

# Condition number of D̂ᵀD̂ above which an estimate counts as rank deficient
MAX_CONDITION = 1e12
# Factor trace statistics at most this multiple of the random-projection level are flagged
BASELINE_FACTOR = 2.0


class ScoreReport(Schema):
    """
    Recovery of a fit against the simulation truth.

    `B_tr`, `F_tr`, `H_tr` average the per-study values in `B_tr_study`, `F_tr_study`,
    `H_tr_study`. `f_baseline` is the trace statistic a random estimate would reach on
    average (mean of q / min(n_s, p)); `near_baseline` flags F_tr within
    `BASELINE_FACTOR` of it.
    """

    A_tr: float
    B_tr: float
    F_tr: float
    H_tr: float
    beta_er: float
    B_tr_study: List[float]
    F_tr_study: List[float]
    H_tr_study: List[float]
    f_baseline: float
    near_baseline: bool

    def metrics(self) -> dict:
        return {
            "A_tr": self.A_tr,
            "B_tr": self.B_tr,
            "F_tr": self.F_tr,
            "H_tr": self.H_tr,
            "beta_er": self.beta_er,
        }


def trace_statistic(D_hat: np.ndarray, D: np.ndarray) -> float:
    """
    Tr{Dᵀ D̂(D̂ᵀD̂)⁻¹D̂ᵀ D} / Tr(DᵀD): the share of D captured by the column space of D̂.

    An estimate without columns scores 0.

    Raises:
        * `RankDeficientEstimateError`: D̂ᵀD̂ has condition number above 1e12.
    """
    D_hat = np.asarray(D_hat, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    if D_hat.ndim != 2 or D.ndim != 2 or D_hat.shape[0] != D.shape[0]:
        raise DimensionMismatchError("-", "rows", D.shape, D_hat.shape)
    total = np.sum(D * D)
    if total <= 0:
        raise InvalidConfigError("the reference matrix of a trace statistic must be nonzero")
    if D_hat.shape[1] == 0:
        return 0.0

    gram = D_hat.T @ D_hat
    cond = np.linalg.cond(gram)
    if not cond <= MAX_CONDITION:
        raise RankDeficientEstimateError(cond)
    cross = D_hat.T @ D
    captured = np.sum(cross * np.linalg.solve(gram, cross))
    return float(min(max(captured / total, 0.0), 1.0))


def beta_error(beta_hat: np.ndarray, beta0: np.ndarray) -> float:
    """Root-mean-square entrywise error √(‖β̂ − β₀‖²_F / (pd))."""
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    beta0 = np.asarray(beta0, dtype=np.float64)
    if beta_hat.shape != beta0.shape:
        raise DimensionMismatchError("-", "beta", beta0.shape, beta_hat.shape)
    return float(np.sqrt(np.mean((beta_hat - beta0) ** 2)))


def score(fit: FitResult, truth: SimTruth) -> ScoreReport:
    """
    Score loadings, factor posterior means and β against the truth.
    """
    theta = fit.params
    S = theta.S
    if len(truth.B0) != S or len(truth.F) != S:
        raise DimensionMismatchError("-", "studies", len(truth.B0), S)

    B_tr = [trace_statistic(theta.B[s], truth.B0[s]) for s in range(S)]
    F_tr = [trace_statistic(fit.Mf[s], truth.F[s]) for s in range(S)]
    H_tr = [trace_statistic(fit.Mh[s], truth.H[s]) for s in range(S)]

    p = theta.p
    f_baseline = float(np.mean([truth.F[s].shape[1] / min(truth.F[s].shape[0], p) for s in range(S)]))
    F_mean = float(np.mean(F_tr))

    return ScoreReport(
        A_tr=trace_statistic(theta.A, truth.A0),
        B_tr=float(np.mean(B_tr)),
        F_tr=F_mean,
        H_tr=float(np.mean(H_tr)),
        beta_er=beta_error(theta.beta, truth.beta0),
        B_tr_study=B_tr,
        F_tr_study=F_tr,
        H_tr_study=H_tr,
        f_baseline=f_baseline,
        near_baseline=F_mean <= BASELINE_FACTOR * f_baseline,
    )
