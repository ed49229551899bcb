from typing import Optional

import numpy as np
from scipy.special import gammaln

from ..core.data import MultiStudyDataset, StudyData
from ..core.errors import NonFiniteElboError
from ..core.params import ModelParams, StudyPosterior, VariationalParams
from .linalg import logdet_spd
from .workspace import EStepWorkspace, ensure_workspace


def loading_quadratic(L: np.ndarray, S: np.ndarray) -> np.ndarray:
    """
    Vector of l_jᵀ S l_j over the rows l_j of a loading matrix.
    """
    if L.shape[1] == 0:
        return np.zeros(L.shape[0])
    return np.einsum("jk,kl,jl->j", L, S, L)


def study_elbo(
    s: int,
    study: StudyData,
    theta: ModelParams,
    post: StudyPosterior,
    workspace: EStepWorkspace,
    include_constant: bool = False,
) -> float:
    """
    Σ_i of the per-observation lower bound for one study.
    """
    n, p = study.X.shape
    lam = theta.lam[s]
    M, V = post.M, post.V

    with np.errstate(over="ignore", invalid="ignore"):
        expected_rate = study.a[:, None] * np.exp(M + 0.5 * V)
    poisson = np.sum(study.X * M) - np.sum(expected_rate)

    ztilde = workspace.linear_predictor(s, study.Z, theta, post)
    quad = np.sum((M - ztilde) ** 2) + np.sum(V)
    quad += n * np.sum(loading_quadratic(theta.A, post.Sf))
    quad += n * np.sum(loading_quadratic(theta.B[s], post.Sh))
    gaussian = -0.5 * (quad / lam + n * p * np.log(lam))

    prior = -0.5 * (
        np.sum(post.Mf**2) + n * np.trace(post.Sf) + np.sum(post.Mh**2) + n * np.trace(post.Sh)
    )
    entropy = 0.5 * (np.sum(np.log(V)) + n * logdet_spd(post.Sf) + n * logdet_spd(post.Sh))

    value = poisson + gaussian + prior + entropy
    if include_constant:
        value += elbo_constant(study, post.Sf.shape[0], post.Sh.shape[0])
    if not np.isfinite(value):
        raise NonFiniteElboError(value)
    return float(value)


def elbo_constant(study: StudyData, q: int, q_s: int) -> float:
    """
    Additive terms dropped from the bound: Σ_ij (x ln a − ln x!) plus ½ per latent
    y_sij and per latent factor dimension (Gaussian entropy minus prior normalizers).
    """
    n, p = study.X.shape
    X = study.X.astype(np.float64)
    return float(
        np.sum(X * np.log(study.a)[:, None]) - np.sum(gammaln(X + 1.0)) + 0.5 * n * (p + q + q_s)
    )


def elbo(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    include_constant: bool = False,
    workspace: Optional[EStepWorkspace] = None,
) -> float:
    """
    Evidence lower bound Σ_{s,i} l̃_si(θ_s, ξ_si).

    The additive constant is 0 by default; `include_constant=True` adds it back so the
    value is a lower bound on the exact marginal log-likelihood.

    Raises:
        * `NonFiniteElboError`: some exp(μ + σ²/2) overflowed.
    """
    workspace = ensure_workspace(data, workspace)
    total = 0.0
    for s, study in enumerate(data):
        total += study_elbo(s, study, theta, xi[s], workspace, include_constant)
    return total
