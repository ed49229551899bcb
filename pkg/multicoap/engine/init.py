from typing import Optional, Tuple

import numpy as np

from ..core.config import FitConfig
from ..core.data import MultiStudyDataset
from ..core.params import ModelParams, StudyPosterior, VariationalParams
from .mstep import solve_covariates

# Standard deviation of the seeded jitter added to the initial loadings
INIT_JITTER = 1e-6


def _top_directions(R: np.ndarray, k: int) -> np.ndarray:
    """
    Top-k right singular directions of R scaled by singular value / √rows (p x k).
    """
    if k == 0:
        return np.zeros((R.shape[1], 0))
    _, singular, Vt = np.linalg.svd(R, full_matrices=False)
    L = np.zeros((R.shape[1], k))
    m = min(k, Vt.shape[0])
    L[:, :m] = Vt[:m].T * (singular[:m] / np.sqrt(R.shape[0]))
    return L


def init_params(
    data: MultiStudyDataset, config: FitConfig, seed: Optional[int] = None
) -> Tuple[ModelParams, VariationalParams]:
    """
    Deterministic starting point:

    * μ⁰ = ln((x + 1)/a), σ²⁰ = 1;
    * β⁰ = pooled least squares of μ⁰ on Z;
    * A⁰ = top-q directions of the pooled residual μ⁰ − Zβ⁰ᵀ;
    * B_s⁰ = top-q_s directions of the study residual after projecting out span(A⁰);
    * λ⁰ = 1, M_f⁰ = M_h⁰ = 0, S_f⁰ = I, S_h⁰ = I.

    A jitter of standard deviation 1e-6 drawn from `seed` (default `config.seed`) is added
    to the loadings so that exactly degenerate residuals still give distinct directions.

    Raises:
        * `CollinearCovariatesError`: as the β update.
    """
    seed = config.seed if seed is None else seed
    rng = np.random.Generator(np.random.PCG64(seed))
    p, d = data.p, data.d

    M0 = [np.log((study.X + 1.0) / study.a[:, None]) for study in data]

    ztz = np.zeros((d, d))
    ztm = np.zeros((d, p))
    for study, M in zip(data, M0):
        ztz += study.Z.T @ study.Z
        ztm += study.Z.T @ M
    beta = solve_covariates(ztz, ztm).T

    resid = [M - study.Z @ beta.T for study, M in zip(data, M0)]
    A = _top_directions(np.vstack(resid), config.q)
    A = A + INIT_JITTER * rng.standard_normal(A.shape)

    projector = np.eye(p) - A @ np.linalg.pinv(A)
    B = []
    for R, q_s in zip(resid, config.qs):
        B_s = _top_directions(R @ projector, q_s)
        B.append(B_s + INIT_JITTER * rng.standard_normal(B_s.shape))

    theta = ModelParams(beta=beta, A=A, B=B, lam=np.ones(data.S))
    xi = VariationalParams(
        studies=[
            StudyPosterior(
                M=M,
                V=np.ones_like(M),
                Mf=np.zeros((study.n, config.q)),
                Sf=np.eye(config.q),
                Mh=np.zeros((study.n, q_s)),
                Sh=np.eye(q_s),
            )
            for study, M, q_s in zip(data, M0, config.qs)
        ]
    )
    return theta, xi
