from typing import Optional, Tuple, Union

import numpy as np

from ..core.data import MultiStudyDataset
from ..core.params import ModelParams, VariationalParams
from .linalg import spd_inverse
from .status import BlockStatus
from .workspace import EStepWorkspace, ensure_workspace

ArrayLike = Union[float, np.ndarray]

# Largest exponent fed to exp() in the E-step
LOG_CLAMP = np.log(1e12)


def clamped_exp(y: ArrayLike) -> ArrayLike:
    return np.exp(np.minimum(y, LOG_CLAMP))


def estep_update_y(
    x: ArrayLike, a: ArrayLike, y0: ArrayLike, ztilde: ArrayLike, lam: float
) -> Tuple[ArrayLike, ArrayLike]:
    """
    One Laplace/Newton step for the variational mean and variance of y_sij:

        μ  = (x − a e^{y0}(1 − y0) + z̃/λ) / (1/λ + a e^{y0})
        σ² = 1 / (a e^{μ} + 1/λ)

    Works elementwise on broadcastable arrays; exponents are clamped at ln(1e12).
    """
    inv_lam = 1.0 / lam
    ey0 = a * clamped_exp(y0)
    mu = (x - ey0 * (1.0 - y0) + inv_lam * ztilde) / (inv_lam + ey0)
    sigma2 = 1.0 / (a * clamped_exp(mu) + inv_lam)
    return mu, sigma2


@BlockStatus.status
def estep_update_y_study(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    study: int,
    workspace: Optional[EStepWorkspace] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Apply `estep_update_y` to every (i, j) of one study, using the current μ as y0.
    """
    workspace = ensure_workspace(data, workspace)
    obs, post = data[study], xi[study]
    ztilde = workspace.linear_predictor(study, obs.Z, theta, post)
    return estep_update_y(obs.X, obs.a[:, None], post.M, ztilde, theta.lam[study])


@BlockStatus.status
def estep_update_factors(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    study: int,
    workspace: Optional[EStepWorkspace] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Closed-form update of the factor posteriors of one study:

        S_f = (AᵀA/λ_s + I_q)⁻¹,        m_f,si = S_f Σ_j (μ_sij − z_siᵀβ_j − γ_sjᵀm_h,si) α_j / λ_s
        S_h = (B_sᵀB_s/λ_s + I_qs)⁻¹,   m_h,si = S_h Σ_j (μ_sij − z_siᵀβ_j − α_jᵀm_f,si) γ_sj / λ_s

    m_h uses the freshly updated m_f. Returns (Mf, Sf, Mh, Sh).
    """
    workspace = ensure_workspace(data, workspace)
    obs, post = data[study], xi[study]
    lam = theta.lam[study]
    A, B = theta.A, theta.B[study]
    q, q_s = A.shape[1], B.shape[1]

    Sf = spd_inverse(A.T @ A / lam + np.eye(q), "S_f")
    resid_f = workspace.residual(study, obs.Z, theta, post, leave_in="shared")
    Mf = (resid_f @ A) @ Sf / lam

    if q_s == 0:
        return Mf, Sf, np.zeros((obs.n, 0)), np.zeros((0, 0))

    Sh = spd_inverse(B.T @ B / lam + np.eye(q_s), "S_h")
    resid_h = post.M - workspace.covariate_part(study, obs.Z, theta.beta) - Mf @ A.T
    Mh = (resid_h @ B) @ Sh / lam
    return Mf, Sf, Mh, Sh
