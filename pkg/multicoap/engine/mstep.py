from typing import List, Optional, Tuple

import numpy as np

from ..core.data import MultiStudyDataset
from ..core.errors import CollinearCovariatesError
from ..core.params import ModelParams, VariationalParams
from ..rrr.rrr import reduced_rank_beta
from .elbo import loading_quadratic
from .linalg import spd_solve
from .status import BlockStatus
from .workspace import EStepWorkspace, ensure_workspace

# Largest condition number accepted for the weighted covariate Gram matrix
MAX_CONDITION = 1e12


@BlockStatus.status
def mstep_update_loadings(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    workspace: Optional[EStepWorkspace] = None,
) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Update the shared loadings A, then each B_s using the new A.

    α_j solves the λ_s-weighted normal equations
        {Σ_s λ_s⁻¹ Σ_i (m_f m_fᵀ + S_f)} α_j = Σ_s λ_s⁻¹ Σ_i m_f (μ_sij − z_siᵀβ_j − γ_sjᵀm_h,si),
    which is the stationary point of the ELBO in α_j (λ_s cancels for a single study).
    γ_sj = {Σ_i (m_h m_hᵀ + S_h)}⁻¹ Σ_i m_h (μ_sij − z_siᵀβ_j − α_jᵀm_f,si).

    Raises:
        * `SingularSystemError`: Σ(m mᵀ + S) not invertible, typically q above the effective rank.
    """
    workspace = ensure_workspace(data, workspace)
    q = theta.q
    gram = np.zeros((q, q))
    rhs = np.zeros((q, theta.p))
    for s, study in enumerate(data):
        post, lam = xi[s], theta.lam[s]
        resid = workspace.residual(s, study.Z, theta, post, leave_in="shared")
        gram += (post.Mf.T @ post.Mf + study.n * post.Sf) / lam
        rhs += post.Mf.T @ resid / lam
    A = spd_solve(gram, rhs, "A").T

    B = []
    for s, study in enumerate(data):
        post = xi[s]
        q_s = theta.B[s].shape[1]
        if q_s == 0:
            B.append(np.zeros((theta.p, 0)))
            continue
        resid = post.M - workspace.covariate_part(s, study.Z, theta.beta) - post.Mf @ A.T
        gram_s = post.Mh.T @ post.Mh + study.n * post.Sh
        B.append(spd_solve(gram_s, post.Mh.T @ resid, f"B_{study.label}").T)
    return A, B


@BlockStatus.status
def mstep_update_lambda(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    workspace: Optional[EStepWorkspace] = None,
) -> np.ndarray:
    """
    λ_s = (n_s p)⁻¹ Σ_ij {(ȳ_sij − z_siᵀβ_j)² + σ²_sij + α_jᵀS_fα_j + γ_sjᵀS_hγ_sj}.
    """
    workspace = ensure_workspace(data, workspace)
    lam = np.empty(len(data))
    for s, study in enumerate(data):
        post = xi[s]
        resid = workspace.residual(s, study.Z, theta, post)
        total = np.sum(resid**2) + np.sum(post.V)
        total += study.n * np.sum(loading_quadratic(theta.A, post.Sf))
        total += study.n * np.sum(loading_quadratic(theta.B[s], post.Sh))
        lam[s] = total / (study.n * study.p)
    return lam


def weighted_normal_equations(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    workspace: Optional[EStepWorkspace] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Return (Z̄ᵀZ̄, Z̄ᵀȲ) where Z̄ and Ȳ row-stack Z_s/√λ_s and (μ − M_f Aᵀ − M_h B_sᵀ)/√λ_s.
    """
    workspace = ensure_workspace(data, workspace)
    d = data.d
    ztz = np.zeros((d, d))
    zty = np.zeros((d, data.p))
    for s, study in enumerate(data):
        lam = theta.lam[s]
        ybar = workspace.residual(s, study.Z, theta, xi[s], leave_in="covariates")
        ztz += study.Z.T @ study.Z / lam
        zty += study.Z.T @ ybar / lam
    return ztz, zty


@BlockStatus.status
def mstep_update_beta(
    theta: ModelParams,
    xi: VariationalParams,
    data: MultiStudyDataset,
    rank: Optional[int] = None,
    workspace: Optional[EStepWorkspace] = None,
) -> np.ndarray:
    """
    Weighted least squares β̃ = ȲᵀZ̄(Z̄ᵀZ̄)⁻¹; with `rank` the reduced-rank
    projection of β̃ is returned instead.

    Raises:
        * `CollinearCovariatesError`: Z̄ᵀZ̄ singular or with condition number above 1e12.
    """
    ztz, zty = weighted_normal_equations(theta, xi, data, workspace)
    beta_tilde = solve_covariates(ztz, zty).T
    if rank is None:
        return beta_tilde
    return reduced_rank_beta(beta_tilde, ztz / data.n_total, rank)


def solve_covariates(ztz: np.ndarray, zty: np.ndarray) -> np.ndarray:
    """
    Solve the covariate normal equations, refusing ill-conditioned systems.
    """
    cond = np.linalg.cond(ztz)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise CollinearCovariatesError(cond)
    return spd_solve(ztz, zty, "beta")
