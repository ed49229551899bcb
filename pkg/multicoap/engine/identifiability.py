from typing import List, Tuple

import numpy as np

from ..core.params import ModelParams, VariationalParams

# Entries below this magnitude count as zero when fixing column signs
SIGN_THRESHOLD = 1e-10


def sign_fix(L: np.ndarray, threshold: float = SIGN_THRESHOLD) -> np.ndarray:
    """
    Vector of ±1 making the first entry above `threshold` of every column positive.
    Columns with no such entry are left unflipped.
    """
    signs = np.ones(L.shape[1])
    for k in range(L.shape[1]):
        nonzero = np.flatnonzero(np.abs(L[:, k]) > threshold)
        if nonzero.size and L[nonzero[0], k] < 0:
            signs[k] = -1.0
    return signs


def identifying_rotation(L: np.ndarray) -> np.ndarray:
    """
    Orthogonal R such that (LR)ᵀ(LR) is diagonal with nonincreasing diagonal and every
    column of LR starts (first entry above 1e-10) with a positive value.
    """
    k = L.shape[1]
    if k == 0:
        return np.zeros((0, 0))
    _, _, Vt = np.linalg.svd(L, full_matrices=False)
    R = Vt.T
    return R * sign_fix(L @ R)


def _rotate(L: np.ndarray, R: np.ndarray) -> np.ndarray:
    if R.shape[0] == 0:
        return L.copy()
    return L @ R


def apply_identifiability(
    theta: ModelParams, xi: VariationalParams
) -> Tuple[ModelParams, VariationalParams]:
    """
    Rotate the loadings so that AᵀA and every B_sᵀB_s are diagonal with nonincreasing
    diagonals and sign-normalized columns, and rotate the factor posteriors accordingly
    (M_f ↦ M_f R, S_f ↦ RᵀS_fR). The rotations are orthogonal, so the reconstruction
    A m_f + B_s m_h and the ELBO are unchanged.
    """
    R_A = identifying_rotation(theta.A)
    A = _rotate(theta.A, R_A)

    B: List[np.ndarray] = []
    studies = []
    for s, post in enumerate(xi.studies):
        R_B = identifying_rotation(theta.B[s])
        B.append(_rotate(theta.B[s], R_B))
        Sf = R_A.T @ post.Sf @ R_A
        Sh = R_B.T @ post.Sh @ R_B if R_B.shape[0] else post.Sh
        studies.append(
            post.replace(
                Mf=_rotate(post.Mf, R_A),
                Sf=0.5 * (Sf + Sf.T),
                Mh=_rotate(post.Mh, R_B),
                Sh=0.5 * (Sh + Sh.T),
            )
        )
    return theta.replace(A=A, B=B), VariationalParams(studies=studies)


def cross_block_inner(theta: ModelParams) -> float:
    """
    max_s ‖AᵀB_s‖_max / (‖A‖_F ‖B_s‖_F): how far the joint (A, B_s) Gram matrix is from
    block-diagonal. Reported, not enforced.
    """
    worst = 0.0
    norm_A = np.linalg.norm(theta.A)
    for B_s in theta.B:
        norm_B = np.linalg.norm(B_s)
        if B_s.shape[1] == 0 or norm_A == 0 or norm_B == 0:
            continue
        worst = max(worst, float(np.abs(theta.A.T @ B_s).max() / (norm_A * norm_B)))
    return worst
