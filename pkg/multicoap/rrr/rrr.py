import numpy as np
from pydantic import Field

from ..core.errors import InvalidConfigError, NonSPDGramError
from ..core.schema import Schema, FloatArray
from ..selection.cut import DEFAULT_TAU, cumulative_ratio, cup_cut


class RankSelection(Schema):
    """
    Rank chosen for β together with the spectrum it was read from.

    `eigenvalues` are the r_max largest eigenvalues of β̂ᵀβ̂ in nonincreasing order and
    `cumulative_ratio` their cumulative proportions (last entry 1).
    """

    r_hat: int = Field(ge=1)
    eigenvalues: FloatArray
    cumulative_ratio: FloatArray
    tau: float = DEFAULT_TAU


def _descending_order(values: np.ndarray) -> np.ndarray:
    # ties keep the lowest original index first
    return np.argsort(-values, kind="stable")


def reduced_rank_beta(beta_tilde: np.ndarray, gram: np.ndarray, r: int) -> np.ndarray:
    """
    Project β̃ onto the top-r eigenvectors of β̃·gram·β̃ᵀ.

    The p x p eigenproblem is solved through its dual: with gram = LLᵀ, the eigenvectors
    of β̃·gram·β̃ᵀ = (β̃L)(β̃L)ᵀ are the left singular vectors of the p x d matrix β̃L.

    Args:
        * `beta_tilde` (`p x d`): unconstrained estimate.
        * `gram` (`d x d`): n⁻¹Z̄ᵀZ̄, symmetric positive definite.
        * `r`: target rank, `1 <= r <= min(p, d)`.

    Raises:
        * `NonSPDGramError`: `gram` not symmetric positive definite.
    """
    beta_tilde = np.asarray(beta_tilde, dtype=np.float64)
    gram = np.asarray(gram, dtype=np.float64)
    p, d = beta_tilde.shape
    if not 1 <= r <= min(p, d):
        raise InvalidConfigError(f"rank {r} must lie in [1, min(p, d) = {min(p, d)}]")
    if gram.shape != (d, d) or not np.allclose(gram, gram.T, rtol=1e-10, atol=1e-12):
        raise NonSPDGramError(f"expected a symmetric {d}x{d} matrix, got shape {gram.shape}")
    try:
        L = np.linalg.cholesky(0.5 * (gram + gram.T))
    except np.linalg.LinAlgError:
        raise NonSPDGramError("Cholesky factorization failed")

    U, singular, _ = np.linalg.svd(beta_tilde @ L, full_matrices=False)
    U_r = U[:, _descending_order(singular)[:r]]
    return U_r @ (U_r.T @ beta_tilde)


def select_rank(beta_hat: np.ndarray, r_max: int, tau: float = DEFAULT_TAU) -> RankSelection:
    """
    r̂ = min{r : Σ_{k<=r} ν_k / Σ_{k<=r_max} ν_k > τ} with ν_k the k-th largest eigenvalue
    of β̂ᵀβ̂.

    Raises:
        * `DegenerateSpectrumError`: β̂ is all zero.
    """
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    if not 1 <= r_max <= min(beta_hat.shape):
        raise InvalidConfigError(f"r_max {r_max} must lie in [1, min(p, d) = {min(beta_hat.shape)}]")
    singular = np.linalg.svd(beta_hat, compute_uv=False)
    eigenvalues = np.sort(singular**2)[::-1][:r_max]
    return RankSelection(
        r_hat=cup_cut(eigenvalues, tau),
        eigenvalues=eigenvalues,
        cumulative_ratio=cumulative_ratio(eigenvalues),
        tau=tau,
    )
