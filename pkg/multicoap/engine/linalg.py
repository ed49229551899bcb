from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..core.errors import SingularSystemError
from ..utils.logs import get_logger

logger = get_logger(__name__)

JITTER = 1e-10


def spd_factor(G: np.ndarray, block: str) -> Tuple[np.ndarray, bool]:
    """
    Cholesky-factor a symmetric positive definite matrix. On failure, add a jitter of
    `1e-10 * trace / dim` to the diagonal and retry once.

    Raises:
        * `SingularSystemError`: factorization failed twice.
    """
    G = 0.5 * (G + G.T)
    try:
        return cho_factor(G, lower=True, check_finite=True)
    except (LinAlgError, ValueError):
        dim = G.shape[0]
        jitter = JITTER * max(np.trace(G), 1.0) / dim
        logger.warning(f"Block `{block}`: factorization failed, retrying with jitter {jitter:.2e}")
        try:
            return cho_factor(G + jitter * np.eye(dim), lower=True, check_finite=True)
        except (LinAlgError, ValueError):
            raise SingularSystemError(block)


def spd_solve(G: np.ndarray, rhs: np.ndarray, block: str) -> np.ndarray:
    """
    Solve `G x = rhs` for symmetric positive definite `G`.
    """
    if G.shape[0] == 0:
        return np.zeros_like(rhs, dtype=np.float64)
    return cho_solve(spd_factor(G, block), rhs)


def spd_inverse(G: np.ndarray, block: str) -> np.ndarray:
    """
    Inverse of a symmetric positive definite matrix, symmetrized.
    """
    dim = G.shape[0]
    if dim == 0:
        return np.zeros((0, 0))
    inv = spd_solve(G, np.eye(dim), block)
    return 0.5 * (inv + inv.T)


def logdet_spd(G: np.ndarray) -> float:
    """
    Log-determinant of a symmetric positive definite matrix (0 for an empty matrix).
    """
    if G.shape[0] == 0:
        return 0.0
    sign, value = np.linalg.slogdet(G)
    if sign <= 0:
        return -np.inf
    return float(value)
