import numpy as np

from ..core.errors import DegenerateSpectrumError, InvalidConfigError

# Default desired variance proportion
DEFAULT_TAU = 0.95


def cumulative_ratio(nu: np.ndarray) -> np.ndarray:
    """
    Cumulative proportions Σ_{j<=k} ν_j / Σ_j ν_j; the last entry is exactly 1.

    Raises:
        * `DegenerateSpectrumError`: all entries are zero.
    """
    nu = np.asarray(nu, dtype=np.float64)
    if nu.ndim != 1 or nu.size == 0 or np.any(nu < 0) or not np.all(np.isfinite(nu)):
        raise InvalidConfigError(f"variance proportions must be a nonnegative vector, got {nu}")
    cumulative = np.cumsum(nu)
    if cumulative[-1] <= 0:
        raise DegenerateSpectrumError(nu.tolist())
    return cumulative / cumulative[-1]


def cup_cut(nu: np.ndarray, tau: float = DEFAULT_TAU) -> int:
    """
    Smallest k with Σ_{j<=k} ν_j / Σ_j ν_j > τ (strict inequality).
    """
    if not 0.0 < tau < 1.0:
        raise InvalidConfigError(f"tau must lie in (0, 1), got {tau}")
    ratios = cumulative_ratio(nu)
    return int(np.argmax(ratios > tau)) + 1
