import json
import hashlib
from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, model_validator
from scipy.linalg import toeplitz

from ..core.config import Config
from ..core.data import MultiStudyDataset, StudyData
from ..core.errors import InvalidConfigError, SignalTooStrongError
from ..core.schema import Schema, FloatArray
from ..engine.identifiability import sign_fix
from ..utils.logs import get_logger

logger = get_logger(__name__)

# Largest Poisson rate the generator accepts
MAX_RATE = 1e12
# Correlation decay of the non-intercept covariates
AR_DECAY = 0.5


class SimConfig(Config):
    """
    Settings of one simulated design.

    Fields:
        * `n`: sample size per study; its length fixes S.
        * `p`, `d`, `q`: counts, covariates (intercept included) and shared factors.
        * `qs`: specific factors per study.
        * `r0`: rank of the true β₀.
        * `rho_a`, `rho_b`, `rho_z`: signal strengths of A₀ / B₁₀, of B_s0 (s > 1) and of β₀.
        * `sigma0_sq`: overdispersion variance.
        * `a_range`: normalization factors are drawn uniformly from the integers in [a, b].
        * `seed`: replicate seed (covariates, factors, noise, normalizers, counts).
        * `structure_seed`: seed of (β₀, A₀, B_s0); derived from the other fields when unset.
    """

    n: List[int] = [100, 150]
    p: int = Field(default=100, ge=2)
    d: int = Field(default=10, ge=1)
    q: int = Field(default=3, ge=1)
    qs: List[int] = [2, 2]
    r0: int = Field(default=2, ge=1)
    rho_a: float = Field(default=2.0, ge=0)
    rho_b: float = Field(default=3.5, ge=0)
    rho_z: float = Field(default=0.1, ge=0)
    sigma0_sq: float = Field(default=1.0, ge=0)
    a_range: Tuple[int, int] = (1, 1)
    seed: int = 1
    structure_seed: Optional[int] = None

    @model_validator(mode="after")
    def _check_invariants(self) -> "SimConfig":
        if not self.n or any(n_s < 1 for n_s in self.n):
            raise InvalidConfigError(f"sample sizes must be positive, got {self.n}")
        if len(self.qs) != len(self.n) or any(q_s < 1 for q_s in self.qs):
            raise InvalidConfigError(f"qs must hold one positive entry per study, got {self.qs}")
        if self.q + self.qs[0] > self.p or max(self.qs) > self.p:
            raise InvalidConfigError(f"q + qs_1 and every qs_s must not exceed p = {self.p}")
        if self.r0 > min(self.p, self.d):
            raise InvalidConfigError(f"r0 {self.r0} exceeds min(p, d) = {min(self.p, self.d)}")
        low, high = self.a_range
        if not 1 <= low <= high:
            raise InvalidConfigError(f"a_range must satisfy 1 <= a <= b, got {self.a_range}")
        return self

    @property
    def S(self) -> int:
        return len(self.n)

    def resolved_structure_seed(self) -> int:
        """
        Seed of the fixed parameters. Configurations differing only in `seed` share it.
        """
        if self.structure_seed is not None:
            return self.structure_seed
        payload = self.model_dump(mode="json", exclude={"seed", "structure_seed"})
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
        return int(digest[:16], 16)


class SimTruth(Schema):
    """
    Ground truth of a simulated dataset, used for scoring.
    """

    beta0: FloatArray
    A0: FloatArray
    B0: List[FloatArray]
    F: List[FloatArray]
    H: List[FloatArray]
    sigma0_sq: float


def make_generator(seed: int) -> np.random.Generator:
    """PCG64 stream seeded with `seed`."""
    return np.random.Generator(np.random.PCG64(seed))


def scaled_left_factors(rng: np.random.Generator, p: int, k: int, rho: float) -> np.ndarray:
    """
    ρ·U·Λ^½ from the SVD U Λ Vᵀ of a p x k standard Gaussian matrix, with the first nonzero
    entry of every column of U positive.

    Entries are of order ρ·p^{-1/4}; the column Gram matrix is the diagonal ρ²Λ.
    """
    U, singular, _ = np.linalg.svd(rng.standard_normal((p, k)), full_matrices=False)
    U = U * sign_fix(U)
    return rho * U * np.sqrt(singular)


def generate_structure(config: SimConfig) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
    """
    Draw (β₀, A₀, [B_s0]) from the structure seed.
    """
    rng = make_generator(config.resolved_structure_seed())
    p, d, r0 = config.p, config.d, config.r0

    U0 = rng.standard_normal((d, r0))
    V0 = rng.standard_normal((p, r0))
    beta0 = 4.0 * config.rho_z * V0 @ U0.T / p

    first = scaled_left_factors(rng, p, config.q + config.qs[0], config.rho_a)
    A0 = first[:, : config.q]
    B0 = [first[:, config.q :]]
    for q_s in config.qs[1:]:
        B0.append(scaled_left_factors(rng, p, q_s, config.rho_b))
    return beta0, A0, B0


def draw_covariates(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    Z = np.ones((n, d))
    if d > 1:
        chol = np.linalg.cholesky(toeplitz(AR_DECAY ** np.arange(d - 1)))
        Z[:, 1:] = rng.standard_normal((n, d - 1)) @ chol.T
    return Z


def generate(config: SimConfig) -> Tuple[MultiStudyDataset, SimTruth]:
    """
    Simulate a multi-study count dataset.

    β₀, A₀ and B_s0 come from the structure seed and stay fixed across replicate seeds.
    The replicate seed draws, per study and in this order: covariates, shared factors,
    specific factors, noise, normalization factors and counts.

    Raises:
        * `SignalTooStrongError`: some Poisson rate a·e^y exceeds 1e12.
    """
    beta0, A0, B0 = generate_structure(config)
    rng = make_generator(config.seed)
    sigma0 = np.sqrt(config.sigma0_sq)
    low, high = config.a_range

    studies, F, H = [], [], []
    for s, n_s in enumerate(config.n):
        Z = draw_covariates(rng, n_s, config.d)
        F_s = rng.standard_normal((n_s, config.q))
        H_s = rng.standard_normal((n_s, config.qs[s]))
        noise = sigma0 * rng.standard_normal((n_s, config.p))
        a = rng.integers(low, high, size=n_s, endpoint=True).astype(np.float64)

        Y = Z @ beta0.T + F_s @ A0.T + H_s @ B0[s].T + noise
        rate = a[:, None] * np.exp(Y)
        if not np.all(rate <= MAX_RATE):
            i, j = np.unravel_index(np.argmax(rate), rate.shape)
            raise SignalTooStrongError(float(rate[i, j]), s + 1, int(i) + 1, int(j) + 1)
        X = rng.poisson(rate)

        studies.append(StudyData(X=X, Z=Z, a=a, label=str(s + 1)))
        F.append(F_s)
        H.append(H_s)

    logger.debug(f"Simulated {config.S} studies with n={config.n}, p={config.p} (seed {config.seed})")
    data = MultiStudyDataset(studies=studies)
    truth = SimTruth(beta0=beta0, A0=A0, B0=B0, F=F, H=H, sigma0_sq=config.sigma0_sq)
    return data, truth
