from typing import Any, Dict, List

import numpy as np
from pydantic import model_validator

from .schema import Schema, FloatArray
from .errors import DimensionMismatchError, InvalidConfigError, NonSPDGramError


def _is_spd(M: np.ndarray) -> bool:
    if M.shape[0] == 0:
        return True
    if not np.allclose(M, M.T, rtol=1e-10, atol=1e-12):
        return False
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return False
    return True


class ModelParams(Schema):
    """
    Model parameters θ: covariate coefficients `beta` (p x d), shared loadings `A` (p x q),
    study-specific loadings `B[s]` (p x q_s) and overdispersion variances `lam` (S).
    """

    beta: FloatArray
    A: FloatArray
    B: List[FloatArray]
    lam: FloatArray

    @model_validator(mode="before")
    @classmethod
    def _restore_empty_shapes(cls, values: Any) -> Any:
        if isinstance(values, dict) and "A" in values and "B" in values:
            p = np.asarray(values["A"]).shape[0] if np.asarray(values["A"]).ndim == 2 else None
            if p is not None:
                values = dict(values)
                values["B"] = [
                    np.zeros((p, 0)) if np.asarray(b).size == 0 else b for b in values["B"]
                ]
        return values

    @model_validator(mode="after")
    def _check_invariants(self) -> "ModelParams":
        if self.A.ndim != 2 or self.beta.ndim != 2:
            raise DimensionMismatchError("-", "beta/A ndim", 2, (self.beta.ndim, self.A.ndim))
        p = self.A.shape[0]
        if self.beta.shape[0] != p:
            raise DimensionMismatchError("-", "rows of beta", p, self.beta.shape[0])
        if self.lam.ndim != 1 or self.lam.shape[0] != len(self.B):
            raise DimensionMismatchError("-", "length of lambda", len(self.B), self.lam.shape)
        for s, B_s in enumerate(self.B):
            if B_s.ndim != 2 or B_s.shape[0] != p:
                raise DimensionMismatchError(s + 1, "rows of B", p, B_s.shape)
        if not np.all(np.isfinite(self.lam)) or np.any(self.lam <= 0):
            raise InvalidConfigError(f"lambda must be positive, got {self.lam.tolist()}")
        return self

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def q(self) -> int:
        return self.A.shape[1]

    @property
    def qs(self) -> List[int]:
        return [B_s.shape[1] for B_s in self.B]

    @property
    def S(self) -> int:
        return len(self.B)


class StudyPosterior(Schema):
    """
    Variational parameters of one study.

    `M`/`V` hold μ_sij and σ²_sij (n_s x p); `Mf`/`Mh` the posterior factor means
    (n_s x q, n_s x q_s). `Sf`/`Sh` are stored once per study because they depend on
    (A, λ_s) and (B_s, λ_s) only.
    """

    M: FloatArray
    V: FloatArray
    Mf: FloatArray
    Sf: FloatArray
    Mh: FloatArray
    Sh: FloatArray

    @model_validator(mode="before")
    @classmethod
    def _restore_empty_shapes(cls, values: Any) -> Any:
        if isinstance(values, dict):
            values = dict(values)
            n = np.asarray(values.get("M")).shape[0]
            if np.asarray(values.get("Sh")).size == 0:
                values["Sh"] = np.zeros((0, 0))
            if np.asarray(values.get("Mh")).size == 0:
                values["Mh"] = np.zeros((n, 0))
        return values

    @model_validator(mode="after")
    def _check_invariants(self) -> "StudyPosterior":
        n, p = self.M.shape
        if self.V.shape != (n, p):
            raise DimensionMismatchError("-", "shape of sigma2", (n, p), self.V.shape)
        if not np.all(self.V > 0):
            raise InvalidConfigError("all variational variances sigma2 must be positive")
        q, qs = self.Sf.shape[0], self.Sh.shape[0]
        if self.Mf.shape != (n, q) or self.Mh.shape != (n, qs):
            raise DimensionMismatchError("-", "factor means", ((n, q), (n, qs)), (self.Mf.shape, self.Mh.shape))
        if not _is_spd(self.Sf):
            raise NonSPDGramError("S_f is not symmetric positive definite")
        if not _is_spd(self.Sh):
            raise NonSPDGramError("S_h is not symmetric positive definite")
        return self


class VariationalParams(Schema):
    """
    Variational parameters ξ, one `StudyPosterior` per study.
    """

    studies: List[StudyPosterior]

    def __getitem__(self, s: int) -> StudyPosterior:
        return self.studies[s]

    def __len__(self) -> int:
        return len(self.studies)

    def with_study(self, s: int, **changes: Any) -> "VariationalParams":
        """Return a copy in which study `s` has the given fields replaced."""
        studies = list(self.studies)
        studies[s] = studies[s].replace(**changes)
        return VariationalParams(studies=studies)

    def with_studies(self, updates: Dict[int, Dict[str, Any]]) -> "VariationalParams":
        """Return a copy with several studies updated at once."""
        studies = list(self.studies)
        for s, changes in updates.items():
            studies[s] = studies[s].replace(**changes)
        return VariationalParams(studies=studies)
