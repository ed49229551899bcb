from typing import List, Optional, Sequence

import numpy as np
from pydantic import model_validator

from .schema import Schema, CountArray, FloatArray
from .errors import (
    DimensionMismatchError,
    EmptyDatasetError,
    NegativeCountError,
    NonIntegralCountError,
    NonPositiveNormalizerError,
)


class StudyData(Schema):
    """
    Counts, covariates and normalization factors of one study.

    Fields:
        * `X` (`n_s x p`): nonnegative integer counts.
        * `Z` (`n_s x d`): covariates; the first column holds ones when an intercept is used.
        * `a` (`n_s`): positive normalization factors.
        * `label`: name used in error messages and output files.
    """

    X: CountArray
    Z: FloatArray
    a: FloatArray
    label: str = "1"

    @model_validator(mode="after")
    def _check_invariants(self) -> "StudyData":
        check_study(self)
        return self

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def d(self) -> int:
        return self.Z.shape[1]

    @classmethod
    def from_arrays(
        cls,
        X: np.ndarray,
        Z: Optional[np.ndarray] = None,
        a: Optional[np.ndarray] = None,
        label: str = "1",
        intercept: bool = True,
    ) -> "StudyData":
        """
        Build a study, defaulting `a` to ones and `Z` to the intercept column.

        With `intercept=True` a column of ones is prepended to `Z` unless its first
        column already is one.
        """
        X = np.asarray(X)
        n = X.shape[0] if X.ndim == 2 else 0
        if Z is None:
            Z = np.ones((n, 1))
        else:
            Z = np.asarray(Z, dtype=np.float64)
            if Z.ndim == 1:
                Z = Z[:, None]
            if intercept and not (Z.shape[1] > 0 and np.all(Z[:, 0] == 1.0)):
                Z = np.column_stack([np.ones(Z.shape[0]), Z])
        a = np.ones(n) if a is None else np.asarray(a, dtype=np.float64).ravel()
        return cls(X=X, Z=Z, a=a, label=label)


def check_study(study: StudyData, p: Optional[int] = None, d: Optional[int] = None) -> None:
    """
    Raise the matching `DataError` when one study violates its invariants.
    """
    label = study.label
    if study.X.ndim != 2:
        raise DimensionMismatchError(label, "X.ndim", 2, study.X.ndim)
    if study.Z.ndim != 2:
        raise DimensionMismatchError(label, "Z.ndim", 2, study.Z.ndim)
    if study.a.ndim != 1:
        raise DimensionMismatchError(label, "a.ndim", 1, study.a.ndim)

    n = study.X.shape[0]
    if n == 0 or study.X.shape[1] == 0:
        raise EmptyDatasetError(f"study {label} has shape {study.X.shape}")
    if study.Z.shape[0] != n:
        raise DimensionMismatchError(label, "rows of Z", n, study.Z.shape[0])
    if study.a.shape[0] != n:
        raise DimensionMismatchError(label, "length of a", n, study.a.shape[0])
    if p is not None and study.X.shape[1] != p:
        raise DimensionMismatchError(label, "p (columns of X)", p, study.X.shape[1])
    if d is not None and study.Z.shape[1] != d:
        raise DimensionMismatchError(label, "d (columns of Z)", d, study.Z.shape[1])

    if study.X.dtype.kind != "i":
        raise NonIntegralCountError(label)
    if study.X.min() < 0:
        raise NegativeCountError(label, int(study.X.min()))
    if not np.all(np.isfinite(study.Z)):
        raise DimensionMismatchError(label, "finite Z entries", "finite", "non-finite")
    if not np.all(np.isfinite(study.a)) or study.a.min() <= 0:
        raise NonPositiveNormalizerError(label, float(study.a.min()))


class MultiStudyDataset(Schema):
    """
    Ordered collection of studies sharing the variables (`p`) and the covariates (`d`).
    """

    studies: List[StudyData]

    @model_validator(mode="after")
    def _check_invariants(self) -> "MultiStudyDataset":
        validate_dataset(self)
        return self

    @property
    def S(self) -> int:
        return len(self.studies)

    @property
    def p(self) -> int:
        return self.studies[0].p

    @property
    def d(self) -> int:
        return self.studies[0].d

    @property
    def n(self) -> List[int]:
        return [study.n for study in self.studies]

    @property
    def n_total(self) -> int:
        return int(sum(self.n))

    def __len__(self) -> int:
        return self.S

    def __iter__(self):
        return iter(self.studies)

    def __getitem__(self, s: int) -> StudyData:
        return self.studies[s]

    @classmethod
    def from_arrays(
        cls,
        X: Sequence[np.ndarray],
        Z: Optional[Sequence[np.ndarray]] = None,
        a: Optional[Sequence[Optional[np.ndarray]]] = None,
        intercept: bool = True,
    ) -> "MultiStudyDataset":
        """
        Build a dataset from per-study arrays; studies are labelled 1..S.
        """
        S = len(X)
        Z = [None] * S if Z is None else list(Z)
        a = [None] * S if a is None else list(a)
        if len(Z) != S or len(a) != S:
            raise DimensionMismatchError("-", "number of studies", S, f"Z={len(Z)}, a={len(a)}")
        studies = [
            StudyData.from_arrays(X[s], Z[s], a[s], label=str(s + 1), intercept=intercept)
            for s in range(S)
        ]
        return cls(studies=studies)


def validate_dataset(data: MultiStudyDataset) -> None:
    """
    Return normally iff every study invariant holds and all studies agree on `p` and `d`.

    Raises:
        * `DimensionMismatchError`: naming the offending study and axis.
        * `NegativeCountError` / `NonIntegralCountError`: invalid counts.
        * `NonPositiveNormalizerError`: some `a_si <= 0`.
        * `EmptyDatasetError`: no studies.
    """
    if len(data.studies) == 0:
        raise EmptyDatasetError("no studies")
    first = data.studies[0]
    check_study(first)
    for study in data.studies[1:]:
        check_study(study, p=first.p, d=first.d)
