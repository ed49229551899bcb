import os
import json
from typing import Any, Dict, List, Optional, Union

import yaml
import numpy as np
from pydantic import Field, ValidationError, field_validator

from .schema import Schema, FloatArray
from .params import ModelParams, VariationalParams
from .errors import ConfigFileError, IdentifiabilityBoundError, InvalidConfigError

ConfigType = Union[str, os.PathLike, Dict[str, Any]]


def read_config(path_or_dict: ConfigType) -> Dict[str, Any]:
    """
    Load a configuration mapping from a JSON or YAML file, or pass a dictionary through.
    """
    if isinstance(path_or_dict, dict):
        return dict(path_or_dict)
    if not isinstance(path_or_dict, (str, os.PathLike)):
        raise InvalidConfigError("configuration must be a path or a dictionary")

    path = str(path_or_dict)
    if not os.path.exists(path):
        raise ConfigFileError(path, "file not found")
    with open(path, "r") as f:
        try:
            if path.endswith((".yaml", ".yml")):
                payload = yaml.safe_load(f)
            elif path.endswith(".json"):
                payload = json.load(f)
            else:
                raise ConfigFileError(path, f"unsupported format `{path.rsplit('.', 1)[-1]}`")
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigFileError(path, e)
    if not isinstance(payload, dict):
        raise ConfigFileError(path, "top level must be a mapping")
    return payload


class Config(Schema):
    """
    Base of all tuning-knob models; adds loading from files and mappings.
    """

    @classmethod
    def from_config(cls, path_or_dict: ConfigType, **overrides: Any) -> "Config":
        """
        Create a configuration from a path or dictionary. `overrides` that are not
        `None` take precedence over the file.
        """
        payload = read_config(path_or_dict)
        payload.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls.model_validate(payload)
        except ValidationError as e:
            raise InvalidConfigError(f"{cls.__name__}: {e}")


class FitConfig(Config):
    """
    Tuning knobs of the variational EM fit.

    Fields:
        * `q`: number of study-shared factors (>= 1).
        * `qs`: number of study-specific factors per study (>= 0 each).
        * `rank`: optional rank constraint on beta.
        * `max_iter`, `eps`: stop after `max_iter` cycles or when the relative ELBO change drops below `eps`.
        * `seed`: seed of the initialization jitter.
        * `threads`: workers for per-study updates; results do not depend on it.
    """

    q: int = Field(ge=1)
    qs: List[int]
    rank: Optional[int] = Field(default=None, ge=1)
    max_iter: int = Field(default=200, ge=1)
    eps: float = Field(default=1e-5, gt=0)
    seed: int = 1
    threads: int = Field(default=1, ge=1)

    @field_validator("qs")
    @classmethod
    def _nonnegative_qs(cls, qs: List[int]) -> List[int]:
        if any(q_s < 0 for q_s in qs):
            raise ValueError(f"qs must be nonnegative, got {qs}")
        return qs

    def check(self, S: int, p: int, d: int) -> None:
        """
        Check the invariants that depend on the data dimensions.

        Raises:
            * `InvalidConfigError`: wrong number of `qs` entries or `rank > min(p, d)`.
            * `IdentifiabilityBoundError`: `p - 1 > q + q_s` fails for some study.
        """
        if len(self.qs) != S:
            raise InvalidConfigError(f"qs has {len(self.qs)} entries but the data has {S} studies")
        for s, q_s in enumerate(self.qs):
            if not p - 1 > self.q + q_s:
                raise IdentifiabilityBoundError(s + 1, p, self.q, q_s)
        if self.rank is not None and self.rank > min(p, d):
            raise InvalidConfigError(f"rank {self.rank} exceeds min(p, d) = {min(p, d)}")


class FitResult(Schema):
    """
    Output of `fit`: identifiable parameters, variational parameters, ELBO trace and
    diagnostics (initial ELBO, cross-block inner products, monotonicity violations, timings).
    """

    params: ModelParams
    vparams: VariationalParams
    elbo_trace: FloatArray
    converged: bool
    iterations: int
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @property
    def elbo(self) -> float:
        return float(self.elbo_trace[-1])

    @property
    def Mf(self) -> List[np.ndarray]:
        return [post.Mf for post in self.vparams.studies]

    @property
    def Mh(self) -> List[np.ndarray]:
        return [post.Mh for post in self.vparams.studies]
