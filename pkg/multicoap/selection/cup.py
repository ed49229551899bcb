from typing import List, Optional, Union

import numpy as np
from pydantic import Field

from ..core.config import FitConfig
from ..core.data import MultiStudyDataset
from ..core.errors import InvalidConfigError
from ..core.schema import Schema, FloatArray
from ..engine.machine import fit
from ..rrr.rrr import RankSelection, select_rank
from ..utils.logs import get_logger
from .cut import DEFAULT_TAU, cup_cut

logger = get_logger(__name__)


class FactorSelection(Schema):
    """
    Numbers of factors chosen by the cumulative variance proportion rule, with the
    column energies they were read from.

    Fields:
        * `q_hat`, `qs_hat`: selected shared / per-study specific factor counts.
        * `nu_f`: ν_{f,k} = Σ_j α²_jk of the identifiable Â (length q_max).
        * `nu_h`: per study, ν_{h,sk} = Σ_j γ²_sjk of B̂_s (length q_{s,max}).
        * `rank`: selection of r when `r_max` was given.
    """

    q_hat: int = Field(ge=1)
    qs_hat: List[int]
    nu_f: FloatArray
    nu_h: List[FloatArray]
    tau: float = DEFAULT_TAU
    rank: Optional[RankSelection] = None
    elbo: float
    converged: bool


def column_energy(L: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(L) ** 2, axis=0)


def select_factors(
    data: MultiStudyDataset,
    q_max: int,
    qs_max: Union[int, List[int]],
    tau: float = DEFAULT_TAU,
    fit_config_base: Optional[FitConfig] = None,
    r_max: Optional[int] = None,
) -> FactorSelection:
    """
    Fit once at (q_max, qs_max) and cut the variance-ordered loading columns.

    `fit_config_base` supplies the remaining knobs (max_iter, eps, seed, threads, rank);
    its q and qs are overridden. When `r_max` is given the fit uses rank r_max and
    r is chosen from the eigenvalues of β̂ᵀβ̂. No refit at the selected values.
    """
    qs_max = [qs_max] * data.S if isinstance(qs_max, int) else list(qs_max)
    if len(qs_max) != data.S:
        raise InvalidConfigError(f"qs_max has {len(qs_max)} entries but the data has {data.S} studies")

    base = fit_config_base.to_dict() if fit_config_base is not None else {}
    base.update(q=q_max, qs=qs_max)
    if r_max is not None:
        base["rank"] = r_max
    config = FitConfig.from_config(base)

    result = fit(data, config)
    theta = result.params

    nu_f = column_energy(theta.A)
    q_hat = cup_cut(nu_f, tau)

    nu_h, qs_hat = [], []
    for s, B_s in enumerate(theta.B):
        energy = column_energy(B_s)
        nu_h.append(energy)
        # Studies fitted without specific factors select none
        qs_hat.append(cup_cut(energy, tau) if energy.size else 0)

    rank = select_rank(theta.beta, r_max, tau) if r_max is not None else None
    logger.info(
        f"Selected q={q_hat}, q_s={qs_hat}"
        + (f", r={rank.r_hat}" if rank is not None else "")
        + f" (tau={tau})"
    )

    return FactorSelection(
        q_hat=q_hat,
        qs_hat=qs_hat,
        nu_f=nu_f,
        nu_h=nu_h,
        tau=tau,
        rank=rank,
        elbo=result.elbo,
        converged=result.converged,
    )
