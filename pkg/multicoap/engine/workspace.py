from typing import List, Optional, Tuple

import numpy as np

from ..core.data import MultiStudyDataset
from ..core.errors import DimensionMismatchError
from ..core.params import ModelParams, StudyPosterior


class EStepWorkspace:
    """
    Preallocated per-study buffers for the linear predictor
    z̃_sij = z_siᵀβ_j + α_jᵀm_f,si + γ_sjᵀm_h,si and the working residuals.

    A workspace is bound to one dataset and is not shared between concurrent fits;
    per-study buffers are disjoint, so study-level updates may run in parallel.
    """

    def __init__(self, data: MultiStudyDataset) -> None:
        self.shapes: List[Tuple[int, int]] = [(study.n, study.p) for study in data]
        self.xb: List[np.ndarray] = [np.empty(shape) for shape in self.shapes]
        self.ztilde: List[np.ndarray] = [np.empty(shape) for shape in self.shapes]
        self.resid: List[np.ndarray] = [np.empty(shape) for shape in self.shapes]

    def check(self, data: MultiStudyDataset) -> None:
        for s, study in enumerate(data):
            if self.shapes[s] != (study.n, study.p):
                raise DimensionMismatchError(study.label, "workspace buffer", self.shapes[s], (study.n, study.p))

    def covariate_part(self, s: int, Z: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """Z_s βᵀ written into the study buffer."""
        return np.matmul(Z, beta.T, out=self.xb[s])

    def linear_predictor(
        self, s: int, Z: np.ndarray, theta: ModelParams, post: StudyPosterior
    ) -> np.ndarray:
        """z̃ = Z_s βᵀ + M_f Aᵀ + M_h B_sᵀ written into the study buffer."""
        out = self.ztilde[s]
        np.matmul(Z, theta.beta.T, out=out)
        out += post.Mf @ theta.A.T
        if theta.B[s].shape[1] > 0:
            out += post.Mh @ theta.B[s].T
        return out

    def residual(
        self,
        s: int,
        Z: np.ndarray,
        theta: ModelParams,
        post: StudyPosterior,
        leave_in: Optional[str] = None,
    ) -> np.ndarray:
        """
        μ minus the linear predictor, except for the component named by `leave_in`
        ("covariates", "shared" or "specific"); e.g. `leave_in="shared"` gives
        μ − Zβᵀ − M_h B_sᵀ. The buffer is overwritten by the next call for the same study.
        """
        out = self.resid[s]
        np.copyto(out, post.M)
        if leave_in != "covariates":
            out -= Z @ theta.beta.T
        if leave_in != "shared":
            out -= post.Mf @ theta.A.T
        if leave_in != "specific" and theta.B[s].shape[1] > 0:
            out -= post.Mh @ theta.B[s].T
        return out


def ensure_workspace(data: MultiStudyDataset, workspace: Optional[EStepWorkspace]) -> EStepWorkspace:
    if workspace is None:
        return EStepWorkspace(data)
    workspace.check(data)
    return workspace
