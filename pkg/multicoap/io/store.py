"""
Directory layouts of datasets, simulation truth and fits.

Study `s` (1-based) of a dataset directory holds `X_s.csv` (counts, header v1..vp),
`Z_s.csv` (covariates, header z1..zd) and optionally `a_s.csv` (normalization factors).
A simulated dataset also carries `truth/` with beta0, A0, B_s0, F_s and H_s.
"""
import os
import json
from typing import Any, Dict, List

import numpy as np

from ..core.config import FitResult
from ..core.data import MultiStudyDataset, StudyData
from ..core.errors import DataFileError, EmptyDatasetError
from ..simgen.generator import SimTruth
from ..utils.logs import get_logger
from .matrices import read_matrix, read_vector, write_matrix

logger = get_logger(__name__)

TRUTH_DIR = "truth"


def _path(directory: str, name: str, s: int = None) -> str:
    return os.path.join(directory, f"{name}_{s}.csv" if s is not None else f"{name}.csv")


def write_json(path: str, payload: Dict[str, Any]) -> str:
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as f:
            json.dump(payload, f, indent=4)
    except OSError as e:
        raise DataFileError(path, e.strerror or e)
    return path


def read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataFileError(path, e)


def save_dataset(data: MultiStudyDataset, directory: str) -> List[str]:
    paths = []
    for s, study in enumerate(data.studies, start=1):
        paths.append(write_matrix(_path(directory, "X", s), study.X, prefix="v", integer=True))
        paths.append(write_matrix(_path(directory, "Z", s), study.Z, prefix="z"))
        paths.append(write_matrix(_path(directory, "a", s), study.a, header=["a"]))
    return paths


def load_dataset(directory: str) -> MultiStudyDataset:
    """
    Load studies 1, 2, ... until `X_s.csv` is missing. A missing `a_s.csv` means a ≡ 1,
    a missing `Z_s.csv` an intercept-only design.
    """
    if not os.path.isdir(directory):
        raise DataFileError(directory, "not a directory")
    studies = []
    s = 1
    while os.path.exists(_path(directory, "X", s)):
        X, _ = read_matrix(_path(directory, "X", s))
        Z_path, a_path = _path(directory, "Z", s), _path(directory, "a", s)
        Z = read_matrix(Z_path)[0] if os.path.exists(Z_path) else None
        a = read_vector(a_path) if os.path.exists(a_path) else None
        if Z is None:
            studies.append(StudyData.from_arrays(X, a=a, label=str(s)))
        else:
            studies.append(
                StudyData(X=X, Z=Z, a=a if a is not None else np.ones(X.shape[0]), label=str(s))
            )
        s += 1
    if not studies:
        raise EmptyDatasetError(f"no X_1.csv in {directory}")
    logger.debug(f"Loaded {len(studies)} studies from {directory}")
    return MultiStudyDataset(studies=studies)


def save_truth(truth: SimTruth, directory: str) -> List[str]:
    directory = os.path.join(directory, TRUTH_DIR)
    paths = [
        write_matrix(_path(directory, "beta0"), truth.beta0, prefix="z"),
        write_matrix(_path(directory, "A0"), truth.A0, prefix="f"),
    ]
    for s in range(len(truth.B0)):
        paths.append(write_matrix(os.path.join(directory, f"B_{s + 1}0.csv"), truth.B0[s], prefix="h"))
        paths.append(write_matrix(_path(directory, "F", s + 1), truth.F[s], prefix="f"))
        paths.append(write_matrix(_path(directory, "H", s + 1), truth.H[s], prefix="h"))
    write_json(os.path.join(directory, "truth.json"), {"sigma0_sq": truth.sigma0_sq})
    return paths


def load_truth(directory: str) -> SimTruth:
    directory = os.path.join(directory, TRUTH_DIR)
    B0, F, H = [], [], []
    s = 1
    while os.path.exists(_path(directory, "F", s)):
        B0.append(read_matrix(os.path.join(directory, f"B_{s}0.csv"))[0])
        F.append(read_matrix(_path(directory, "F", s))[0])
        H.append(read_matrix(_path(directory, "H", s))[0])
        s += 1
    return SimTruth(
        beta0=read_matrix(_path(directory, "beta0"))[0],
        A0=read_matrix(_path(directory, "A0"))[0],
        B0=B0,
        F=F,
        H=H,
        sigma0_sq=read_json(os.path.join(directory, "truth.json"))["sigma0_sq"],
    )


def save_fit(result: FitResult, directory: str) -> List[str]:
    """
    Write the fitted parameters, the per-study posteriors (S_f, S_h once per study) and
    the ELBO trace. Blocks without columns (q_s = 0) are not written.
    """
    theta = result.params
    paths = [
        write_matrix(_path(directory, "beta"), theta.beta, prefix="z"),
        write_matrix(_path(directory, "A"), theta.A, prefix="f"),
        write_matrix(_path(directory, "lambda"), theta.lam, header=["lambda"]),
        write_matrix(_path(directory, "elbo_trace"), result.elbo_trace, header=["elbo"]),
    ]
    for s, post in enumerate(result.vparams.studies, start=1):
        paths.append(write_matrix(_path(directory, "Mf", s), post.Mf, prefix="f"))
        paths.append(write_matrix(_path(directory, "Sf", s), post.Sf, prefix="f"))
        if theta.B[s - 1].shape[1] > 0:
            paths.append(write_matrix(_path(directory, "B", s), theta.B[s - 1], prefix="h"))
            paths.append(write_matrix(_path(directory, "Mh", s), post.Mh, prefix="h"))
            paths.append(write_matrix(_path(directory, "Sh", s), post.Sh, prefix="h"))
    return paths


def fit_summary(result: FitResult) -> Dict[str, Any]:
    return {
        "converged": result.converged,
        "iterations": result.iterations,
        "elbo": result.elbo,
        "q": result.params.q,
        "qs": result.params.qs,
        "diagnostics": result.diagnostics,
    }
