import os
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DataFileError

# Seventeen significant digits reproduce every float64 exactly
FLOAT_FORMAT = "%.17g"
COUNT_FORMAT = "%d"


def column_names(prefix: str, k: int) -> List[str]:
    return [f"{prefix}{j + 1}" for j in range(k)]


def write_matrix(
    path: str,
    M: np.ndarray,
    header: Optional[Sequence[str]] = None,
    prefix: str = "v",
    integer: bool = False,
) -> str:
    """
    Write a matrix (or a vector, as one column) as comma-separated values with a header row.
    """
    M = np.asarray(M)
    if M.ndim == 1:
        M = M[:, None]
    header = list(header) if header is not None else column_names(prefix, M.shape[1])
    if len(header) != M.shape[1]:
        raise DataFileError(path, f"{len(header)} header names for {M.shape[1]} columns")
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        np.savetxt(
            path,
            M,
            delimiter=",",
            header=",".join(header),
            comments="",
            fmt=COUNT_FORMAT if integer else FLOAT_FORMAT,
        )
    except OSError as e:
        raise DataFileError(path, e.strerror or e)
    return path


def read_matrix(path: str) -> Tuple[np.ndarray, List[str]]:
    """
    Read a file written by `write_matrix`; returns the 2-D array and the header names.
    """
    if not os.path.exists(path):
        raise DataFileError(path, "file not found")
    try:
        with open(path, "r") as f:
            header = f.readline().strip()
        M = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except (OSError, ValueError) as e:
        raise DataFileError(path, e)
    names = header.split(",") if header else []
    if M.size == 0:
        M = np.zeros((0, len(names)))
    return M, names


def read_vector(path: str) -> np.ndarray:
    M, _ = read_matrix(path)
    if M.shape[1] != 1:
        raise DataFileError(path, f"expected one column, found {M.shape[1]}")
    return M[:, 0]
