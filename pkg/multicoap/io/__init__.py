from .matrices import read_matrix, read_vector, write_matrix
from .store import (
    fit_summary,
    load_dataset,
    load_truth,
    read_json,
    save_dataset,
    save_fit,
    save_truth,
    write_json,
)
from .manifest import RunManifest
