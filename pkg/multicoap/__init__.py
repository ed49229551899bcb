import sys
from typing import TYPE_CHECKING

from .utils.imports import LazyModule

__version__ = "0.1.0"

_import_structure = {
    "core": {
        "data": ["StudyData", "MultiStudyDataset", "validate_dataset"],
        "params": ["ModelParams", "VariationalParams", "StudyPosterior"],
        "config": ["FitConfig", "FitResult"],
        "schema": ["Schema"],
    },
    "engine": {
        "machine": ["VariationalEM", "fit"],
        "elbo": ["elbo"],
        "identifiability": ["apply_identifiability"],
        "init": ["init_params"],
    },
    "rrr": {
        "rrr": ["reduced_rank_beta", "select_rank", "RankSelection"],
    },
    "selection": {
        "cut": ["cup_cut"],
        "cup": ["select_factors", "FactorSelection"],
    },
    "simgen": {
        "generator": ["SimConfig", "SimTruth", "generate"],
    },
    "metrics": {
        "trace": ["trace_statistic", "beta_error", "score", "ScoreReport"],
    },
    "benchmark": {
        "harness": ["BenchmarkConfig", "run_benchmark"],
    },
    "io": {
        "store": ["load_dataset", "save_dataset", "save_fit"],
        "manifest": ["RunManifest"],
    },
}


if TYPE_CHECKING:

    # Core
    from .core.data import StudyData, MultiStudyDataset, validate_dataset
    from .core.params import ModelParams, VariationalParams, StudyPosterior
    from .core.config import FitConfig, FitResult
    from .core.schema import Schema

    # Engine
    from .engine.machine import VariationalEM, fit
    from .engine.elbo import elbo
    from .engine.identifiability import apply_identifiability
    from .engine.init import init_params

    # Selection
    from .rrr.rrr import reduced_rank_beta, select_rank, RankSelection
    from .selection.cut import cup_cut
    from .selection.cup import select_factors, FactorSelection

    # Simulation & scoring
    from .simgen.generator import SimConfig, SimTruth, generate
    from .metrics.trace import trace_statistic, beta_error, score, ScoreReport
    from .benchmark.harness import BenchmarkConfig, run_benchmark

    # I/O
    from .io.store import load_dataset, save_dataset, save_fit
    from .io.manifest import RunManifest

else:
    sys.modules[__name__] = LazyModule(
        __name__,
        globals()["__file__"],
        _import_structure,
        module_spec=__spec__,
        extra_objects={"__version__": __version__},
    )
