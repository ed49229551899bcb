from .schema import Schema
from .data import StudyData, MultiStudyDataset, validate_dataset
from .params import ModelParams, VariationalParams, StudyPosterior
from .config import FitConfig, FitResult, read_config
