from .scenarios import Cell, ScenarioNotFound, Selection, scenarios
from .harness import BenchmarkConfig, run_benchmark, run_replicate, summarize, table_layout
