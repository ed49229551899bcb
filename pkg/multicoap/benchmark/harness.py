import os
import time
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import Field
from tqdm import tqdm

from ..core.config import Config, FitConfig
from ..core.errors import MultiCoapError
from ..engine.machine import fit
from ..metrics.trace import score
from ..selection.cup import select_factors
from ..simgen.generator import generate
from ..utils.logs import get_logger
from .scenarios import Cell, scenarios

logger = get_logger(__name__)

RESULTS_NAME = "results.csv"
SUMMARY_NAME = "summary.csv"
RESULT_COLUMNS = ["scenario", "cell", "replicate", "seed", "metric", "value", "error"]
SUMMARY_STATS = ("mean", "sd", "n")


class BenchmarkConfig(Config):
    """
    Settings of a benchmark run. Replicate `k` (0-based) simulates with seed `seed + k`;
    the fixed parameters of every cell come from its structure seed.
    """

    scenario: str
    replicates: int = Field(default=20, ge=1)
    seed: int = 1
    max_iter: int = Field(default=200, ge=1)
    eps: float = Field(default=1e-5, gt=0)
    threads: int = Field(default=1, ge=1)


def run_replicate(cell: Cell, seed: int, config: BenchmarkConfig) -> Dict[str, float]:
    """
    Simulate, optionally select (q, q_s), fit and score one replicate.
    """
    data, truth = generate(cell.sim.replace(seed=seed))
    fit_config = FitConfig(
        q=cell.fit_q,
        qs=cell.fit_qs,
        rank=cell.fit_rank,
        max_iter=config.max_iter,
        eps=config.eps,
        seed=seed,
        threads=config.threads,
    )

    metrics: Dict[str, float] = {}
    start = time.perf_counter()
    if cell.selection is not None:
        selection = select_factors(
            data, cell.selection.q_max, cell.selection.qs_max, cell.selection.tau, fit_config
        )
        metrics["q_hat"] = selection.q_hat
        for s, q_s in enumerate(selection.qs_hat, start=1):
            metrics[f"qs_hat_{s}"] = q_s
        fit_config = fit_config.replace(q=selection.q_hat, qs=list(selection.qs_hat))

    result = fit(data, fit_config)
    metrics["fit_seconds"] = time.perf_counter() - start
    metrics.update(score(result, truth).metrics())
    metrics["converged"] = float(result.converged)
    metrics["iterations"] = result.iterations
    metrics["elbo_decreases"] = len(result.diagnostics.get("elbo_decreases", []))
    return metrics


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """
    Mean, SD and number of successful replicates per (metric, cell); SD is missing with
    a single replicate.
    """
    ok = results[results["metric"] != "failure"]
    summary = (
        ok.groupby(["metric", "cell"], sort=False)["value"]
        .agg(mean="mean", sd="std", n="count")
        .reset_index()
    )
    return summary


def table_layout(summary: pd.DataFrame) -> pd.DataFrame:
    """
    Pivot the long summary to one row per metric and `<cell> mean`, `<cell> sd`, `<cell> n`
    columns per cell, metrics and cells in order of appearance.
    """
    if summary.empty:
        return pd.DataFrame(columns=["metric"])
    metrics = list(dict.fromkeys(summary["metric"]))
    cells = list(dict.fromkeys(summary["cell"]))
    columns = [(stat, cell) for cell in cells for stat in SUMMARY_STATS]

    wide = summary.pivot(index="metric", columns="cell", values=list(SUMMARY_STATS))
    wide = wide.reindex(index=metrics, columns=pd.MultiIndex.from_tuples(columns, names=[None, "cell"]))
    wide.columns = [f"{cell} {stat}" for stat, cell in columns]
    return wide.rename_axis("metric").reset_index()


def run_benchmark(
    config: BenchmarkConfig, out_dir: Optional[str] = None
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Run every cell of the scenario for `config.replicates` replicates.

    A failing replicate is logged and recorded as a `failure` row; the run continues.
    Returns the long results and the `table_layout` summary. With `out_dir`, writes them
    to `results.csv` and `summary.csv`.
    """
    cells = scenarios.cells(config.scenario)
    rows: List[Dict[str, Any]] = []

    progress = tqdm(total=len(cells) * config.replicates, desc=config.scenario, leave=False)
    for cell in cells:
        for replicate in range(config.replicates):
            seed = config.seed + replicate
            base = {"scenario": config.scenario, "cell": cell.label, "replicate": replicate, "seed": seed}
            try:
                metrics = run_replicate(cell, seed, config)
            except (MultiCoapError, ArithmeticError, ValueError) as e:
                logger.error(f"{cell.label}, replicate {replicate}: {e}")
                rows.append({**base, "metric": "failure", "value": np.nan, "error": f"{type(e).__name__}: {e}"})
            else:
                rows.extend({**base, "metric": k, "value": float(v), "error": ""} for k, v in metrics.items())
            progress.update(1)
    progress.close()

    results = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    summary = table_layout(summarize(results))

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        results.to_csv(os.path.join(out_dir, RESULTS_NAME), index=False, float_format="%.17g")
        summary.to_csv(os.path.join(out_dir, SUMMARY_NAME), index=False, na_rep="")
        logger.info(f"Wrote {RESULTS_NAME} and {SUMMARY_NAME} to {out_dir}")
    return results, summary
