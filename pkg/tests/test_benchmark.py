import os

import numpy as np
import pandas as pd
import pytest

from multicoap.benchmark import BenchmarkConfig, run_benchmark, summarize, table_layout
from multicoap.benchmark.scenarios import ScenarioNotFound, scenarios

BUILTIN_SCENARIOS = {
    "example1-n": 3,
    "example1-p": 3,
    "example2": 3,
    "example3": 3,
    "example4": 3,
    "example5": 2,
    "example5-misspecified": 6,
}


def test_registered_scenarios():
    for name, size in BUILTIN_SCENARIOS.items():
        cells = scenarios.cells(name)
        assert len(cells) == size
        assert len({cell.label for cell in cells}) == len(cells)
    assert [cell.fit_qs for cell in scenarios.cells("example5-misspecified")][3:] == [[1, 1], [2, 2], [4, 4]]
    assert all(cell.selection is not None for cell in scenarios.cells("example5"))


def test_unknown_scenario():
    with pytest.raises(ScenarioNotFound, match="example1-n"):
        scenarios.cells("nope")


def test_cells_share_structure_across_replicates():
    cell = scenarios.cells("example4")[0]
    assert cell.sim.resolved_structure_seed() == cell.sim.replace(seed=5).resolved_structure_seed()
    assert cell.fit_rank == 3


def test_summarize_single_replicate():
    results = pd.DataFrame(
        {
            "scenario": ["s"] * 3,
            "cell": ["c1", "c1", "c2"],
            "replicate": [0, 0, 0],
            "seed": [1, 1, 1],
            "metric": ["A_tr", "failure", "A_tr"],
            "value": [0.9, np.nan, 0.8],
            "error": ["", "NonFiniteElboError: x", ""],
        }
    )
    summary = summarize(results)
    assert list(summary["cell"]) == ["c1", "c2"]
    assert list(summary["n"]) == [1, 1]
    assert summary["sd"].isna().all()
    np.testing.assert_allclose(summary["mean"], [0.9, 0.8])

    table = table_layout(summary)
    assert list(table.columns) == ["metric", "c1 mean", "c1 sd", "c1 n", "c2 mean", "c2 sd", "c2 n"]
    assert list(table["metric"]) == ["A_tr"]
    assert table["c1 sd"].isna().all()


def test_table_layout_has_one_row_per_metric():
    summary = pd.DataFrame(
        {
            "metric": ["A_tr", "A_tr", "q_hat"],
            "cell": ["p=50", "p=100", "p=100"],
            "mean": [0.99, 0.98, 3.0],
            "sd": [0.01, 0.02, 0.0],
            "n": [20, 19, 19],
        }
    )
    table = table_layout(summary).set_index("metric")
    assert list(table.index) == ["A_tr", "q_hat"]
    assert list(table.columns) == ["p=50 mean", "p=50 sd", "p=50 n", "p=100 mean", "p=100 sd", "p=100 n"]
    assert table.loc["A_tr", "p=100 mean"] == 0.98
    assert table.loc["A_tr", "p=50 n"] == 20
    assert np.isnan(table.loc["q_hat", "p=50 mean"])


def test_run_benchmark(tmp_path, tiny_scenarios):
    config = BenchmarkConfig(scenario="tiny", replicates=2, seed=3, max_iter=30)
    results, summary = run_benchmark(config, str(tmp_path))

    assert set(results["cell"]) == {"fixed", "selected"}
    assert set(results["seed"]) == {3, 4}
    assert "failure" not in set(results["metric"])
    selected = results[results["cell"] == "selected"]
    assert {"q_hat", "qs_hat_1", "qs_hat_2", "A_tr"} <= set(selected["metric"])
    assert "q_hat" not in set(results[results["cell"] == "fixed"]["metric"])

    a_tr = summary.set_index("metric").loc["A_tr"]
    assert a_tr["fixed n"] == 2 and 0.0 <= a_tr["fixed mean"] <= 1.0
    assert np.isnan(summary.set_index("metric").loc["q_hat", "fixed mean"])

    on_disk = pd.read_csv(os.path.join(tmp_path, "results.csv"), float_precision="round_trip")
    np.testing.assert_array_equal(on_disk["value"].to_numpy(), results["value"].to_numpy())
    table = pd.read_csv(os.path.join(tmp_path, "summary.csv"))
    assert list(table.columns[:4]) == ["metric", "fixed mean", "fixed sd", "fixed n"]
    assert list(table["metric"]) == list(summary["metric"])


def test_run_benchmark_is_reproducible(tiny_scenarios):
    config = BenchmarkConfig(scenario="tiny", replicates=1, max_iter=10)
    first, _ = run_benchmark(config)
    second, _ = run_benchmark(config)
    keep = first["metric"] != "fit_seconds"
    pd.testing.assert_frame_equal(first[keep], second[keep])


def test_failing_replicates_are_recorded(tiny_scenarios):
    results, summary = run_benchmark(BenchmarkConfig(scenario="tiny-failing", replicates=2, max_iter=10))
    failures = results[results["metric"] == "failure"]
    assert len(failures) == 2
    assert set(failures["cell"]) == {"too-strong"}
    assert failures["error"].str.startswith("SignalTooStrongError").all()
    assert "ok mean" in summary.columns
    assert not any(column.startswith("too-strong") for column in summary.columns)


def _means(summary, metric):
    row = summary.set_index("metric").loc[metric]
    return {column[: -len(" mean")]: value for column, value in row.items() if column.endswith(" mean")}


@pytest.mark.slow
def test_example1_recovery_at_p100():
    _, summary = run_benchmark(BenchmarkConfig(scenario="example1-p", replicates=20))
    assert _means(summary, "A_tr")["p=100"] >= 0.97
    assert _means(summary, "F_tr")["p=100"] >= 0.91
    assert _means(summary, "B_tr")["p=100"] >= 0.78
    assert _means(summary, "H_tr")["p=100"] >= 0.68
    assert _means(summary, "beta_er")["p=100"] <= 0.15


@pytest.mark.slow
def test_example1_beta_error_shrinks_with_sample_size():
    _, summary = run_benchmark(BenchmarkConfig(scenario="example1-n", replicates=20))
    beta_er = _means(summary, "beta_er")
    assert 0.35 <= beta_er["n=(200,300)"] / beta_er["n=(50,80)"] <= 0.80


@pytest.mark.slow
def test_example2_overdispersion_trend():
    _, summary = run_benchmark(BenchmarkConfig(scenario="example2", replicates=20))
    a_tr = _means(summary, "A_tr")
    values = [a_tr[f"sigma0_sq={sigma}"] for sigma in (1, 4, 8)]
    assert values[0] > values[1] > values[2] >= 0.88
    assert _means(summary, "H_tr")["sigma0_sq=8"] >= 0.25


@pytest.mark.slow
def test_example5_selects_the_true_numbers():
    results, _ = run_benchmark(BenchmarkConfig(scenario="example5", replicates=20))
    first = results[results["cell"] == "sigma0_sq=1"]
    q_hat = first[first["metric"] == "q_hat"]["value"]
    assert (q_hat == 3).mean() >= 0.9
    assert 1.9 <= first[first["metric"] == "qs_hat_1"]["value"].mean() <= 2.6
