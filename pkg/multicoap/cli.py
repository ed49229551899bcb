"""
Command line: `multicoap simulate | fit | select | benchmark`.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""
import os
import sys
import functools
from typing import Any, Callable, Dict, List, Optional

import click

from .core.config import FitConfig, read_config
from .core.errors import InvalidConfigError, MultiCoapError
from .utils.execution import THREADS_ENV, Timer, resolve_threads
from .utils.logs import general_logger, set_global_level


def handle_errors(func: Callable) -> Callable:
    """
    Report package errors on stderr and exit with their code.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> Any:
        try:
            return func(*args, **kwargs)
        except MultiCoapError as e:
            click.echo(f"{e.__name__}: {e}", err=True)
            sys.exit(e.exit_code)

    return wrapper


def parse_qs(value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise InvalidConfigError(f"--qs expects comma-separated integers, got `{value}`")


def fit_payload(config: Optional[str], threads: Optional[int], **overrides: Any) -> Dict[str, Any]:
    """
    Merge a fit configuration: explicit flag > config file > MULTICOAP_THREADS > default.
    """
    payload = read_config(config) if config else {}
    payload.update({k: v for k, v in overrides.items() if v is not None})
    if threads is not None:
        payload["threads"] = threads
    elif "threads" not in payload:
        payload["threads"] = resolve_threads(None)
    return payload


def broadcast_qs(payload: Dict[str, Any], S: int) -> Dict[str, Any]:
    qs = payload.get("qs")
    if isinstance(qs, int):
        payload["qs"] = [qs] * S
    elif isinstance(qs, list) and len(qs) == 1 and S > 1:
        payload["qs"] = qs * S
    return payload


config_option = click.option("--config", "config", type=click.Path(dir_okay=False), default=None, help="JSON or YAML configuration file.")
data_dir_option = click.option("--data-dir", required=True, type=click.Path(file_okay=False), help="Directory with X_s.csv, Z_s.csv, a_s.csv.")
out_dir_option = click.option("--out-dir", required=True, type=click.Path(file_okay=False), help="Output directory (created if missing).")
threads_option = click.option("--threads", type=click.IntRange(min=1), default=None, help=f"Worker threads (fallback: ${THREADS_ENV}).")
seed_option = click.option("--seed", type=int, default=None, help="Random seed.")


@click.group()
@click.option("--log-level", default=None, help="Logging level (default: $LOG_LEVEL or INFO).")
def main(log_level: Optional[str]) -> None:
    """Multi-study covariate-augmented overdispersed Poisson factor model."""
    if log_level:
        set_global_level(log_level.upper())


@main.command()
@config_option
@out_dir_option
@seed_option
@handle_errors
def simulate(config: Optional[str], out_dir: str, seed: Optional[int]) -> None:
    """Simulate a multi-study dataset with its ground truth."""
    from .io import RunManifest, save_dataset, save_truth
    from .simgen import SimConfig, generate

    timer = Timer()
    sim_config = SimConfig.from_config(config or {}, seed=seed)
    with timer.lap("simulate"):
        data, truth = generate(sim_config)
    with timer.lap("write"):
        save_dataset(data, out_dir)
        save_truth(truth, out_dir)

    RunManifest(
        command="simulate",
        config=sim_config.model_dump(mode="json"),
        seeds={"seed": sim_config.seed, "structure_seed": sim_config.resolved_structure_seed()},
        paths={"config": config, "out_dir": os.path.abspath(out_dir)},
        timings=timer.timings,
    ).write(out_dir)
    general_logger.info(f"Simulated {data.S} studies into {out_dir}")


@main.command()
@data_dir_option
@config_option
@out_dir_option
@click.option("--q", type=int, default=None, help="Number of shared factors.")
@click.option("--qs", default=None, help="Specific factors per study, comma separated (one value is broadcast).")
@click.option("--rank", type=int, default=None, help="Rank constraint on beta.")
@threads_option
@seed_option
@handle_errors
def fit(
    data_dir: str,
    config: Optional[str],
    out_dir: str,
    q: Optional[int],
    qs: Optional[str],
    rank: Optional[int],
    threads: Optional[int],
    seed: Optional[int],
) -> None:
    """Fit the model by variational EM."""
    from .engine import fit as fit_model
    from .io import RunManifest, fit_summary, load_dataset, save_fit, write_json

    timer = Timer()
    with timer.lap("read"):
        data = load_dataset(data_dir)
    payload = fit_payload(config, threads, q=q, qs=parse_qs(qs), rank=rank, seed=seed)
    fit_config = FitConfig.from_config(broadcast_qs(payload, data.S))

    with timer.lap("fit"):
        result = fit_model(data, fit_config)
    with timer.lap("write"):
        save_fit(result, out_dir)
        summary = fit_summary(result)
        summary["timings"] = dict(timer.timings)
        write_json(os.path.join(out_dir, "fit_summary.json"), summary)

    RunManifest(
        command="fit",
        config=fit_config.to_dict(),
        seeds={"seed": fit_config.seed},
        paths={"data_dir": os.path.abspath(data_dir), "config": config, "out_dir": os.path.abspath(out_dir)},
        timings=timer.timings,
    ).write(out_dir)
    click.echo(f"converged={result.converged} iterations={result.iterations} elbo={result.elbo:.6f}")


@main.command()
@data_dir_option
@config_option
@out_dir_option
@click.option("--q-max", type=int, default=6, show_default=True)
@click.option("--qs-max", type=int, default=4, show_default=True)
@click.option("--r-max", type=int, default=None, help="Also select the rank of beta.")
@click.option("--tau", type=float, default=0.95, show_default=True)
@threads_option
@seed_option
@handle_errors
def select(
    data_dir: str,
    config: Optional[str],
    out_dir: str,
    q_max: int,
    qs_max: int,
    r_max: Optional[int],
    tau: float,
    threads: Optional[int],
    seed: Optional[int],
) -> None:
    """Select the numbers of factors (and optionally the rank of beta)."""
    from .io import RunManifest, load_dataset, write_json
    from .selection.cup import select_factors

    timer = Timer()
    with timer.lap("read"):
        data = load_dataset(data_dir)
    payload = fit_payload(config, threads, seed=seed)
    payload.update(q=q_max, qs=[qs_max] * data.S)
    base = FitConfig.from_config(payload)

    with timer.lap("select"):
        selection = select_factors(data, q_max, qs_max, tau, base, r_max=r_max)
    write_json(os.path.join(out_dir, "selection.json"), selection.model_dump(mode="json"))

    RunManifest(
        command="select",
        config={**base.to_dict(), "q_max": q_max, "qs_max": qs_max, "r_max": r_max, "tau": tau},
        seeds={"seed": base.seed},
        paths={"data_dir": os.path.abspath(data_dir), "config": config, "out_dir": os.path.abspath(out_dir)},
        timings=timer.timings,
    ).write(out_dir)
    rank = f" r={selection.rank.r_hat}" if selection.rank is not None else ""
    click.echo(f"q={selection.q_hat} qs={','.join(map(str, selection.qs_hat))}{rank}")


@main.command()
@click.argument("scenario")
@config_option
@out_dir_option
@click.option("--replicates", type=click.IntRange(min=1), default=None, help="Replicates per cell (default 20).")
@threads_option
@seed_option
@handle_errors
def benchmark(
    scenario: str,
    config: Optional[str],
    out_dir: str,
    replicates: Optional[int],
    threads: Optional[int],
    seed: Optional[int],
) -> None:
    """Run a simulation scenario and write results.csv and summary.csv."""
    from .benchmark import BenchmarkConfig, run_benchmark
    from .io import RunManifest

    payload = fit_payload(config, threads, scenario=scenario, replicates=replicates, seed=seed)
    bench_config = BenchmarkConfig.from_config(payload)

    timer = Timer()
    with timer.lap("benchmark"):
        _, summary = run_benchmark(bench_config, out_dir)

    RunManifest(
        command="benchmark",
        config=bench_config.to_dict(),
        seeds={"base_seed": bench_config.seed, "replicates": bench_config.replicates},
        paths={"config": config, "out_dir": os.path.abspath(out_dir)},
        timings=timer.timings,
    ).write(out_dir)
    click.echo(summary.to_string(index=False))


if __name__ == "__main__":
    main()
