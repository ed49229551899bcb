import numpy as np
import pytest

from multicoap.benchmark.scenarios import Cell, Selection, scenarios
from multicoap.core.data import MultiStudyDataset
from multicoap.core.params import ModelParams, StudyPosterior, VariationalParams
from multicoap.simgen.generator import SimConfig, generate


# Seeds of the randomized closed-form checks
ORACLE_SEEDS = range(100)


def random_spd(rng: np.random.Generator, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0))
    G = rng.standard_normal((k, k))
    return G @ G.T / k + 0.5 * np.eye(k)


def random_dataset(rng: np.random.Generator, n=(4, 6), p=5, d=2, a_range=(1, 3)) -> MultiStudyDataset:
    X = [rng.poisson(3.0, size=(n_s, p)) for n_s in n]
    Z = [rng.standard_normal((n_s, d - 1)) for n_s in n]
    a = [rng.integers(a_range[0], a_range[1], size=n_s, endpoint=True).astype(float) for n_s in n]
    return MultiStudyDataset.from_arrays(X, Z, a)


def random_state(rng: np.random.Generator, data: MultiStudyDataset, q: int, qs):
    """Arbitrary valid (θ, ξ) for the dataset."""
    p, d = data.p, data.d
    theta = ModelParams(
        beta=0.3 * rng.standard_normal((p, d)),
        A=0.5 * rng.standard_normal((p, q)),
        B=[0.5 * rng.standard_normal((p, q_s)) for q_s in qs],
        lam=rng.uniform(0.5, 2.0, size=data.S),
    )
    xi = VariationalParams(
        studies=[
            StudyPosterior(
                M=0.5 * rng.standard_normal((study.n, p)) + 1.0,
                V=rng.uniform(0.1, 1.0, size=(study.n, p)),
                Mf=rng.standard_normal((study.n, q)),
                Sf=random_spd(rng, q),
                Mh=rng.standard_normal((study.n, q_s)),
                Sh=random_spd(rng, q_s),
            )
            for study, q_s in zip(data, qs)
        ]
    )
    return theta, xi


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240301)


@pytest.fixture
def tiny_data(rng) -> MultiStudyDataset:
    return random_dataset(rng)


@pytest.fixture
def tiny_state(rng, tiny_data):
    return random_state(rng, tiny_data, q=2, qs=[1, 1])


@pytest.fixture(scope="session")
def small_sim():
    """Small two-study design that fits in well under a second."""
    config = SimConfig(
        n=[40, 50], p=20, d=3, q=2, qs=[1, 1], r0=1, rho_a=2.0, rho_b=2.0, rho_z=0.5, seed=7
    )
    data, truth = generate(config)
    return config, data, truth


TINY_SIM = SimConfig(n=[30, 40], p=12, d=2, q=1, qs=[1, 1], r0=1, rho_a=2.0, rho_b=2.0, rho_z=0.5)


@pytest.fixture(scope="session")
def tiny_scenarios():
    """Register small scenarios for the benchmark and command-line tests."""
    cells = {
        "tiny": lambda: [
            Cell(label="fixed", sim=TINY_SIM),
            Cell(label="selected", sim=TINY_SIM, selection=Selection(q_max=3, qs_max=2)),
        ],
        "tiny-failing": lambda: [
            Cell(label="ok", sim=TINY_SIM),
            Cell(label="too-strong", sim=TINY_SIM.replace(rho_a=200.0)),
        ],
    }
    for name, builder in cells.items():
        scenarios.register(name, builder)
    yield list(cells)
    for name in cells:
        scenarios.unregister(name)
