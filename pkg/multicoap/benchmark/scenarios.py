"""
Simulation grids. Every scenario is a list of cells; a cell fixes the simulated design
(all of `SimConfig` except the replicate seed) and how it is fitted.
"""
from typing import Callable, List, Optional

from pydantic import Field

from ..core.schema import Schema
from ..simgen.generator import SimConfig
from ..utils.registry import ItemNotFound, Registry


class ScenarioNotFound(ItemNotFound):
    __name__ = "ScenarioNotFound"
    __desc__ = "Unknown benchmark scenario `{}`. Available: {}"


class Selection(Schema):
    """Select (q, q_s) by the cumulative variance rule before the scored refit."""

    q_max: int = Field(ge=1)
    qs_max: int = Field(ge=0)
    tau: float = 0.95


class Cell(Schema):
    """
    One column of a results table.

    `q` / `qs` default to the simulated values and `rank` to the true r0.
    """

    label: str
    sim: SimConfig
    q: Optional[int] = None
    qs: Optional[List[int]] = None
    rank: Optional[int] = None
    selection: Optional[Selection] = None

    @property
    def fit_q(self) -> int:
        return self.q if self.q is not None else self.sim.q

    @property
    def fit_qs(self) -> List[int]:
        return self.qs if self.qs is not None else list(self.sim.qs)

    @property
    def fit_rank(self) -> int:
        return self.rank if self.rank is not None else self.sim.r0


class ScenarioRegistry(Registry):
    """
    Scenario name to cell-builder mapping.
    """

    def __getitem__(self, key: str) -> Callable[[], List[Cell]]:
        if key not in self.registry:
            raise ScenarioNotFound(key, ", ".join(sorted(self.registry)))
        return self.registry[key]

    def scenario(self, name: str) -> Callable:
        """Decorator registering a function that returns the cells of `name`."""

        def decorator(func: Callable[[], List[Cell]]) -> Callable[[], List[Cell]]:
            self.register(name, func)
            return func

        return decorator

    def cells(self, name: str) -> List[Cell]:
        return self[name]()


scenarios = ScenarioRegistry()


def _pair(n) -> str:
    return f"({n[0]},{n[1]})"


@scenarios.scenario("example1-n")
def example1_n() -> List[Cell]:
    base = SimConfig(rho_a=2.0, rho_b=3.5, rho_z=0.1, p=100)
    return [
        Cell(label=f"n={_pair(n)}", sim=base.replace(n=list(n)))
        for n in [(50, 80), (100, 200), (200, 300)]
    ]


@scenarios.scenario("example1-p")
def example1_p() -> List[Cell]:
    base = SimConfig(rho_a=2.0, rho_b=3.5, rho_z=0.1, n=[100, 150])
    return [Cell(label=f"p={p}", sim=base.replace(p=p)) for p in [50, 100, 150]]


@scenarios.scenario("example2")
def example2() -> List[Cell]:
    base = SimConfig(rho_a=2.0, rho_b=3.5, rho_z=1.0, n=[100, 200], p=100)
    return [
        Cell(label=f"sigma0_sq={sigma}", sim=base.replace(sigma0_sq=float(sigma)))
        for sigma in [1, 4, 8]
    ]


@scenarios.scenario("example3")
def example3() -> List[Cell]:
    base = SimConfig(rho_a=2.0, rho_b=3.5, rho_z=1.0, n=[100, 200], p=100)
    return [
        Cell(label=f"a=[{low},{high}]", sim=base.replace(a_range=(low, high)))
        for low, high in [(11, 20), (41, 50), (101, 110)]
    ]


@scenarios.scenario("example4")
def example4() -> List[Cell]:
    base = SimConfig(rho_z=1.0, n=[150, 200], p=100, d=3, r0=3)
    return [
        Cell(label=f"rho=({rho_a},{rho_b})", sim=base.replace(rho_a=rho_a, rho_b=rho_b))
        for rho_a, rho_b in [(0.8, 1.0), (2.0, 1.0), (2.0, 3.0)]
    ]


def _example5_base() -> SimConfig:
    return SimConfig(rho_a=2.0, rho_b=5.0, rho_z=1.0, n=[150, 200], p=100, d=3, r0=3)


@scenarios.scenario("example5")
def example5() -> List[Cell]:
    return [
        Cell(
            label=f"sigma0_sq={sigma}",
            sim=_example5_base().replace(sigma0_sq=float(sigma)),
            selection=Selection(q_max=6, qs_max=4),
        )
        for sigma in [1, 2]
    ]


@scenarios.scenario("example5-misspecified")
def example5_misspecified() -> List[Cell]:
    base = _example5_base()
    cells = [Cell(label=f"q={q}", sim=base, q=q) for q in [2, 3, 5]]
    cells += [Cell(label=f"qs={q_s}", sim=base, qs=[q_s] * base.S) for q_s in [1, 2, 4]]
    return cells
