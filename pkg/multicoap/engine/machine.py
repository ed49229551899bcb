import time
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.config import FitConfig, FitResult
from ..core.data import MultiStudyDataset, validate_dataset
from ..core.params import ModelParams, VariationalParams
from ..utils.execution import parallel_map
from ..utils.logs import get_logger
from ..utils.registry import generate_id
from .elbo import elbo, elbo_constant
from .estep import estep_update_factors, estep_update_y_study
from .identifiability import apply_identifiability, cross_block_inner
from .init import init_params
from .mstep import mstep_update_beta, mstep_update_lambda, mstep_update_loadings
from .status import FitStatus
from .workspace import EStepWorkspace

# Relative slack tolerated before an ELBO decrease is reported
MONOTONE_SLACK = 1e-6

logger = get_logger(__name__)


class VariationalEM:
    """
    Coordinate-ascent engine. One cycle runs the blocks in the order
    (μ, σ²) → (m_f, S_f) → (m_h, S_h) → A → B → β → λ and evaluates the ELBO once.

    The machine owns its working state exclusively; per-study E-step blocks may run on
    `config.threads` workers because they write disjoint outputs, and all reductions
    run in study order.
    """

    def __init__(self, data: MultiStudyDataset, config: FitConfig) -> None:
        validate_dataset(data)
        config.check(data.S, data.p, data.d)

        self.run_id: str = generate_id(id_step=4)

        self.data = data
        self.config = config
        self.workspace = EStepWorkspace(data)
        self.status: FitStatus = FitStatus.INITIALIZED

        self.theta: Optional[ModelParams] = None
        self.xi: Optional[VariationalParams] = None
        self.elbo_trace: List[float] = []
        self.constant: float = 0.0
        self.decreases: List[Tuple[int, float]] = []

    def initialize(self) -> float:
        self.theta, self.xi = init_params(self.data, self.config)
        self.constant = sum(
            elbo_constant(study, self.config.q, q_s) for study, q_s in zip(self.data, self.config.qs)
        )
        value = self.evaluate()
        logger.debug(f"[{self.run_id}] Initial ELBO: {value:.6f}")
        return value

    def evaluate(self) -> float:
        return elbo(self.theta, self.xi, self.data, workspace=self.workspace)

    def update_y(self) -> None:
        def _study(s: int) -> Dict[str, np.ndarray]:
            M, V = estep_update_y_study(self.theta, self.xi, self.data, s, self.workspace)
            return {"M": M, "V": V}

        self._apply_study_updates(_study)

    def update_factors(self) -> None:
        def _study(s: int) -> Dict[str, np.ndarray]:
            Mf, Sf, Mh, Sh = estep_update_factors(self.theta, self.xi, self.data, s, self.workspace)
            return {"Mf": Mf, "Sf": Sf, "Mh": Mh, "Sh": Sh}

        self._apply_study_updates(_study)

    def _apply_study_updates(self, func) -> None:
        results = parallel_map(func, range(self.data.S), threads=self.config.threads)
        self.xi = self.xi.with_studies(dict(enumerate(results)))

    def update_parameters(self) -> None:
        A, B = mstep_update_loadings(self.theta, self.xi, self.data, self.workspace)
        self.theta = self.theta.replace(A=A, B=B)
        beta = mstep_update_beta(self.theta, self.xi, self.data, self.config.rank, self.workspace)
        self.theta = self.theta.replace(beta=beta)
        lam = mstep_update_lambda(self.theta, self.xi, self.data, self.workspace)
        self.theta = self.theta.replace(lam=lam)

    def cycle(self) -> float:
        self.update_y()
        self.update_factors()
        self.update_parameters()
        return self.evaluate()

    def check_progress(self, iteration: int, previous: float, current: float) -> float:
        """
        Log the cycle, record ELBO decreases beyond the slack and return the relative change.

        The change is relative to the complete bound: the trace value plus `elbo_constant`
        of every study.
        """
        scale = abs(previous + self.constant)
        change = abs(current - previous) / max(scale, np.finfo(float).tiny)
        logger.debug(f"[{self.run_id}] Cycle {iteration}: ELBO {current:.6f} (relative change {change:.3e})")
        if current < previous - MONOTONE_SLACK * abs(previous):
            drop = (previous - current) / abs(previous)
            self.decreases.append((iteration, drop))
            logger.warning(f"[{self.run_id}] Cycle {iteration}: ELBO decreased by {drop:.3e} (relative)")
        return change

    def run(self) -> FitResult:
        """
        Run cycles until the relative ELBO change drops below `eps` or `max_iter` is hit,
        refresh the factor posteriors against the final parameters and apply the
        identifiability rotation.
        """
        start = time.perf_counter()
        elbo_init = self.initialize()
        previous = elbo_init
        self.status = FitStatus.RUNNING

        iteration = 0
        while self.status == FitStatus.RUNNING:
            iteration += 1
            current = self.cycle()
            self.elbo_trace.append(current)
            change = self.check_progress(iteration, previous, current)
            previous = current

            if change < self.config.eps:
                self.status = FitStatus.CONVERGED
            elif iteration >= self.config.max_iter:
                self.status = FitStatus.MAX_ITER

        # Closing E-step: S_f / S_h consistent with the final (A, B, λ)
        self.update_factors()
        closing = self.evaluate()
        self.check_progress(iteration, self.elbo_trace[-1], closing)
        self.elbo_trace[-1] = closing

        theta, xi = apply_identifiability(self.theta, self.xi)
        elapsed = time.perf_counter() - start
        logger.info(
            f"[{self.run_id}] {self.status!r} after {iteration} cycles, ELBO {closing:.6f}, {elapsed:.2f}s"
        )

        return FitResult(
            params=theta,
            vparams=xi,
            elbo_trace=np.asarray(self.elbo_trace),
            converged=bool(self.status),
            iterations=iteration,
            diagnostics={
                "elbo_init": elbo_init,
                "elbo_constant": self.constant,
                "elbo_decreases": [list(item) for item in self.decreases],
                "cross_block_inner": cross_block_inner(theta),
                "status": self.status.name,
                "seconds": elapsed,
            },
        )


def fit(data: MultiStudyDataset, config: FitConfig) -> FitResult:
    """
    Fit the multi-study overdispersed Poisson factor model by variational EM.

    Non-convergence is not an error: the result has `converged=False`.
    """
    return VariationalEM(data, config).run()
