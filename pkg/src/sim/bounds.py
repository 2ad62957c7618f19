"""Response-time bounds for prompt and fair-and-prompt schedules, checked against simulations."""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from src.core.errors import CriterionError, ZeroMass
from src.core.priorities import PriorityOrder
from src.cost.dag import CostDag, a_span, check_well_formed, competitor_work, priority_work
from src.sim.schedule import Schedule, fair_prompt_schedule, prompt_schedule, response_time

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
SLACK_SE = 3.0


@dataclass(frozen=True)
class FairnessCriterion:
    """A probability distribution over priority constants."""
    weights: Dict[str, float]

    def __post_init__(self):
        if not self.weights:
            raise CriterionError("a fairness criterion needs at least one priority")
        for name, w in self.weights.items():
            if not 0.0 <= w <= 1.0:
                raise CriterionError(f"weight of {name} is {w}, outside [0, 1]")
        total = sum(self.weights.values())
        if abs(total - 1.0) > TOLERANCE:
            raise CriterionError(f"weights sum to {total}, not 1")

    @classmethod
    def parse(cls, text: str) -> "FairnessCriterion":
        """`p=0.6,q=0.4`"""
        weights: Dict[str, float] = {}
        for item in filter(None, (part.strip() for part in text.split(","))):
            name, sep, raw = item.partition("=")
            if not sep or not name.strip():
                raise CriterionError(f"expected name=weight, found {item!r}")
            try:
                weights[name.strip()] = float(raw)
            except ValueError:
                raise CriterionError(f"weight of {name.strip()} is not a number: {raw!r}") from None
        return cls(weights)

    @classmethod
    def point_mass(cls, name: str) -> "FairnessCriterion":
        return cls({name: 1.0})

    def check_against(self, store: PriorityOrder) -> "FairnessCriterion":
        unknown = sorted(name for name in self.weights if name not in store)
        if unknown:
            raise CriterionError(f"criterion names unknown priorities {unknown}")
        return self

    def mass_at_least(self, store: PriorityOrder, rho: str) -> float:
        """C(>= rho): total weight of priorities not strictly below rho."""
        return sum(w for name, w in self.weights.items() if not store.lt(name, rho))


@dataclass(frozen=True)
class BoundReport:
    thread: str
    procs: int
    response: int
    work: int
    span: int
    rhs: float
    holds: bool
    well_formed: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class FairReport:
    thread: str
    procs: int
    rho_prime: str
    mass: float
    work: int
    span: int
    trials: int
    mean: float
    stderr: float
    rhs: float
    holds: bool


def _competitors(g: CostDag, a: str, rho: str):
    comp = competitor_work(g, a)
    return priority_work(comp, rho, include_equal=True), a_span(comp, a)


def check_bound(g: CostDag, a: str, procs: int, sched: Schedule) -> BoundReport:
    """T(a) <= W/P + S over a's competitor work, compared exactly as T*P <= W + S*P."""
    verdict = check_well_formed(g)
    if not verdict:
        logger.warning(f"Bound checked on a graph that is not well-formed: {verdict.witness}")
    prio = g.entry(a).prio
    work, span = _competitors(g, a, prio)
    response = response_time(sched, g, a)
    return BoundReport(
        thread=a,
        procs=procs,
        response=response,
        work=work,
        span=span,
        rhs=work / procs + span,
        holds=response * procs <= work + span * procs,
        well_formed=verdict.holds,
        witness=verdict.witness,
    )


def sample_response_times(g: CostDag, a: str, procs: int, trials: int, seed: int = 0,
                          criterion: Optional[FairnessCriterion] = None, mode: str = "sample") -> np.ndarray:
    """T(a) over independent schedules; prompt ones when no criterion is given."""
    rng = np.random.default_rng(seed)
    times = np.empty(trials, dtype=float)
    for k in range(trials):
        if criterion is None:
            sched = prompt_schedule(g, procs, rng)
        else:
            sched = fair_prompt_schedule(g, procs, criterion, rng, mode)
        times[k] = response_time(sched, g, a)
    return times


def mean_and_stderr(times: np.ndarray):
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / np.sqrt(len(times))) if len(times) > 1 else 0.0
    return mean, stderr


def check_fair_bound(g: CostDag, a: str, procs: int, criterion: FairnessCriterion,
                     rho_prime: Optional[str] = None, trials: int = 1000, seed: int = 0,
                     mode: str = "sample") -> FairReport:
    """
    Mean T(a) over fair-and-prompt schedules against (W/P + S) / C(>= rho'),
    with work counted at rho'. Holds when the mean is within three standard
    errors above the bound.
    """
    store = g.store
    criterion.check_against(store)
    prio = g.entry(a).prio
    rho_prime = rho_prime if rho_prime is not None else prio
    if not store.le(rho_prime, prio):
        logger.warning(f"{rho_prime} is not below the priority {prio} of {a}; the bound may not apply")
    mass = criterion.mass_at_least(store, rho_prime)
    if mass <= 0.0:
        raise ZeroMass(f"the criterion gives no weight at or above {rho_prime}")
    work, span = _competitors(g, a, rho_prime)
    rhs = (work / procs + span) / mass
    mean, stderr = mean_and_stderr(sample_response_times(g, a, procs, trials, seed, criterion, mode))
    logger.info(f"Fair bound for {a}: mean {mean:.3f} (se {stderr:.3f}) vs {rhs:.3f}")
    return FairReport(
        thread=a,
        procs=procs,
        rho_prime=rho_prime,
        mass=mass,
        work=work,
        span=span,
        trials=trials,
        mean=mean,
        stderr=stderr,
        rhs=rhs,
        holds=mean <= rhs + SLACK_SE * stderr,
    )
