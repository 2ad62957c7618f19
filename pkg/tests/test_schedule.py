import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import CriterionError, ThreadNotInGraph, TooLarge, ZeroMass
from src.cost import check_strongly_well_formed, check_well_formed, parse_dag
from src.sim import (FairnessCriterion, Schedule, check_bound, check_fair_bound, check_greedy, check_prompt,
                     check_valid, exhaustive_min_response, fair_prompt_schedule, prompt_schedule,
                     random_wellformed_dag, response_time)
from src.sim.bounds import mean_and_stderr, sample_response_times
from src.sim.schedule import response_times
from strategies import priority_orders, wellformed_dags
from conftest import SPAWN_JOIN


@pytest.fixture
def spawn_join():
    return parse_dag(SPAWN_JOIN)


# ------------------------- prompt schedules -------------------------

def test_deterministic_prompt_schedule(spawn_join):
    sched = prompt_schedule(spawn_join, 1, det=True)
    assert list(sched.steps) == [{0}, {3}, {4}, {1}, {2}]
    assert response_time(sched, spawn_join, "a") == 2
    assert response_time(sched, spawn_join, "main") == 5


def test_two_processors(spawn_join):
    sched = prompt_schedule(spawn_join, 2, det=True)
    assert list(sched.steps) == [{0}, {1, 3}, {4}, {2}]
    assert response_times(sched, spawn_join) == {"main": 4, "a": 2}


def test_schedule_predicates(spawn_join):
    sched = prompt_schedule(spawn_join, 1, seed=4)
    assert check_valid(sched, spawn_join)
    assert check_greedy(sched, spawn_join)
    assert check_prompt(sched, spawn_join)


def test_low_priority_first_is_greedy_but_not_prompt(spawn_join):
    sched = Schedule((frozenset({0}), frozenset({1}), frozenset({3}), frozenset({4}), frozenset({2})), 1)
    assert check_valid(sched, spawn_join)
    assert check_greedy(sched, spawn_join)
    verdict = check_prompt(sched, spawn_join)
    assert not verdict
    assert verdict.witness == "step 2 runs lo work while hi work is ready"


def test_invalid_schedules(spawn_join):
    early = Schedule((frozenset({0, 2}), frozenset({1, 3}), frozenset({4})), 2)
    assert not check_valid(early, spawn_join)
    crowded = Schedule((frozenset({0}), frozenset({1, 3}), frozenset({4}), frozenset({2})), 1)
    assert not check_valid(crowded, spawn_join)
    short = Schedule((frozenset({0}),), 1)
    assert not check_valid(short, spawn_join)
    idle = Schedule((frozenset({0}), frozenset({3}), frozenset({1}), frozenset({4}), frozenset({2})), 2)
    assert check_valid(idle, spawn_join)
    assert not check_greedy(idle, spawn_join)


def test_response_time_of_unknown_thread(spawn_join):
    sched = prompt_schedule(spawn_join, 1)
    with pytest.raises(ThreadNotInGraph):
        response_time(sched, spawn_join, "nobody")


def test_processor_count_is_checked(spawn_join):
    with pytest.raises(ValueError):
        prompt_schedule(spawn_join, 0)


@settings(max_examples=50, deadline=None)
@given(wellformed_dags(), st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=1000))
def test_prompt_schedules_are_prompt(g, procs, seed):
    sched = prompt_schedule(g, procs, seed)
    assert check_valid(sched, g)
    assert check_prompt(sched, g)


@settings(max_examples=50, deadline=None)
@given(wellformed_dags(), st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=1000))
def test_prompt_bound_holds_on_wellformed_graphs(g, procs, seed):
    sched = prompt_schedule(g, procs, seed)
    for a in g.threads:
        report = check_bound(g, a, procs, sched)
        assert report.well_formed
        assert report.holds, report


def test_bound_report(spawn_join):
    report = check_bound(spawn_join, "a", 1, prompt_schedule(spawn_join, 1, det=True))
    assert (report.response, report.work, report.span) == (2, 2, 2)
    assert report.rhs == 4.0
    assert report.holds


# ------------------------- generator -------------------------

@settings(max_examples=60, deadline=None)
@given(wellformed_dags())
def test_generated_graphs_are_strongly_well_formed(g):
    assert check_strongly_well_formed(g)
    assert check_well_formed(g)
    assert "main" in g.threads


@settings(max_examples=30, deadline=None)
@given(priority_orders(), st.integers(min_value=0, max_value=10_000))
def test_generator_is_seeded(store, seed):
    one = random_wellformed_dag(5, 4, store, seed=seed)
    two = random_wellformed_dag(5, 4, store, seed=seed)
    assert one == two


def test_generator_sizes(two_level):
    with pytest.raises(ValueError):
        random_wellformed_dag(0, 3, two_level)
    with pytest.raises(ValueError):
        random_wellformed_dag(3, 1, two_level)
    g = random_wellformed_dag(1, 1, two_level)
    assert g.size() == 1


# ------------------------- exhaustive search -------------------------

def test_exhaustive_minimum(spawn_join):
    assert exhaustive_min_response(spawn_join, "a", 1) == 2
    assert exhaustive_min_response(spawn_join, "main", 1) == 5
    assert exhaustive_min_response(spawn_join, "main", 2) == 4


def test_exhaustive_refuses_large_graphs():
    with pytest.raises(TooLarge):
        exhaustive_min_response(parse_dag("thread main bot 15\n"), "main", 1)


@settings(max_examples=25, deadline=None)
@given(wellformed_dags(max_threads=3, max_len=4), st.integers(min_value=1, max_value=3))
def test_exhaustive_minimum_is_at_most_any_prompt_schedule(g, procs):
    sched = prompt_schedule(g, procs, seed=1)
    for a in g.threads:
        best = exhaustive_min_response(g, a, procs)
        assert 1 <= best <= response_time(sched, g, a)


# ------------------------- fairness -------------------------

def test_criterion_parsing():
    c = FairnessCriterion.parse("lo=0.25, hi=0.75")
    assert c.weights == {"lo": 0.25, "hi": 0.75}
    assert FairnessCriterion.point_mass("hi").weights == {"hi": 1.0}


@pytest.mark.parametrize("text", ["lo=0.5", "lo=0.5,hi=x", "lo", "=1.0", "lo=1.5,hi=-0.5", ""])
def test_bad_criteria(text):
    with pytest.raises(CriterionError):
        FairnessCriterion.parse(text)


def test_criterion_must_name_known_priorities(spawn_join):
    with pytest.raises(CriterionError):
        FairnessCriterion.parse("elsewhere=1").check_against(spawn_join.store)


def test_mass_at_least(diamond):
    c = FairnessCriterion({"low": 0.1, "left": 0.2, "right": 0.3, "high": 0.4})
    assert c.mass_at_least(diamond, "left") == pytest.approx(0.9)
    assert c.mass_at_least(diamond, "high") == pytest.approx(0.4)
    assert c.mass_at_least(diamond, "low") == pytest.approx(1.0)


@pytest.mark.parametrize("mode", ["sample", "split"])
def test_fair_schedules_are_valid(spawn_join, mode):
    c = FairnessCriterion({"lo": 0.5, "hi": 0.5})
    for seed in range(5):
        sched = fair_prompt_schedule(spawn_join, 2, c, seed, mode)
        assert check_valid(sched, spawn_join)


def test_fair_schedule_runs_the_drawn_priority(spawn_join):
    sched = fair_prompt_schedule(spawn_join, 1, FairnessCriterion.point_mass("lo"), mode="split")
    assert list(sched.steps) == [{0}, {1}, {3}, {4}, {2}]


def test_unknown_fair_mode(spawn_join):
    with pytest.raises(ValueError):
        fair_prompt_schedule(spawn_join, 1, FairnessCriterion.point_mass("lo"), mode="round-robin")


def test_zero_mass(spawn_join):
    with pytest.raises(ZeroMass):
        check_fair_bound(spawn_join, "a", 1, FairnessCriterion.point_mass("lo"), rho_prime="hi", trials=10)


def test_mean_and_stderr():
    import numpy as np
    mean, stderr = mean_and_stderr(np.array([1.0, 3.0]))
    assert mean == 2.0
    assert stderr == pytest.approx(1.0)
    assert mean_and_stderr(np.array([4.0])) == (4.0, 0.0)


def test_sampled_prompt_response_times_are_reproducible(spawn_join):
    one = sample_response_times(spawn_join, "a", 2, trials=20, seed=9)
    two = sample_response_times(spawn_join, "a", 2, trials=20, seed=9)
    assert (one == two).all()


@pytest.mark.slow
@pytest.mark.parametrize("mode", ["sample", "split"])
def test_fair_bound_holds(spawn_join, mode):
    c = FairnessCriterion({"lo": 0.5, "hi": 0.5})
    report = check_fair_bound(spawn_join, "a", 1, c, trials=400, seed=2, mode=mode)
    assert report.mass == pytest.approx(0.5)
    assert report.rhs == pytest.approx(8.0)
    assert report.holds
    assert report.mean <= 3.0


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(wellformed_dags(max_threads=4, max_len=4), st.integers(min_value=1, max_value=3))
def test_fair_bound_on_generated_graphs(g, procs):
    weights = {name: 1.0 / len(g.store.names) for name in g.store.names}
    c = FairnessCriterion(weights)
    for a in g.threads:
        assert check_fair_bound(g, a, procs, c, trials=200, seed=3).holds


FAIR_TRIALS = 300
FAIR_EXAMPLES = 10


@pytest.mark.slow
def test_point_mass_on_the_top_priority_matches_prompt_scheduling(spawn_join):
    report = check_fair_bound(spawn_join, "a", 1, FairnessCriterion.point_mass("hi"), trials=FAIR_TRIALS, seed=4)
    prompt = check_bound(spawn_join, "a", 1, prompt_schedule(spawn_join, 1, det=True))
    assert report.mass == 1.0
    assert report.rhs == prompt.rhs
    assert report.mean == sample_response_times(spawn_join, "a", 1, trials=FAIR_TRIALS, seed=4).mean()
    assert report.holds


@pytest.mark.slow
@settings(max_examples=FAIR_EXAMPLES, deadline=None)
@given(wellformed_dags(max_threads=4, max_len=4), st.integers(min_value=1, max_value=3))
def test_point_mass_at_the_thread_priority_gives_the_prompt_bound(g, procs):
    sched = prompt_schedule(g, procs, seed=0)
    for a, entry in g.threads.items():
        report = check_fair_bound(g, a, procs, FairnessCriterion.point_mass(entry.prio), trials=FAIR_TRIALS // 3,
                                  seed=5)
        assert report.rhs == pytest.approx(check_bound(g, a, procs, sched).rhs)
        assert report.holds, report


@pytest.mark.slow
@pytest.mark.parametrize("procs", [1, 2])
def test_fair_bound_at_bot_counts_all_competitor_work(spawn_join, procs):
    from src.cost import a_span, competitor_work
    c = FairnessCriterion({"lo": 0.5, "hi": 0.5})
    report = check_fair_bound(spawn_join, "a", procs, c, rho_prime="bot", trials=FAIR_TRIALS, seed=6)
    comp = competitor_work(spawn_join, "a")
    assert report.mass == pytest.approx(1.0)
    assert report.work == comp.size()
    assert report.rhs == pytest.approx(comp.size() / procs + a_span(comp, "a"))
    assert report.holds
