from src.sim.schedule import Schedule, prompt_schedule, fair_prompt_schedule, response_time, check_valid, check_greedy, check_prompt
from src.sim.bounds import FairnessCriterion, BoundReport, FairReport, check_bound, check_fair_bound
from src.sim.generate import random_wellformed_dag
from src.sim.exhaustive import exhaustive_min_response
