from src.runtime.stepper import IOPort, step_expr, step_cmd, sync_target
from src.runtime.pool import ThreadPool
from src.runtime.scheduler import Scheduler, RunResult, TraceEvent, run
from src.runtime.export import export_trace
