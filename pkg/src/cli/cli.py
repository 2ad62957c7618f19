# Parse command line arguments and run one primlc subcommand
import argparse
import logging
import sys
from typing import List, Optional

from rich.console import Console

from src.cli.diagnostics import Diagnostic
from src.core import load_inputs, load_source, read_text, write_output, get_settings, show_expr, show_type, show_cmd
from src.core.errors import CriterionError, PrimlError
from src.core.priorities import PriorityOrder
from src.cost import (a_span, audit_record, check_strongly_well_formed, check_well_formed, competitor_work,
                      cost_program, format_dag, parse_dag, priority_work)
from src.prelude import load_prelude
from src.runtime import run
from src.sim import (FairnessCriterion, check_bound, check_fair_bound, check_prompt, check_valid,
                     exhaustive_min_response, fair_prompt_schedule, prompt_schedule, response_time)
from src.statics import check_program, elaborate
from src.syntax import parse_program
from src.ui.reports import (bound_lines, bound_table, fair_lines, fair_panel, key_value_lines, metrics_panel,
                            response_table, verdict_table)

# Configure logger; stdout is reserved for program output and reports
logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[
        logging.StreamHandler(sys.stderr)
    ]
)
logger = logging.getLogger(__name__)

console = Console()  # console is used for colored output
err_console = Console(stderr=True)

EXIT_OK, EXIT_STATIC, EXIT_IO, EXIT_RUNTIME, EXIT_FUEL = 0, 1, 2, 3, 4
# audit lines echoed when an audited run fails
AUDIT_TAIL = 20


def build_parser():
    settings = get_settings()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--debug", help="Enable debug logging", action="store_true")
    common.add_argument("--verbose", help="Log progress summaries", action="store_true")
    common.add_argument("--no-color", help="Disable colored output", action="store_true")
    common.add_argument("--no-prelude", help="Do not load the bundled prelude", action="store_true")

    p = argparse.ArgumentParser(prog="primlc", description="Check, run and analyze PriML programs.")
    sub = p.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="Parse, elaborate and type check a program")
    check.add_argument("path", help="Path to a .priml file")
    check.add_argument("--dump-core", help="Print the elaborated core command", action="store_true")
    check.add_argument("--dump-types", help="Print the type of every declaration", action="store_true")
    check.add_argument("--dump-order", help="Print the priority order", action="store_true")

    run_p = sub.add_parser("run", parents=[common], help="Run a program on the simulated scheduler")
    run_p.add_argument("path", help="Path to a .priml file")
    run_p.add_argument("--procs", type=int, default=settings.procs, help="Number of processors")
    run_p.add_argument("--seed", type=int, default=settings.seed, help="Scheduler seed")
    run_p.add_argument("--fuel", type=int, default=settings.fuel, help="Maximum number of steps")
    run_p.add_argument("--deal", choices=("uniform", "lowest"), default="uniform",
                       help="Priority at which balancing deals work")
    run_p.add_argument("--stats", help="Print per-thread response times", action="store_true")
    run_p.add_argument("--audit", help="Re-type the thread pool after every step", action="store_true")
    run_p.add_argument("--trace", metavar="FILE", help="Write the execution trace to FILE")
    run_p.add_argument("--join-all", help="Keep running until every thread has returned", action="store_true")
    run_p.add_argument("--input", metavar="FILE", help="Naturals consumed by `input`")

    cost = sub.add_parser("cost", parents=[common], help="Build and analyze the cost DAG of a program")
    cost.add_argument("path", help="Path to a .priml file")
    cost.add_argument("--thread", metavar="NAME", help="Report metrics for one thread")
    cost.add_argument("--procs", type=int, default=settings.procs, help="Processors for the bound")
    cost.add_argument("--fuel", type=int, default=settings.fuel, help="Maximum number of vertices")
    cost.add_argument("--emit-dag", metavar="FILE", help="Write the DAG in text form to FILE")
    cost.add_argument("--check-wf", help="Check (strong) well-formedness", action="store_true")
    cost.add_argument("--audit", help="Type check the thread record", action="store_true")
    cost.add_argument("--input", metavar="FILE", help="Naturals consumed by `input`")

    sim = sub.add_parser("sim", parents=[common], help="Schedule a DAG file")
    sim.add_argument("path", help="Path to a DAG text file")
    sim.add_argument("--procs", type=int, default=settings.procs, help="Number of processors")
    sim.add_argument("--policy", choices=("prompt", "fair"), default="prompt", help="Scheduling policy")
    sim.add_argument("--criterion", help="Fairness criterion, e.g. p=0.6,q=0.4")
    sim.add_argument("--trials", type=int, default=settings.trials, help="Trials for the fair bound")
    sim.add_argument("--seed", type=int, default=settings.seed, help="Schedule seed")
    sim.add_argument("--check-bound", metavar="THREAD", help="Check the response-time bound for THREAD")
    sim.add_argument("--det", help="Break priority ties by the total order", action="store_true")
    sim.add_argument("--split", help="Split processors deterministically by the criterion", action="store_true")
    sim.add_argument("--rho-prime", metavar="NAME", help="Priority at which the fair bound counts work")
    sim.add_argument("--exhaustive", metavar="THREAD", help="Minimum response time of THREAD over all schedules")
    return p


# ------------------------- shared pipeline -------------------------

def compile_file(path: str, use_prelude: bool):
    """Parse, elaborate and type check; returns the elaboration result and the program's type."""
    program = parse_program(load_source(path), path)
    prelude = load_prelude() if use_prelude else None
    result = elaborate(program, PriorityOrder(), prelude)
    ty = check_program(result.store, result.cmd)
    logger.info(f"{path}: well typed at bot, result {show_type(ty)}")
    return result, ty


def _use_prelude(args) -> bool:
    return get_settings().load_prelude and not args.no_prelude


def _print_lines(text: str) -> None:
    console.print(text, markup=False, highlight=False, soft_wrap=True)


# ------------------------- subcommands -------------------------

def cmd_check(args) -> int:
    result, ty = compile_file(args.path, _use_prelude(args))
    if args.dump_order:
        store = result.store
        _print_lines(key_value_lines([
            ("priorities", " ".join(store.names)),
            ("order", " ".join(f"{lo}<{hi}" for lo, hi in store.edges) or "-"),
            ("total", " ".join(store.total_order())),
        ]))
    if args.dump_types:
        _print_lines("\n".join(f"{name} : {show_type(t)}" for name, t in result.bindings))
    if args.dump_core:
        _print_lines(show_cmd(result.cmd))
    console.print(f"[green]ok[/green] {args.path}: {show_type(ty)}", soft_wrap=True)
    return EXIT_OK


def _emit(n: int) -> None:
    sys.stdout.write(f"{n}\n")
    sys.stdout.flush()


def cmd_run(args) -> int:
    result, _ = compile_file(args.path, _use_prelude(args))
    inputs = load_inputs(args.input) if args.input else []
    audit_report: List[str] = []
    try:
        outcome = run(result.store, result.cmd, procs=args.procs, seed=args.seed, inputs=inputs, fuel=args.fuel,
                      join_all=args.join_all, audit=args.audit, deal=args.deal, on_output=_emit,
                      audit_report=audit_report)
    except PrimlError:
        if args.audit:
            if audit_report:
                _print_lines("\n".join(audit_report[-AUDIT_TAIL:]))
            _print_lines(key_value_lines([("audited_steps", len(audit_report))]))
        raise
    if args.trace:
        lines = []
        for event in outcome.trace:
            spawned = f" spawned {','.join(event.spawned)}" if event.spawned else ""
            lines.append(f"{event.step} {event.proc} {event.thread} {event.action}{spawned}")
        path = write_output(args.trace, "\n".join(lines) + "\n")
        logger.info(f"Trace written to {path}")
    if args.audit:
        _print_lines(key_value_lines([("audited_steps", len(outcome.audit_report))]))
    if args.stats:
        console.print(response_table(outcome.thread_prios, outcome.spawn_steps, outcome.finish_steps,
                                     outcome.response_times))
        _print_lines(key_value_lines(
            [("value", show_expr(outcome.value) if outcome.value is not None else "-"), ("steps", outcome.steps)]
            + [(f"T {name}", t) for name, t in sorted(outcome.response_times.items())]
        ))
    return EXIT_OK


def cmd_cost(args) -> int:
    result, _ = compile_file(args.path, _use_prelude(args))
    inputs = load_inputs(args.input) if args.input else []
    cost = cost_program(result.store, result.cmd, inputs, args.fuel)
    g = cost.dag
    _print_lines(key_value_lines([
        ("value", show_expr(cost.value)),
        ("threads", len(g.threads)),
        ("vertices", g.size()),
        ("spawn_edges", len(g.spawn_edges)),
        ("join_edges", len(g.join_edges)),
    ]))
    if args.emit_dag:
        path = write_output(args.emit_dag, format_dag(g))
        logger.info(f"DAG written to {path}")
    if args.check_wf:
        verdicts = [("well-formed", check_well_formed(g)), ("strongly well-formed", check_strongly_well_formed(g))]
        console.print(verdict_table(verdicts))
        _print_lines(key_value_lines([("well_formed", verdicts[0][1].holds),
                                      ("strongly_well_formed", verdicts[1][1].holds)]))
    if args.audit:
        report = audit_record(result.store, cost.sig, cost.record)
        _print_lines(key_value_lines([("record_entries", len(report))]))
    if args.thread:
        a = args.thread
        prio = g.entry(a).prio
        comp = competitor_work(g, a)
        work = priority_work(comp, prio, include_equal=True)
        span = a_span(comp, a)
        metrics = [
            ("priority", prio),
            ("work", g.size()),
            ("a_span", a_span(g, a)),
            ("competitor_vertices", comp.size()),
            ("priority_work", work),
            ("competitor_span", span),
            ("procs", args.procs),
            ("bound", work / args.procs + span),
        ]
        console.print(metrics_panel(a, metrics))
        _print_lines(key_value_lines(metrics))
    return EXIT_OK


def cmd_sim(args) -> int:
    g = parse_dag(read_text(args.path))
    criterion = None
    if args.criterion:
        criterion = FairnessCriterion.parse(args.criterion).check_against(g.store)
    if args.policy == "fair":
        if criterion is None:
            raise CriterionError("--policy fair needs --criterion")
        mode = "split" if args.split else "sample"
        sched = fair_prompt_schedule(g, args.procs, criterion, args.seed, mode)
    else:
        sched = prompt_schedule(g, args.procs, args.seed, det=args.det)
    times = {a: response_time(sched, g, a) for a in g.threads}
    console.print(response_table({a: e.prio for a, e in g.threads.items()}, {}, {}, times, title="Schedule"))
    lines = [
        ("policy", args.policy),
        ("procs", args.procs),
        ("steps", len(sched)),
        ("valid", check_valid(sched, g).holds),
        ("prompt", check_prompt(sched, g).holds),
    ]
    lines += [(f"T {a}", t) for a, t in sorted(times.items())]
    if args.check_bound:
        if args.policy == "fair":
            report = check_fair_bound(g, args.check_bound, args.procs, criterion, args.rho_prime,
                                      args.trials, args.seed, "split" if args.split else "sample")
            console.print(fair_panel(report))
            lines += fair_lines(report)
        else:
            report = check_bound(g, args.check_bound, args.procs, sched)
            console.print(bound_table([report]))
            lines += bound_lines(report)
    if args.exhaustive:
        lines.append(("exhaustive_min", exhaustive_min_response(g, args.exhaustive, args.procs)))
    _print_lines(key_value_lines(lines))
    return EXIT_OK


COMMANDS = {"check": cmd_check, "run": cmd_run, "cost": cmd_cost, "sim": cmd_sim}


def main(argv: Optional[List[str]] = None):
    parser = build_parser()
    args = parser.parse_args(argv)

    # Process arguments
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.verbose:
        logging.getLogger().setLevel(logging.INFO)
    console.no_color = console.no_color or args.no_color
    err_console.no_color = err_console.no_color or args.no_color
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))

    try:
        return COMMANDS[args.command](args)
    except PrimlError as e:
        err_console.print(Diagnostic.from_error(e).rich(args.path), soft_wrap=True)
        return e.exit_code
    except (OSError, ValueError) as e:
        err_console.print(f"[bold red]Error:[/bold red] {e}", soft_wrap=True)
        return EXIT_IO
    except Exception as e:
        logger.exception(f"Error running primlc: {e}")
        err_console.print(f"[bold red]Error:[/bold red] {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
