"""
Console reports for primlc: rich tables and panels for people, and plain
`key value` lines for scripts and golden files.
"""
from typing import Dict, Iterable, List, Sequence, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.cost.dag import Verdict
from src.sim.bounds import BoundReport, FairReport

console = Console()


def key_value_lines(pairs: Iterable[Tuple[str, object]]) -> str:
    """One `key value` pair per line, booleans in lower case."""
    lines = []
    for key, value in pairs:
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"{key} {value}")
    return "\n".join(lines)


def response_table(prios: Dict[str, str], spawned: Dict[str, int], finished: Dict[str, int],
                   response: Dict[str, int], title: str = "Response times") -> Table:
    table = Table(title=title)
    table.add_column("Thread", style="cyan")
    table.add_column("Priority")
    table.add_column("Spawned", justify="right")
    table.add_column("Finished", justify="right")
    table.add_column("T", justify="right", style="bold")
    for name in sorted(prios, key=_thread_key):
        table.add_row(
            name,
            prios[name],
            str(spawned.get(name, "-")),
            str(finished.get(name, "-")),
            str(response.get(name, "-")),
        )
    return table


def _thread_key(name: str):
    """main first, then t1, t2, ... numerically."""
    digits = name.lstrip("t")
    return (name != "main", int(digits) if digits.isdigit() else 0, name)


def metrics_panel(thread: str, metrics: Sequence[Tuple[str, object]]) -> Panel:
    body = "\n".join(f"[bold]{key}[/bold]: {value}" for key, value in metrics)
    return Panel(body, title=f"Thread {thread}", expand=False)


def verdict_table(verdicts: Sequence[Tuple[str, Verdict]]) -> Table:
    table = Table(title="Well-formedness")
    table.add_column("Check")
    table.add_column("Holds")
    table.add_column("Witness", style="yellow")
    for name, verdict in verdicts:
        table.add_row(name, "[green]yes[/green]" if verdict else "[red]no[/red]", verdict.witness or "")
    return table


def bound_table(reports: Sequence[BoundReport]) -> Table:
    table = Table(title="Prompt bound: T <= W/P + S")
    for column in ("Thread", "P", "T", "W", "S", "Bound", "Holds"):
        table.add_column(column, justify="right" if column not in ("Thread", "Holds") else "left")
    for r in reports:
        table.add_row(r.thread, str(r.procs), str(r.response), str(r.work), str(r.span),
                      f"{r.rhs:.3f}", "[green]yes[/green]" if r.holds else "[red]no[/red]")
    return table


def bound_lines(r: BoundReport) -> List[Tuple[str, object]]:
    return [
        ("thread", r.thread), ("procs", r.procs), ("response", r.response), ("work", r.work),
        ("span", r.span), ("rhs", r.rhs), ("holds", r.holds), ("well_formed", r.well_formed),
    ]


def fair_lines(r: FairReport) -> List[Tuple[str, object]]:
    return [
        ("thread", r.thread), ("procs", r.procs), ("rho_prime", r.rho_prime), ("mass", r.mass),
        ("work", r.work), ("span", r.span), ("trials", r.trials), ("mean", r.mean),
        ("stderr", r.stderr), ("rhs", r.rhs), ("holds", r.holds),
    ]


def fair_panel(r: FairReport) -> Panel:
    status = "[green]holds[/green]" if r.holds else "[red]fails[/red]"
    body = (f"mean T = {r.mean:.3f} ± {r.stderr:.3f} over {r.trials} trials\n"
            f"bound = ({r.work}/{r.procs} + {r.span}) / {r.mass:.3f} = {r.rhs:.3f}\n"
            f"rho' = {r.rho_prime}: {status}")
    return Panel(body, title=f"Fair bound for {r.thread}", expand=False)
