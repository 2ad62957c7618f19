from src.cost.dag import (CostDag, ThreadEntry, Verdict, seq_compose, to_networkx, priority_work, a_span,
                          competitor_work, check_well_formed, check_strongly_well_formed)
from src.cost.semantics import ThreadRecord, cost_expr, cost_cmd, cost_thread, cost_program, audit_record
from src.cost.dagfile import parse_dag, format_dag
