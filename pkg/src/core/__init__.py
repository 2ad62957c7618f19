from src.core.errors import PrimlError, SourceSpan, Blocked
from src.core.settings import Settings, get_settings
from src.core.priorities import PriorityOrder, EntailContext, entails, entails_le, ctxify, warshall, order_from
from src.core.subst import free_vars, subst_expr, subst_prio, rename, alpha_equal, term_size
from src.core.pretty import show, show_type, show_expr, show_cmd, show_prio, show_constraint
from src.core.io_utils import load_source, load_inputs, read_text
from src.core.path_utils import prepare_output_file, write_output
