from src.ui.reports import key_value_lines, response_table, metrics_panel, verdict_table, bound_table, fair_panel
