from src.statics.typechecker import SigEntry, TypeContext, type_expr, type_cmd, check_program, type_threadpool, type_action
from src.statics.elaborator import ElabContext, ElabResult, Elaborator, elaborate, elab_program, elab_expr, elab_decl
