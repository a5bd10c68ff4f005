"""Term and clause formatting; output re-parses with the reader"""

from app.reader.enums import OperatorType
from app.reader.logic import SYMBOL_CHARS
from app.reader.models import INFIX_OPERATORS, PREFIX_OPERATORS, Program
from app.terms.models import NIL, Clause, Const, Int, Term, Var, conjuncts, list_items

SPACED_OPERATORS = {"is", ":-"}
UNSPACED_OPERATORS = {",", ";"}


def format_atom(name: str) -> str:
    """Quote an atom name unless it reads back as the same atom."""
    if name in ("[]", "!", ";", "{}"):
        return name
    if name and name[0].islower() and all(char.isalnum() or char == "_" for char in name):
        return name
    if name and all(char in SYMBOL_CHARS for char in name):
        return name
    escaped = name.replace("'", "''")
    return f"'{escaped}'"


def format_var(var: Var) -> str:
    return var.name if var.name else f"_G{var.serial}"


def _is_symbolic(name: str) -> bool:
    return all(char in SYMBOL_CHARS for char in name)


def format_term(term: Term, max_priority: int = 999) -> str:
    """
    Render a term in operator notation.

    Args:
        term: Term to render
        max_priority: Priority context; operator terms above it are parenthesised

    Returns:
        Text that parses back to an equal term (variables up to naming)
    """
    if isinstance(term, Var):
        return format_var(term)
    if isinstance(term, Int):
        return str(term.value)
    if isinstance(term, Const):
        return format_atom(term.name)

    name, args = term.functor, term.args
    if name == "." and len(args) == 2:
        items, tail = list_items(term)
        inner = ",".join(format_term(item, 999) for item in items)
        if tail != NIL:
            inner += "|" + format_term(tail, 999)
        return f"[{inner}]"

    if len(args) == 2 and name in INFIX_OPERATORS:
        priority, kind = INFIX_OPERATORS[name]
        left_max = priority if kind is OperatorType.YFX else priority - 1
        right_max = priority if kind is OperatorType.XFY else priority - 1
        left = format_term(args[0], left_max)
        right = format_term(args[1], right_max)
        if name in UNSPACED_OPERATORS:
            text = f"{left}{name}{right}"
        elif name in SPACED_OPERATORS or not _is_symbolic(name):
            text = f"{left} {name} {right}"
        else:
            before = " " if left[-1] in SYMBOL_CHARS else ""
            after = " " if right[0] in SYMBOL_CHARS else ""
            text = f"{left}{before}{name}{after}{right}"
        return f"({text})" if priority > max_priority else text

    if len(args) == 1 and name in PREFIX_OPERATORS:
        priority, kind = PREFIX_OPERATORS[name]
        operand_max = priority if kind is OperatorType.FY else priority - 1
        text = f"{name} {format_term(args[0], operand_max)}"
        return f"({text})" if priority > max_priority else text

    inner = ",".join(format_term(arg, 999) for arg in args)
    return f"{format_atom(name)}({inner})"


def format_clause(clause: Clause) -> str:
    """One clause, one body goal per line."""
    head = format_term(clause.head, 999)
    if clause.is_fact:
        return f"{head}."
    goals = ",\n".join(f"    {format_term(goal, 999)}" for goal in conjuncts(clause.body))
    return f"{head} :-\n{goals}."


def format_program(program: Program) -> str:
    """Dynamic declarations first, then procedures separated by a blank line."""
    blocks = []
    if program.dynamic:
        blocks.append("\n".join(f":- dynamic({indicator})." for indicator in sorted(program.dynamic)))
    for clauses in program.procedures.values():
        blocks.append("\n".join(format_clause(clause) for clause in clauses))
    return "\n\n".join(blocks) + "\n"


def format_answer(bindings: dict[str, Term], residue: list[Term] | None = None) -> str:
    """`X=true, Y=false` plus ` residue:[...]` when goals stay blocked; `true` when nothing is bound."""
    text = ", ".join(f"{name}={format_term(value, 699)}" for name, value in bindings.items()) or "true"
    if residue:
        text += " residue:[" + ",".join(format_term(goal, 999) for goal in residue) + "]"
    return text
