"""Tokenizer and operator-precedence parser for the supported Prolog subset"""

import logging
from dataclasses import dataclass

from app.reader.enums import OperatorType
from app.reader.errors import PrologSyntaxError
from app.reader.models import (
    INFIX_OPERATORS,
    MAX_ARITY,
    PREFIX_OPERATORS,
    RESERVED_INDICATORS,
    Program,
)
from app.terms.logic import FreshCounter
from app.terms.models import NIL, TRUE, Clause, Compound, Const, Int, Term, Var, list_items, make_list

logger = logging.getLogger(__name__)

SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
SOLO_CHARS = set(";!")
PUNCTUATION = set("()[]{},|")


@dataclass(frozen=True, slots=True)
class Token:
    """One lexical token; `spaced` is True when layout precedes it."""

    kind: str
    value: str
    line: int
    column: int
    spaced: bool


def tokenize(text: str) -> list[Token]:
    """
    Split source text into tokens.

    Token kinds: atom, qatom (quoted atom), var, int, punct, end.

    Raises:
        PrologSyntaxError: On an unterminated quoted atom or comment, or a stray character
    """
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    spaced = True
    length = len(text)

    def error(message: str) -> PrologSyntaxError:
        return PrologSyntaxError(message, line, pos - line_start + 1)

    while pos < length:
        char = text[pos]
        if char == "\n":
            pos += 1
            line, line_start, spaced = line + 1, pos, True
            continue
        if char.isspace():
            pos, spaced = pos + 1, True
            continue
        if char == "%":
            while pos < length and text[pos] != "\n":
                pos += 1
            spaced = True
            continue
        if text.startswith("/*", pos):
            close = text.find("*/", pos + 2)
            if close < 0:
                raise error("unterminated block comment")
            line += text.count("\n", pos, close)
            if "\n" in text[pos:close]:
                line_start = text.rfind("\n", pos, close) + 1
            pos, spaced = close + 2, True
            continue

        start, column = pos, pos - line_start + 1
        if char.isdigit():
            while pos < length and text[pos].isdigit():
                pos += 1
            tokens.append(Token("int", text[start:pos], line, column, spaced))
        elif char == "_" or char.isupper():
            while pos < length and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(Token("var", text[start:pos], line, column, spaced))
        elif char.isalpha():
            while pos < length and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(Token("atom", text[start:pos], line, column, spaced))
        elif char == "'":
            pos += 1
            chars = []
            while True:
                if pos >= length:
                    raise error("unterminated quoted atom")
                if text[pos] == "'":
                    if text.startswith("''", pos):
                        chars.append("'")
                        pos += 2
                        continue
                    pos += 1
                    break
                if text[pos] == "\n":
                    raise error("newline in quoted atom")
                chars.append(text[pos])
                pos += 1
            tokens.append(Token("qatom", "".join(chars), line, column, spaced))
        elif char in PUNCTUATION:
            pos += 1
            tokens.append(Token("punct", char, line, column, spaced))
        elif char in SOLO_CHARS:
            pos += 1
            tokens.append(Token("atom", char, line, column, spaced))
        elif char in SYMBOL_CHARS:
            if char == "." and (pos + 1 >= length or text[pos + 1].isspace() or text[pos + 1] == "%"):
                pos += 1
                tokens.append(Token("end", ".", line, column, spaced))
            else:
                while pos < length and text[pos] in SYMBOL_CHARS:
                    pos += 1
                tokens.append(Token("atom", text[start:pos], line, column, spaced))
        else:
            raise error(f"unexpected character {char!r}")
        spaced = False
    return tokens


class Parser:
    """
    Operator-precedence parser over a token list.

    Variables are numbered from a shared counter; the name-to-variable table
    is reset per clause so equal names in different clauses stay distinct.
    """

    def __init__(self, tokens: list[Token], fresh: FreshCounter | None = None):
        self.tokens = tokens
        self.index = 0
        self.fresh = fresh or FreshCounter()
        self.variables: dict[str, Var] = {}

    # token helpers

    def peek(self, offset: int = 0) -> Token | None:
        position = self.index + offset
        return self.tokens[position] if position < len(self.tokens) else None

    def advance(self) -> Token:
        token = self.peek()
        if token is None:
            raise self.error("unexpected end of input")
        self.index += 1
        return token

    def error(self, message: str, token: Token | None = None) -> PrologSyntaxError:
        token = token or self.peek() or (self.tokens[-1] if self.tokens else None)
        if token is None:
            return PrologSyntaxError(message, 1, 1)
        return PrologSyntaxError(message, token.line, token.column)

    def expect(self, kind: str, value: str | None = None) -> Token:
        token = self.peek()
        if token is None or token.kind != kind or (value is not None and token.value != value):
            found = "end of input" if token is None else repr(token.value)
            raise self.error(f"expected {value or kind}, found {found}", token)
        return self.advance()

    def at_end(self) -> bool:
        return self.index >= len(self.tokens)

    # sentences

    def read_sentence(self) -> Term:
        """Read one `.`-terminated term at priority 1200."""
        self.variables = {}
        term, _ = self.parse(1200)
        self.expect("end")
        return term

    def make_variable(self, name: str) -> Var:
        if name == "_":
            return Var("_", self.fresh.take())
        if name not in self.variables:
            self.variables[name] = Var(name, self.fresh.take())
        return self.variables[name]

    # terms

    def parse(self, max_priority: int) -> tuple[Term, int]:
        left, left_priority = self.parse_primary(max_priority)
        return self.parse_infix(left, left_priority, max_priority)

    def parse_infix(self, left: Term, left_priority: int, max_priority: int) -> tuple[Term, int]:
        while True:
            token = self.peek()
            if token is None:
                return left, left_priority
            name = self.infix_name(token)
            if name is None:
                return left, left_priority
            priority, kind = INFIX_OPERATORS[name]
            if priority > max_priority:
                return left, left_priority
            left_max = priority if kind is OperatorType.YFX else priority - 1
            right_max = priority if kind is OperatorType.XFY else priority - 1
            if left_priority > left_max:
                return left, left_priority
            self.advance()
            right, _ = self.parse(right_max)
            left, left_priority = Compound(name, (left, right)), priority

    @staticmethod
    def infix_name(token: Token) -> str | None:
        if token.kind == "punct" and token.value == ",":
            return ","
        if token.kind == "atom" and token.value in INFIX_OPERATORS:
            return token.value
        return None

    def starts_term(self, token: Token | None) -> bool:
        if token is None or token.kind == "end":
            return False
        if token.kind == "punct":
            return token.value in "([{"
        if token.kind == "atom" and token.value in INFIX_OPERATORS and token.value not in PREFIX_OPERATORS:
            nxt = self.peek(1)
            return nxt is not None and nxt.kind == "punct" and nxt.value == "(" and not nxt.spaced
        return True

    def parse_primary(self, max_priority: int) -> tuple[Term, int]:
        token = self.advance()
        if token.kind == "int":
            return Int(int(token.value)), 0
        if token.kind == "var":
            return self.make_variable(token.value), 0
        if token.kind == "punct":
            if token.value == "(":
                term, _ = self.parse(1200)
                self.expect("punct", ")")
                return term, 0
            if token.value == "[":
                return self.parse_list(), 0
            if token.value == "{":
                raise self.error("curly terms are not supported", token)
            raise self.error(f"unexpected {token.value!r}", token)
        if token.kind == "end":
            raise self.error("unexpected end of clause", token)

        name = token.value
        following = self.peek()
        if following is not None and following.kind == "punct" and following.value == "(" and not following.spaced:
            self.advance()
            return self.parse_arguments(name, token), 0
        if token.kind == "atom" and name == "-" and following is not None and following.kind == "int" and not following.spaced:
            self.advance()
            return Int(-int(following.value)), 0
        if token.kind == "atom" and name in PREFIX_OPERATORS and self.starts_term(following):
            priority, kind = PREFIX_OPERATORS[name]
            if priority > max_priority:
                raise self.error(f"operator priority clash at {name!r}", token)
            operand_max = priority if kind is OperatorType.FY else priority - 1
            operand, _ = self.parse(operand_max)
            return Compound(name, (operand,)), priority
        return Const(name), 0

    def parse_arguments(self, name: str, token: Token) -> Term:
        args = [self.parse(999)[0]]
        while self.peek() is not None and self.peek().kind == "punct" and self.peek().value == ",":
            self.advance()
            args.append(self.parse(999)[0])
        self.expect("punct", ")")
        if len(args) > MAX_ARITY:
            raise self.error(f"arity overflow in {name}/{len(args)}", token)
        return Compound(name, tuple(args))

    def parse_list(self) -> Term:
        token = self.peek()
        if token is not None and token.kind == "punct" and token.value == "]":
            self.advance()
            return NIL
        items = [self.parse(999)[0]]
        tail: Term = NIL
        while True:
            token = self.advance()
            if token.kind == "punct" and token.value == ",":
                items.append(self.parse(999)[0])
            elif token.kind == "punct" and token.value == "|":
                tail = self.parse(999)[0]
                self.expect("punct", "]")
                break
            elif token.kind == "punct" and token.value == "]":
                break
            else:
                raise self.error(f"expected ',', '|' or ']' in list, found {token.value!r}", token)
        return make_list(items, tail)


def _dynamic_indicators(spec: Term, parser: Parser) -> list[str]:
    if isinstance(spec, Compound) and spec.functor in (",", ".") and len(spec.args) == 2:
        items = list_items(spec)[0] if spec.functor == "." else [spec.args[0], spec.args[1]]
        return [pi for item in items for pi in _dynamic_indicators(item, parser)]
    if (
        isinstance(spec, Compound)
        and spec.functor == "/"
        and isinstance(spec.args[0], Const)
        and isinstance(spec.args[1], Int)
        and spec.args[1].value >= 0
    ):
        return [f"{spec.args[0].name}/{spec.args[1].value}"]
    raise parser.error("dynamic/1 expects Name/Arity indicators")


def _make_clause(term: Term, parser: Parser) -> Clause:
    if isinstance(term, Compound) and term.functor == ":-" and len(term.args) == 2:
        head, body = term.args
    else:
        head, body = term, TRUE
    if isinstance(head, (Var, Int)):
        raise parser.error("clause head must be an atom or compound term")
    clause = Clause(head, body)
    if clause.indicator in RESERVED_INDICATORS:
        raise parser.error(f"cannot redefine built-in predicate {clause.indicator}")
    if isinstance(body, Int):
        raise parser.error("clause body must be callable")
    return clause


def parse_program(text: str) -> Program:
    """
    Parse program text into a Program.

    Args:
        text: Clauses and `:- dynamic(...)` directives, each ending in `.`

    Returns:
        Program with procedures and clauses in source order

    Raises:
        PrologSyntaxError: On malformed input
    """
    parser = Parser(tokenize(text))
    program = Program()
    while not parser.at_end():
        start = parser.peek()
        term = parser.read_sentence()
        if isinstance(term, Compound) and term.functor == ":-" and len(term.args) == 1:
            directive = term.args[0]
            if isinstance(directive, Compound) and directive.functor == "dynamic" and len(directive.args) == 1:
                program.dynamic.update(_dynamic_indicators(directive.args[0], parser))
                continue
            raise parser.error("unsupported directive", start)
        program.add_clause(_make_clause(term, parser))
    logger.debug("parsed %d clauses in %d procedures",
                 sum(len(c) for c in program.procedures.values()), len(program.procedures))
    return program


def parse_query(text: str) -> Term:
    """
    Parse a query goal; the terminating `.` is optional.

    Raises:
        PrologSyntaxError: On malformed input
    """
    tokens = tokenize(text)
    if not tokens or tokens[-1].kind != "end":
        last = tokens[-1] if tokens else None
        tokens.append(Token("end", ".", last.line if last else 1, (last.column + 1) if last else 1, True))
    parser = Parser(tokens)
    goal = parser.read_sentence()
    if not parser.at_end():
        raise parser.error("trailing input after query")
    if isinstance(goal, Int):
        raise parser.error("query must be callable")
    return goal
