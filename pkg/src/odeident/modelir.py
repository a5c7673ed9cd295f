"""Parsing and validation of ODE models in the two accepted syntaxes.

Maple-like syntax writes every time-dependent quantity with an explicit
argument::

    diff(x1(t), t) = a*x1(t) - b*x1(t)*x2(t);
    y(t) = x1(t)

Slash-d syntax writes states and outputs bare; only inputs carry (t)::

    dx1/dt = a*x1 + x2*b + u(t);
    y = x2

Classification is structural: a differentiated left-hand side is a
state, a plain left-hand side is an output, a function of t seen only on
right-hand sides is an input, and a bare constant is a parameter.
``parse_model`` rejects invalid models; ``validate`` is the
non-throwing checker for programmatically built systems.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    AmbiguousSymbol,
    DuplicateDefinition,
    ModelSyntaxError,
    NonRationalError,
    UnknownSymbolUse,
)
from .orders import TermOrder
from .poly import PolyRing, QQ, RatFun

SYNTAXES = ("auto", "maple-like", "slash-d")


# -- tokens -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>\d+\.\d+|\d+|\.\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),=;])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # name | number | op | end
    text: str
    line: int
    column: int


def _tokenize(text):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(Token(kind, "^" if tok == "**" else tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = m.start() + tok.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


# -- expression AST -----------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Sym:
    name: str
    timedep: bool  # written with (t)
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Neg:
    arg: object
    line: int = 0
    column: int = 0


class _ExprParser:
    """Recursive-descent parser over a token slice (one equation side)."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_op(self, text):
        t = self.take()
        if t.kind != "op" or t.text != text:
            raise ModelSyntaxError(f"expected {text!r}, found {t.text!r}", t.line, t.column)
        return t

    def done(self):
        return self.peek().kind == "end"

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ModelSyntaxError(f"unexpected {t.text!r}", t.line, t.column)
        return e

    def expr(self):
        t = self.peek()
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            node = BinOp(op, node, rhs, t.line, t.column)
        return node

    def term(self):
        t = self.peek()
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take().text
            rhs = self.factor()
            node = BinOp(op, node, rhs, t.line, t.column)
        return node

    def factor(self):
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.take()
            return Neg(self.factor(), t.line, t.column)
        if t.kind == "op" and t.text == "+":
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            op = self.take()
            exp = self.factor()  # right-associative, allows -2
            return BinOp("^", base, exp, op.line, op.column)
        return base

    def atom(self):
        t = self.take()
        if t.kind == "number":
            return Num(Fraction(t.text), t.line, t.column)
        if t.kind == "op" and t.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if t.kind == "name":
            if self.peek().kind == "op" and self.peek().text == "(":
                self.take()
                arg = self.take()
                if arg.kind == "name" and arg.text == "t" and self.peek().text == ")":
                    self.take()
                    return Sym(t.text, True, t.line, t.column)
                raise NonRationalError(
                    f"call {t.text}(...) is not a rational construct; only f(t) is allowed",
                    t.line,
                    t.column,
                )
            if t.text == "t":
                raise UnknownSymbolUse(
                    "explicit time dependence is not supported", t.line, t.column
                )
            return Sym(t.text, False, t.line, t.column)
        raise ModelSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.line, t.column)


# -- equations ----------------------------------------------------------------


@dataclass
class Equation:
    kind: str  # "ode" | "output"
    name: str
    lhs_timedep: bool
    rhs: object  # expression AST
    line: int
    column: int


_SLASHD_LHS = re.compile(r"^d([A-Za-z_][A-Za-z_0-9]*)/dt$")


def detect_syntax(text):
    if "diff(" in text.replace(" ", ""):
        return "maple-like"
    if re.search(r"\bd[A-Za-z_][A-Za-z_0-9]*\s*/\s*dt\b", text):
        return "slash-d"
    return "maple-like"


def parse_equations(text, syntax="auto"):
    """Split on ';' and parse each equation; returns (equations, syntax)."""
    if syntax not in SYNTAXES:
        raise ValueError(f"syntax must be one of {SYNTAXES}")
    if syntax == "auto":
        syntax = detect_syntax(text)
    tokens = _tokenize(text)
    groups = []
    cur = []
    for t in tokens:
        if t.kind == "op" and t.text == ";":
            groups.append(cur)
            cur = []
        elif t.kind != "end":
            cur.append(t)
    if cur:
        groups.append(cur)
    equations = []
    for group in groups:
        if not group:
            continue
        equations.append(_parse_equation(group, syntax))
    if not equations:
        raise ModelSyntaxError("empty model", 1, 1)
    return equations, syntax


def _parse_equation(tokens, syntax):
    end = Token("end", "", tokens[-1].line, tokens[-1].column + len(tokens[-1].text))
    eq_at = None
    for idx, t in enumerate(tokens):
        if t.kind == "op" and t.text == "=":
            eq_at = idx
            break
    if eq_at is None:
        t = tokens[0]
        raise ModelSyntaxError("equation lacks '='", t.line, t.column)
    lhs, rhs = tokens[:eq_at], tokens[eq_at + 1 :]
    if not rhs:
        t = tokens[eq_at]
        raise ModelSyntaxError("empty right-hand side", t.line, t.column)
    kind, name, timedep = _parse_lhs(lhs, syntax)
    ast = _ExprParser(rhs + [end]).parse()
    return Equation(kind, name, timedep, ast, tokens[0].line, tokens[0].column)


def _parse_lhs(tokens, syntax):
    if not tokens:
        raise ModelSyntaxError("equation lacks a left-hand side", 1, 1)
    t0 = tokens[0]
    texts = [t.text for t in tokens]
    if syntax == "maple-like" and t0.kind == "name" and t0.text == "diff":
        # diff(NAME(t), t)
        if (
            len(tokens) == 8
            and texts[1] == "("
            and tokens[2].kind == "name"
            and texts[3] == "("
            and texts[4] == "t"
            and texts[5] == ")"
            and texts[6] == ","
        ):
            raise ModelSyntaxError("malformed diff(...) left-hand side", t0.line, t0.column)
        if (
            len(tokens) == 9
            and texts[1] == "("
            and tokens[2].kind == "name"
            and texts[3] == "("
            and texts[4] == "t"
            and texts[5] == ")"
            and texts[6] == ","
            and tokens[7].kind == "name"
            and texts[8] == ")"
        ):
            if texts[7] != "t":
                raise ModelSyntaxError(
                    f"differentiation must be with respect to t, not {texts[7]!r}",
                    tokens[7].line,
                    tokens[7].column,
                )
            return "ode", tokens[2].text, True
        raise ModelSyntaxError("malformed diff(...) left-hand side", t0.line, t0.column)
    if syntax == "slash-d":
        joined = "".join(texts)
        m = _SLASHD_LHS.match(joined)
        if m:
            return "ode", m.group(1), False
    if len(tokens) == 1 and t0.kind == "name":
        if t0.text == "t":
            raise UnknownSymbolUse("t cannot be defined", t0.line, t0.column)
        return "output", t0.text, False
    if (
        len(tokens) == 4
        and t0.kind == "name"
        and texts[1] == "("
        and texts[2] == "t"
        and texts[3] == ")"
    ):
        return "output", t0.text, True
    raise ModelSyntaxError("malformed left-hand side", t0.line, t0.column)


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class SymbolInfo:
    name: str
    kind: str  # state | parameter | input | output
    line: int
    column: int


@dataclass
class SymbolTable:
    """name -> classification, with the first source location of each name."""

    entries: dict = field(default_factory=dict)

    def kind(self, name):
        return self.entries[name].kind

    def names(self, kind):
        return [s.name for s in self.entries.values() if s.kind == kind]

    def __contains__(self, name):
        return name in self.entries

    def __iter__(self):
        return iter(self.entries.values())


def _walk(ast):
    stack = [ast]
    while stack:
        node = stack.pop()
        if isinstance(node, Sym):
            yield node
        elif isinstance(node, BinOp):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Neg):
            stack.append(node.arg)


def classify_symbols(equations, syntax="maple-like"):
    """Deterministic classification of every name in the equation set."""
    states = {}
    outputs = {}
    for eq in equations:
        table = states if eq.kind == "ode" else outputs
        if eq.name in table:
            raise DuplicateDefinition(
                f"{eq.name} is defined more than once", eq.line, eq.column
            )
        table[eq.name] = eq
    for name in states:
        if name in outputs:
            o = outputs[name]
            raise UnknownSymbolUse(
                f"{name} is both differentiated and defined as an output", o.line, o.column
            )

    timedep_use = {}
    bare_use = {}
    for eq in equations:
        for sym in _walk(eq.rhs):
            target = timedep_use if sym.timedep else bare_use
            target.setdefault(sym.name, sym)
        if eq.lhs_timedep:
            timedep_use.setdefault(eq.name, Sym(eq.name, True, eq.line, eq.column))

    if syntax == "maple-like":
        for name in set(timedep_use) & set(bare_use):
            sym = bare_use[name]
            raise AmbiguousSymbol(
                f"{name} is used both as a constant and as a function of t",
                sym.line,
                sym.column,
            )
        for name in states:
            if name in bare_use:
                sym = bare_use[name]
                raise AmbiguousSymbol(
                    f"state {name} written without (t)", sym.line, sym.column
                )
    else:
        for name, sym in timedep_use.items():
            if name in states or name in outputs:
                raise UnknownSymbolUse(
                    f"{name}(t) is not an input; states and outputs are written bare "
                    "in this syntax",
                    sym.line,
                    sym.column,
                )
        for name in set(timedep_use) & set(bare_use):
            sym = bare_use[name]
            raise UnknownSymbolUse(
                f"input {name} must always be written as {name}(t)", sym.line, sym.column
            )

    table = SymbolTable()
    for eq in equations:
        kind = "state" if eq.kind == "ode" else "output"
        table.entries[eq.name] = SymbolInfo(eq.name, kind, eq.line, eq.column)
    order = []
    for eq in equations:
        for sym in _walk(eq.rhs):
            if sym.name not in table.entries and sym.name not in order:
                order.append(sym.name)
                if sym.timedep:
                    kind = "input"
                else:
                    kind = "parameter"
                table.entries[sym.name] = SymbolInfo(sym.name, kind, sym.line, sym.column)
    return table


# -- model --------------------------------------------------------------------


@dataclass
class ModelSystem:
    """Validated state-space model with exact rational right-hand sides."""

    states: tuple
    params: tuple
    inputs: tuple
    outputs: tuple
    odes: dict  # state -> RatFun
    obs: dict  # output -> RatFun
    init_symbols: dict  # state -> display symbol for the initial value
    ring: PolyRing = None
    source: str = ""
    syntax: str = "maple-like"

    @property
    def dims(self):
        return {
            "n": len(self.states),
            "lambda": len(self.params),
            "s": len(self.inputs),
            "m": len(self.outputs),
        }

    def all_symbols(self):
        return self.states + self.params + self.inputs

    def __post_init__(self):
        if self.ring is None:
            self.ring = PolyRing(self.all_symbols(), QQ, TermOrder.degrevlex())


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    column: int = 0

    def as_dict(self):
        return {
            "code": self.code,
            "message": self.message,
            "line": self.line,
            "column": self.column,
        }


def _ast_to_ratfun(ast, ring, table):
    if isinstance(ast, Num):
        return RatFun.const(ring, ast.value)
    if isinstance(ast, Sym):
        kind = table.kind(ast.name)
        if kind == "output":
            raise UnknownSymbolUse(
                f"output {ast.name} cannot appear on a right-hand side",
                ast.line,
                ast.column,
            )
        return RatFun.from_poly(ring.var(ast.name))
    if isinstance(ast, Neg):
        return -_ast_to_ratfun(ast.arg, ring, table)
    if isinstance(ast, BinOp):
        if ast.op == "^":
            if not isinstance(ast.right, Num) or ast.right.value.denominator != 1:
                raise NonRationalError(
                    "exponents must be integer literals", ast.line, ast.column
                )
            base = _ast_to_ratfun(ast.left, ring, table)
            n = int(ast.right.value)
            try:
                return base**n
            except ZeroDivisionError:
                raise ModelSyntaxError("zero raised to a negative power", ast.line, ast.column)
        left = _ast_to_ratfun(ast.left, ring, table)
        right = _ast_to_ratfun(ast.right, ring, table)
        if ast.op == "+":
            return left + right
        if ast.op == "-":
            return left - right
        if ast.op == "*":
            return left * right
        try:
            return left / right
        except ZeroDivisionError:
            raise ModelSyntaxError("division by zero", ast.line, ast.column)
    raise AssertionError(f"unknown AST node {ast!r}")


def parse_model(text, syntax="auto"):
    """Parse model text into a validated ModelSystem."""
    equations, syntax = parse_equations(text, syntax)
    table = classify_symbols(equations, syntax)
    states = tuple(eq.name for eq in equations if eq.kind == "ode")
    outputs = tuple(eq.name for eq in equations if eq.kind == "output")
    params = tuple(s.name for s in table if s.kind == "parameter")
    inputs = tuple(s.name for s in table if s.kind == "input")
    ring = PolyRing(states + params + inputs, QQ, TermOrder.degrevlex())
    odes = {}
    obs = {}
    for eq in equations:
        rf = _ast_to_ratfun(eq.rhs, ring, table)
        if eq.kind == "ode":
            odes[eq.name] = rf
        else:
            obs[eq.name] = rf
    model = ModelSystem(
        states=states,
        params=params,
        inputs=inputs,
        outputs=outputs,
        odes=odes,
        obs=obs,
        init_symbols={s: f"{s}(0)" for s in states},
        ring=ring,
        source=text,
        syntax=syntax,
    )
    problems = validate(model)
    if problems:
        d = problems[0]
        raise UnknownSymbolUse(d.message, d.line, d.column)
    return model


def validate(model):
    """Invariant check as diagnostics (never raises)."""
    out = []
    seen = set()
    for group in (model.states, model.params, model.inputs, model.outputs):
        for name in group:
            if name in seen:
                out.append(
                    Diagnostic("DuplicateSymbol", f"{name} belongs to two symbol classes")
                )
            seen.add(name)
    for s in model.states:
        if s not in model.odes:
            out.append(Diagnostic("MissingODE", f"state {s} has no differential equation"))
    for name in model.odes:
        if name not in model.states:
            out.append(Diagnostic("UnknownState", f"equation for undeclared state {name}"))
    for name in model.outputs:
        if name not in model.obs:
            out.append(Diagnostic("MissingOutput", f"output {name} has no defining equation"))
    ring_vars = set(model.ring.vars)
    legal = set(model.states) | set(model.params) | set(model.inputs)
    for label, table in (("ODE", model.odes), ("output", model.obs)):
        for name, rf in table.items():
            for i in rf.variables_used():
                var = rf.ring.vars[i]
                if var in model.outputs:
                    out.append(
                        Diagnostic(
                            "OutputOnRHS",
                            f"output {var} appears in the {label} for {name}",
                        )
                    )
                elif var not in legal:
                    out.append(
                        Diagnostic(
                            "UnknownSymbol",
                            f"{var} in the {label} for {name} is not a declared symbol",
                        )
                    )
    if not ring_vars >= legal:
        out.append(Diagnostic("RingMismatch", "model ring does not cover declared symbols"))
    return out


def structurally_equal(a, b):
    """True when two models agree as mathematical objects.

    States and outputs must match in declaration order; parameters and
    inputs as sets (their order is a rendering artifact); right-hand
    sides are compared after remapping onto a common ring.
    """
    if a.states != b.states or a.outputs != b.outputs:
        return False
    if set(a.params) != set(b.params) or set(a.inputs) != set(b.inputs):
        return False
    for name in a.states:
        if b.odes[name].to_ring(a.ring) != a.odes[name]:
            return False
    for name in a.outputs:
        if b.obs[name].to_ring(a.ring) != a.obs[name]:
            return False
    return True


# -- rendering ----------------------------------------------------------------


def _display_ratfun(rf, namemap):
    ring = rf.ring
    disp = PolyRing(tuple(namemap.get(v, v) for v in ring.vars), ring.domain, ring.order)
    return RatFun(
        rf.num.to_ring(disp, {i: i for i in range(ring.nvars)}),
        rf.den.to_ring(disp, {i: i for i in range(ring.nvars)}),
        reduce=False,
    ).render()


def pretty_print(model, syntax=None):
    """Render a ModelSystem back to parseable text."""
    syntax = syntax or model.syntax
    lines = []
    if syntax == "maple-like":
        namemap = {v: f"{v}(t)" for v in model.states + model.inputs}
        for s in model.states:
            lines.append(f"diff({s}(t), t) = {_display_ratfun(model.odes[s], namemap)}")
        for y in model.outputs:
            lines.append(f"{y}(t) = {_display_ratfun(model.obs[y], namemap)}")
    elif syntax == "slash-d":
        namemap = {v: f"{v}(t)" for v in model.inputs}
        for s in model.states:
            lines.append(f"d{s}/dt = {_display_ratfun(model.odes[s], namemap)}")
        for y in model.outputs:
            lines.append(f"{y} = {_display_ratfun(model.obs[y], namemap)}")
    else:
        raise ValueError(f"cannot render syntax {syntax!r}")
    return ";\n".join(lines) + "\n"
