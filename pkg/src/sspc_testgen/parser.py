"""Parser for ``.smx`` model files.

Surface syntax (one model per file)::

    model NAME {
      enum E { V1, V2 }
      type R { f1: bool, f2: E[2] }
      input  name: TYPE
      output name: TYPE = DEFAULT
      initial state S1 { out := expr; if cond { ... } else { ... } for i in 0..K { ... } }
      state S2 { ... }
      transition S1 -> S2 strong when expr
      transition S2 -> S1 weak   when expr
    }

Types are ``bool``, ``int(lo, hi)``, a declared enum/record name, or any
of those with ``[N]`` array suffixes.  Defaults are scalar literals,
``[d, d]`` for arrays, or ``{f1: d, f2: d}`` for records.  ``//``
comments run to end of line.

Parsing is total: it returns a (possibly absent) model plus a list of
diagnostics instead of raising.  Name resolution and type checking run
here; :func:`sspc_testgen.lang.validate` is re-run on the result so
hand-built and parsed models go through the same structural checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lang import (
    BOOL,
    ArrayTy,
    ArrayV,
    Assign,
    Binary,
    BoolTy,
    BoolV,
    Const,
    Diagnostic,
    EnumTy,
    EnumV,
    Expr,
    FieldGet,
    For,
    If,
    IndexGet,
    IntTy,
    IntV,
    InVar,
    LoopVar,
    Model,
    OutVar,
    Pos,
    RecordTy,
    RecordV,
    State,
    Stmt,
    Transition,
    Ty,
    Unary,
    Value,
    expr_ty,
    int_range,
    validate,
)

KEYWORDS = {
    "model", "enum", "type", "input", "output", "initial", "state",
    "transition", "strong", "weak", "when", "if", "else", "for", "in",
    "true", "false", "bool", "int",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>//[^\n]*)
  | (?P<nl>\n)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|:=|\.\.|==|!=|<=|>=|&&|\|\||[{}()\[\]:;,.<>+\-*!=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'ident' | 'op' | 'eof'
    text: str
    pos: Pos


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            diags.append(Diagnostic(Pos(line, col), f"unexpected character {text[i]!r}"))
            i += 1
            col += 1
            continue
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(lexeme)
        else:
            tokens.append(Token(kind, lexeme, Pos(line, col)))
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("eof", "", Pos(line, col)))
    return tokens, diags


@dataclass
class ParseResult:
    """Outcome of :func:`parse_model`; ``model`` is None when errors occurred."""

    model: Model | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.model is not None and not self.diagnostics


class _ParseAbort(Exception):
    """Internal: unrecoverable syntax error; parsing stops, diags survive."""


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.diags: list[Diagnostic] = []
        # declaration environment, filled as declarations are parsed
        self.enums: dict[str, EnumTy] = {}
        self.records: dict[str, RecordTy] = {}
        self.variants: dict[str, EnumTy] = {}
        self.inputs: dict[str, Ty] = {}
        self.outputs: dict[str, Ty] = {}
        self.input_order: list[tuple[str, Ty]] = []
        self.output_order: list[tuple[str, Ty, Value]] = []
        self.states: list[State] = []
        self.initial: str | None = None
        self.transitions: list[tuple[str, str, str, Expr, Pos]] = []
        self.current_type_decl: str | None = None

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("op", "ident")

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text == text:
            return self.next()
        self.error(tok.pos, f"expected {text!r}, found {tok.text!r}" if tok.text else f"expected {text!r}, found end of file")
        raise _ParseAbort()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            return self.next()
        self.error(tok.pos, f"expected {what}, found {tok.text!r}")
        raise _ParseAbort()

    def error(self, pos: Pos, message: str) -> None:
        self.diags.append(Diagnostic(pos, message))

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Model | None:
        try:
            self.expect("model")
            name = self.expect_ident("model name").text
            self.expect("{")
            while not self.at("}") and self.peek().kind != "eof":
                self.declaration()
            self.expect("}")
        except _ParseAbort:
            return None
        if any(d.severity == "error" for d in self.diags):
            return None
        if self.initial is None:
            self.error(Pos(1, 1), "no initial state declared")
            return None
        transitions = tuple(
            Transition(src, dst, kind, guard, i, pos)
            for i, (src, dst, kind, guard, pos) in enumerate(self.transitions)
        )
        return Model(
            name=name,
            enums=tuple(self.enums.values()),
            records=tuple(self.records.values()),
            inputs=tuple(self.input_order),
            outputs=tuple(self.output_order),
            states=tuple(self.states),
            initial=self.initial,
            transitions=transitions,
        )

    def declaration(self) -> None:
        tok = self.peek()
        if self.accept("enum"):
            self.enum_decl()
        elif self.accept("type"):
            self.record_decl()
        elif self.accept("input"):
            self.port_decl(is_input=True)
        elif self.accept("output"):
            self.port_decl(is_input=False)
        elif self.at("initial") or self.at("state"):
            initial = self.accept("initial") is not None
            self.expect("state")
            self.state_decl(initial)
        elif self.accept("transition"):
            self.transition_decl()
        else:
            self.error(tok.pos, f"unexpected {tok.text!r} at top level of model body")
            raise _ParseAbort()

    def enum_decl(self) -> None:
        name_tok = self.expect_ident("enum name")
        self.expect("{")
        variants: list[str] = []
        while True:
            variants.append(self.expect_ident("enum variant").text)
            if not self.accept(","):
                break
        self.expect("}")
        if name_tok.text in self.enums or name_tok.text in self.records:
            self.error(name_tok.pos, f"duplicate type name {name_tok.text}")
            return
        ety = EnumTy(name_tok.text, tuple(variants))
        self.enums[name_tok.text] = ety
        for v in variants:
            if v in self.variants:
                self.error(name_tok.pos, f"enum variant {v} already declared in enum {self.variants[v].name}")
            self.variants[v] = ety

    def record_decl(self) -> None:
        name_tok = self.expect_ident("record type name")
        self.current_type_decl = name_tok.text
        self.expect("{")
        fields: list[tuple[str, Ty]] = []
        while True:
            fname = self.expect_ident("field name").text
            self.expect(":")
            fields.append((fname, self.type_expr()))
            if not self.accept(","):
                break
        self.expect("}")
        self.current_type_decl = None
        if name_tok.text in self.enums or name_tok.text in self.records:
            self.error(name_tok.pos, f"duplicate type name {name_tok.text}")
            return
        self.records[name_tok.text] = RecordTy(name_tok.text, tuple(fields))

    def type_expr(self) -> Ty:
        tok = self.peek()
        ty: Ty
        if self.accept("bool"):
            ty = BOOL
        elif self.accept("int"):
            self.expect("(")
            lo = self.int_literal()
            self.expect(",")
            hi = self.int_literal()
            self.expect(")")
            ty = IntTy(lo, hi)
        else:
            name = self.expect_ident("type name").text
            if name in self.enums:
                ty = self.enums[name]
            elif name in self.records:
                ty = self.records[name]
            elif name == self.current_type_decl:
                self.error(tok.pos, f"recursive type {name}")
                raise _ParseAbort()
            else:
                self.error(tok.pos, f"unknown type {name}")
                raise _ParseAbort()
        while self.at("["):
            self.expect("[")
            length_tok = self.peek()
            if length_tok.kind != "num":
                self.error(length_tok.pos, "array length must be a constant integer")
                raise _ParseAbort()
            self.next()
            self.expect("]")
            ty = ArrayTy(ty, int(length_tok.text))
        return ty

    def int_literal(self) -> int:
        neg = self.accept("-") is not None
        tok = self.peek()
        if tok.kind != "num":
            self.error(tok.pos, f"expected integer literal, found {tok.text!r}")
            raise _ParseAbort()
        self.next()
        return -int(tok.text) if neg else int(tok.text)

    def port_decl(self, is_input: bool) -> None:
        name_tok = self.expect_ident("input name" if is_input else "output name")
        self.expect(":")
        ty = self.type_expr()
        name = name_tok.text
        if name in self.inputs or name in self.outputs:
            self.error(name_tok.pos, f"duplicate name {name}")
        if is_input:
            self.inputs[name] = ty
            self.input_order.append((name, ty))
        else:
            self.expect("=")
            default = self.default_literal(ty)
            self.outputs[name] = ty
            self.output_order.append((name, ty, default))

    def default_literal(self, ty: Ty) -> Value:
        tok = self.peek()
        if isinstance(ty, ArrayTy):
            self.expect("[")
            elems = []
            while True:
                elems.append(self.default_literal(ty.elem))
                if not self.accept(","):
                    break
            self.expect("]")
            if len(elems) != ty.length:
                self.error(tok.pos, f"array default has {len(elems)} elements, expected {ty.length}")
            return ArrayV(tuple(elems))
        if isinstance(ty, RecordTy):
            self.expect("{")
            fields = []
            by_name = dict(ty.fields)
            while True:
                fname = self.expect_ident("field name").text
                self.expect(":")
                fty = by_name.get(fname, BOOL)
                if fname not in by_name:
                    self.error(tok.pos, f"record {ty.name} has no field {fname}")
                fields.append((fname, self.default_literal(fty)))
                if not self.accept(","):
                    break
            self.expect("}")
            return RecordV(tuple(fields))
        if isinstance(ty, IntTy):
            return IntV(self.int_literal())
        if isinstance(ty, BoolTy):
            if self.accept("true"):
                return BoolV(True)
            if self.accept("false"):
                return BoolV(False)
            self.error(tok.pos, f"expected boolean literal, found {tok.text!r}")
            raise _ParseAbort()
        # enum
        vtok = self.expect_ident("enum variant")
        assert isinstance(ty, EnumTy)
        if vtok.text in ty.variants:
            return EnumV(ty.name, ty.variants.index(vtok.text))
        self.error(vtok.pos, f"unknown variant {vtok.text} of enum {ty.name}")
        raise _ParseAbort()

    def state_decl(self, initial: bool) -> None:
        name_tok = self.expect_ident("state name")
        if initial:
            if self.initial is not None:
                self.error(name_tok.pos, "more than one initial state")
            self.initial = name_tok.text
        self.expect("{")
        body = self.stmt_block(loop_vars={})
        self.states.append(State(name_tok.text, tuple(body), name_tok.pos))

    def stmt_block(self, loop_vars: dict[str, IntTy]) -> list[Stmt]:
        stmts: list[Stmt] = []
        while not self.at("}") and self.peek().kind != "eof":
            stmts.append(self.statement(loop_vars))
            self.accept(";")
        self.expect("}")
        return stmts

    def statement(self, loop_vars: dict[str, IntTy]) -> Stmt:
        tok = self.peek()
        if self.accept("if"):
            cond = self.expression(loop_vars, in_guard=False)
            self.expect("{")
            then = self.stmt_block(loop_vars)
            orelse: list[Stmt] = []
            if self.accept("else"):
                self.expect("{")
                orelse = self.stmt_block(loop_vars)
            return If(cond, tuple(then), tuple(orelse), tok.pos)
        if self.accept("for"):
            var_tok = self.expect_ident("loop variable")
            self.expect("in")
            lo_tok = self.peek()
            if lo_tok.kind == "ident":
                self.error(lo_tok.pos, "non-constant loop bound")
                raise _ParseAbort()
            lo = self.int_literal()
            self.expect("..")
            hi_tok = self.peek()
            if hi_tok.kind == "ident":
                self.error(hi_tok.pos, "non-constant loop bound")
                raise _ParseAbort()
            hi = self.int_literal()
            self.expect("{")
            inner = dict(loop_vars)
            inner[var_tok.text] = IntTy(lo, max(lo, hi - 1))
            body = self.stmt_block(inner)
            return For(var_tok.text, lo, hi, tuple(body), tok.pos)
        target = self.lvalue(loop_vars)
        self.expect(":=")
        value = self.expression(loop_vars, in_guard=False)
        return Assign(target, value, tok.pos)

    def lvalue(self, loop_vars: dict[str, IntTy]) -> Expr:
        tok = self.expect_ident("assignment target")
        if tok.text not in self.outputs:
            if tok.text in self.inputs:
                self.error(tok.pos, f"cannot assign to input {tok.text}")
            else:
                self.error(tok.pos, f"unknown identifier {tok.text}")
            raise _ParseAbort()
        expr: Expr = OutVar(tok.text, self.outputs[tok.text], tok.pos)
        return self.postfix(expr, loop_vars, in_guard=False)

    # -- expressions ----------------------------------------------------

    def expression(self, loop_vars: dict[str, IntTy], in_guard: bool) -> Expr:
        return self.or_expr(loop_vars, in_guard)

    def or_expr(self, loop_vars, in_guard) -> Expr:
        e = self.and_expr(loop_vars, in_guard)
        while self.at("||"):
            pos = self.next().pos
            r = self.and_expr(loop_vars, in_guard)
            e = Binary("||", e, r, BOOL, pos)
        return e

    def and_expr(self, loop_vars, in_guard) -> Expr:
        e = self.cmp_expr(loop_vars, in_guard)
        while self.at("&&"):
            pos = self.next().pos
            r = self.cmp_expr(loop_vars, in_guard)
            e = Binary("&&", e, r, BOOL, pos)
        return e

    def cmp_expr(self, loop_vars, in_guard) -> Expr:
        e = self.add_expr(loop_vars, in_guard)
        while self.peek().text in ("==", "!=", "<", "<=", ">", ">="):
            op_tok = self.next()
            r = self.add_expr(loop_vars, in_guard)
            e = Binary(op_tok.text, e, r, BOOL, op_tok.pos)
        return e

    def add_expr(self, loop_vars, in_guard) -> Expr:
        e = self.mul_expr(loop_vars, in_guard)
        while self.peek().text in ("+", "-"):
            op_tok = self.next()
            r = self.mul_expr(loop_vars, in_guard)
            e = Binary(op_tok.text, e, r, self._arith_ty(e, r), op_tok.pos)
        return e

    def mul_expr(self, loop_vars, in_guard) -> Expr:
        e = self.unary_expr(loop_vars, in_guard)
        while self.at("*"):
            pos = self.next().pos
            r = self.unary_expr(loop_vars, in_guard)
            e = Binary("*", e, r, self._arith_ty(e, r), pos)
        return e

    def _arith_ty(self, left: Expr, right: Expr) -> Ty:
        lt, rt = expr_ty(left), expr_ty(right)
        if isinstance(lt, IntTy) and isinstance(rt, IntTy):
            # conservative result range; validate() re-checks usage
            try:
                lo, hi = int_range(Binary("+", left, right, IntTy(0, 0)))
            except TypeError:
                return IntTy(0, 0)
            return IntTy(lo, hi)
        return IntTy(0, 0)

    def unary_expr(self, loop_vars, in_guard) -> Expr:
        tok = self.peek()
        if self.accept("!"):
            e = self.unary_expr(loop_vars, in_guard)
            return Unary("!", e, BOOL, tok.pos)
        if self.accept("-"):
            e = self.unary_expr(loop_vars, in_guard)
            ty = expr_ty(e)
            if isinstance(e, Const) and isinstance(e.value, IntV):
                return Const(IntV(-e.value.value), IntTy(-e.value.value, -e.value.value), tok.pos)
            if isinstance(ty, IntTy):
                return Unary("neg", e, IntTy(-ty.hi, -ty.lo), tok.pos)
            return Unary("neg", e, IntTy(0, 0), tok.pos)
        return self.primary(loop_vars, in_guard)

    def primary(self, loop_vars, in_guard) -> Expr:
        tok = self.peek()
        if self.accept("("):
            e = self.expression(loop_vars, in_guard)
            self.expect(")")
            return self.postfix(e, loop_vars, in_guard)
        if tok.kind == "num":
            self.next()
            v = int(tok.text)
            return Const(IntV(v), IntTy(v, v), tok.pos)
        if self.accept("true"):
            return Const(BoolV(True), BOOL, tok.pos)
        if self.accept("false"):
            return Const(BoolV(False), BOOL, tok.pos)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.next()
            name = tok.text
            base: Expr
            if name in loop_vars:
                base = LoopVar(name, loop_vars[name], tok.pos)
            elif name in self.inputs:
                base = InVar(name, self.inputs[name], tok.pos)
            elif name in self.outputs:
                base = OutVar(name, self.outputs[name], tok.pos)
            elif name in self.variants:
                ety = self.variants[name]
                base = Const(EnumV(ety.name, ety.variants.index(name)), ety, tok.pos)
            else:
                self.error(tok.pos, f"unknown identifier {name}")
                raise _ParseAbort()
            return self.postfix(base, loop_vars, in_guard)
        self.error(tok.pos, f"expected expression, found {tok.text!r}")
        raise _ParseAbort()

    def postfix(self, e: Expr, loop_vars, in_guard) -> Expr:
        while True:
            tok = self.peek()
            if self.accept("."):
                fname = self.expect_ident("field name").text
                base_ty = expr_ty(e)
                if isinstance(base_ty, RecordTy) and fname in dict(base_ty.fields):
                    e = FieldGet(e, fname, dict(base_ty.fields)[fname], tok.pos)
                else:
                    self.error(tok.pos, f"no field {fname} on value of type {getattr(base_ty, 'name', base_ty)}")
                    raise _ParseAbort()
            elif self.accept("["):
                idx = self.expression(loop_vars, in_guard)
                self.expect("]")
                base_ty = expr_ty(e)
                if isinstance(base_ty, ArrayTy):
                    e = IndexGet(e, idx, base_ty.elem, tok.pos)
                else:
                    self.error(tok.pos, "indexing a non-array value")
                    raise _ParseAbort()
            else:
                return e

    def transition_decl(self) -> None:
        src = self.expect_ident("source state").text
        pos = self.peek().pos
        self.expect("->")
        dst = self.expect_ident("target state").text
        kind_tok = self.peek()
        if self.accept("strong"):
            kind = "strong"
        elif self.accept("weak"):
            kind = "weak"
        else:
            self.error(kind_tok.pos, f"expected 'strong' or 'weak', found {kind_tok.text!r}")
            raise _ParseAbort()
        self.expect("when")
        guard = self.expression({}, in_guard=True)
        self.transitions.append((src, dst, kind, guard, pos))


def parse_model(text: str, filename: str = "<model>") -> ParseResult:
    """Parse and validate one model file; total (never raises on bad input)."""
    tokens, diags = tokenize(text)
    parser = _Parser(tokens)
    model = parser.parse() if not diags else None
    diags.extend(parser.diags)
    if model is not None:
        diags.extend(validate(model))
        if any(d.severity == "error" for d in diags):
            model = None
    return ParseResult(model, diags)


def load_model(path: str) -> ParseResult:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), filename=path)
