"""Parser for the PDE input language.

Grammar (whitespace-insensitive, '#' starts a line comment):

    file      := decl* eq+
    decl      := "param" IDENT assumption? ";"
               | "alpha" (IDENT | NUM ("/" NUM)?) ";"
               | "space" IDENT ("," IDENT)* ";"
               | "dep" IDENT ("," IDENT)* ";"
               | "fn" IDENT "(" IDENT ")" ";"
    assumption:= "nonzero" | "positive" | "in" "(" NUM "," NUM ")"
    eq        := "Dt" "^" IDENT "(" IDENT ")" "=" expr ";"
    expr      := arithmetic over +, -, *, /, ^ with nestable derivative
                 operators D<space var>^<int>( ... ), e.g. Dx^3(u), Dx(Dy^2(u))

Expressions may also be parsed standalone against an existing signature
(solver templates, generator files, exact solutions).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .expr import (Expr, Fn, Gamma, Rat, Sym, ZERO, add, div, mul,
                   neg, pow_, simplify, to_eform, total_derivative)
from .model import ParamDecl, PDESystem, Signature, make_system, validate_system


class DslSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"syntax error at {line}:{col}: {message}")
        self.line = line
        self.col = col


class DslSemanticError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f" at {line}:{col}" if line else ""
        super().__init__(f"semantic error{where}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str       # IDENT NUM PUNCT EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+\.\d+|\d+|[,;()\[\]^+\-*/=]")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        pos = 0
        while pos < len(body):
            if body[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(body, pos)
            if not m:
                raise DslSyntaxError(f"unexpected character {body[pos]!r}",
                                     lineno, pos + 1)
            text_ = m.group(0)
            kind = ("IDENT" if text_[0].isalpha() or text_[0] == "_" else
                    "NUM" if text_[0].isdigit() else "PUNCT")
            tokens.append(Token(kind, text_, lineno, pos + 1))
            pos = m.end()
    tokens.append(Token("EOF", "", len(text.splitlines()) + 1, 1))
    return tokens


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise DslSyntaxError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def expect_kind(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise DslSyntaxError(f"expected {kind}, found {t.text!r}", t.line, t.col)
        return self.next()


def _num_fraction(s: _Stream) -> Fraction:
    t = s.expect_kind("NUM")
    val = Fraction(t.text)
    if s.peek().text == "/":
        s.next()
        t2 = s.expect_kind("NUM")
        val = val / Fraction(t2.text)
    return val


# ---------------------------------------------------------------------------
# Expression parsing against a signature
# ---------------------------------------------------------------------------

class ExprParser:
    """Recursive-descent expression parser bound to a signature.  extra_syms
    admits additional free constants (generator files declare their own)."""

    def __init__(self, sig: Signature, stream: _Stream,
                 extra_syms: Optional[set[str]] = None, allow_dt: bool = False):
        self.sig = sig
        self.s = stream
        self.extra = extra_syms or set()
        self.allow_dt = allow_dt
        self.fn_args = dict(sig.fn_decls)

    def parse(self) -> Expr:
        return self._sum()

    def _sum(self) -> Expr:
        t = self.s.peek()
        negate = False
        if t.text in ("+", "-"):
            self.s.next()
            negate = t.text == "-"
        e = self._product()
        if negate:
            e = neg(e)
        while self.s.peek().text in ("+", "-"):
            op = self.s.next().text
            rhs = self._product()
            e = add(e, neg(rhs) if op == "-" else rhs)
        return e

    def _product(self) -> Expr:
        e = self._power()
        while self.s.peek().text in ("*", "/"):
            op = self.s.next().text
            rhs = self._power()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def _power(self) -> Expr:
        base = self._primary()
        if self.s.peek().text == "^":
            tok = self.s.next()
            exp = self._exponent(tok)
            return pow_(base, exp)
        return base

    def _exponent(self, at: Token):
        t = self.s.peek()
        if t.text == "(":
            self.s.next()
            inner = self._sum()
            self.s.expect(")")
        elif t.kind == "NUM":
            return Fraction(self.s.next().text)
        elif t.text == "-":
            self.s.next()
            nt = self.s.expect_kind("NUM")
            return -Fraction(nt.text)
        elif t.kind == "IDENT":
            inner = self._atom_ident(self.s.next())
        else:
            raise DslSyntaxError(f"bad exponent start {t.text!r}", t.line, t.col)
        form = to_eform(inner)
        if form is None:
            raise DslSemanticError("exponent is not an exact affine combination "
                                   "of declared symbols", at.line, at.col)
        return form

    def _primary(self) -> Expr:
        t = self.s.peek()
        if t.text == "(":
            self.s.next()
            e = self._sum()
            self.s.expect(")")
            return e
        if t.text == "-":
            self.s.next()
            return neg(self._power())
        if t.kind == "NUM":
            self.s.next()
            return Rat(Fraction(t.text))
        if t.kind == "IDENT":
            self.s.next()
            return self._ident(t)
        raise DslSyntaxError(f"unexpected token {t.text!r}", t.line, t.col)

    def _deriv_op(self, t: Token) -> Expr:
        var_name = t.text[1:]
        if var_name == self.sig.t_name and not self.allow_dt:
            raise DslSemanticError("t-derivatives may not appear on a right-hand side",
                                   t.line, t.col)
        v = (self.sig.t if var_name == self.sig.t_name
             else self.sig.space(var_name))
        order = 1
        if self.s.peek().text == "^":
            self.s.next()
            order = int(self.s.expect_kind("NUM").text)
        self.s.expect("(")
        inner = self._sum()
        self.s.expect(")")
        out = inner
        for _ in range(order):
            out = total_derivative(out, v)
        return out

    def _atom_ident(self, t: Token) -> Expr:
        name = t.text
        if name == self.sig.alpha_name:
            return Sym(name)
        if any(p.name == name for p in self.sig.params) or name in self.extra:
            return Sym(name)
        if name in self.sig.dep_names:
            return self.sig.dep(name)
        if name == self.sig.t_name:
            return self.sig.t
        if name in self.sig.space_names:
            return self.sig.space(name)
        raise DslSemanticError(f"undeclared symbol {name!r}", t.line, t.col)

    def _ident(self, t: Token) -> Expr:
        name = t.text
        if name == "Gamma":
            self.s.expect("(")
            inner = self._sum()
            self.s.expect(")")
            return Gamma(inner)
        if name in self.fn_args:
            self.s.expect("(")
            inner = self._sum()
            self.s.expect(")")
            inner = simplify(inner)
            return Fn(name, (inner,))
        if (len(name) > 1 and name[0] == "D"
                and(name[1:] == self.sig.t_name or name[1:] in self.sig.space_names)):
            return self._deriv_op(t)
        return self._atom_ident(t)


def parse_expression(text: str, sig: Signature,
                     extra_syms: Optional[set[str]] = None) -> Expr:
    stream = _Stream(tokenize(text))
    parser = ExprParser(sig, stream, extra_syms=extra_syms)
    e = parser.parse()
    tok = stream.peek()
    if tok.kind != "EOF":
        raise DslSyntaxError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return simplify(e)


# ---------------------------------------------------------------------------
# File parsing
# ---------------------------------------------------------------------------

_RESERVED = {"param", "alpha", "space", "dep", "fn", "Gamma", "nonzero",
             "positive", "in", "t"}


# ---------------------------------------------------------------------------
# Generator files ("tau = ...; xi[x] = ...; eta[u] = ...;")
# ---------------------------------------------------------------------------

def parse_generator(text: str, sig: Signature):
    """Parse a concrete generator description against a system signature.
    Lines: optional 'param NAME;' declarations for free constants, then
    assignments 'tau = expr;', 'xi[x] = expr;', 'eta[u] = expr;'.
    Unassigned components are zero.  Returns (Generator, extra symbols)."""
    from .expr import ZERO
    from .solver import Generator

    stream = _Stream(tokenize(text))
    extra: set[str] = set()
    while stream.peek().text == "param":
        stream.next()
        nt = stream.expect_kind("IDENT")
        extra.add(nt.text)
        stream.expect(";")

    tau = ZERO
    xi = {name: ZERO for name in sig.space_names}
    eta = {name: ZERO for name in sig.dep_names}
    while stream.peek().kind != "EOF":
        head = stream.expect_kind("IDENT")
        target = None
        if head.text == "tau":
            target = ("tau", None)
        elif head.text in ("xi", "eta"):
            stream.expect("[")
            vt = stream.expect_kind("IDENT")
            stream.expect("]")
            pool = sig.space_names if head.text == "xi" else sig.dep_names
            if vt.text not in pool:
                raise DslSemanticError(f"unknown component {head.text}[{vt.text}]",
                                       vt.line, vt.col)
            target = (head.text, vt.text)
        else:
            raise DslSyntaxError(f"expected tau/xi/eta, found {head.text!r}",
                                 head.line, head.col)
        stream.expect("=")
        parser = ExprParser(sig, stream, extra_syms=extra)
        value = parser.parse()
        stream.expect(";")
        kind, name = target
        if kind == "tau":
            tau = value
        elif kind == "xi":
            xi[name] = value
        else:
            eta[name] = value

    gen = Generator(sig, simplify(tau),
                    tuple(simplify(xi[n]) for n in sig.space_names),
                    tuple(simplify(eta[n]) for n in sig.dep_names))
    return gen, extra


def parse_system(text: str) -> PDESystem:
    stream = _Stream(tokenize(text))
    params: list[ParamDecl] = []
    alpha_name: Optional[str] = None
    alpha_value: Optional[Fraction] = None
    spaces: list[str] = []
    deps: list[str] = []
    fns: list[tuple[str, str]] = []
    seen: set[str] = set()

    def declare(tok: Token):
        if tok.text in _RESERVED:
            raise DslSemanticError(f"{tok.text!r} is reserved", tok.line, tok.col)
        if tok.text in seen:
            raise DslSemanticError(f"{tok.text!r} declared twice", tok.line, tok.col)
        seen.add(tok.text)

    while stream.peek().text in ("param", "alpha", "space", "dep", "fn"):
        head = stream.next()
        if head.text == "param":
            nt = stream.expect_kind("IDENT")
            declare(nt)
            kind, lo, hi = "free", None, None
            t = stream.peek()
            if t.text in ("nonzero", "positive"):
                stream.next()
                kind = t.text
            elif t.text == "in":
                stream.next()
                stream.expect("(")
                lo = _num_fraction(stream)
                stream.expect(",")
                hi = _num_fraction(stream)
                stream.expect(")")
                kind = "interval"
            params.append(ParamDecl(nt.text, kind, lo, hi))
        elif head.text == "alpha":
            if alpha_name is not None or alpha_value is not None:
                raise DslSemanticError("alpha declared twice", head.line, head.col)
            t = stream.peek()
            if t.kind == "NUM":
                alpha_value = _num_fraction(stream)
                if not (0 < alpha_value < 1):
                    raise DslSemanticError(
                        f"fractional order {alpha_value} is outside (0,1)",
                        t.line, t.col)
                alpha_name = "alpha"
            else:
                nt = stream.expect_kind("IDENT")
                declare(nt)
                alpha_name = nt.text
        elif head.text == "space":
            nt = stream.expect_kind("IDENT")
            declare(nt)
            spaces.append(nt.text)
            while stream.peek().text == ",":
                stream.next()
                nt = stream.expect_kind("IDENT")
                declare(nt)
                spaces.append(nt.text)
        elif head.text == "dep":
            nt = stream.expect_kind("IDENT")
            declare(nt)
            deps.append(nt.text)
            while stream.peek().text == ",":
                stream.next()
                nt = stream.expect_kind("IDENT")
                declare(nt)
                deps.append(nt.text)
        else:  # fn
            nt = stream.expect_kind("IDENT")
            declare(nt)
            stream.expect("(")
            arg = stream.expect_kind("IDENT")
            stream.expect(")")
            fns.append((nt.text, arg.text))
        stream.expect(";")

    if alpha_name is None:
        t = stream.peek()
        raise DslSemanticError("missing alpha declaration", t.line, t.col)
    if not deps:
        t = stream.peek()
        raise DslSemanticError("missing dep declaration", t.line, t.col)
    for fname, arg in fns:
        if arg not in deps:
            raise DslSemanticError(f"fn {fname} argument {arg!r} is not a dependent")

    sig = Signature(alpha_name=alpha_name, space_names=tuple(spaces),
                    dep_names=tuple(deps), params=tuple(params),
                    fn_decls=tuple(fns))
    alpha_expr: Expr = Rat(alpha_value) if alpha_value is not None else Sym(alpha_name)

    rhs_by_dep: dict[str, Expr] = {}
    while stream.peek().kind != "EOF":
        head = stream.peek()
        if head.text != f"D{sig.t_name}":
            raise DslSyntaxError(f"expected an equation 'D{sig.t_name}^...', "
                                 f"found {head.text!r}", head.line, head.col)
        stream.next()
        stream.expect("^")
        at = stream.expect_kind("IDENT")
        if at.text != alpha_name:
            raise DslSemanticError(
                f"equation order {at.text!r} does not match the declared alpha "
                f"{alpha_name!r}", at.line, at.col)
        stream.expect("(")
        dt = stream.expect_kind("IDENT")
        if dt.text not in deps:
            raise DslSemanticError(f"{dt.text!r} is not a dependent", dt.line, dt.col)
        if dt.text in rhs_by_dep:
            raise DslSemanticError(f"duplicate equation for {dt.text!r}",
                                   dt.line, dt.col)
        stream.expect(")")
        stream.expect("=")
        parser = ExprParser(sig, stream)
        rhs = parser.parse()
        stream.expect(";")
        rhs_by_dep[dt.text] = rhs

    missing = [d for d in deps if d not in rhs_by_dep]
    if missing:
        raise DslSemanticError(f"missing equation(s) for {', '.join(missing)}")

    sys = make_system(sig, [rhs_by_dep[d] for d in deps], alpha=alpha_expr,
                      source=text)
    issues = [d for d in validate_system(sys)
              if d.code in ("TimeDerivativeOnRHS", "AlphaOutOfRange")]
    if issues:
        raise DslSemanticError("; ".join(str(d) for d in issues))
    return sys
