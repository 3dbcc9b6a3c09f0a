"""Canonical-form symbolic expression kernel.

Expressions are immutable trees over exact rationals.  Exponents of power
factors are ExponentForms, so products of powers merge by exponent addition
and mathematically equal monomials normalize to identical trees.  No
floating point number ever enters an expression; numeric evaluation lives in
the oracle module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

from .exponents import (Assumptions, ExponentForm, UNIT_FORM, ZERO_FORM)


class KernelError(Exception):
    pass


class FractionalChain(KernelError):
    """Total t-derivative requested through a fractional jet object."""


class NonPolynomial(KernelError):
    """collect_monomials met a basis jet inside Gamma or an unknown-function
    argument."""


class CyclicBinding(KernelError):
    """A substitution binding mentions its own key transitively."""


class UnsupportedDerivative(KernelError):
    pass


# ---------------------------------------------------------------------------
# Node types
# ---------------------------------------------------------------------------

class Expr:
    __slots__ = ()

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return pow_(self, exponent)

    def key(self):
        raise NotImplementedError

    def __repr__(self):
        return render(self)


@dataclass(frozen=True, repr=False)
class Rat(Expr):
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    def key(self):
        return (0, self.value)


@dataclass(frozen=True, repr=False)
class Sym(Expr):
    """A named scalar: declared parameter, the fractional order, or an
    unknown constant introduced by the ansatz/solver."""
    name: str

    def key(self):
        return (1, self.name)


@dataclass(frozen=True, repr=False)
class Var(Expr):
    """Independent variable.  axis == -1 is time, axis >= 0 a space slot."""
    name: str
    axis: int

    def key(self):
        return (2, self.axis, self.name)

    @property
    def is_time(self):
        return self.axis < 0


@dataclass(frozen=True, repr=False)
class Jet(Expr):
    """Jet coordinate u_s^theta, with optional integer t-order or a
    fractional marker: frac == k means the object Dt^(alpha-k) u_s."""
    dep: int
    theta: tuple[int, ...] = ()
    t_order: int = 0
    frac: Optional[int] = None

    def __post_init__(self):
        if any(k < 0 for k in self.theta) or self.t_order < 0:
            raise ValueError("negative derivative index")
        if self.frac is not None and (self.frac < 0 or self.t_order > 0):
            raise ValueError("frac offset excludes positive t_order")

    def key(self):
        return (3, self.dep, sum(self.theta), self.theta, self.t_order,
                0 if self.frac is None else 1, self.frac or 0)


@dataclass(frozen=True, repr=False)
class Fn(Expr):
    """Unknown/opaque function application with a derivative multi-index
    aligned with its argument list.  frac marks an opaque Dt^alpha applied
    on top (the argument list must then contain the time variable)."""
    fname: str
    args: tuple[Expr, ...]
    deriv: tuple[int, ...] = ()
    frac: bool = False

    def __post_init__(self):
        if not self.deriv:
            object.__setattr__(self, "deriv", (0,) * len(self.args))
        if len(self.deriv) != len(self.args):
            raise ValueError("derivative multi-index length mismatch")

    def key(self):
        return (4, self.fname, tuple(a.key() for a in self.args), self.deriv,
                1 if self.frac else 0)

    def bump(self, slot: int) -> "Fn":
        d = list(self.deriv)
        d[slot] += 1
        return Fn(self.fname, self.args, tuple(d), self.frac)


@dataclass(frozen=True, repr=False)
class Gamma(Expr):
    arg: Expr

    def key(self):
        return (5, self.arg.key())


@dataclass(frozen=True, repr=False)
class Pow(Expr):
    base: Expr
    exp: ExponentForm

    def key(self):
        return (6, self.base.key(), self.exp.sort_key())


@dataclass(frozen=True, repr=False)
class Mul(Expr):
    factors: tuple[Expr, ...]

    def key(self):
        return (7, len(self.factors), tuple(f.key() for f in self.factors))


@dataclass(frozen=True, repr=False)
class Add(Expr):
    terms: tuple[Expr, ...]

    def key(self):
        return (8, len(self.terms), tuple(t.key() for t in self.terms))


ZERO = Rat(Fraction(0))
ONE = Rat(Fraction(1))

ExprLike = Union[Expr, int, Fraction]


def as_expr(v: ExprLike) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Rat(Fraction(v))
    raise TypeError(f"cannot coerce {v!r} to an expression")


def as_eform(v) -> ExponentForm:
    if isinstance(v, ExponentForm):
        return v
    if isinstance(v, (int, Fraction)):
        return ExponentForm.rational(v)
    if isinstance(v, Expr):
        f = to_eform(v)
        if f is None:
            raise ValueError(f"exponent {v!r} is not Q-affine in exponent atoms")
        return f
    raise TypeError(f"cannot coerce {v!r} to an exponent form")


# ---------------------------------------------------------------------------
# Canonical constructors (children assumed canonical)
# ---------------------------------------------------------------------------

def _npow(base: Expr, exp: ExponentForm) -> Expr:
    if exp.is_zero():
        return ONE
    if exp == UNIT_FORM:
        return base
    if isinstance(base, Rat):
        if base.value == 0:
            return ZERO
        if base.value == 1:
            return ONE
        k = exp.as_integer()
        if k is not None:
            return Rat(base.value ** k)
        return Pow(base, exp)
    if isinstance(base, Pow):
        k = exp.as_integer()
        if k is not None:
            return _npow(base.base, base.exp.scale(k))
        return Pow(base, exp)
    if isinstance(base, Mul) and exp.as_integer() is not None:
        return _nmul([_npow(f, exp) for f in base.factors])
    return Pow(base, exp)


def _base_exp(f: Expr) -> tuple[Expr, ExponentForm]:
    if isinstance(f, Pow):
        return f.base, f.exp
    return f, UNIT_FORM


def _nmul(factors: Iterable[Expr]) -> Expr:
    coeff = Fraction(1)
    merged: dict[tuple, list] = {}
    stack = list(factors)
    while stack:
        f = stack.pop(0)
        if isinstance(f, Rat):
            if f.value == 0:
                return ZERO
            coeff *= f.value
            continue
        if isinstance(f, Mul):
            stack = list(f.factors) + stack
            continue
        b, e = _base_exp(f)
        k = b.key()
        if k in merged:
            merged[k][1] = merged[k][1] + e
        else:
            merged[k] = [b, e]
    out: list[Expr] = []
    for _, (b, e) in merged.items():
        p = _npow(b, e)
        if isinstance(p, Rat):
            if p.value == 0:
                return ZERO
            coeff *= p.value
        elif p is not ONE:
            out.append(p)
    out.sort(key=lambda x: x.key())
    if not out:
        return Rat(coeff)
    if coeff == 0:
        return ZERO
    if coeff == 1:
        return out[0] if len(out) == 1 else Mul(tuple(out))
    return Mul((Rat(coeff),) + tuple(out))


def _coeff_mono(term: Expr) -> tuple[Fraction, Optional[Expr]]:
    """Split a canonical non-Add term into rational coefficient and monomial."""
    if isinstance(term, Rat):
        return term.value, None
    if isinstance(term, Mul) and isinstance(term.factors[0], Rat):
        rest = term.factors[1:]
        mono = rest[0] if len(rest) == 1 else Mul(rest)
        return term.factors[0].value, mono
    return Fraction(1), term


def _with_coeff(coeff: Fraction, mono: Optional[Expr]) -> Expr:
    if mono is None or coeff == 0:
        return Rat(coeff)
    if coeff == 1:
        return mono
    if isinstance(mono, Mul):
        return Mul((Rat(coeff),) + mono.factors)
    return Mul((Rat(coeff), mono))


def _nadd(terms: Iterable[Expr]) -> Expr:
    const = Fraction(0)
    merged: dict[tuple, list] = {}
    stack = list(terms)
    while stack:
        t = stack.pop(0)
        if isinstance(t, Add):
            stack = list(t.terms) + stack
            continue
        c, mono = _coeff_mono(t)
        if mono is None:
            const += c
            continue
        k = mono.key()
        if k in merged:
            merged[k][0] += c
        else:
            merged[k] = [c, mono]
    out = [_with_coeff(c, m) for c, m in merged.values() if c != 0]
    if const != 0:
        out.append(Rat(const))

    def term_order(x: Expr):
        c, mono = _coeff_mono(x)
        return ((-1,), c) if mono is None else (mono.key(), c)

    out.sort(key=term_order)
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


# ---------------------------------------------------------------------------
# Public constructors
# ---------------------------------------------------------------------------

def add(*terms: ExprLike) -> Expr:
    return _nadd([simplify(as_expr(t)) for t in terms])


def mul(*factors: ExprLike) -> Expr:
    return _nmul([simplify(as_expr(f)) for f in factors])


def neg(e: ExprLike) -> Expr:
    return _nmul([Rat(Fraction(-1)), simplify(as_expr(e))])


def pow_(base: ExprLike, exponent) -> Expr:
    return _npow(simplify(as_expr(base)), as_eform(exponent))


def div(num: ExprLike, den: ExprLike) -> Expr:
    d = simplify(as_expr(den))
    if isinstance(d, Rat):
        if d.value == 0:
            raise ZeroDivisionError("division by zero expression")
        return _nmul([Rat(1 / d.value), simplify(as_expr(num))])
    return _nmul([simplify(as_expr(num)), _npow(d, ExponentForm.rational(-1))])


def simplify(e: Expr) -> Expr:
    """Canonical form: flattened, sorted, like monomials merged, exponent
    algebra applied.  Idempotent.  Does not distribute products over sums."""
    if isinstance(e, (Rat, Sym, Var, Jet)):
        return e
    if isinstance(e, Fn):
        return Fn(e.fname, tuple(simplify(a) for a in e.args), e.deriv, e.frac)
    if isinstance(e, Gamma):
        return Gamma(simplify(e.arg))
    if isinstance(e, Pow):
        return _npow(simplify(e.base), e.exp)
    if isinstance(e, Mul):
        return _nmul([simplify(f) for f in e.factors])
    if isinstance(e, Add):
        return _nadd([simplify(t) for t in e.terms])
    raise TypeError(f"not an expression: {e!r}")


def expand(e: Expr) -> Expr:
    """Distribute products over sums and integer powers of sums; result is a
    canonical sum of monomial terms."""
    e = simplify(e)
    return _expand(e)


def _expand(e: Expr) -> Expr:
    if isinstance(e, Add):
        return _nadd([_expand(t) for t in e.terms])
    if isinstance(e, Pow):
        base = _expand(e.base)
        k = e.exp.as_integer()
        if isinstance(base, Add) and k is not None and k > 1:
            out = base
            for _ in range(k - 1):
                out = _mul_expanded(out, base)
            return out
        return _npow(base, e.exp)
    if isinstance(e, Mul):
        parts = [_expand(f) for f in e.factors]
        out = ONE
        for p in parts:
            out = _mul_expanded(out, p)
        return out
    return e


def _mul_expanded(a: Expr, b: Expr) -> Expr:
    aa = a.terms if isinstance(a, Add) else (a,)
    bb = b.terms if isinstance(b, Add) else (b,)
    return _nadd([_nmul([x, y]) for x in aa for y in bb])


# ---------------------------------------------------------------------------
# ExponentForm conversions
# ---------------------------------------------------------------------------

def to_eform(e: Expr) -> Optional[ExponentForm]:
    """Convert to a Q-affine combination over monomials in Syms, or None."""
    e = expand(e)
    terms = e.terms if isinstance(e, Add) else (e,)
    acc = ZERO_FORM
    for t in terms:
        c, mono = _coeff_mono(t)
        if mono is None:
            acc = acc + ExponentForm.rational(c)
            continue
        factors = mono.factors if isinstance(mono, Mul) else (mono,)
        key = []
        for f in factors:
            b, ex = _base_exp(f)
            k = ex.as_integer()
            if not isinstance(b, Sym) or k is None:
                return None
            key.append((b.name, k))
        acc = acc + ExponentForm({tuple(sorted(key)): c})
    return acc


def from_eform(f: ExponentForm) -> Expr:
    terms = []
    for mono, c in f.coeffs:
        factors: list[Expr] = [Rat(c)]
        for name, k in mono:
            factors.append(_npow(Sym(name), ExponentForm.rational(k)))
        terms.append(_nmul(factors))
    return _nadd(terms)


def eform_subs(f: ExponentForm, bindings: Mapping[str, Expr]) -> ExponentForm:
    """Substitute expressions (themselves exponent-affine) for symbols."""
    out = ZERO_FORM
    for mono, c in f.coeffs:
        piece = ExponentForm.rational(c)
        for name, k in mono:
            if name in bindings:
                rep = to_eform(bindings[name])
                if rep is None:
                    raise ValueError(
                        f"binding for exponent symbol {name} is not exponent-affine")
                piece = _eform_mul(piece, _eform_pow(rep, k))
            else:
                piece = _eform_mul(piece, ExponentForm.symbol(name, k))
    # note: _eform_mul keeps monomial structure exact
        out = out + piece
    return out


def _eform_mul(a: ExponentForm, b: ExponentForm) -> ExponentForm:
    from .exponents import _mono_mul
    acc: dict = {}
    for m1, c1 in a.coeffs:
        for m2, c2 in b.coeffs:
            m = _mono_mul(m1, m2)
            acc[m] = acc.get(m, Fraction(0)) + c1 * c2
    return ExponentForm(acc)


def _eform_pow(a: ExponentForm, k: int) -> ExponentForm:
    if k == 0:
        return UNIT_FORM
    if k < 0:
        if len(a.coeffs) != 1:
            raise ValueError("cannot invert a non-monomial exponent form")
        mono, c = a.coeffs[0]
        inv = ExponentForm({tuple((n, -p) for n, p in mono): 1 / c})
        return _eform_pow(inv, -k)
    out = a
    for _ in range(k - 1):
        out = _eform_mul(out, a)
    return out


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def _mentions(e: Expr, keys: set) -> set:
    found = set()

    def walk(x: Expr):
        kk = x.key()
        if kk in keys:
            found.add(kk)
        if isinstance(x, (Mul, Add)):
            for c in (x.factors if isinstance(x, Mul) else x.terms):
                walk(c)
        elif isinstance(x, Pow):
            walk(x.base)
            for name in x.exp.symbols():
                sk = Sym(name).key()
                if sk in keys:
                    found.add(sk)
        elif isinstance(x, Gamma):
            walk(x.arg)
        elif isinstance(x, Fn):
            for a in x.args:
                walk(a)

    walk(e)
    return found


def substitute(e: Expr, bindings: Mapping[Expr, ExprLike]) -> Expr:
    """Simultaneous substitution followed by simplify.  Keys may be Sym, Var,
    Jet or Fn nodes.  Raises CyclicBinding when a binding's value mentions its
    own key transitively."""
    norm: dict[tuple, tuple[Expr, Expr]] = {}
    for k, v in bindings.items():
        k = simplify(as_expr(k))
        if not isinstance(k, (Sym, Var, Jet, Fn)):
            raise TypeError(f"substitution key must be an atom, got {k!r}")
        norm[k.key()] = (k, simplify(as_expr(v)))

    keyset = set(norm)
    graph = {kk: _mentions(v, keyset) for kk, (_, v) in norm.items()}
    state: dict[tuple, int] = {}

    def dfs(node, trail):
        state[node] = 1
        for nxt in graph[node]:
            if state.get(nxt) == 1 or nxt == node:
                raise CyclicBinding(f"binding cycle through {norm[node][0]!r}")
            if state.get(nxt) is None:
                dfs(nxt, trail + [nxt])
        state[node] = 2

    for kk, (_, v) in norm.items():
        if kk in _mentions(v, {kk}):
            raise CyclicBinding(f"binding for {norm[kk][0]!r} mentions its own key")
    for kk in norm:
        if state.get(kk) is None:
            dfs(kk, [kk])

    sym_bindings = {k.name: v for _, (k, v) in norm.items() if isinstance(k, Sym)}

    def rep(x: Expr) -> Expr:
        kk = x.key()
        if kk in norm:
            return norm[kk][1]
        if isinstance(x, Mul):
            return _nmul([rep(f) for f in x.factors])
        if isinstance(x, Add):
            return _nadd([rep(t) for t in x.terms])
        if isinstance(x, Pow):
            base = rep(x.base)
            exp = x.exp
            if sym_bindings and (exp.symbols() & sym_bindings.keys()):
                exp = eform_subs(exp, sym_bindings)
            return _npow(base, exp)
        if isinstance(x, Gamma):
            return Gamma(rep(x.arg))
        if isinstance(x, Fn):
            return Fn(x.fname, tuple(rep(a) for a in x.args), x.deriv, x.frac)
        return x

    return simplify(rep(simplify(e)))


def subs_params(e: Expr, values: Mapping[str, Fraction]) -> Expr:
    return substitute(e, {Sym(n): Rat(Fraction(v)) for n, v in values.items()})


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def _occurs_var(e: Expr, v: Var) -> bool:
    if isinstance(e, Var):
        return e == v
    if isinstance(e, (Mul, Add)):
        return any(_occurs_var(c, v) for c in (e.factors if isinstance(e, Mul) else e.terms))
    if isinstance(e, Pow):
        return _occurs_var(e.base, v)
    if isinstance(e, Gamma):
        return _occurs_var(e.arg, v)
    if isinstance(e, Fn):
        return any(_occurs_var(a, v) for a in e.args)
    return False


def _diff(e: Expr, leaf: Callable[[Expr], Optional[Expr]]) -> Expr:
    """Generic derivation: leaf returns the derivative of an atom or None for
    'derivative is zero'."""
    d = leaf(e)
    if d is not None:
        return d
    if isinstance(e, (Rat, Sym)):
        return ZERO
    if isinstance(e, (Var, Jet, Fn)):
        return ZERO
    if isinstance(e, Gamma):
        inner = _diff(e.arg, leaf)
        if inner != ZERO:
            raise UnsupportedDerivative("no derivative rule for Gamma of a "
                                        "variable-dependent argument")
        return ZERO
    if isinstance(e, Pow):
        db = _diff(e.base, leaf)
        if db == ZERO:
            return ZERO
        return _nmul([from_eform(e.exp), _npow(e.base, e.exp - UNIT_FORM), db])
    if isinstance(e, Mul):
        out = []
        for i, f in enumerate(e.factors):
            df = _diff(f, leaf)
            if df == ZERO:
                continue
            out.append(_nmul([df] + [g for j, g in enumerate(e.factors) if j != i]))
        return _nadd(out)
    if isinstance(e, Add):
        return _nadd([_diff(t, leaf) for t in e.terms])
    raise TypeError(f"not an expression: {e!r}")


def partial_derivative(e: Expr, v: Var) -> Expr:
    """Explicit partial derivative: jets are independent coordinates."""
    def leaf(x: Expr) -> Optional[Expr]:
        if isinstance(x, Var):
            return ONE if x == v else ZERO
        if isinstance(x, Jet):
            return ZERO
        if isinstance(x, Fn):
            out = []
            for i, a in enumerate(x.args):
                if isinstance(a, Var) and a == v:
                    if x.frac and v.is_time:
                        raise FractionalChain(
                            "t-derivative through an opaque fractional application")
                    out.append(x.bump(i))
            return _nadd(out)
        return None

    return simplify(_diff(simplify(e), leaf))


def _bump_jet(j: Jet, v: Var) -> Jet:
    if v.is_time:
        if j.frac is not None:
            raise FractionalChain(
                "total t-derivative through a fractional jet is undefined in the kernel")
        return Jet(j.dep, j.theta, j.t_order + 1, None)
    theta = list(j.theta)
    while len(theta) <= v.axis:
        theta.append(0)
    theta[v.axis] += 1
    return Jet(j.dep, tuple(theta), j.t_order, j.frac)


def total_derivative(e: Expr, v: Var) -> Expr:
    """Total derivative D_v: chains through jet coordinates and through
    unknown-function arguments."""
    def leaf(x: Expr) -> Optional[Expr]:
        if isinstance(x, Var):
            return ONE if x == v else ZERO
        if isinstance(x, Jet):
            return _bump_jet(x, v)
        if isinstance(x, Fn):
            out = []
            for i, a in enumerate(x.args):
                da = leaf(a)
                if da is None or da == ZERO:
                    continue
                if x.frac and v.is_time:
                    raise FractionalChain(
                        "t-derivative through an opaque fractional application")
                out.append(_nmul([x.bump(i), da]))
            return _nadd(out)
        return None

    return simplify(_diff(simplify(e), leaf))


def diff_wrt(e: Expr, atom: Expr) -> Expr:
    """Partial derivative with respect to a jet coordinate (or Var/Sym)."""
    atom = simplify(as_expr(atom))
    if isinstance(atom, Var):
        return partial_derivative(e, atom)
    akey = atom.key()

    def leaf(x: Expr) -> Optional[Expr]:
        if x.key() == akey:
            return ONE
        if isinstance(x, Fn):
            out = []
            for i, a in enumerate(x.args):
                if a.key() == akey:
                    out.append(x.bump(i))
            return _nadd(out) if out else ZERO
        if isinstance(x, (Var, Jet, Sym)):
            return ZERO
        return None

    return simplify(_diff(simplify(e), leaf))


# ---------------------------------------------------------------------------
# Structure queries
# ---------------------------------------------------------------------------

def atoms(e: Expr, kind) -> list:
    """All distinct atoms of the given node class, in canonical order."""
    found: dict[tuple, Expr] = {}

    def walk(x: Expr):
        if isinstance(x, kind):
            found[x.key()] = x
        if isinstance(x, Mul):
            for f in x.factors:
                walk(f)
        elif isinstance(x, Add):
            for t in x.terms:
                walk(t)
        elif isinstance(x, Pow):
            walk(x.base)
        elif isinstance(x, Gamma):
            walk(x.arg)
        elif isinstance(x, Fn):
            for a in x.args:
                walk(a)

    walk(e)
    return [found[k] for k in sorted(found)]


def depends_on_jets(e: Expr) -> bool:
    if isinstance(e, Jet):
        return True
    if isinstance(e, Fn):
        return any(depends_on_jets(a) for a in e.args)
    if isinstance(e, Mul):
        return any(depends_on_jets(f) for f in e.factors)
    if isinstance(e, Add):
        return any(depends_on_jets(t) for t in e.terms)
    if isinstance(e, Pow):
        return depends_on_jets(e.base)
    if isinstance(e, Gamma):
        return depends_on_jets(e.arg)
    return False


def add_terms(e: Expr) -> tuple[Expr, ...]:
    return e.terms if isinstance(e, Add) else (e,)


def mul_factors(e: Expr) -> tuple[Expr, ...]:
    return e.factors if isinstance(e, Mul) else (e,)


# ---------------------------------------------------------------------------
# Monomial collection
# ---------------------------------------------------------------------------

def collect_monomials(e: Expr, basis: Iterable[Jet]) -> dict[Expr, Expr]:
    """Collect an expression polynomial in the given jets: returns a map
    monomial -> coefficient with coefficients free of basis jets.  Powers of a
    basis jet with symbolic exponent are distinct monomial atoms."""
    basis_keys = {simplify(as_expr(b)).key() for b in basis}
    e = expand(e)
    if e == ZERO:
        return {}

    def contains_basis(x: Expr) -> bool:
        if x.key() in basis_keys:
            return True
        if isinstance(x, Mul):
            return any(contains_basis(f) for f in x.factors)
        if isinstance(x, Add):
            return any(contains_basis(t) for t in x.terms)
        if isinstance(x, Pow):
            return contains_basis(x.base)
        if isinstance(x, (Gamma, Fn)):
            inner = x.arg if isinstance(x, Gamma) else None
            args = (inner,) if inner is not None else x.args
            return any(contains_basis(a) for a in args if a is not None)
        return False

    out: dict[tuple, list] = {}
    for term in add_terms(e):
        keyf: list[Expr] = []
        cof: list[Expr] = []
        for f in mul_factors(term):
            b, _ = _base_exp(f)
            if b.key() in basis_keys:
                keyf.append(f)
                continue
            if isinstance(b, (Gamma, Fn)) and contains_basis(b):
                raise NonPolynomial(
                    f"basis jet inside an opaque application: {render(f)}")
            cof.append(f)
        mono = _nmul(keyf) if keyf else ONE
        coeff = _nmul(cof) if cof else ONE
        k = mono.key()
        if k in out:
            out[k][1] = _nadd([out[k][1], coeff])
        else:
            out[k] = [mono, coeff]
    return {mono: coeff for mono, coeff in
            (out[k] for k in sorted(out)) if coeff != ZERO}


# ---------------------------------------------------------------------------
# Gamma normalization
# ---------------------------------------------------------------------------

_MAX_GAMMA_SHIFTS = 64


def gamma_simplify(e: Expr, assumptions: Optional[Assumptions] = None) -> Expr:
    """Normalize Gamma applications: integer arguments evaluate to factorials
    and any argument provably greater than 1 is base-shifted with the
    recurrence Gamma(z) = (z-1) Gamma(z-1).  Ratios Gamma(z+m)/Gamma(z) then
    cancel through ordinary exponent merging.  Idempotent."""
    asm = assumptions if assumptions is not None else Assumptions()

    def transform(x: Expr) -> Expr:
        if isinstance(x, Gamma):
            arg = transform(x.arg)
            f = to_eform(arg)
            if f is None:
                return Gamma(arg)
            r = f.as_rational()
            if r is not None and r.denominator == 1:
                if r >= 1:
                    return Rat(Fraction(math.factorial(int(r) - 1)))
                return Gamma(arg)  # pole; callers handle these before building
            prefactors: list[Expr] = []
            for _ in range(_MAX_GAMMA_SHIFTS):
                if asm.sign(f - UNIT_FORM) == 1:
                    f = f - UNIT_FORM
                    prefactors.append(from_eform(f))
                else:
                    break
            core: Expr
            r = f.as_rational()
            if r is not None and r == 1:
                core = ONE
            else:
                core = Gamma(from_eform(f))
            return _nmul(prefactors + [core])
        if isinstance(x, Mul):
            return _nmul([transform(f) for f in x.factors])
        if isinstance(x, Add):
            return _nadd([transform(t) for t in x.terms])
        if isinstance(x, Pow):
            return _npow(transform(x.base), x.exp)
        if isinstance(x, Fn):
            return Fn(x.fname, tuple(transform(a) for a in x.args), x.deriv, x.frac)
        return x

    return transform(simplify(e))


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _frac_str(c: Fraction) -> str:
    return str(c)


def render(e: Expr, sig=None) -> str:
    """Deterministic plain-text rendering.  sig (a model.Signature) supplies
    variable names; without it generic names u1.., x1.., t, a are used."""
    dep_name = (lambda s: sig.dep_names[s]) if sig is not None else (lambda s: f"u{s + 1}")
    space_name = (lambda i: sig.space_names[i]) if sig is not None else (lambda i: f"x{i + 1}")
    alpha_name = sig.alpha_name if sig is not None else "a"

    def jet_str(j: Jet) -> str:
        base = dep_name(j.dep)
        subs = "t" * j.t_order + "".join(space_name(i) * k for i, k in enumerate(j.theta))
        body = base + ("_" + subs if subs else "")
        if j.frac is not None:
            off = f"{alpha_name}-{j.frac}" if j.frac else alpha_name
            return f"Dt^({off})[{body}]"
        return body

    def fn_str(f: Fn) -> str:
        subs = []
        for a, k in zip(f.args, f.deriv):
            if k:
                nm = a.name if isinstance(a, Var) else render(a, sig)
                subs.append(nm * k)
        body = f.fname + ("_" + "".join(subs) if subs else "")
        if f.frac:
            return f"Dt^{alpha_name}[{body}]"
        return body

    def pw(x: Expr, prec: int) -> str:
        # prec: 0 add-context, 1 mul-context, 2 power/atom context
        if isinstance(x, Rat):
            s = _frac_str(x.value)
            return f"({s})" if (prec >= 1 and (x.value < 0 or x.value.denominator != 1)) else s
        if isinstance(x, Sym):
            return x.name
        if isinstance(x, Var):
            return x.name
        if isinstance(x, Jet):
            return jet_str(x)
        if isinstance(x, Fn):
            return fn_str(x)
        if isinstance(x, Gamma):
            return f"Gamma({pw(x.arg, 0)})"
        if isinstance(x, Pow):
            b = pw(x.base, 2)
            if isinstance(x.base, (Add, Mul, Pow)):
                b = f"({b})"
            es = x.exp.render()
            needs = not (x.exp.is_rational() and x.exp.as_rational().denominator == 1
                         and x.exp.as_rational() >= 0)
            return f"{b}^({es})" if needs else f"{b}^{es}"
        if isinstance(x, Mul):
            num, den = [], []
            coeff = Fraction(1)
            for f in x.factors:
                if isinstance(f, Rat):
                    coeff = f.value
                    continue
                b, ex = _base_exp(f)
                r = ex.as_rational()
                if r is not None and r < 0:
                    den.append(_npow(b, ex.scale(-1)))
                else:
                    num.append(f)
            parts = []
            sign = ""
            if coeff == -1 and num:
                sign = "-"
            elif coeff != 1 or not num:
                parts.append(pw(Rat(coeff), 1))
            parts.extend(pw(f, 1) if not isinstance(f, Add) else f"({pw(f, 0)})"
                         for f in num)
            s = sign + "*".join(parts)
            if den:
                ds = "*".join(pw(f, 1) if not isinstance(f, (Add, Mul)) else f"({pw(f, 0)})"
                              for f in den)
                if len(den) > 1:
                    ds = f"({ds})"
                s = f"{s}/{ds}"
            return s
        if isinstance(x, Add):
            c0, m0 = _coeff_mono(x.terms[0])
            out = ("-" + pw(_with_coeff(-c0, m0), 1)) if c0 < 0 else pw(x.terms[0], 0)
            for t in x.terms[1:]:
                c, mono = _coeff_mono(t)
                if c < 0:
                    out += " - " + pw(_with_coeff(-c, mono), 1)
                else:
                    out += " + " + pw(t, 1)
            return f"({out})" if prec >= 1 else out
        raise TypeError(f"not an expression: {x!r}")

    return pw(simplify(e), 0)
