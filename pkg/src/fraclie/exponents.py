"""Exact exponent algebra and sign decisions.

Exponents of power factors live in a Q-affine module over monomials in the
declared exponent atoms (the fractional order symbol, user parameters).
Every exponent in the target problem class has this shape: a-1, 2a-1,
(2a-1)*L + a, 2*c1/w - 2, 2*a/(3*n), ...
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

# A basis monomial is a sorted tuple of (symbol name, integer power).
Monomial = tuple[tuple[str, int], ...]

UNIT: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    acc: dict[str, int] = {}
    for name, k in a + b:
        acc[name] = acc.get(name, 0) + k
    return tuple(sorted((n, k) for n, k in acc.items() if k != 0))


class ExponentForm:
    """Q-linear combination of basis monomials; UNIT is the constant slot."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Mapping[Monomial, Fraction] | Iterable[tuple[Monomial, Fraction]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[Monomial, Fraction] = {}
        for mono, c in items:
            c = Fraction(c)
            if c:
                acc[mono] = acc.get(mono, Fraction(0)) + c
        object.__setattr__(self, "coeffs", tuple(sorted((m, c) for m, c in acc.items() if c != 0)))
        object.__setattr__(self, "_hash", hash(self.coeffs))

    # -- constructors ------------------------------------------------------
    @staticmethod
    def rational(value) -> "ExponentForm":
        return ExponentForm({UNIT: Fraction(value)})

    @staticmethod
    def symbol(name: str, power: int = 1, coeff=1) -> "ExponentForm":
        return ExponentForm({((name, power),): Fraction(coeff)})

    # -- ring/module operations --------------------------------------------
    def __add__(self, other: "ExponentForm") -> "ExponentForm":
        acc = dict(self.coeffs)
        for m, c in other.coeffs:
            acc[m] = acc.get(m, Fraction(0)) + c
        return ExponentForm(acc)

    def __sub__(self, other: "ExponentForm") -> "ExponentForm":
        return self + other.scale(-1)

    def scale(self, factor) -> "ExponentForm":
        f = Fraction(factor)
        return ExponentForm({m: c * f for m, c in self.coeffs})

    def __neg__(self) -> "ExponentForm":
        return self.scale(-1)

    def shift(self, value) -> "ExponentForm":
        return self + ExponentForm.rational(value)

    def subs(self, values: Mapping[str, Fraction]) -> "ExponentForm":
        """Substitute exact rational values for symbols."""
        acc: dict[Monomial, Fraction] = {}
        for mono, c in self.coeffs:
            rest = []
            for name, k in mono:
                if name in values:
                    c = c * Fraction(values[name]) ** k
                else:
                    rest.append((name, k))
            key = tuple(rest)
            acc[key] = acc.get(key, Fraction(0)) + c
        return ExponentForm(acc)

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(m == UNIT for m, _ in self.coeffs)

    def as_rational(self) -> Optional[Fraction]:
        if not self.coeffs:
            return Fraction(0)
        if self.is_rational():
            return self.coeffs[0][1]
        return None

    def as_integer(self) -> Optional[int]:
        r = self.as_rational()
        if r is not None and r.denominator == 1:
            return int(r)
        return None

    def constant_part(self) -> Fraction:
        for m, c in self.coeffs:
            if m == UNIT:
                return c
        return Fraction(0)

    def symbols(self) -> set[str]:
        return {name for mono, _ in self.coeffs for name, _ in mono}

    def __eq__(self, other) -> bool:
        return isinstance(other, ExponentForm) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self):
        return self.coeffs

    def __repr__(self) -> str:
        return f"ExponentForm({self.render()})"

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        ordered = sorted(self.coeffs, key=lambda mc: (mc[0] == UNIT, mc[0]))
        for mono, c in ordered:
            if mono == UNIT:
                body = str(c)
            else:
                names = "*".join(n if k == 1 else f"{n}^{k}" for n, k in mono)
                if c == 1:
                    body = names
                elif c == -1:
                    body = f"-{names}"
                else:
                    body = f"{c}*{names}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


ZERO_FORM = ExponentForm()
UNIT_FORM = ExponentForm.rational(1)


# ---------------------------------------------------------------------------
# Intervals and sign decisions
# ---------------------------------------------------------------------------

_INF = Fraction(10) ** 60  # stand-in for +infinity; fine for open-ended bounds


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = True
    hi_open: bool = True

    @staticmethod
    def point(v) -> "Interval":
        v = Fraction(v)
        return Interval(v, v, False, False)

    @staticmethod
    def everything() -> "Interval":
        return Interval(-_INF, _INF, True, True)

    def scale(self, f: Fraction) -> "Interval":
        if f == 0:
            return Interval.point(0)
        if f > 0:
            return Interval(self.lo * f, self.hi * f, self.lo_open, self.hi_open)
        return Interval(self.hi * f, self.lo * f, self.hi_open, self.lo_open)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi,
                        self.lo_open or other.lo_open, self.hi_open or other.hi_open)

    def __mul__(self, other: "Interval") -> "Interval":
        cands = []
        for a, ao in ((self.lo, self.lo_open), (self.hi, self.hi_open)):
            for b, bo in ((other.lo, other.lo_open), (other.hi, other.hi_open)):
                cands.append((a * b, ao or bo))
        lo = min(c for c, _ in cands)
        hi = max(c for c, _ in cands)
        lo_open = all(o for c, o in cands if c == lo)
        hi_open = all(o for c, o in cands if c == hi)
        return Interval(lo, hi, lo_open, hi_open)

    def invert(self) -> "Interval":
        # 1/I, only when the interval is sign-definite.
        if self.lo >= 0 and not (self.lo == 0 and not self.lo_open):
            if self.lo == 0:
                return Interval(Fraction(1, 1) / self.hi if self.hi < _INF else Fraction(0), _INF,
                                self.hi_open, True)
            return Interval(1 / self.hi if self.hi < _INF else Fraction(0),
                            1 / self.lo, self.hi_open if self.hi < _INF else True, self.lo_open)
        if self.hi <= 0 and not (self.hi == 0 and not self.hi_open):
            return self.scale(Fraction(-1)).invert().scale(Fraction(-1))
        return Interval.everything()

    def power(self, k: int) -> "Interval":
        if k == 0:
            return Interval.point(1)
        out = self
        base = self if k > 0 else self.invert()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def is_positive(self) -> bool:
        return self.lo > 0 or (self.lo == 0 and self.lo_open)

    def is_negative(self) -> bool:
        return self.hi < 0 or (self.hi == 0 and self.hi_open)

    def contains_zero(self) -> bool:
        return not self.is_positive() and not self.is_negative()

    def excludes_integers(self) -> bool:
        """True when the interval fits strictly inside (m, m+1) for integer m."""
        if self.hi - self.lo > 1:
            return False
        import math
        m = math.floor(self.lo)
        if self.lo == m and not self.lo_open:
            return False
        return self.hi < m + 1 or (self.hi == m + 1 and self.hi_open)


class UndecidableExponent(Exception):
    """Raised when a sign/integrality question about an exponent cannot be
    decided from the declared assumptions."""


class Assumptions:
    """Declared facts about exponent atoms.

    The fractional order symbol always lies in the open interval (0, 1).
    Parameters may be declared positive / nonzero / inside an interval, and
    ad-hoc positivity facts about whole forms can be registered.
    """

    def __init__(self, alpha_name: Optional[str] = None):
        self.alpha_name = alpha_name
        self._intervals: dict[str, Interval] = {}
        self._nonzero: set[str] = set()
        self._positive_forms: set[ExponentForm] = set()
        if alpha_name is not None:
            self._intervals[alpha_name] = Interval(Fraction(0), Fraction(1), True, True)

    def copy(self) -> "Assumptions":
        out = Assumptions()
        out.alpha_name = self.alpha_name
        out._intervals = dict(self._intervals)
        out._nonzero = set(self._nonzero)
        out._positive_forms = set(self._positive_forms)
        return out

    # -- declarations --------------------------------------------------------
    def declare_interval(self, name: str, lo, hi) -> None:
        self._intervals[name] = Interval(Fraction(lo), Fraction(hi), True, True)

    def declare_positive(self, name: str) -> None:
        self._intervals[name] = Interval(Fraction(0), _INF, True, True)

    def declare_nonzero(self, name: str) -> None:
        self._nonzero.add(name)

    def declare_form_positive(self, form: ExponentForm) -> None:
        self._positive_forms.add(form)

    def is_declared_nonzero(self, name: str) -> bool:
        return name in self._nonzero or (name in self._intervals and
                                         not self._intervals[name].contains_zero())

    # -- evaluation ------------------------------------------------------------
    def interval_of(self, form: ExponentForm) -> Interval:
        total = Interval.point(0)
        for mono, c in form.coeffs:
            piece = Interval.point(1)
            for name, k in mono:
                base = self._intervals.get(name, Interval.everything())
                piece = piece * base.power(k)
            total = total + piece.scale(c)
        return total

    def sign(self, form: ExponentForm) -> Optional[int]:
        """+1, -1, 0, or None when undecided."""
        if form.is_zero():
            return 0
        iv = self.interval_of(form)
        if iv.is_positive():
            return 1
        if iv.is_negative():
            return -1
        if form in self._positive_forms:
            return 1
        if (-form) in self._positive_forms:
            return -1
        return None

    def decide_sign(self, form: ExponentForm, context: str = "") -> int:
        s = self.sign(form)
        if s is None:
            where = f" ({context})" if context else ""
            raise UndecidableExponent(
                f"cannot decide the sign of exponent {form.render()} from the declared "
                f"assumptions{where}; declare an assumption to proceed")
        return s

    def nonpositive_integer(self, form: ExponentForm) -> Optional[bool]:
        """Is the form an exact nonpositive integer?  None when undecidable."""
        r = form.as_rational()
        if r is not None:
            return r.denominator == 1 and r <= 0
        iv = self.interval_of(form)
        if iv.is_positive():
            return False
        if iv.excludes_integers():
            return False
        return None
