"""Numeric fractional-derivative oracle.

Approximates the Riemann-Liouville derivative directly from its integral
definition, independently of the symbolic power rule:

* power-sum inputs: substitution s = t*sigma and fixed-order Gauss-Jacobi
  quadrature in sigma with weight (1-sigma)^(-alpha); a further sigma = rho^m
  change of variables absorbs rational exponents so the integrand is smooth;
* sampled inputs: the Grunwald-Letnikov difference at two resolutions with a
  Richardson comparison for the error estimate.

This module owns all floating-point evaluation, including Gamma via a
Lanczos approximation; the symbolic layer stays exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import roots_jacobi

from .exponents import ExponentForm
from .expr import (Add, Expr, Gamma, Mul, Pow, Rat, Sym, Var,
                   simplify)
from .fraccalc import PowerSum


class SingularInput(ValueError):
    """The input has a t-exponent <= -1; the defining integral diverges."""


# ---------------------------------------------------------------------------
# Lanczos Gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(x: float) -> float:
    """Gamma via the Lanczos approximation (g=7, n=9); relative accuracy is
    comfortably below 1e-13 on the real line away from the poles."""
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * lanczos_gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


# ---------------------------------------------------------------------------
# Float evaluation of exact expressions
# ---------------------------------------------------------------------------

def evaluate(e: Expr, env: Optional[dict[str, float]] = None) -> float:
    """Numeric value of a jet-free expression; symbols and variables are
    looked up by name in env."""
    env = env or {}

    def form_value(f: ExponentForm) -> float:
        total = 0.0
        for mono, c in f.coeffs:
            piece = float(c)
            for name, k in mono:
                if name not in env:
                    raise KeyError(f"no value for symbol {name}")
                piece *= env[name] ** k
            total += piece
        return total

    def go(x: Expr) -> float:
        if isinstance(x, Rat):
            return float(x.value)
        if isinstance(x, (Sym, Var)):
            if x.name not in env:
                raise KeyError(f"no value for {x.name}")
            return env[x.name]
        if isinstance(x, Gamma):
            return lanczos_gamma(go(x.arg))
        if isinstance(x, Pow):
            return go(x.base) ** form_value(x.exp)
        if isinstance(x, Mul):
            out = 1.0
            for f in x.factors:
                out *= go(f)
            return out
        if isinstance(x, Add):
            return sum(go(t) for t in x.terms)
        raise TypeError(f"cannot evaluate {x!r} numerically")

    return go(simplify(e))


# ---------------------------------------------------------------------------
# Power-sum helpers
# ---------------------------------------------------------------------------

def _powersum_terms(ps: PowerSum, env: dict[str, float]
                    ) -> list[tuple[float, Fraction]]:
    out = []
    for c, g in ps.terms:
        r = g.as_rational()
        if r is None:
            raise ValueError("oracle inputs need exact rational exponents; "
                             "substitute parameter values first")
        out.append((evaluate(c, env), r))
    return out


@dataclass(frozen=True)
class OracleResult:
    values: tuple[float, ...]
    errors: tuple[float, ...]
    method: str


def numeric_rl_oracle(f: Union[PowerSum, Callable[[float], float]],
                      alpha: Union[Fraction, float],
                      t_grid: Sequence[float], *,
                      env: Optional[dict[str, float]] = None,
                      nodes: int = 64,
                      gl_step_scale: float = 2.0 ** -12) -> OracleResult:
    """Approximate (1/Gamma(1-alpha)) d/dt int_0^t (t-s)^(-alpha) f(s) ds on
    the grid, with an error estimate per point."""
    a = float(alpha)
    if not (0.0 < a < 1.0):
        raise ValueError("the order must lie in (0, 1)")
    if isinstance(f, PowerSum):
        terms = _powersum_terms(f, env or {})
        for _, g in terms:
            if g <= -1:
                raise SingularInput(f"exponent {g} <= -1")
        vals, errs = [], []
        for t in t_grid:
            v1 = _gauss_jacobi_rl(terms, a, float(t), nodes)
            v0 = _gauss_jacobi_rl(terms, a, float(t), max(8, nodes // 2))
            vals.append(v1)
            errs.append(abs(v1 - v0))
        return OracleResult(tuple(vals), tuple(errs), "gauss-jacobi")
    vals, errs = [], []
    for t in t_grid:
        h = float(t) * gl_step_scale
        v_h = _grunwald_letnikov(f, a, float(t), h)
        v_h2 = _grunwald_letnikov(f, a, float(t), h / 2.0)
        vals.append(2.0 * v_h2 - v_h)
        errs.append(abs(v_h2 - v_h))
    return OracleResult(tuple(vals), tuple(errs), "grunwald-letnikov")


def _gauss_jacobi_rl(terms: list[tuple[float, Fraction]], a: float, t: float,
                     nodes: int) -> float:
    """d/dt [ t^(1-a) * int_0^1 (1-sigma)^(-a) f(t sigma) dsigma ] / Gamma(1-a)
    = t^(-a)/Gamma(1-a) * [ (1-a) I1 + I2 ],  I1 = int w f(t sigma),
    I2 = int w sigma f'(t sigma); sigma = rho^m makes the integrand smooth."""
    m = 1
    for _, g in terms:
        m = m * g.denominator // math.gcd(m, g.denominator)
    m = min(m, 16)
    x, w = roots_jacobi(nodes, -a, 0.0)
    rho = (x + 1.0) / 2.0
    sigma = rho ** m
    # (1 - sigma)^(-a) = (1 - rho)^(-a) * omega(rho)^(-a)
    omega = np.ones_like(rho)
    for j in range(1, m):
        omega += rho ** j
    jac = m * rho ** (m - 1) * omega ** (-a)

    def f_at(s: np.ndarray) -> np.ndarray:
        out = np.zeros_like(s)
        for c, g in terms:
            out += c * s ** float(g)
        return out

    def sfp_at(s: np.ndarray) -> np.ndarray:
        # sigma * f'(t*sigma) evaluated via s = t*sigma: sum c g t^(g-1) s^g / t^g
        out = np.zeros_like(s)
        for c, g in terms:
            if g != 0:
                out += c * float(g) * s ** float(g) / t
        return out

    i1 = 2.0 ** (a - 1.0) * np.dot(w, jac * f_at(t * sigma))
    i2 = 2.0 ** (a - 1.0) * np.dot(w, jac * sfp_at(t * sigma))
    return t ** (-a) / lanczos_gamma(1.0 - a) * ((1.0 - a) * i1 + t * i2)


def _grunwald_letnikov(f: Callable[[float], float], a: float, t: float,
                       h: float) -> float:
    n = int(math.floor(t / h + 1e-12))
    acc = 0.0
    w = 1.0
    for j in range(n + 1):
        acc += w * f(t - j * h)
        w *= (j - a) / (j + 1)
    return acc / h ** a
