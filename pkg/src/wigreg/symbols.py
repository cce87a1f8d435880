"""Symbol calculus for planar operators built from the two commuting factors.

An operator spec holds coefficients ``c[j,k]`` and a rational parameter ``p``
(``q = 1 - p``).  It denotes the planar operator

    B = sum c[j,k] (x - q D_y)^j (y + p D_x)^k        (right factor acts first)

with ``D = -i d/dx``.  Because ``[y + p D_x, x - q D_y] = -i`` matches
``[D, x]`` in one variable, B is the image of the one-variable model

    A = sum c[j,k] x^j D^k

under the algebra map ``x -> x - q D_y``, ``D -> y + p D_x``.

All symbols here are left (Kohn-Nirenberg) symbols: for P with symbol
``sigma_P(x, y, xi, eta)`` and Q acting first,

    sigma_{P o Q} = sum_beta (-i)^{|beta|}/beta! *
                    d^beta_{(xi,eta)} sigma_P * d^beta_{(x,y)} sigma_Q,

a finite sum for polynomial symbols.  The Weyl-Wick transform ``W`` and its
inverse are the finite expansions of exp(-Lap/4) exp(-(i/2) d_x d_xi) and its
reciprocal, exactly invertible on polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Mapping

from .exact import (
    GR_I,
    GR_ONE,
    GaussianRational,
    MultiPoly,
    format_rational,
    parse_rational,
)

PHASE_VARS = ("x", "y", "xi", "eta")
MODEL_VARS = ("x", "xi")


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficients c[j,k] (nonzero, j,k >= 0) plus the rational parameter p."""

    coeffs: Mapping[tuple[int, int], GaussianRational]
    p: Fraction

    def __post_init__(self) -> None:
        cleaned: dict[tuple[int, int], GaussianRational] = {}
        for key, value in dict(self.coeffs).items():
            j, k = key
            if not (isinstance(j, int) and isinstance(k, int)) or j < 0 or k < 0:
                raise ValueError(f"coefficient index {key} must be non-negative integers")
            c = GaussianRational.coerce(value)
            if not c.is_zero():
                cleaned[(j, k)] = c
        if not cleaned:
            raise ValueError("empty operator: no nonzero coefficients")
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "p", Fraction(self.p))

    @property
    def q(self) -> Fraction:
        return 1 - self.p

    @property
    def order(self) -> int:
        return max(j + k for j, k in self.coeffs)

    def with_p(self, p: Fraction) -> "OperatorSpec":
        return OperatorSpec(self.coeffs, Fraction(p))

    def a_symbol(self) -> MultiPoly:
        """Left symbol of the one-variable model: sum c[j,k] x^j xi^k."""
        terms = {(j, k): c for (j, k), c in self.coeffs.items()}
        return MultiPoly(MODEL_VARS, terms)

    def complex_coeffs(self) -> dict[tuple[int, int], complex]:
        return {jk: c.to_complex() for jk, c in self.coeffs.items()}

    def to_json(self) -> dict:
        entries = []
        for (j, k), c in sorted(self.coeffs.items()):
            entries.append({"j": j, "k": k, **c.to_json()})
        return {"p": format_rational(self.p), "coeffs": entries}

    @classmethod
    def from_json(cls, obj: Mapping) -> "OperatorSpec":
        if "p" not in obj:
            raise ValueError("operator spec needs a rational 'p'")
        p = parse_rational(obj["p"]) if isinstance(obj["p"], str) else Fraction(obj["p"])
        raw = obj.get("coeffs")
        if not isinstance(raw, list):
            raise ValueError("operator spec needs a 'coeffs' list")
        coeffs: dict[tuple[int, int], GaussianRational] = {}
        for entry in raw:
            try:
                j, k = int(entry["j"]), int(entry["k"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"bad coefficient entry {entry!r}") from exc
            if j < 0 or k < 0:
                raise ValueError(f"negative index in coefficient entry {entry!r}")
            if (j, k) in coeffs:
                raise ValueError(f"duplicate coefficient index ({j},{k})")
            coeffs[(j, k)] = GaussianRational.from_json(entry)
        coeffs = {jk: c for jk, c in coeffs.items() if not c.is_zero()}
        if not coeffs:
            raise ValueError("empty operator: no nonzero coefficients")
        return cls(coeffs, p)


def symbol_compose(p_sym: MultiPoly, q_sym: MultiPoly) -> MultiPoly:
    """Left symbol of P o Q (Q acts first) for polynomial symbols."""
    a = p_sym.promote(PHASE_VARS)
    b = q_sym.promote(PHASE_VARS)
    bx_max = min(a.degree_in("xi"), b.degree_in("x"))
    by_max = min(a.degree_in("eta"), b.degree_in("y"))
    total = MultiPoly.zero(PHASE_VARS)
    for bx in range(max(bx_max, 0) + 1):
        for by in range(max(by_max, 0) + 1):
            da = a.diff("xi", bx).diff("eta", by)
            if da.is_zero():
                continue
            db = b.diff("x", bx).diff("y", by)
            if db.is_zero():
                continue
            coef = ((-GR_I) ** (bx + by)) * Fraction(1, factorial(bx) * factorial(by))
            total = total + (da * db).scale(coef)
    return total


def factor_symbols(spec: OperatorSpec) -> tuple[MultiPoly, MultiPoly]:
    """Left symbols of the two first-order factors (x - q*eta, y + p*xi)."""
    x = MultiPoly.variable("x")
    y = MultiPoly.variable("y")
    xi = MultiPoly.variable("xi")
    eta = MultiPoly.variable("eta")
    return x - eta.scale(spec.q), y + xi.scale(spec.p)


def build_b_symbol(spec: OperatorSpec) -> MultiPoly:
    """Left symbol of B, composing factor symbols in operator order."""
    xf, yf = factor_symbols(spec)
    total = MultiPoly.zero(PHASE_VARS)
    for (j, k), c in sorted(spec.coeffs.items()):
        term = MultiPoly.constant(GR_ONE, PHASE_VARS)
        for _ in range(k):
            term = symbol_compose(yf, term)
        for _ in range(j):
            term = symbol_compose(xf, term)
        total = total + term.scale(c)
    return total


def a_tilde(spec: OperatorSpec) -> MultiPoly:
    """Degenerate model symbol: the value of the full symbol along the planes.

    a~(x, xi) = sum_{j,k} c[j,k] sum_{n<=min(j,k)} (i q)^n n! C(j,n) C(k,n)
                x^{j-n} xi^{k-n}.
    """
    iq = GR_I * spec.q
    terms: dict[tuple[int, int], GaussianRational] = {}
    for (j, k), c in spec.coeffs.items():
        for n in range(min(j, k) + 1):
            coef = c * (iq ** n) * (factorial(n) * comb(j, n) * comb(k, n))
            key = (j - n, k - n)
            acc = terms.get(key)
            terms[key] = coef if acc is None else acc + coef
    return MultiPoly(MODEL_VARS, {e: c for e, c in terms.items() if not c.is_zero()})


@dataclass(frozen=True)
class DegeneracyCheck:
    holds: bool
    value: MultiPoly      # symbol value along the planes, in base-point variables (x, y)
    residual: MultiPoly   # difference against the degenerate model symbol


def verify_degeneracy(spec: OperatorSpec) -> DegeneracyCheck:
    """Check that the full symbol is constant along x -> x0 + q*eta, y -> y0 - p*xi.

    The base point (x0, y0) is encoded by reusing the names (x, y) in the
    substituted result; the degenerate model symbol is compared with xi
    renamed to y.
    """
    b = build_b_symbol(spec)
    x = MultiPoly.variable("x")
    y = MultiPoly.variable("y")
    xi = MultiPoly.variable("xi")
    eta = MultiPoly.variable("eta")
    value = b.substitute({
        "x": x + eta.scale(spec.q),
        "y": y - xi.scale(spec.p),
        "xi": xi,
        "eta": eta,
    })
    model = a_tilde(spec).substitute({"x": x, "xi": y})
    residual = value - model
    return DegeneracyCheck(residual.is_zero(), value, residual)


def _mixed_series(a: MultiPoly, unit: GaussianRational) -> MultiPoly:
    """sum_l (unit^l / l!) (d_x d_xi)^l a, a finite sum for polynomials."""
    out = a
    cur = a
    scale = GR_ONE
    l = 0
    while True:
        cur = cur.diff("x", 1).diff("xi", 1)
        if cur.is_zero():
            return out
        l += 1
        scale = scale * unit * Fraction(1, l)
        out = out + cur.scale(scale)


def _laplace_series(a: MultiPoly, unit: Fraction) -> MultiPoly:
    """sum_n (unit^n / n!) Lap^n a with Lap = d_x^2 + d_xi^2."""
    out = a
    cur = a
    scale = Fraction(1)
    n = 0
    while True:
        cur = cur.diff("x", 2) + cur.diff("xi", 2)
        if cur.is_zero():
            return out
        n += 1
        scale = scale * unit / n
        out = out + cur.scale(scale)


def weyl_wick(a: MultiPoly) -> MultiPoly:
    """Transform whose positivity controls the coherent-state energy form.

    W[a] = exp(-Lap/4) exp(-(i/2) d_x d_xi) a, expanded exactly.
    """
    a2 = a.promote(MODEL_VARS) if set(a.vars) <= set(MODEL_VARS) else None
    if a2 is None:
        raise ValueError(f"expected a symbol in {MODEL_VARS}, got variables {a.vars}")
    mixed = _mixed_series(a2, -GR_I * Fraction(1, 2))
    return _laplace_series(mixed, Fraction(-1, 4))


def weyl_wick_inverse(a: MultiPoly) -> MultiPoly:
    """Exact inverse of weyl_wick on polynomials (the commuting exponentials)."""
    a2 = a.promote(MODEL_VARS) if set(a.vars) <= set(MODEL_VARS) else None
    if a2 is None:
        raise ValueError(f"expected a symbol in {MODEL_VARS}, got variables {a.vars}")
    lap = _laplace_series(a2, Fraction(1, 4))
    return _mixed_series(lap, GR_I * Fraction(1, 2))


@dataclass(frozen=True)
class LinearChange:
    """Invertible rational 2x2 change of variables T acting on the plane."""

    rows: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.rows)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("T must be a 2x2 matrix")
        object.__setattr__(self, "rows", rows)
        if self.det == 0:
            raise ValueError("T must be invertible (nonzero determinant)")

    @property
    def det(self) -> Fraction:
        (a, b), (c, d) = self.rows
        return a * d - b * c

    def transpose(self) -> "LinearChange":
        (a, b), (c, d) = self.rows
        return LinearChange(((a, c), (b, d)))

    def inverse(self) -> "LinearChange":
        (a, b), (c, d) = self.rows
        det = self.det
        return LinearChange(((d / det, -b / det), (-c / det, a / det)))

    def to_json(self) -> list:
        return [[format_rational(v) for v in row] for row in self.rows]

    @classmethod
    def from_json(cls, obj) -> "LinearChange":
        if not isinstance(obj, list) or len(obj) != 2:
            raise ValueError("T must be a 2x2 matrix of rationals")
        rows = []
        for row in obj:
            if not isinstance(row, list) or len(row) != 2:
                raise ValueError("T must be a 2x2 matrix of rationals")
            rows.append(tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in row))
        return cls((rows[0], rows[1]))


def t_conjugate(symbol: MultiPoly, change: LinearChange) -> MultiPoly:
    """Symbol of the conjugated operator: (x,y) -> T'(x,y), (xi,eta) -> T^-1(xi,eta)."""
    tp = change.transpose().rows
    ti = change.inverse().rows
    x = MultiPoly.variable("x")
    y = MultiPoly.variable("y")
    xi = MultiPoly.variable("xi")
    eta = MultiPoly.variable("eta")
    images = {
        "x": x.scale(tp[0][0]) + y.scale(tp[0][1]),
        "y": x.scale(tp[1][0]) + y.scale(tp[1][1]),
        "xi": xi.scale(ti[0][0]) + eta.scale(ti[0][1]),
        "eta": xi.scale(ti[1][0]) + eta.scale(ti[1][1]),
    }
    return symbol.promote(PHASE_VARS).substitute(images)
