"""Exact arithmetic: Gaussian-rational scalars and sparse multivariate polynomials.

Every symbolic identity in the package is checked over this layer, so all
coefficients are complex numbers with rational real and imaginary parts and
every operation (arithmetic, formal derivatives, substitution) is carried out
with zero rounding.

Conventions:

* The variable universe is fixed to ``("x", "y", "xi", "eta")``.  A polynomial
  lives over an ordered subset of it and operands are auto-promoted to the
  union of their variable sets.
* Rationals serialize as decimal-free ``"num/den"`` strings (``"num"`` when
  the denominator is 1); decimals are rejected on parse.
* Term maps never hold zero coefficients, and terms are ordered
  graded-lexicographically (total degree first, then exponents) so printing
  and serialization are deterministic.
"""

from __future__ import annotations

import re as _regex
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

import numpy as np

VARS = ("x", "y", "xi", "eta")

_RATIONAL_PATTERN = _regex.compile(r"^[+-]?\d+(?:/\d+)?$")

RationalLike = Union[int, Fraction]
ScalarLike = Union[int, Fraction, "GaussianRational"]


def parse_rational(text: str) -> Fraction:
    """Parse a decimal-free rational string such as "-3/4" or "7"."""
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {type(text).__name__}")
    s = text.strip()
    if not _RATIONAL_PATTERN.match(s):
        raise ValueError(f"malformed rational {text!r}: expected 'num' or 'num/den'")
    if "/" in s and s.split("/")[1].lstrip("0") == "":
        raise ValueError(f"malformed rational {text!r}: zero denominator")
    return Fraction(s)


def format_rational(value: RationalLike) -> str:
    return str(Fraction(value))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


@dataclass(frozen=True)
class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", _as_fraction(self.re))
        object.__setattr__(self, "im", _as_fraction(self.im))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "GaussianRational":
        return cls(Fraction(0))

    @classmethod
    def one(cls) -> "GaussianRational":
        return cls(Fraction(1))

    @classmethod
    def i_unit(cls) -> "GaussianRational":
        return cls(Fraction(0), Fraction(1))

    @classmethod
    def of(cls, re: RationalLike, im: RationalLike = 0) -> "GaussianRational":
        return cls(_as_fraction(re), _as_fraction(im))

    @classmethod
    def coerce(cls, value: ScalarLike) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(_as_fraction(value))
        raise TypeError(f"cannot coerce {type(value).__name__} to GaussianRational")

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: ScalarLike) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other: ScalarLike) -> "GaussianRational":
        return GaussianRational.coerce(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        norm = o.re * o.re + o.im * o.im
        if norm == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / norm,
            (self.im * o.re - self.re * o.im) / norm,
        )

    def __rtruediv__(self, other: ScalarLike) -> "GaussianRational":
        return GaussianRational.coerce(other) / self

    def __pow__(self, exponent: int) -> "GaussianRational":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = GaussianRational.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return float(self.re) + 1j * float(self.im)

    def abs_float(self) -> float:
        return abs(self.to_complex())

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "GaussianRational":
        return cls(parse_rational(obj.get("re", "0")), parse_rational(obj.get("im", "0")))

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{format_rational(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{format_rational(mag)}i"
        return f"{format_rational(self.re)}{sign}{imag}"


GR_ZERO = GaussianRational.zero()
GR_ONE = GaussianRational.one()
GR_I = GaussianRational.i_unit()


def _validate_vars(vars_: Iterable[str]) -> tuple[str, ...]:
    vs = tuple(vars_)
    positions = []
    for v in vs:
        if v not in VARS:
            raise ValueError(f"unknown variable {v!r}: universe is {VARS}")
        positions.append(VARS.index(v))
    if positions != sorted(positions) or len(set(vs)) != len(vs):
        raise ValueError(f"variables must be an ordered subset of {VARS}, got {vs}")
    return vs


class MultiPoly:
    """Sparse polynomial over GaussianRational coefficients.

    ``terms`` maps exponent tuples (parallel to ``vars``) to nonzero
    coefficients.  The zero polynomial has an empty term map.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars_: Iterable[str], terms: Mapping[tuple, GaussianRational]):
        vs = _validate_vars(vars_)
        clean: dict[tuple, GaussianRational] = {}
        for exp, coef in terms.items():
            e = tuple(exp)
            if len(e) != len(vs):
                raise ValueError(f"exponent {e} does not match variables {vs}")
            if any((not isinstance(k, int)) or k < 0 for k in e):
                raise ValueError(f"exponents must be non-negative integers, got {e}")
            c = GaussianRational.coerce(coef)
            if c.is_zero():
                continue
            if e in clean:
                c = clean[e] + c
                if c.is_zero():
                    del clean[e]
                    continue
            clean[e] = c
        self.vars = vs
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, vars_: Iterable[str] = ()) -> "MultiPoly":
        return cls(vars_, {})

    @classmethod
    def constant(cls, value: ScalarLike, vars_: Iterable[str] = ()) -> "MultiPoly":
        c = GaussianRational.coerce(value)
        vs = _validate_vars(vars_)
        if c.is_zero():
            return cls(vs, {})
        return cls(vs, {(0,) * len(vs): c})

    @classmethod
    def variable(cls, name: str) -> "MultiPoly":
        if name not in VARS:
            raise ValueError(f"unknown variable {name!r}")
        return cls((name,), {(1,): GR_ONE})

    @classmethod
    def monomial(cls, vars_: Iterable[str], exp: tuple, coef: ScalarLike = 1) -> "MultiPoly":
        return cls(vars_, {tuple(exp): GaussianRational.coerce(coef)})

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: str) -> int:
        if var not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(var)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def coefficient(self, powers: Mapping[str, int]) -> GaussianRational:
        """Coefficient of the monomial with the given powers (others zero)."""
        for v in powers:
            if v not in self.vars and powers[v] != 0:
                return GR_ZERO
        exp = tuple(powers.get(v, 0) for v in self.vars)
        return self.terms.get(exp, GR_ZERO)

    def leading_form(self) -> "MultiPoly":
        """Homogeneous part of top total degree."""
        d = self.total_degree()
        return MultiPoly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * len(self.vars), GR_ZERO)

    # -- promotion ---------------------------------------------------------

    def promote(self, vars_: Iterable[str]) -> "MultiPoly":
        vs = _validate_vars(vars_)
        if vs == self.vars:
            return self
        if any(v not in vs for v in self.vars):
            raise ValueError(f"cannot promote {self.vars} into {vs}")
        index = {v: vs.index(v) for v in self.vars}
        terms = {}
        for exp, coef in self.terms.items():
            e = [0] * len(vs)
            for v, k in zip(self.vars, exp):
                e[index[v]] = k
            terms[tuple(e)] = coef
        return MultiPoly(vs, terms)

    def restrict(self, vars_: Iterable[str]) -> "MultiPoly":
        """Narrow to a subset of variables; the dropped ones must not occur."""
        vs = _validate_vars(vars_)
        keep = {v: vs.index(v) for v in vs}
        for pos, v in enumerate(self.vars):
            if v in keep:
                continue
            if any(exp[pos] != 0 for exp in self.terms):
                raise ValueError(f"cannot drop variable {v!r}: it occurs in the polynomial")
        terms = {}
        for exp, coef in self.terms.items():
            e = [0] * len(vs)
            for v, k in zip(self.vars, exp):
                if v in keep:
                    e[keep[v]] = k
            terms[tuple(e)] = coef
        return MultiPoly(vs, terms)

    @staticmethod
    def _union_vars(a: "MultiPoly", b: "MultiPoly") -> tuple[str, ...]:
        names = set(a.vars) | set(b.vars)
        return tuple(v for v in VARS if v in names)

    # -- arithmetic --------------------------------------------------------

    def _coerce_operand(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(GaussianRational.coerce(other), self.vars)

    def __add__(self, other) -> "MultiPoly":
        o = self._coerce_operand(other)
        vs = MultiPoly._union_vars(self, o)
        a, b = self.promote(vs), o.promote(vs)
        terms = dict(a.terms)
        for exp, coef in b.terms.items():
            terms[exp] = terms.get(exp, GR_ZERO) + coef
        return MultiPoly(vs, terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce_operand(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce_operand(other) + (-self)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        o = self._coerce_operand(other)
        vs = MultiPoly._union_vars(self, o)
        a, b = self.promote(vs), o.promote(vs)
        terms: dict[tuple, GaussianRational] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(i + j for i, j in zip(e1, e2))
                prod = c1 * c2
                if e in terms:
                    s = terms[e] + prod
                    if s.is_zero():
                        del terms[e]
                    else:
                        terms[e] = s
                elif not prod.is_zero():
                    terms[e] = prod
        return MultiPoly(vs, terms)

    __rmul__ = __mul__

    def scale(self, scalar: ScalarLike) -> "MultiPoly":
        c = GaussianRational.coerce(scalar)
        if c.is_zero():
            return MultiPoly.zero(self.vars)
        return MultiPoly(self.vars, {e: k * c for e, k in self.terms.items()})

    def __pow__(self, exponent: int) -> "MultiPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(1, self.vars)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = MultiPoly.constant(GaussianRational.coerce(other))
        if not isinstance(other, MultiPoly):
            return NotImplemented
        vs = MultiPoly._union_vars(self, other)
        return self.promote(vs).terms == other.promote(vs).terms

    def __hash__(self):
        full = self.promote(VARS)
        return hash(frozenset(full.terms.items()))

    # -- calculus ----------------------------------------------------------

    def diff(self, var: str, order: int = 1) -> "MultiPoly":
        """Formal partial derivative of the given order."""
        if var not in self.vars:
            raise ValueError(f"unknown variable {var!r}: polynomial has {self.vars}")
        if not isinstance(order, int) or order < 0:
            raise ValueError("derivative order must be a non-negative integer")
        i = self.vars.index(var)
        terms = self.terms
        for _ in range(order):
            nxt: dict[tuple, GaussianRational] = {}
            for exp, coef in terms.items():
                k = exp[i]
                if k == 0:
                    continue
                e = exp[:i] + (k - 1,) + exp[i + 1:]
                nxt[e] = nxt.get(e, GR_ZERO) + coef * k
            terms = {e: c for e, c in nxt.items() if not c.is_zero()}
        return MultiPoly(self.vars, terms)

    def substitute(self, images) -> "MultiPoly":
        """Ring substitution: every variable of self must have an image."""
        if isinstance(images, Substitution):
            images = images.images
        mapped: dict[str, MultiPoly] = {}
        for v in self.vars:
            if v not in images:
                raise ValueError(f"no substitution image for variable {v!r}")
            img = images[v]
            if not isinstance(img, MultiPoly):
                img = MultiPoly.constant(GaussianRational.coerce(img))
            mapped[v] = img
        power_cache: dict[tuple[str, int], MultiPoly] = {}

        def power(v: str, k: int) -> MultiPoly:
            key = (v, k)
            if key not in power_cache:
                power_cache[key] = mapped[v] ** k
            return power_cache[key]

        result = MultiPoly.zero()
        for exp, coef in self.terms.items():
            term = MultiPoly.constant(coef)
            for v, k in zip(self.vars, exp):
                if k:
                    term = term * power(v, k)
            result = result + term
        return result

    # -- evaluation --------------------------------------------------------

    def eval_numpy(self, values: Mapping[str, "np.ndarray | complex | float"]):
        """Numerically evaluate at float/complex points (arrays broadcast)."""
        for v in self.vars:
            if v not in values:
                raise ValueError(f"no value supplied for variable {v!r}")
        power_cache: dict[tuple[str, int], np.ndarray] = {}

        def power(v: str, k: int):
            key = (v, k)
            if key not in power_cache:
                power_cache[key] = np.asarray(values[v]) ** k
            return power_cache[key]

        shape = np.broadcast_shapes(*[np.shape(values[v]) for v in self.vars])
        total = None
        for exp, coef in self.terms.items():
            piece = np.asarray(coef.to_complex(), dtype=complex)
            for v, k in zip(self.vars, exp):
                if k:
                    piece = piece * power(v, k)
            total = piece if total is None else total + piece
        if total is None:
            return np.zeros(shape, dtype=complex)
        total = total + 0j
        if np.shape(total) != shape:
            # constant and zero-degree terms never touch the inputs
            total = np.broadcast_to(total, shape).copy()
        return total

    # -- ordering and serialization ----------------------------------------

    def sorted_terms(self) -> list[tuple[tuple, GaussianRational]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [
                {"exp": list(exp), **coef.to_json()}
                for exp, coef in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "MultiPoly":
        if "vars" not in obj or "terms" not in obj:
            raise ValueError("polynomial JSON needs 'vars' and 'terms'")
        vs = _validate_vars(obj["vars"])
        terms: dict[tuple, GaussianRational] = {}
        for entry in obj["terms"]:
            exp = tuple(entry["exp"])
            coef = GaussianRational.from_json(entry)
            if exp in terms:
                raise ValueError(f"duplicate exponent {exp} in polynomial JSON")
            terms[exp] = coef
        return cls(vs, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exp, coef in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}"
                for v, k in zip(self.vars, exp)
                if k > 0
            )
            cs = str(coef)
            if coef.re != 0 and coef.im != 0:
                cs = f"({cs})"
            if not mono:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(mono)
            elif cs == "-1":
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{cs}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


@dataclass(frozen=True)
class Substitution:
    """Named variable-to-polynomial mapping usable with MultiPoly.substitute."""

    images: Mapping[str, MultiPoly]

    def __post_init__(self) -> None:
        imgs = {}
        for v, img in dict(self.images).items():
            if v not in VARS:
                raise ValueError(f"unknown variable {v!r} in substitution")
            if not isinstance(img, MultiPoly):
                img = MultiPoly.constant(GaussianRational.coerce(img))
            imgs[v] = img
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, vars_: Iterable[str]) -> "Substitution":
        return cls({v: MultiPoly.variable(v) for v in _validate_vars(vars_)})

    def __call__(self, p: MultiPoly) -> MultiPoly:
        return p.substitute(self.images)
