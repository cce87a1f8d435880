"""Certificates for hypo-ellipticity and model-operator injectivity.

The regularity question for the planar operator B reduces to two questions
about the one-variable model symbol a(x, xi):

* is a hypo-elliptic (derivative-to-symbol ratios decay at infinity, zeros
  confined to a compact set), and
* is the model operator A injective on Schwartz functions?

Each positive answer is packaged as a Certificate that a verifier can
re-check from its embedded subject without re-running any search.  Exact
certificates rest on closed rational arithmetic; evidence certificates record
deterministic sampling.  A RegularityVerdict combines one certificate of each
kind (or a non-injectivity witness) into Regular / NotRegular / Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .exact import (
    GR_I,
    GR_ONE,
    GR_ZERO,
    GaussianRational,
    MultiPoly,
    format_rational,
    parse_rational,
)
from .symbols import MODEL_VARS, symbol_compose

EXACT = "exact"
EVIDENCE = "evidence"

HYPO_KINDS = ("HypoQuadraticForm", "HypoNewtonPolygon", "HypoFirstOrder", "HypoUnfalsified")
INJ_KINDS = ("InjQuadraticEstimate", "InjSOS", "InjWickPositive", "InjKernelEscape")
ALL_KINDS = HYPO_KINDS + INJ_KINDS + ("NotInjectiveWitness", "NotApplicable")


@dataclass
class Certificate:
    """A machine-checkable claim with the data needed to re-derive it."""

    kind: str
    grade: str
    payload: dict
    subject: dict
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.grade not in (EXACT, EVIDENCE, "none"):
            raise ValueError(f"unknown certificate grade {self.grade!r}")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "grade": self.grade,
            "payload": self.payload,
            "subject": self.subject,
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Certificate":
        return cls(
            kind=obj["kind"],
            grade=obj["grade"],
            payload=dict(obj.get("payload", {})),
            subject=dict(obj.get("subject", {})),
            notes=list(obj.get("notes", [])),
        )


@dataclass(frozen=True)
class NewtonPolygonData:
    """Exponent polygon of the recognized symbol family (with the origin)."""

    vertices: tuple[tuple[int, int], ...]
    complete: bool


@dataclass(frozen=True)
class NewtonFamilyParams:
    """Weights and exponents of the two-block family

    a = lam*x^(2h) + mu*sigma(M^m D^(2n) M^m) + nu*sigma(D^n M^(2m) D^n)
        + sig*xi^(2k).
    """

    lam: Fraction
    mu: Fraction
    nu: Fraction
    sig: Fraction
    h: int
    k: int
    m: int
    n: int

    def __post_init__(self) -> None:
        for name in ("h", "k", "m", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    def to_json(self) -> dict:
        return {
            "lam": format_rational(self.lam),
            "mu": format_rational(self.mu),
            "nu": format_rational(self.nu),
            "sig": format_rational(self.sig),
            "h": self.h, "k": self.k, "m": self.m, "n": self.n,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "NewtonFamilyParams":
        return cls(
            lam=parse_rational(obj["lam"]), mu=parse_rational(obj["mu"]),
            nu=parse_rational(obj["nu"]), sig=parse_rational(obj["sig"]),
            h=int(obj["h"]), k=int(obj["k"]), m=int(obj["m"]), n=int(obj["n"]),
        )


@dataclass
class RegularityVerdict:
    status: str                      # Regular | NotRegular | Unknown
    chain: list[Certificate]
    witness: Optional[str] = None
    grade: str = EXACT

    def __post_init__(self) -> None:
        kinds = [c.kind for c in self.chain]
        if self.status == "Regular":
            if not any(k in HYPO_KINDS for k in kinds) or not any(k in INJ_KINDS for k in kinds):
                raise ValueError("Regular verdict needs a hypo-ellipticity and an injectivity certificate")
        elif self.status == "NotRegular":
            if not any(k in HYPO_KINDS for k in kinds) or "NotInjectiveWitness" not in kinds:
                raise ValueError("NotRegular verdict needs a hypo-ellipticity certificate and a kernel witness")
        elif self.status != "Unknown":
            raise ValueError(f"unknown verdict status {self.status!r}")

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "grade": self.grade,
            "witness": self.witness,
            "chain": [c.to_json() for c in self.chain],
        }


# ---------------------------------------------------------------------------
# hypo-ellipticity falsifier (heuristic, evidence only)
# ---------------------------------------------------------------------------

DEFAULT_RADII = (4.0, 8.0, 16.0, 32.0, 64.0)
DEFAULT_SAMPLES = 2048
_ZERO_REL_TOL = 1e-12


@dataclass(frozen=True)
class FalsifyResult:
    falsified: bool
    witness: Optional[dict]
    trend: tuple[tuple[float, float], ...]   # (radius, max gradient ratio)


def _model_symbol(a: MultiPoly) -> MultiPoly:
    if not set(a.vars) <= set(MODEL_VARS):
        raise ValueError(f"expected a one-variable model symbol in {MODEL_VARS}, got {a.vars}")
    return a.promote(MODEL_VARS)


def _refine_circle_zero(sym: MultiPoly, radius: float, theta0: float,
                        spread: float) -> tuple[float, float]:
    """Minimize |sym| on the circle arc theta0 +- spread by nested grids."""
    lo, hi = theta0 - spread, theta0 + spread
    best = theta0
    for _ in range(10):
        grid = np.linspace(lo, hi, 65)
        vals = np.abs(sym.eval_numpy({"x": radius * np.cos(grid), "xi": radius * np.sin(grid)}))
        best = float(grid[int(np.argmin(vals))])
        width = (hi - lo) / 16.0
        lo, hi = best - width, best + width
    return best, float(np.abs(sym.eval_numpy({"x": radius * np.cos(best),
                                              "xi": radius * np.sin(best)})))


def hypo_falsify(a: MultiPoly, radii: Sequence[float] = DEFAULT_RADII,
                 samples_per_circle: int = DEFAULT_SAMPLES) -> FalsifyResult:
    """Sample circles for zeros at large radius or non-decaying gradient ratios.

    Falsified when the symbol vanishes on the outermost circle (at a sample, or
    after refining a sample whose Newton step |a|/|grad a| fits inside the
    sample spacing), or when the per-circle maximum of (|d_x a| + |d_xi a|)/|a|
    fails to decrease (last > first and last > 1e-1).  A pass is evidence,
    never a proof.
    """
    sym = _model_symbol(a)
    if sym.is_zero():
        raise ValueError("zero symbol cannot be tested for hypo-ellipticity")
    radii = tuple(float(r) for r in radii)
    if len(radii) < 2 or any(r <= 0 for r in radii) or list(radii) != sorted(set(radii)):
        raise ValueError("radii must be at least two strictly increasing positive values")
    if samples_per_circle < 8:
        raise ValueError("need at least 8 samples per circle")

    dx = sym.diff("x", 1)
    dxi = sym.diff("xi", 1)
    theta = 2.0 * np.pi * np.arange(samples_per_circle) / samples_per_circle
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    trend = []
    witness = None
    falsified = False
    for radius in radii:
        xs, xis = radius * cos_t, radius * sin_t
        vals = np.abs(sym.eval_numpy({"x": xs, "xi": xis}))
        grads = np.abs(dx.eval_numpy({"x": xs, "xi": xis})) + np.abs(dxi.eval_numpy({"x": xs, "xi": xis}))
        scale = sum(c.abs_float() * radius ** sum(e) for e, c in sym.terms.items())
        zero_mask = vals <= _ZERO_REL_TOL * max(scale, 1.0)
        if radius == radii[-1] and zero_mask.any():
            idx = int(np.argmax(zero_mask))
            witness = {"x": float(xs[idx]), "xi": float(xis[idx]), "abs_value": float(vals[idx]),
                       "reason": "symbol vanishes on the outermost circle"}
            falsified = True
        if radius == radii[-1] and not falsified:
            # a zero may hide between samples: flag points whose Newton step
            # along the circle is shorter than the sample spacing, then refine
            spacing = 2.0 * np.pi / samples_per_circle
            candidates = vals <= grads * (radius * spacing)
            if candidates.any():
                idx = int(np.argmin(np.where(candidates, vals, np.inf)))
                best_theta, best_val = _refine_circle_zero(sym, radius, theta[idx], spacing)
                if best_val <= 1e-8 * max(scale, 1.0):
                    witness = {"x": float(radius * np.cos(best_theta)),
                               "xi": float(radius * np.sin(best_theta)),
                               "abs_value": best_val,
                               "reason": "symbol vanishes on the outermost circle"}
                    falsified = True
        live = ~zero_mask
        max_ratio = float(np.max(grads[live] / vals[live])) if live.any() else float("inf")
        trend.append((radius, max_ratio))

    if not falsified:
        first, last = trend[0][1], trend[-1][1]
        if last > first and last > 1e-1:
            xs, xis = radii[-1] * cos_t, radii[-1] * sin_t
            vals = np.abs(sym.eval_numpy({"x": xs, "xi": xis}))
            grads = np.abs(dx.eval_numpy({"x": xs, "xi": xis})) + np.abs(dxi.eval_numpy({"x": xs, "xi": xis}))
            safe = np.where(vals > 0, vals, np.inf)
            idx = int(np.argmax(grads / safe))
            witness = {"x": float(xs[idx]), "xi": float(xis[idx]), "ratio": float(grads[idx] / vals[idx]),
                       "reason": "gradient-to-symbol ratio grows with the radius"}
            falsified = True

    return FalsifyResult(falsified, witness, tuple(trend))


def unfalsified_certificate(a: MultiPoly, result: FalsifyResult,
                            radii: Sequence[float] = DEFAULT_RADII,
                            samples_per_circle: int = DEFAULT_SAMPLES) -> Certificate:
    """Evidence-grade record that the falsifier found nothing."""
    if result.falsified:
        raise ValueError("cannot certify an unfalsified symbol from a falsified result")
    return Certificate(
        kind="HypoUnfalsified",
        grade=EVIDENCE,
        payload={
            "radii": [float(r) for r in radii],
            "samples_per_circle": int(samples_per_circle),
            "trend": [[r, ratio] for r, ratio in result.trend],
        },
        subject={"symbol": _model_symbol(a).to_json()},
        notes=["heuristic sampling only; not a proof of hypo-ellipticity"],
    )


# ---------------------------------------------------------------------------
# exact hypo-ellipticity certificates
# ---------------------------------------------------------------------------


def _not_applicable(reason: str, subject: dict) -> Certificate:
    return Certificate(kind="NotApplicable", grade="none", payload={"reason": reason}, subject=subject)


def _quadratic_shape(a: MultiPoly) -> Optional[dict[str, Fraction]]:
    """Read a = a2 x^2 + 2 b1 x xi + c0 xi^2 + a1 x + 2 b0 xi + (a0 + i*t).

    Returns None when some non-constant coefficient is not real.
    """
    sym = _model_symbol(a)
    if sym.total_degree() != 2:
        return None
    out: dict[str, Fraction] = {}
    for exp, coef in sym.terms.items():
        if exp != (0, 0) and not coef.is_real():
            return None
    out["a2"] = sym.coefficient({"x": 2}).re
    out["b1"] = sym.coefficient({"x": 1, "xi": 1}).re / 2
    out["c0"] = sym.coefficient({"xi": 2}).re
    out["a1"] = sym.coefficient({"x": 1}).re
    out["b0"] = sym.coefficient({"xi": 1}).re / 2
    out["a0"] = sym.constant_term().re
    out["const_im"] = sym.constant_term().im
    return out


def hypo_certify_quadratic(a: MultiPoly) -> Optional[Certificate]:
    """Certificate when the leading quadratic form a2 x^2 + 2 b1 x xi + c0 xi^2
    is positive-definite; the linear and constant parts never matter."""
    shape = _quadratic_shape(a)
    if shape is None:
        return _not_applicable(
            "needs total degree 2 with real non-constant coefficients",
            {"symbol": _model_symbol(a).to_json()},
        )
    a2, b1, c0 = shape["a2"], shape["b1"], shape["c0"]
    det = a2 * c0 - b1 * b1
    if a2 > 0 and det > 0:
        return Certificate(
            kind="HypoQuadraticForm",
            grade=EXACT,
            payload={
                "a2": format_rational(a2),
                "b1": format_rational(b1),
                "c0": format_rational(c0),
                "det": format_rational(det),
            },
            subject={"symbol": _model_symbol(a).to_json()},
        )
    return None


def mixed_block_symbol_mdm(m: int, n: int) -> MultiPoly:
    """Left symbol of M^m D^(2n) M^m (multiplication sandwich)."""
    outer = MultiPoly((MODEL_VARS), {(m, 2 * n): GR_ONE})
    inner = MultiPoly((MODEL_VARS), {(m, 0): GR_ONE})
    return symbol_compose(outer, inner).restrict(MODEL_VARS)


def mixed_block_symbol_dmd(m: int, n: int) -> MultiPoly:
    """Left symbol of D^n M^(2m) D^n (derivative sandwich)."""
    outer = MultiPoly((MODEL_VARS), {(0, n): GR_ONE})
    inner = MultiPoly((MODEL_VARS), {(2 * m, n): GR_ONE})
    return symbol_compose(outer, inner).restrict(MODEL_VARS)


def family_left_symbol(params: NewtonFamilyParams) -> MultiPoly:
    lead = MultiPoly(MODEL_VARS, {
        (2 * params.h, 0): GaussianRational(params.lam),
        (0, 2 * params.k): GaussianRational(params.sig),
    })
    mixed = (mixed_block_symbol_mdm(params.m, params.n).scale(GaussianRational(params.mu))
             + mixed_block_symbol_dmd(params.m, params.n).scale(GaussianRational(params.nu)))
    return (lead + mixed).promote(MODEL_VARS)


def recognize_newton_family(a: MultiPoly) -> Optional[NewtonFamilyParams]:
    """Match a against the two-block family with m < h and n < k, exactly."""
    sym = _model_symbol(a)
    if sym.is_zero():
        return None
    dx, dxi = sym.degree_in("x"), sym.degree_in("xi")
    if dx < 2 or dxi < 2 or dx % 2 or dxi % 2:
        return None
    h, k = dx // 2, dxi // 2
    lam_c = sym.coefficient({"x": 2 * h})
    sig_c = sym.coefficient({"xi": 2 * k})
    if not lam_c.is_real() or not sig_c.is_real() or lam_c.is_zero() or sig_c.is_zero():
        return None
    lam, sig = lam_c.re, sig_c.re
    resid = sym - MultiPoly(MODEL_VARS, {(2 * h, 0): lam_c, (0, 2 * k): sig_c})
    if resid.is_zero():
        return NewtonFamilyParams(lam, Fraction(0), Fraction(0), sig, h, k, 1, 1)
    rx, rxi = resid.degree_in("x"), resid.degree_in("xi")
    if rx < 2 or rxi < 2 or rx % 2 or rxi % 2:
        return None
    m, n = rx // 2, rxi // 2
    if not (m < h and n < k):
        return None
    s1 = mixed_block_symbol_mdm(m, n)
    s2 = mixed_block_symbol_dmd(m, n)
    if s1 == s2:
        w = resid.coefficient({"x": 2 * m, "xi": 2 * n})
        if not w.is_real():
            return None
        half = w.re / 2
        if s1.scale(GaussianRational(w.re)) == resid:
            return NewtonFamilyParams(lam, half, half, sig, h, k, m, n)
        return None
    # Solve mu*s1 + nu*s2 = resid from two independent monomials, then confirm.
    exps = sorted(set(s1.terms) | set(s2.terms), reverse=True)
    pivot = None
    for i in range(len(exps)):
        for j in range(i + 1, len(exps)):
            e1, e2 = exps[i], exps[j]
            det = (s1.terms.get(e1, GR_ZERO) * s2.terms.get(e2, GR_ZERO)
                   - s1.terms.get(e2, GR_ZERO) * s2.terms.get(e1, GR_ZERO))
            if not det.is_zero():
                pivot = (e1, e2, det)
                break
        if pivot:
            break
    if pivot is None:
        return None
    e1, e2, det = pivot
    r1 = resid.terms.get(e1, GR_ZERO)
    r2 = resid.terms.get(e2, GR_ZERO)
    mu = (r1 * s2.terms.get(e2, GR_ZERO) - r2 * s2.terms.get(e1, GR_ZERO)) / det
    nu = (s1.terms.get(e1, GR_ZERO) * r2 - s1.terms.get(e2, GR_ZERO) * r1) / det
    if not mu.is_real() or not nu.is_real():
        return None
    if s1.scale(mu) + s2.scale(nu) != resid:
        return None
    return NewtonFamilyParams(lam, mu.re, nu.re, sig, h, k, m, n)


def newton_polygon(params: NewtonFamilyParams) -> NewtonPolygonData:
    mixed = params.mu + params.nu > 0
    vertices: list[tuple[int, int]] = [(0, 0), (2 * params.h, 0)]
    if mixed:
        vertices.append((2 * params.m, 2 * params.n))
    vertices.append((0, 2 * params.k))
    complete = params.lam > 0 and params.sig > 0 and (
        not mixed
        or (params.m < params.h and params.n < params.k
            and params.n * params.h + params.m * params.k >= params.h * params.k)
    )
    return NewtonPolygonData(tuple(vertices), complete)


def hypo_certify_newton(params: NewtonFamilyParams) -> Optional[Certificate]:
    """Multi-quasi-elliptic certificate for the two-block family.

    Needs lam, sig > 0 and mu, nu >= 0; a nonzero mixed block additionally
    needs m < h, n < k and n*h + m*k >= h*k so the mixed vertex stays on or
    outside the segment joining the axis vertices.
    """
    subject = {"family": params.to_json(), "symbol": family_left_symbol(params).to_json()}
    if params.lam <= 0 or params.sig <= 0:
        return _not_applicable("family weights lam and sig must be positive", subject)
    if params.mu < 0 or params.nu < 0:
        return _not_applicable("mixed-block weights mu and nu must be non-negative", subject)
    polygon = newton_polygon(params)
    mixed = params.mu + params.nu > 0
    if mixed and not polygon.complete:
        return None
    return Certificate(
        kind="HypoNewtonPolygon",
        grade=EXACT,
        payload={
            "params": params.to_json(),
            "vertices": [list(v) for v in polygon.vertices],
            "complete": polygon.complete,
            "mixed_block": mixed,
        },
        subject=subject,
    )


@dataclass(frozen=True)
class FirstOrderShape:
    alpha: GaussianRational
    m: int
    scale: GaussianRational


def recognize_first_order(a: MultiPoly) -> Optional[FirstOrderShape]:
    """Match a = scale * (xi + alpha x^m), m >= 1, exactly two monomials."""
    sym = _model_symbol(a)
    if len(sym.terms) != 2:
        return None
    beta = sym.coefficient({"xi": 1})
    if beta.is_zero():
        return None
    monos = [e for e in sym.terms if e != (0, 1)]
    (mx, mxi), = monos
    if mxi != 0 or mx < 1:
        return None
    gamma = sym.terms[(mx, mxi)]
    return FirstOrderShape(alpha=gamma / beta, m=mx, scale=beta)


def hypo_certify_first_order(a: MultiPoly) -> Optional[Certificate]:
    """For a = scale*(xi + alpha x^m): hypo-elliptic whenever Im(alpha) != 0,
    because |xi + alpha x^m| >= |Im alpha| |x|^m keeps zeros compact and tames
    derivative ratios."""
    shape = recognize_first_order(a)
    if shape is None or shape.alpha.im == 0:
        return None
    return Certificate(
        kind="HypoFirstOrder",
        grade=EXACT,
        payload={
            "alpha": shape.alpha.to_json(),
            "m": shape.m,
            "scale": shape.scale.to_json(),
        },
        subject={"symbol": _model_symbol(a).to_json()},
    )


# ---------------------------------------------------------------------------
# injectivity certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Real data of the symmetric quadratic model
    a = a2 x^2 + a1 x + a0 - i b1 + 2(b1 x + b0) xi + c0 xi^2."""

    a2: Fraction
    a1: Fraction
    a0: Fraction
    b1: Fraction
    b0: Fraction
    c0: Fraction

    def to_json(self) -> dict:
        return {k: format_rational(getattr(self, k)) for k in ("a2", "a1", "a0", "b1", "b0", "c0")}

    @classmethod
    def from_json(cls, obj: Mapping) -> "QuadraticCoeffs":
        return cls(**{k: parse_rational(obj[k]) for k in ("a2", "a1", "a0", "b1", "b0", "c0")})


def extract_quadratic_coeffs(a: MultiPoly) -> Optional[QuadraticCoeffs]:
    """Match the symmetric quadratic shape, requiring the constant imaginary
    part to equal -b1 (the symmetry lock)."""
    shape = _quadratic_shape(a)
    if shape is None:
        return None
    if shape["const_im"] != -shape["b1"]:
        return None
    return QuadraticCoeffs(
        a2=shape["a2"], a1=shape["a1"], a0=shape["a0"],
        b1=shape["b1"], b0=shape["b0"], c0=shape["c0"],
    )


@dataclass(frozen=True)
class _QuadCandidate:
    margin: Fraction
    u: Fraction
    s1_sq: Fraction
    s0_sq: Fraction
    r1_sq: Fraction
    r0_sq: Fraction


def _quad_margin_at(qc: QuadraticCoeffs, u: Fraction) -> Optional[_QuadCandidate]:
    """Margin 4(a2-r1^2)(a0-r0^2) - a1^2 at the split s1^2 = u c0, s0^2 = (1-u) c0.

    Works entirely in squares: r1^2 = b1^2/s1^2 (r = 0 when b = 0), so no
    irrational square roots ever appear.  None when the split is infeasible.
    """
    s1_sq = u * qc.c0
    s0_sq = (1 - u) * qc.c0
    if s1_sq < 0 or s0_sq < 0:
        return None
    if qc.b1 != 0:
        if s1_sq == 0:
            return None
        r1_sq = qc.b1 * qc.b1 / s1_sq
    else:
        r1_sq = Fraction(0)
    if qc.b0 != 0:
        if s0_sq == 0:
            return None
        r0_sq = qc.b0 * qc.b0 / s0_sq
    else:
        r0_sq = Fraction(0)
    lead = qc.a2 - r1_sq
    if lead <= 0:
        return None
    margin = 4 * lead * (qc.a0 - r0_sq) - qc.a1 * qc.a1
    return _QuadCandidate(margin, u, s1_sq, s0_sq, r1_sq, r0_sq)


QUAD_GRID_STAGES = (64, 512)


def injectivity_quadratic(qc: QuadraticCoeffs) -> Optional[Certificate]:
    """Search rational splits of c0 into s1^2 + s0^2 that make the shifted
    quadratic (a2 - r1^2) x^2 + a1 x + (a0 - r0^2) non-negative with positive
    leading coefficient; that lower-bounds the energy form of A and forces
    injectivity.  Margin zero is accepted and flagged as the relaxed branch."""
    subject = {"quadratic": qc.to_json()}
    if qc.c0 < 0:
        return _not_applicable("c0 must be non-negative", subject)
    if qc.a2 <= 0:
        return _not_applicable("a2 must be positive", subject)
    best: Optional[_QuadCandidate] = None
    for stage in QUAD_GRID_STAGES:
        for i in range(stage + 1):
            cand = _quad_margin_at(qc, Fraction(i, stage))
            if cand is None:
                continue
            if best is None or cand.margin > best.margin:
                best = cand
    if best is None or best.margin < 0:
        return None
    lead = qc.a2 - best.r1_sq
    bound = best.margin / lead
    relaxed = best.margin == 0
    notes = []
    if relaxed:
        notes.append(
            "relaxed branch: margin is exactly zero; the shifted quadratic is "
            "non-negative with positive leading coefficient, hence not identically zero"
        )
    return Certificate(
        kind="InjQuadraticEstimate",
        grade=EXACT,
        payload={
            "s1_sq": format_rational(best.s1_sq),
            "s0_sq": format_rational(best.s0_sq),
            "r1_sq": format_rational(best.r1_sq),
            "r0_sq": format_rational(best.r0_sq),
            "margin": format_rational(best.margin),
            "bound": format_rational(bound),
            "relaxed": relaxed,
            "grid_stages": list(QUAD_GRID_STAGES),
        },
        subject=subject,
        notes=notes,
    )


def injectivity_sos(params: NewtonFamilyParams) -> Optional[Certificate]:
    """Sum-of-squares energy identity for the two-block family: when lam, sig
    are positive and mu, nu non-negative,

        (A u | u) = lam |x^h u|^2 + mu |D^n x^m u|^2 + nu |x^m D^n u|^2
                    + sig |D^k u|^2

    so A u = 0 forces x^h u = 0, hence u = 0."""
    if params.lam <= 0 or params.sig <= 0 or params.mu < 0 or params.nu < 0:
        return None
    return Certificate(
        kind="InjSOS",
        grade=EXACT,
        payload={
            "params": params.to_json(),
            "energy_terms": [
                ["lam", "x^h u", format_rational(params.lam)],
                ["mu", "D^n x^m u", format_rational(params.mu)],
                ["nu", "x^m D^n u", format_rational(params.nu)],
                ["sig", "D^k u", format_rational(params.sig)],
            ],
        },
        subject={"family": params.to_json(), "symbol": family_left_symbol(params).to_json()},
    )


WICK_RADIUS = 20.0
WICK_COUNT = 401
WICK_DIRECTIONS = 3600


def injectivity_wick(a: MultiPoly, radius: float = WICK_RADIUS, count: int = WICK_COUNT,
                     directions: int = WICK_DIRECTIONS) -> Certificate:
    """Evidence for injectivity through positivity of the coherent-state
    average symbol W[a]: sampled positivity on a square grid plus positivity
    of the leading form on a circle of directions (near-zero directions are
    re-checked pointwise at larger radii)."""
    from .symbols import weyl_wick

    sym = _model_symbol(a)
    wick = weyl_wick(sym)
    subject = {"symbol": sym.to_json(), "wick": wick.to_json()}
    if not wick.is_real():
        return _not_applicable("coherent-state average symbol has complex coefficients", subject)

    line = np.linspace(-radius, radius, count)
    gx, gxi = np.meshgrid(line, line, indexing="ij")
    vals = np.real(wick.eval_numpy({"x": gx, "xi": gxi}))
    if vals.min() <= 0:
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        return Certificate(
            kind="NotApplicable",
            grade="none",
            payload={
                "reason": "sampled non-positive value of the coherent-state average symbol",
                "witness": {"x": float(gx[idx]), "xi": float(gxi[idx]), "value": float(vals[idx])},
            },
            subject=subject,
        )

    lead = wick.leading_form()
    theta = 2.0 * np.pi * np.arange(directions) / directions
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    lead_vals = np.real(lead.eval_numpy({"x": cos_t, "xi": sin_t}))
    lead_scale = max(sum(c.abs_float() for c in lead.terms.values()), 1.0)
    tol = 1e-12 * lead_scale
    if lead_vals.min() < -tol:
        idx = int(np.argmin(lead_vals))
        return Certificate(
            kind="NotApplicable",
            grade="none",
            payload={
                "reason": "leading form of the coherent-state average symbol goes negative",
                "witness": {"x": float(cos_t[idx]), "xi": float(sin_t[idx]), "value": float(lead_vals[idx])},
            },
            subject=subject,
        )
    near_zero = np.abs(lead_vals) <= tol
    if near_zero.any():
        for factor in (2.0, 4.0):
            far = np.real(wick.eval_numpy({"x": factor * radius * cos_t[near_zero],
                                           "xi": factor * radius * sin_t[near_zero]}))
            if far.min() <= 0:
                idx = int(np.argmin(far))
                where = np.flatnonzero(near_zero)[idx]
                return Certificate(
                    kind="NotApplicable",
                    grade="none",
                    payload={
                        "reason": "lower-order terms fail to dominate along a leading-form zero direction",
                        "witness": {"x": float(factor * radius * cos_t[where]),
                                    "xi": float(factor * radius * sin_t[where]),
                                    "value": float(far.min())},
                    },
                    subject=subject,
                )
    return Certificate(
        kind="InjWickPositive",
        grade=EVIDENCE,
        payload={
            "radius": float(radius),
            "count": int(count),
            "directions": int(directions),
            "min_sample": float(vals.min()),
            "min_leading": float(lead_vals.min()),
            "near_zero_directions": int(near_zero.sum()),
        },
        subject=subject,
        notes=["sampled positivity only; not a proof of injectivity"],
    )


def first_order_certify(alpha: GaussianRational, m: int, side: str = "operator") -> Certificate:
    """Kernel analysis for A = D + alpha x^m (or its adjoint, alpha conjugated).

    The one-dimensional kernel is spanned by u = exp(-i alpha x^(m+1)/(m+1)),
    with |u| = exp(Im(alpha) x^(m+1)/(m+1)).  For odd m the kernel is Schwartz
    exactly when Im(alpha) < 0 (a non-injectivity witness); in every other
    case with Im(alpha) != 0 the kernel escapes every Schwartz seminorm."""
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    if side not in ("operator", "adjoint"):
        raise ValueError("side must be 'operator' or 'adjoint'")
    eff = alpha.conjugate() if side == "adjoint" else alpha
    subject = {"alpha": alpha.to_json(), "m": m, "side": side}
    if eff.im == 0:
        return _not_applicable("Im(alpha) = 0: kernel analysis needs a complex coefficient", subject)
    exponent_coeff = (-GR_I * eff) * Fraction(1, m + 1)
    kernel = {
        "exponent_coeff": exponent_coeff.to_json(),
        "power": m + 1,
        "decay_rate": format_rational(eff.im / (m + 1)),
        "rendered": f"exp(({exponent_coeff})*x^{m + 1})",
    }
    if m % 2 == 1 and eff.im < 0:
        return Certificate(
            kind="NotInjectiveWitness",
            grade=EXACT,
            payload={"kernel": kernel, "schwartz": True, "im_alpha": format_rational(eff.im)},
            subject=subject,
        )
    return Certificate(
        kind="InjKernelEscape",
        grade=EXACT,
        payload={
            "kernel": kernel,
            "schwartz": False,
            "im_alpha": format_rational(eff.im),
            "reason": ("even power grows on one side" if m % 2 == 0
                       else "positive Im(alpha) makes the kernel grow"),
        },
        subject=subject,
    )


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str


def _verify_fail(reason: str) -> VerifyResult:
    return VerifyResult(False, reason)


def _subject_symbol(cert: Certificate) -> MultiPoly:
    return MultiPoly.from_json(cert.subject["symbol"])


def verify_certificate(cert: Certificate, symbol: Optional[MultiPoly] = None) -> VerifyResult:
    """Re-derive a certificate's claim from its embedded subject.

    Exact kinds are re-checked with rational arithmetic; evidence kinds redo
    their deterministic sampling.  When ``symbol`` is supplied it must match
    the embedded subject.
    """
    try:
        if symbol is not None and "symbol" in cert.subject:
            if _subject_symbol(cert) != symbol.promote(MODEL_VARS):
                return _verify_fail("certificate subject does not match the supplied symbol")

        if cert.kind == "NotApplicable":
            return VerifyResult(True, "no claim to verify")

        if cert.kind == "HypoQuadraticForm":
            sym = _subject_symbol(cert)
            shape = _quadratic_shape(sym)
            if shape is None:
                return _verify_fail("subject symbol is not a real quadratic")
            for key in ("a2", "b1", "c0"):
                if parse_rational(cert.payload[key]) != shape[key]:
                    return _verify_fail(f"payload {key} does not match the symbol")
            a2, b1, c0 = shape["a2"], shape["b1"], shape["c0"]
            det = a2 * c0 - b1 * b1
            if parse_rational(cert.payload["det"]) != det:
                return _verify_fail("payload determinant mismatch")
            if not (a2 > 0 and det > 0):
                return _verify_fail("leading quadratic form is not positive-definite")
            return VerifyResult(True, "leading quadratic form positive-definite")

        if cert.kind == "HypoNewtonPolygon":
            params = NewtonFamilyParams.from_json(cert.payload["params"])
            if "symbol" in cert.subject and family_left_symbol(params) != _subject_symbol(cert):
                return _verify_fail("family parameters do not rebuild the subject symbol")
            if params.lam <= 0 or params.sig <= 0 or params.mu < 0 or params.nu < 0:
                return _verify_fail("family weights out of range")
            polygon = newton_polygon(params)
            if [list(v) for v in polygon.vertices] != cert.payload["vertices"]:
                return _verify_fail("polygon vertices mismatch")
            mixed = params.mu + params.nu > 0
            if mixed and not polygon.complete:
                return _verify_fail("polygon is not complete for a nonzero mixed block")
            return VerifyResult(True, "family weights admissible and polygon complete")

        if cert.kind == "HypoFirstOrder":
            sym = _subject_symbol(cert)
            shape = recognize_first_order(sym)
            if shape is None:
                return _verify_fail("subject symbol is not of first-order shape")
            if shape.alpha != GaussianRational.from_json(cert.payload["alpha"]) or shape.m != cert.payload["m"]:
                return _verify_fail("payload alpha or m does not match the symbol")
            if shape.alpha.im == 0:
                return _verify_fail("Im(alpha) vanishes")
            return VerifyResult(True, "complex lower-order coefficient keeps zeros compact")

        if cert.kind == "HypoUnfalsified":
            sym = _subject_symbol(cert)
            result = hypo_falsify(sym, cert.payload["radii"], cert.payload["samples_per_circle"])
            if result.falsified:
                return _verify_fail("falsifier now finds a witness")
            return VerifyResult(True, "deterministic re-sampling finds no witness")

        if cert.kind == "InjQuadraticEstimate":
            qc = QuadraticCoeffs.from_json(cert.subject["quadratic"])
            s1_sq = parse_rational(cert.payload["s1_sq"])
            s0_sq = parse_rational(cert.payload["s0_sq"])
            r1_sq = parse_rational(cert.payload["r1_sq"])
            r0_sq = parse_rational(cert.payload["r0_sq"])
            if s1_sq < 0 or s0_sq < 0 or s1_sq + s0_sq > qc.c0:
                return _verify_fail("split of c0 is infeasible")
            if r1_sq * s1_sq != qc.b1 * qc.b1 or (qc.b1 == 0 and r1_sq != 0):
                return _verify_fail("r1^2 s1^2 != b1^2")
            if r0_sq * s0_sq != qc.b0 * qc.b0 or (qc.b0 == 0 and r0_sq != 0):
                return _verify_fail("r0^2 s0^2 != b0^2")
            lead = qc.a2 - r1_sq
            if lead <= 0:
                return _verify_fail("shifted leading coefficient is not positive")
            margin = 4 * lead * (qc.a0 - r0_sq) - qc.a1 * qc.a1
            if parse_rational(cert.payload["margin"]) != margin:
                return _verify_fail("margin mismatch")
            if margin < 0:
                return _verify_fail("margin is negative")
            if parse_rational(cert.payload["bound"]) != margin / lead:
                return _verify_fail("bound mismatch")
            if bool(cert.payload["relaxed"]) != (margin == 0):
                return _verify_fail("relaxed flag inconsistent with the margin")
            return VerifyResult(True, "shifted quadratic non-negative with positive leading coefficient")

        if cert.kind == "InjSOS":
            params = NewtonFamilyParams.from_json(cert.payload["params"])
            if "symbol" in cert.subject and family_left_symbol(params) != _subject_symbol(cert):
                return _verify_fail("family parameters do not rebuild the subject symbol")
            if params.lam <= 0 or params.sig <= 0 or params.mu < 0 or params.nu < 0:
                return _verify_fail("weights do not give a sum-of-squares identity")
            return VerifyResult(True, "energy identity weights admissible")

        if cert.kind == "InjWickPositive":
            sym = _subject_symbol(cert)
            fresh = injectivity_wick(sym, cert.payload["radius"], cert.payload["count"],
                                     cert.payload["directions"])
            if fresh.kind != "InjWickPositive":
                return _verify_fail("re-sampling no longer certifies positivity")
            for key in ("min_sample", "min_leading"):
                if abs(fresh.payload[key] - cert.payload[key]) > 1e-9 * (1 + abs(cert.payload[key])):
                    return _verify_fail(f"re-sampled {key} disagrees with the payload")
            return VerifyResult(True, "deterministic re-sampling confirms positivity")

        if cert.kind in ("InjKernelEscape", "NotInjectiveWitness"):
            alpha = GaussianRational.from_json(cert.subject["alpha"])
            m = int(cert.subject["m"])
            side = cert.subject["side"]
            fresh = first_order_certify(alpha, m, side)
            if fresh.kind != cert.kind:
                return _verify_fail("sign analysis disagrees with the certificate kind")
            if fresh.payload.get("kernel") != cert.payload.get("kernel"):
                return _verify_fail("kernel description mismatch")
            return VerifyResult(True, "kernel decay analysis re-derived")

        return _verify_fail(f"no verifier for kind {cert.kind!r}")
    except (KeyError, ValueError, TypeError) as exc:
        return _verify_fail(f"malformed certificate: {exc}")
