"""Orchestration: parse operator specs, run the certificate chain, generate
regular operators, and emit reports.

The verdict logic rests on the exact reduction for the planar operators
B = sum c[j,k] (x - q D_y)^j (y + p D_x)^k: once the one-variable model symbol
a is certified hypo-elliptic, regularity of B is equivalent to injectivity of
the model operator A.  Without a hypo-ellipticity certificate the equivalence
says nothing, so the pipeline reports Unknown rather than guessing; evidence
grade hypo-ellipticity (the unfalsified heuristic) is likewise never enough
for a Regular or NotRegular verdict.

Certificate priority is exact before evidence, cheap before expensive:

    hypo-ellipticity: quadratic form -> Newton polygon family -> first order,
                      then the falsifier heuristic for evidence;
    injectivity:      quadratic estimate -> sum of squares -> coherent-state
                      positivity (evidence) -> first-order kernel analysis.

Exit codes: 0 Regular (exact), 2 Regular (evidence), 3 Unknown, 4 NotRegular.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from .certify import (
    EVIDENCE,
    EXACT,
    Certificate,
    RegularityVerdict,
    extract_quadratic_coeffs,
    first_order_certify,
    hypo_certify_first_order,
    hypo_certify_newton,
    hypo_certify_quadratic,
    hypo_falsify,
    injectivity_quadratic,
    injectivity_sos,
    injectivity_wick,
    recognize_first_order,
    recognize_newton_family,
    unfalsified_certificate,
)
from .exact import GR_ONE, GaussianRational, MultiPoly
from .symbols import (
    MODEL_VARS,
    PHASE_VARS,
    LinearChange,
    OperatorSpec,
    a_tilde,
    build_b_symbol,
    t_conjugate,
    verify_degeneracy,
    weyl_wick,
    weyl_wick_inverse,
)

EXIT_REGULAR_EXACT = 0
EXIT_REGULAR_EVIDENCE = 2
EXIT_UNKNOWN = 3
EXIT_NOT_REGULAR = 4


def parse_spec(source: Union[str, Mapping]) -> tuple[OperatorSpec, Optional[LinearChange]]:
    """Parse a JSON operator spec, with an optional change of variables "T"."""
    if isinstance(source, str):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ValueError(f"spec is not valid JSON: {exc}") from exc
    else:
        obj = source
    if not isinstance(obj, Mapping):
        raise ValueError("spec must be a JSON object")
    spec = OperatorSpec.from_json(obj)
    change = None
    if obj.get("T") is not None:
        change = LinearChange.from_json(obj["T"])
    return spec, change


@dataclass
class Report:
    """Everything certify derives from one spec, JSON-ready and deterministic."""

    spec: OperatorSpec
    change: Optional[LinearChange]
    verdict: RegularityVerdict
    attempts: list[dict]
    symbols: dict[str, MultiPoly]
    degeneracy_holds: bool
    adjoint: Optional[dict] = None
    residuals: Optional[list] = None

    @property
    def exit_code(self) -> int:
        if self.verdict.status == "Regular":
            return EXIT_REGULAR_EXACT if self.verdict.grade == EXACT else EXIT_REGULAR_EVIDENCE
        if self.verdict.status == "NotRegular":
            return EXIT_NOT_REGULAR
        return EXIT_UNKNOWN

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "change": self.change.to_json() if self.change is not None else None,
            "order": self.spec.order,
            "q": str(self.spec.q),
            "symbols": {name: sym.to_json() for name, sym in sorted(self.symbols.items())},
            "degeneracy": {"holds": self.degeneracy_holds},
            "verdict": self.verdict.to_json(),
            "grade": self.verdict.grade,
            "attempts": self.attempts,
            "adjoint": self.adjoint,
            "residuals": self.residuals,
            "exit_code": self.exit_code,
        }


def _attempt(stage: str, method: str, outcome: str, detail: str) -> dict:
    return {"stage": stage, "method": method, "outcome": outcome, "detail": detail}


def _run_hypo_chain(a: MultiPoly, attempts: list[dict]):
    """Returns (exact certificate or None, evidence certificate or None)."""
    cert = hypo_certify_quadratic(a)
    if cert is None:
        attempts.append(_attempt("hypo", "quadratic_form", "no_certificate",
                                 "leading quadratic form is not positive definite"))
    elif cert.kind == "NotApplicable":
        attempts.append(_attempt("hypo", "quadratic_form", "not_applicable",
                                 cert.payload["reason"]))
    else:
        attempts.append(_attempt("hypo", "quadratic_form", "certified", cert.kind))
        return cert, None

    params = recognize_newton_family(a)
    if params is None:
        attempts.append(_attempt("hypo", "newton_polygon", "not_applicable",
                                 "symbol is not in the two-block family"))
    else:
        cert = hypo_certify_newton(params)
        if cert is None:
            attempts.append(_attempt("hypo", "newton_polygon", "no_certificate",
                                     "mixed vertex lies inside the exponent polygon"))
        elif cert.kind == "NotApplicable":
            attempts.append(_attempt("hypo", "newton_polygon", "not_applicable",
                                     cert.payload["reason"]))
        else:
            attempts.append(_attempt("hypo", "newton_polygon", "certified", cert.kind))
            return cert, None

    cert = hypo_certify_first_order(a)
    if cert is None:
        attempts.append(_attempt("hypo", "first_order", "not_applicable",
                                 "symbol is not scale*(xi + alpha x^m) with Im(alpha) != 0"))
    else:
        attempts.append(_attempt("hypo", "first_order", "certified", cert.kind))
        return cert, None

    result = hypo_falsify(a)
    if result.falsified:
        attempts.append(_attempt("hypo", "falsifier", "falsified",
                                 result.witness["reason"]))
        return None, None
    evidence = unfalsified_certificate(a, result)
    attempts.append(_attempt("hypo", "falsifier", "certified",
                             f"{evidence.kind} (evidence only)"))
    return None, evidence


def _run_inj_chain(a: MultiPoly, attempts: list[dict]):
    """Returns (injectivity certificate or None, kernel witness or None)."""
    qc = extract_quadratic_coeffs(a)
    if qc is None:
        attempts.append(_attempt("injectivity", "quadratic_estimate", "not_applicable",
                                 "symbol is not a symmetric quadratic"))
    else:
        cert = injectivity_quadratic(qc)
        if cert is None:
            attempts.append(_attempt("injectivity", "quadratic_estimate", "no_certificate",
                                     "no rational split yields a non-negative margin"))
        elif cert.kind == "NotApplicable":
            attempts.append(_attempt("injectivity", "quadratic_estimate", "not_applicable",
                                     cert.payload["reason"]))
        else:
            attempts.append(_attempt("injectivity", "quadratic_estimate", "certified", cert.kind))
            return cert, None

    params = recognize_newton_family(a)
    if params is None:
        attempts.append(_attempt("injectivity", "sum_of_squares", "not_applicable",
                                 "symbol is not in the two-block family"))
    else:
        cert = injectivity_sos(params)
        if cert is None:
            attempts.append(_attempt("injectivity", "sum_of_squares", "no_certificate",
                                     "family weights fail the positivity requirements"))
        else:
            attempts.append(_attempt("injectivity", "sum_of_squares", "certified", cert.kind))
            return cert, None

    cert = injectivity_wick(a)
    if cert.kind == "NotApplicable":
        attempts.append(_attempt("injectivity", "wick_positivity", "not_applicable",
                                 cert.payload["reason"]))
    else:
        attempts.append(_attempt("injectivity", "wick_positivity", "certified",
                                 f"{cert.kind} (evidence only)"))
        return cert, None

    shape = recognize_first_order(a)
    if shape is None:
        attempts.append(_attempt("injectivity", "first_order_kernel", "not_applicable",
                                 "symbol is not scale*(xi + alpha x^m)"))
        return None, None
    cert = first_order_certify(shape.alpha, shape.m, side="operator")
    if cert.kind == "NotApplicable":
        attempts.append(_attempt("injectivity", "first_order_kernel", "not_applicable",
                                 cert.payload["reason"]))
        return None, None
    if cert.kind == "NotInjectiveWitness":
        attempts.append(_attempt("injectivity", "first_order_kernel", "witness",
                                 "kernel element stays in the Schwartz class"))
        return None, cert
    attempts.append(_attempt("injectivity", "first_order_kernel", "certified", cert.kind))
    return cert, None


def _adjoint_analysis(a: MultiPoly) -> Optional[dict]:
    """Kernel analysis of the adjoint model for first-order shapes.

    The adjoint of scale*(D + alpha x^m) conjugates alpha; a Schwartz kernel
    element on the adjoint side means the operator misses a one-dimensional
    subspace (index -1) even when it is injective.
    """
    shape = recognize_first_order(a)
    if shape is None or shape.alpha.im == 0:
        return None
    operator = first_order_certify(shape.alpha, shape.m, side="operator")
    adjoint = first_order_certify(shape.alpha, shape.m, side="adjoint")
    adj_nontrivial = adjoint.kind == "NotInjectiveWitness"
    op_nontrivial = operator.kind == "NotInjectiveWitness"
    if adj_nontrivial and not op_nontrivial:
        remark = ("N(A*) != 0: the adjoint kernel contains "
                  f"{adjoint.payload['kernel']['rendered']}, so the operator is "
                  "injective but not surjective (index -1)")
    elif op_nontrivial and not adj_nontrivial:
        remark = ("N(A) != 0 while N(A*) = 0: the operator has a one-dimensional "
                  "kernel and dense range (index +1)")
    elif adj_nontrivial and op_nontrivial:
        remark = "both N(A) and N(A*) are nontrivial"
    else:
        remark = "both N(A) and N(A*) are trivial"
    return {
        "operator": operator.to_json(),
        "adjoint": adjoint.to_json(),
        "adjoint_kernel_nontrivial": adj_nontrivial,
        "remark": remark,
    }


def certify(spec: OperatorSpec, change: Optional[LinearChange] = None) -> Report:
    """Run the full certificate chain and compose the verdict.

    Never raises on a valid spec; Unknown is the failure mode, with every
    attempted method and its outcome in the report.
    """
    a = spec.a_symbol().promote(MODEL_VARS)
    symbols: dict[str, MultiPoly] = {
        "a": a,
        "b": build_b_symbol(spec),
        "atilde": a_tilde(spec),
        "wick": weyl_wick(a),
    }
    if change is not None:
        symbols["conjugated"] = t_conjugate(symbols["b"], change)
    degeneracy = verify_degeneracy(spec)

    attempts: list[dict] = []
    hypo_cert, hypo_evidence = _run_hypo_chain(a, attempts)
    inj_cert, kernel_witness = _run_inj_chain(a, attempts)
    adjoint = _adjoint_analysis(a)

    if hypo_cert is not None:
        if kernel_witness is not None:
            verdict = RegularityVerdict(
                status="NotRegular",
                chain=[hypo_cert, kernel_witness],
                witness=kernel_witness.payload["kernel"]["rendered"],
                grade=EXACT,
            )
        elif inj_cert is not None:
            grade = EXACT if inj_cert.grade == EXACT else EVIDENCE
            verdict = RegularityVerdict(status="Regular", chain=[hypo_cert, inj_cert], grade=grade)
        else:
            attempts.append(_attempt("verdict", "compose", "unknown",
                                     "hypo-ellipticity certified but injectivity undecided"))
            verdict = RegularityVerdict(status="Unknown", chain=[hypo_cert], grade=hypo_cert.grade)
    else:
        detail = ("hypo-ellipticity is uncertified, so the reduction to the "
                  "model operator gives no verdict about the planar operator")
        attempts.append(_attempt("verdict", "compose", "unknown", detail))
        chain = [c for c in (hypo_evidence, inj_cert, kernel_witness) if c is not None]
        grade = EXACT if all(c.grade == EXACT for c in chain) else EVIDENCE
        verdict = RegularityVerdict(status="Unknown", chain=chain, grade=grade)

    return Report(
        spec=spec,
        change=change,
        verdict=verdict,
        attempts=attempts,
        symbols=symbols,
        degeneracy_holds=degeneracy.holds,
        adjoint=adjoint,
    )


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


class PositivityError(ValueError):
    """A sampled non-positive value disproves the claimed positivity."""

    def __init__(self, message: str, witness: tuple[float, float], value: float):
        super().__init__(message)
        self.witness = witness
        self.value = value


POSITIVITY_RADIUS = 20.0
POSITIVITY_COUNT = 401


def _psd_minors(a: MultiPoly) -> Optional[list[Fraction]]:
    """Principal minors of the homogenized quadratic over (x, xi, 1).

    All seven non-negative proves a >= 0 on the whole plane.  None when the
    symbol is not a real quadratic.
    """
    if a.total_degree() > 2 or not a.is_real():
        return None
    m = [
        [a.coefficient({"x": 2}).re, a.coefficient({"x": 1, "xi": 1}).re / 2,
         a.coefficient({"x": 1}).re / 2],
        [Fraction(0), a.coefficient({"xi": 2}).re, a.coefficient({"xi": 1}).re / 2],
        [Fraction(0), Fraction(0), a.constant_term().re],
    ]
    m[1][0], m[2][0], m[2][1] = m[0][1], m[0][2], m[1][2]

    def det2(i: int, j: int) -> Fraction:
        return m[i][i] * m[j][j] - m[i][j] * m[j][i]

    det3 = (m[0][0] * det2(1, 2) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    return [m[0][0], m[1][1], m[2][2], det2(0, 1), det2(0, 2), det2(1, 2), det3]


def check_positivity(a: MultiPoly) -> dict:
    """Exact certificate when possible, sampling evidence otherwise.

    Raises PositivityError with a witness point when a sample is strictly
    negative; zero samples are allowed (positive almost everywhere suffices
    for the generated operator).
    """
    minors = _psd_minors(a)
    if minors is not None and all(v >= 0 for v in minors):
        return {"method": "exact-psd", "minors": [str(v) for v in minors]}
    line = np.linspace(-POSITIVITY_RADIUS, POSITIVITY_RADIUS, POSITIVITY_COUNT)
    gx, gxi = np.meshgrid(line, line, indexing="ij")
    vals = np.real(a.eval_numpy({"x": gx, "xi": gxi}))
    if vals.min() < 0:
        # report the most central counterexample, not the most negative one
        neg = vals < 0
        dist = np.where(neg, gx * gx + gxi * gxi, np.inf)
        idx = np.unravel_index(int(np.argmin(dist)), dist.shape)
        witness = (float(gx[idx]), float(gxi[idx]))
        raise PositivityError(
            f"symbol is negative at (x, xi) = ({witness[0]:g}, {witness[1]:g}): "
            f"value {float(vals[idx]):g}",
            witness=witness,
            value=float(vals[idx]),
        )
    record = {"method": "sampled", "min_sample": float(vals.min()),
              "radius": POSITIVITY_RADIUS, "count": POSITIVITY_COUNT}
    if minors is not None:
        record["note"] = "exact PSD check failed; accepted on sampling evidence only"
    return record


@dataclass
class GenerateResult:
    spec: OperatorSpec
    report: Report
    positivity: dict
    roundtrip_ok: bool

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "positivity": self.positivity,
            "roundtrip": self.roundtrip_ok,
            "report": self.report.to_json(),
        }


def generate_from_positive_symbol(a: MultiPoly, p) -> GenerateResult:
    """Build a regular planar operator from a positive polynomial target.

    The model symbol is r with W[r] = a; its coefficients, read as c[j,k],
    assemble the planar operator.  The emitted report re-derives W[r] so the
    round trip back to the input is confirmed exactly.
    """
    if not set(a.vars) <= set(MODEL_VARS):
        raise ValueError(f"target symbol must use variables {MODEL_VARS}, got {a.vars}")
    a = a.promote(MODEL_VARS)
    if not a.is_real():
        raise ValueError("target symbol must have real coefficients")
    if a.is_zero():
        raise ValueError("target symbol must be nonzero")
    positivity = check_positivity(a)
    r = weyl_wick_inverse(a)
    roundtrip_ok = weyl_wick(r) == a
    if not roundtrip_ok:
        raise RuntimeError("transform inversion failed to round-trip; this is a bug")
    coeffs = {(exp[0], exp[1]): coef for exp, coef in r.terms.items()}
    spec = OperatorSpec(coeffs, Fraction(p))
    report = certify(spec)
    return GenerateResult(spec=spec, report=report, positivity=positivity,
                          roundtrip_ok=roundtrip_ok)


@dataclass
class QuasiHomogeneousResult:
    spec: OperatorSpec
    change: LinearChange
    conjugated: MultiPoly
    report: Report

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "T": self.change.to_json(),
            "conjugated_symbol": self.conjugated.to_json(),
            "report": self.report.to_json(),
        }


def generate_quasi_homogeneous(rho, tau, h: int, k: int) -> QuasiHomogeneousResult:
    """Anisotropic-dilation family: the operator with model symbol
    lam x^(2h) + xi^(2k), lam = (rho - tau)^(2h), p = rho/(rho - tau),
    whose conjugation by T = diag(rho/(rho-tau), tau) has the symbol
    (eta + rho x)^(2h) + (xi + tau y)^(2k) exactly.
    """
    rho, tau = Fraction(rho), Fraction(tau)
    if not (isinstance(h, int) and isinstance(k, int)) or h < 1 or k < 1:
        raise ValueError("h and k must be positive integers")
    if rho * tau == 0:
        raise ValueError("need rho*tau != 0")
    if rho == tau:
        raise ValueError("need rho != tau")
    p = rho / (rho - tau)
    lam = (rho - tau) ** (2 * h)
    spec = OperatorSpec({(2 * h, 0): GaussianRational(lam), (0, 2 * k): GR_ONE}, p)
    change = LinearChange(((p, Fraction(0)), (Fraction(0), tau)))
    conjugated = t_conjugate(build_b_symbol(spec), change)

    x = MultiPoly.variable("x").promote(PHASE_VARS)
    y = MultiPoly.variable("y").promote(PHASE_VARS)
    xi = MultiPoly.variable("xi").promote(PHASE_VARS)
    eta = MultiPoly.variable("eta").promote(PHASE_VARS)
    target = (eta + x.scale(rho)) ** (2 * h) + (xi + y.scale(tau)) ** (2 * k)
    if conjugated != target:
        raise RuntimeError("conjugated symbol failed its closed-form identity; this is a bug")

    report = certify(spec, change)
    return QuasiHomogeneousResult(spec=spec, change=change, conjugated=conjugated, report=report)


# ---------------------------------------------------------------------------
# report emission
# ---------------------------------------------------------------------------


def render_summary(report: Report) -> str:
    lines = [
        f"verdict: {report.verdict.status} ({report.verdict.grade})",
        f"exit code: {report.exit_code}",
        f"p = {report.spec.p}, q = {report.spec.q}, order = {report.spec.order}",
        "chain: " + (", ".join(c.kind for c in report.verdict.chain) or "(empty)"),
    ]
    if report.verdict.witness:
        lines.append(f"kernel witness: {report.verdict.witness}")
    if report.adjoint is not None:
        lines.append(f"adjoint: {report.adjoint['remark']}")
    lines.append("attempts:")
    for att in report.attempts:
        lines.append(f"  [{att['stage']}] {att['method']}: {att['outcome']} ({att['detail']})")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, json_path=None, summary_path=None,
                timestamp: Optional[str] = None) -> dict:
    """Serialize the report; identical specs give byte-identical output apart
    from the generated_at stamp."""
    doc = report.to_json()
    doc["generated_at"] = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    if json_path is not None:
        Path(json_path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if summary_path is not None:
        Path(summary_path).write_text(render_summary(report))
    return doc
