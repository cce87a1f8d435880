"""Command-line interface.

Exit codes follow the certification verdict: 0 Regular (exact), 2 Regular
(evidence), 3 Unknown, 4 NotRegular.  Usage and input errors exit 1 so they
can never be mistaken for the evidence-grade verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .certify import Certificate, verify_certificate
from .exact import MultiPoly, parse_rational
from .hermite import Hermite
from .pipeline import (
    PositivityError,
    certify,
    emit_report,
    generate_from_positive_symbol,
    generate_quasi_homogeneous,
    parse_spec,
    render_summary,
)
from .spectral import intertwine_residual
from .symbols import t_conjugate
from .wigner import Grid2D, read_grid, wig_forward, wig_inverse, write_grid

__version__ = "0.1.0"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors by default, which collides with the
    Regular-with-evidence verdict; remap usage errors to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _parse_windows(text: str):
    """Window pair syntax: hermite:m,n."""
    kind, _, rest = text.partition(":")
    if kind != "hermite":
        raise ValueError(f"unknown window family {kind!r} (expected hermite:m,n)")
    parts = rest.split(",")
    if len(parts) != 2:
        raise ValueError("window spec must be hermite:m,n")
    m, n = (int(s) for s in parts)
    if m < 0 or n < 0:
        raise ValueError("window indices must be non-negative")
    return Hermite(m), Hermite(n)


def _check_threads() -> Optional[str]:
    raw = os.environ.get("WIGREG_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        return f"WIGREG_THREADS must be a positive integer, got {raw!r}"
    if value < 1:
        return f"WIGREG_THREADS must be a positive integer, got {raw!r}"
    # All operations run serially and deterministically; the cap is validated
    # so scripts can set it uniformly, and never exceeded.
    return None


def _cmd_certify(args) -> int:
    try:
        spec, change = parse_spec(_read_text(args.spec))
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    report = certify(spec, change)
    if args.report or args.summary:
        emit_report(report, json_path=args.report, summary_path=args.summary)
    if not args.quiet:
        sys.stdout.write(render_summary(report))
    return report.exit_code


def _cmd_symbol(args) -> int:
    try:
        spec, change = parse_spec(_read_text(args.spec))
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    from .symbols import a_tilde, build_b_symbol, weyl_wick

    names = [s.strip() for s in args.emit.split(",") if s.strip()]
    if not names:
        return _fail("--emit needs at least one of a, b, atilde, wick, conjugated")
    available = {"a", "b", "atilde", "wick", "conjugated"}
    unknown = [n for n in names if n not in available]
    if unknown:
        return _fail(f"unknown symbol name(s) {', '.join(unknown)}; "
                     f"choose from {', '.join(sorted(available))}")
    out: dict[str, MultiPoly] = {}
    for name in names:
        if name == "a":
            out[name] = spec.a_symbol()
        elif name == "b":
            out[name] = build_b_symbol(spec)
        elif name == "atilde":
            out[name] = a_tilde(spec)
        elif name == "wick":
            out[name] = weyl_wick(spec.a_symbol())
        elif name == "conjugated":
            if change is None:
                return _fail("--emit conjugated needs a \"T\" entry in the spec")
            out[name] = t_conjugate(build_b_symbol(spec), change)
    if args.json:
        doc = {name: poly.to_json() for name, poly in out.items()}
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for name in names:
            print(f"{name} = {out[name]}")
    return 0


def _cmd_verify_intertwine(args) -> int:
    try:
        spec, _ = parse_spec(_read_text(args.spec))
        if args.p is not None:
            spec = spec.with_p(parse_rational(args.p))
        u, v = _parse_windows(args.w)
        grid = Grid2D(args.L, args.N)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    residuals = intertwine_residual(spec, u, v, spec.p, grid, mode=args.mode)
    worst = 0.0
    for name, value in residuals:
        print(f"{name}: {value:.3e}")
        worst = max(worst, value)
    if worst <= args.tol:
        print(f"PASS (worst {worst:.3e} <= tol {args.tol:.1e})")
        return 0
    print(f"FAIL (worst {worst:.3e} > tol {args.tol:.1e})")
    return 1


def _cmd_transform(args) -> int:
    try:
        spec, _ = parse_spec(_read_text(args.spec))
        if args.p is not None:
            spec = spec.with_p(parse_rational(args.p))
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    p = float(spec.p)
    try:
        if args.forward:
            u, v = _parse_windows(args.w)
            grid = Grid2D(args.L, args.N)
            gf = wig_forward(u, v, p, grid)
            write_grid(gf, args.out, fmt=args.format, extra={"p": str(spec.p)})
        else:
            if args.infile is None:
                return _fail("--inverse needs --in <grid file>")
            gf = read_grid(args.infile)
            pair = wig_inverse(gf, p)
            write_grid(pair, args.out, fmt=args.format, extra={"p": str(spec.p)})
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    print(f"wrote {args.out} (and manifest)")
    return 0


def _cmd_generate(args) -> int:
    if (args.positive_symbol is None) == (args.quasi_homogeneous is None):
        return _fail("choose exactly one of --positive-symbol or --quasi-homogeneous")
    try:
        if args.positive_symbol is not None:
            if args.p is None:
                return _fail("--positive-symbol needs --p")
            obj = json.loads(_read_text(args.positive_symbol))
            target = MultiPoly.from_json(obj)
            result = generate_from_positive_symbol(target, parse_rational(args.p))
        else:
            parts = args.quasi_homogeneous.split(",")
            if len(parts) != 4:
                return _fail("--quasi-homogeneous needs rho,tau,h,k")
            rho, tau = parse_rational(parts[0]), parse_rational(parts[1])
            h, k = int(parts[2]), int(parts[3])
            result = generate_quasi_homogeneous(rho, tau, h, k)
    except PositivityError as exc:
        return _fail(str(exc))
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    doc = result.to_json()
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return result.report.exit_code


def _iter_certificates(doc) -> list[dict]:
    if isinstance(doc, dict) and "kind" in doc:
        return [doc]
    if isinstance(doc, dict) and "verdict" in doc:
        chain = doc["verdict"].get("chain", [])
        if isinstance(chain, list):
            return [c for c in chain if isinstance(c, dict)]
    raise ValueError("expected a certificate object or a report with a verdict chain")


def _cmd_verify_certificate(args) -> int:
    try:
        doc = json.loads(_read_text(args.cert))
        raw_certs = _iter_certificates(doc)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    if not raw_certs:
        print("no certificates to verify (empty chain)")
        return 0
    all_ok = True
    for raw in raw_certs:
        try:
            cert = Certificate.from_json(raw)
        except (KeyError, TypeError, ValueError) as exc:
            print(f"malformed certificate: {exc}")
            all_ok = False
            continue
        result = verify_certificate(cert)
        if result.ok:
            print(f"{cert.kind}: ok")
        else:
            print(f"{cert.kind}: FAIL ({result.reason})")
            all_ok = False
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wigreg",
                     description="certify regularity of planar operators by "
                                 "reduction to a one-variable model")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="run the certificate chain on a spec")
    c.add_argument("spec")
    c.add_argument("--report", help="write the JSON report here")
    c.add_argument("--summary", help="write the text summary here")
    c.add_argument("--quiet", action="store_true", help="suppress the stdout summary")
    c.set_defaults(func=_cmd_certify)

    s = sub.add_parser("symbol", help="print derived symbols")
    s.add_argument("spec")
    s.add_argument("--emit", default="a",
                   help="comma-separated: a, b, atilde, wick, conjugated")
    s.add_argument("--json", action="store_true", help="emit JSON instead of text")
    s.set_defaults(func=_cmd_symbol)

    vi = sub.add_parser("verify-intertwine",
                        help="check the intertwining identity numerically")
    vi.add_argument("spec")
    vi.add_argument("--p", help="override the spec's rational p")
    vi.add_argument("--w", default="hermite:0,0", help="window pair, hermite:m,n")
    vi.add_argument("--L", type=float, default=12.0, help="grid half-width")
    vi.add_argument("--N", type=int, default=256, help="grid size (power of two)")
    vi.add_argument("--mode", choices=("full", "generators"), default="full")
    vi.add_argument("--tol", type=float, default=1e-6)
    vi.set_defaults(func=_cmd_verify_intertwine)

    t = sub.add_parser("transform", help="compute a transform grid or invert one")
    t.add_argument("spec")
    direction = t.add_mutually_exclusive_group(required=True)
    direction.add_argument("--forward", action="store_true")
    direction.add_argument("--inverse", action="store_true")
    t.add_argument("--p", help="override the spec's rational p")
    t.add_argument("--w", default="hermite:0,0", help="window pair, hermite:m,n")
    t.add_argument("--L", type=float, default=12.0)
    t.add_argument("--N", type=int, default=256)
    t.add_argument("--in", dest="infile", help="input grid file (inverse only)")
    t.add_argument("--out", required=True, help="output grid file")
    t.add_argument("--format", choices=("csv", "raw"), default="csv")
    t.set_defaults(func=_cmd_transform)

    g = sub.add_parser("generate", help="construct certified-regular operators")
    g.add_argument("--positive-symbol", help="JSON file with the target polynomial")
    g.add_argument("--p", help="rational p for --positive-symbol")
    g.add_argument("--quasi-homogeneous", help="rho,tau,h,k")
    g.add_argument("--out", help="write the result JSON here")
    g.set_defaults(func=_cmd_generate)

    vc = sub.add_parser("verify-certificate",
                        help="re-check a certificate file or a report's chain")
    vc.add_argument("cert")
    vc.set_defaults(func=_cmd_verify_certificate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    threads_error = _check_threads()
    if threads_error is not None:
        return _fail(threads_error)
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
