"""Command-line front end: classify, check, construct, generate, verify, selftest."""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from tanlin.construct import AnsatzConfig, ConstructionError, emit_system, solve_by_ansatz
from tanlin.criteria import CaseTag, check, dispatch
from tanlin.expr import ParseError, as_rational
from tanlin.invariants import InvariantError, compute_invariants
from tanlin.numeric import NumericConfig, NumericError, integrate_and_fit
from tanlin.ode_form import Form8, Form9Detected, OdeParseError, classify_form, parse_ode
from tanlin.rational import RationalFunction, ZeroDenominatorError
from tanlin.transform import TangentTransformation, TransformationError, generate_ode, verify_linearization

FORMAT_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2
INPUT_ERRORS = (ParseError, OdeParseError, ZeroDenominatorError, TransformationError, ValueError)


class InternalError(RuntimeError):
    """A module produced output that contradicts another module."""


@dataclass
class RunReport:
    line: int
    text: str
    form: Optional[str] = None
    coefficients: Optional[dict] = None
    form9_r: Optional[str] = None
    invariants: Optional[dict] = None
    case: Optional[str] = None
    criteria: Optional[dict] = None
    system: Optional[list] = None
    transformation: Optional[dict] = None
    construction: Optional[str] = None
    verified: Optional[bool] = None
    verify_residual: Optional[str] = None
    numeric: Optional[dict] = None
    message: Optional[str] = None
    error: Optional[str] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None and v != []}

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(**data)


def dump_reports(reports: list[RunReport]) -> str:
    doc = {"format_version": FORMAT_VERSION, "reports": [r.to_dict() for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def load_reports(text: str) -> list[RunReport]:
    doc = json.loads(text)
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported report format {doc.get('format_version')!r}")
    return [RunReport.from_dict(r) for r in doc["reports"]]


# -- pipeline -----------------------------------------------------------------


def _strs(mapping) -> dict:
    return {k: str(v) for k, v in mapping.items()}


def analyse(line: int, text: str, stage: str, options: dict) -> RunReport:
    """Run the pipeline on one equation up to ``stage`` (classify, check or construct)."""
    rep = RunReport(line=line, text=text)
    ode = parse_ode(text)
    tag = classify_form(ode)
    rep.form = tag.tag
    if isinstance(tag, Form9Detected):
        rep.form9_r = str(tag.r)
        rep.message = "Form9Detected: phi depends on y'; no sufficient conditions are available for this shape"
        return rep
    if not isinstance(tag, Form8):
        rep.case = CaseTag.NOT_FORM8.value
        rep.message = tag.reason
        return rep
    c = tag.coefficients
    rep.coefficients = _strs(c.as_dict())
    inv = compute_invariants(c)
    rep.invariants = _strs(inv.values())
    case = dispatch(c, inv)
    rep.case = case.value
    report = check(c, inv, case)
    if stage == "classify":
        rep.criteria = {"verdict": report.verdict}
        return rep
    rep.criteria = {k: v for k, v in report.to_dict().items() if k != "notes"}
    rep.notes = list(report.notes)
    if stage == "check":
        return rep
    if not report.verdict:
        rep.construction = "refused"
        rep.message = "sufficient conditions fail; nothing to construct"
        return rep
    system = emit_system(c, inv, case)
    rep.system = system.lines()
    result = solve_by_ansatz(system, options["ansatz"])
    rep.construction = result.status
    if result.transformation is not None:
        tr = result.transformation
        ok, residual = verify_linearization(c, tr)
        if not ok:
            raise InternalError("ansatz returned a transformation that does not verify")
        rep.transformation = {"phi": str(tr.phi), "psi": str(tr.psi)}
        rep.verified = True
    else:
        rep.message = "ansatz exhausted" if result.status == "exhausted" else "ansatz timed out"
    return rep


def verify_line(line: int, text: str, tr: TangentTransformation, numeric: Optional[NumericConfig]) -> RunReport:
    rep = RunReport(line=line, text=text)
    ode = parse_ode(text)
    tag = classify_form(ode)
    rep.form = tag.tag
    if not isinstance(tag, Form8):
        rep.message = "verification needs an equation of the polynomial-in-y'' shape"
        rep.verified = False
        return rep
    c = tag.coefficients
    ok, residual = verify_linearization(c, tr)
    rep.transformation = {"phi": str(tr.phi), "psi": str(tr.psi)}
    rep.verified = ok
    rep.verify_residual = str(residual)
    if numeric is not None:
        try:
            rep.numeric = integrate_and_fit(c, tr, numeric).to_dict()
        except NumericError as exc:
            rep.numeric = {"error": str(exc)}
    return rep


def _safe(func, line, text, *args) -> tuple[RunReport, int]:
    try:
        return func(line, text, *args), EXIT_OK
    except INPUT_ERRORS as exc:
        if isinstance(exc, InvariantError):
            return RunReport(line=line, text=text, error=f"internal: {exc}"), EXIT_INTERNAL
        return RunReport(line=line, text=text, error=str(exc)), EXIT_INPUT
    except (InternalError, AssertionError) as exc:
        return RunReport(line=line, text=text, error=f"internal: {exc}"), EXIT_INTERNAL


def read_equations(path: str) -> list[tuple[int, str]]:
    """Non-empty, non-comment lines with their 1-based line numbers; '#' starts a comment."""
    if path == "-":
        content = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            content = fh.read()
    out = []
    for i, raw in enumerate(content.splitlines(), 1):
        text = raw.split("#", 1)[0].strip()
        if text:
            out.append((i, text))
    return out


def run_lines(func, items, extra, jobs: int) -> list[tuple[RunReport, int]]:
    args = [(func, line, text) + tuple(extra) for line, text in items]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_star_safe, args))
    return [_star_safe(a) for a in args]


def _star_safe(packed):
    return _safe(*packed)


# -- formatting -----------------------------------------------------------------


def format_text(rep: RunReport) -> str:
    out = [f"line {rep.line}: {rep.text}"]
    if rep.error:
        out.append(f"  error: {rep.error}")
        return "\n".join(out)
    if rep.form:
        out.append(f"  form: {rep.form}")
    if rep.form9_r:
        out.append(f"  pole at y2 = -({rep.form9_r})")
    for name, value in (rep.coefficients or {}).items():
        out.append(f"  {name} = {value}")
    for name, value in (rep.invariants or {}).items():
        out.append(f"  {name} = {value}")
    if rep.case:
        out.append(f"  case: {rep.case}")
    if rep.criteria is not None:
        for cond in rep.criteria.get("conditions", []):
            mark = "ok" if cond["passed"] else "FAILS"
            detail = "" if cond["passed"] else f"  residual {cond['residual']}"
            out.append(f"  {cond['name']}: {mark}{detail}")
        verdict = rep.criteria["verdict"]
        out.append(f"  verdict: {'linearizable' if verdict else 'not established'}")
    for line in rep.system or []:
        out.append(f"  {line}")
    if rep.transformation:
        out.append(f"  transformation: t = {rep.transformation['phi']}, u = {rep.transformation['psi']}")
    if rep.verified is not None:
        out.append(f"  verified: {'yes' if rep.verified else 'no'}")
        if not rep.verified and rep.verify_residual:
            out.append(f"  residual: {rep.verify_residual}")
    if rep.numeric:
        if "error" in rep.numeric:
            out.append(f"  numeric: {rep.numeric['error']}")
        else:
            status = "pass" if rep.numeric["passed"] else "fail"
            out.append(f"  numeric: quadratic-fit residual {rep.numeric['residual']:.3e} ({status})")
            for w in rep.numeric.get("warnings", []):
                out.append(f"  warning: {w}")
    if rep.message:
        out.append(f"  {rep.message}")
    for note in rep.notes:
        out.append(f"  note: {note}")
    return "\n".join(out)


def emit(reports: list[RunReport], as_json: bool) -> None:
    if as_json:
        print(dump_reports(reports))
    else:
        for rep in reports:
            print(format_text(rep))


# -- commands -----------------------------------------------------------------


def _exponent_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO..HI, e.g. -3..3") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty exponent range")
    return lo, hi


def _transformation(args) -> TangentTransformation:
    if args.phi is None or args.psi is None:
        raise TransformationError("both --phi and --psi are required")
    return TangentTransformation(as_rational(args.phi), as_rational(args.psi))


def cmd_file(args, stage: str) -> int:
    options = {"ansatz": AnsatzConfig(exponent_range=args.exponent_range, timeout=args.timeout)}
    results = run_lines(analyse, read_equations(args.file), (stage, options), args.jobs)
    emit([r for r, _ in results], args.json)
    return max((code for _, code in results), default=EXIT_OK)


def cmd_generate(args) -> int:
    tr = _transformation(args)
    gen = generate_ode(tr)
    c = gen.coefficients
    rep = RunReport(line=0, text=c.equation_text(), form="form8", coefficients=_strs(c.as_dict()))
    rep.transformation = {"phi": str(tr.phi), "psi": str(tr.psi)}
    if args.json:
        emit([rep], True)
    else:
        print(rep.text)
        for name, value in rep.coefficients.items():
            print(f"  {name} = {value}")
    return EXIT_OK


def cmd_verify(args) -> int:
    tr = _transformation(args)
    numeric = NumericConfig() if args.numeric else None
    results = run_lines(verify_line, read_equations(args.file), (tr, numeric), args.jobs)
    emit([r for r, _ in results], args.json)
    code = max((c for _, c in results), default=EXIT_OK)
    return code


def random_fiber_linear(rng: random.Random) -> TangentTransformation:
    """A fiber-linear transformation with monomial psi1, psi0 (exponents in [-2, 2])."""
    x, y = RationalFunction.variable("x"), RationalFunction.variable("y")

    def mono():
        coeff = rng.choice([1, -1, 2, 3, Fraction(1, 2)])
        return coeff * x ** rng.randint(-2, 2) * y ** rng.randint(-2, 2)

    phi = as_rational(rng.choice(["x", "x^2", "x + x^3/3"]))
    psi0 = mono() if rng.random() < 0.7 else RationalFunction.constant(0)
    return TangentTransformation.fiber_linear(phi, mono(), psi0)


def cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    reports = []
    code = EXIT_OK
    for i in range(args.count):
        tr = random_fiber_linear(rng)
        c = generate_ode(tr).coefficients
        inv = compute_invariants(c)
        case = dispatch(c, inv)
        verdict = check(c, inv, case).verdict
        ok, _ = verify_linearization(c, tr)
        rep = RunReport(line=i + 1, text=c.equation_text(), case=case.value, criteria={"verdict": verdict})
        rep.transformation = {"phi": str(tr.phi), "psi": str(tr.psi)}
        rep.verified = ok
        if not (verdict and ok):
            rep.error = "internal: generated equation not recognised as linearizable"
            code = EXIT_INTERNAL
        reports.append(rep)
    emit(reports, args.json)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tanlin", description="Linearization test for y'''' = f(x, y, y', y'', y''').")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--jobs", type=int, default=1, help="process lines in parallel")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("classify", "form, coefficients, invariants and case of each equation"),
        ("check", "evaluate the sufficient conditions"),
        ("construct", "emit the determining system and search for a transformation"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file", help="one equation per line, '#' comments, '-' for stdin")
        p.add_argument("--exponent-range", type=_exponent_range, default=(-3, 3), metavar="LO..HI")
        p.add_argument("--timeout", type=float, default=None, metavar="SECONDS")

    p = sub.add_parser("generate", parents=[common], help="equation mapped to u''' = 0 by t = phi, u = psi")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)

    p = sub.add_parser("verify", parents=[common], help="check that t = phi, u = psi linearizes each equation")
    p.add_argument("file")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--numeric", action="store_true", help="also run the numerical falsifier")

    p = sub.add_parser("selftest", parents=[common], help="round trip on random generated equations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    return parser


def _glue_ranges(argv: list[str]) -> list[str]:
    # argparse takes "-3..3" for an option; bind it to its flag explicitly
    out = []
    it = iter(argv)
    for a in it:
        if a == "--exponent-range":
            out.append(f"{a}={next(it, '')}")
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_ranges(list(argv)))
    try:
        if args.command in ("classify", "check", "construct"):
            return cmd_file(args, args.command)
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_selftest(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InternalError, InvariantError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
