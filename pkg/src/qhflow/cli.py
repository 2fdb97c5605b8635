"""Command-line front end: ``qhflow <command> ...``.

Exit codes: 0 ok, 2 invalid input, 3 hypothesis or monodromy precondition failure,
4 inconclusive center verdict.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from gmpy2 import mpq

from . import __version__
from .iifcheck import IifCandidate, verify_power_iif
from .nform import (
    NormalFormResult,
    Verdict,
    classify_aiif,
    default_degree,
    normal_form,
    second_stage,
)
from .orbit import (
    PreconditionError,
    NumericalFailure,
    center_verdict,
    generalized_trig,
    poincare_integral,
    write_csv,
)
from .qhgrade import (
    NotHamiltonian,
    QHType,
    basis,
    decompose_field,
    hamiltonian_potential,
    index_set_complement,
    qh_degree_of,
    suggest_types,
)
from .ratpoly import InputTooLarge, PlanarField, SparsePolynomial
from .structure import HypothesisError, check_hypotheses, is_monodromic

SCHEMA_VERSION = "1.0"

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_INCONCLUSIVE = 0, 2, 3, 4


class InputError(ValueError):
    pass


class PreconditionFailure(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# -- serialisation -------------------------------------------------------------

def exact(q) -> dict:
    q = mpq(q)
    return {"exact": str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"}


def approx(v: float) -> dict:
    return {"approx": float(v)}


def poly_json(p: SparsePolynomial) -> dict:
    return {"text": str(p), "terms": p.to_records()}


def _records(raw, what: str) -> SparsePolynomial:
    if not isinstance(raw, list):
        raise InputError(f"{what} must be a list of monomial records")
    terms = {}
    for rec in raw:
        try:
            i, j, c = int(rec["x"]), int(rec["y"]), rec["c"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad monomial record {rec!r} in {what}") from exc
        if isinstance(c, float) or isinstance(c, bool):
            raise InputError(f"coefficient {c!r} in {what} is not an exact rational string")
        try:
            c = mpq(str(c).strip())
        except ValueError as exc:
            raise InputError(f"coefficient {c!r} in {what} does not parse as a rational") from exc
        terms[(i, j)] = terms.get((i, j), mpq(0)) + c  # duplicates are summed
    try:
        return SparsePolynomial(terms)
    except (InputTooLarge, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _parse_type(raw) -> QHType:
    try:
        if isinstance(raw, str):
            return QHType.parse(raw)
        a, b = raw
        return QHType(int(a), int(b))
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid quasi-homogeneous type {raw!r}: {exc}") from exc


@dataclass
class SystemSpec:
    name: str | None
    type: QHType | None
    P: SparsePolynomial
    Q: SparsePolynomial
    truncation_degree: int | None = None

    @classmethod
    def from_json(cls, data: dict) -> "SystemSpec":
        if not isinstance(data, dict):
            raise InputError("system file must hold a JSON object")
        if "P" not in data or "Q" not in data:
            raise InputError("system file needs P and Q")
        t = _parse_type(data["type"]) if data.get("type") is not None else None
        D = data.get("truncation_degree")
        if D is not None and (not isinstance(D, int) or isinstance(D, bool)):
            raise InputError("truncation_degree must be an integer")
        return cls(data.get("name"), t, _records(data["P"], "P"), _records(data["Q"], "Q"), D)

    @property
    def field(self) -> PlanarField:
        return PlanarField(self.P, self.Q)

    def echo(self) -> dict:
        return {"name": self.name, "type": [self.type.t1, self.type.t2] if self.type else None,
                "P": self.P.to_records(), "Q": self.Q.to_records(),
                "truncation_degree": self.truncation_degree}


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_system(path: str) -> SystemSpec:
    return SystemSpec.from_json(load_json(path))


def load_polynomial(path: str, key: str) -> SparsePolynomial:
    data = load_json(path)
    if isinstance(data, dict):
        if key not in data:
            raise InputError(f"{path} has no '{key}' entry")
        data = data[key]
    return _records(data, key)


# -- pipeline -----------------------------------------------------------------

def resolve_type(spec: SystemSpec, notes: list) -> QHType:
    if spec.type is not None:
        return spec.type
    cands = suggest_types(spec.field)
    if len(cands) != 1:
        raise InputError("no type given and the Newton diagram suggests several: "
                         + ", ".join(str(c) for c in cands))
    notes.append(f"type {cands[0]} taken from the only lower Newton-diagram edge")
    return cands[0]


def leading_hamiltonian(f: PlanarField, t: QHType):
    g = decompose_field(f, t)
    r = g.r
    return hamiltonian_potential(g[r], t, r), r


def hypothesis_json(rep) -> dict:
    return {"h1": rep.h1, "h2": rep.h2, "h2_checked_degrees": rep.h2_checked_degrees,
            "monodromic": rep.monodromic, "sign": rep.sign, "n0": rep.n0}


def normal_form_json(nf: NormalFormResult) -> list:
    out = []
    for j in sorted(nf.mu):
        out.append({"degree": j,
                    "corange_basis": [str(b) for b in nf.corange[j]],
                    "coefficients": [exact(c) for c in nf.mu[j]],
                    "mu": poly_json(nf.mu_poly(j)),
                    "second_stage": [exact(c) for c in (nf.second_stage_mu or nf.mu)[j]]})
    return out


def verdict_json(v: Verdict) -> dict:
    return {"kind": v.kind, "D": v.D, "N": v.N,
            "exponent": exact(v.exponent) if v.exponent is not None else None,
            "witness_degree": v.witness_degree, "formal_iif": v.formal_iif,
            "notes": list(v.notes)}


def exponent_note(v: Verdict) -> str | None:
    if v.kind == "AIIF" and v.exponent is not None:
        return f"exponent {v.exponent} = 1 + N/(r+|t|) with N = {v.N}"
    return None


def center_stage(h, t, mu, tol: float, emit_orbit: str | None) -> dict:
    """Sign-corrected Poincaré integral of ``mu`` for monodromic ``h``."""
    mono, sign = is_monodromic(h, t)
    if not mono:
        raise PreconditionFailure(f"h = {h} vanishes off the origin, so the origin is not "
                                  f"monodromic")
    table = generalized_trig(h * sign, t, max(tol, 1e-9))
    res = poincare_integral(table, mu * sign)
    scale = table.period * max(abs((mu * sign).evalf(a, b)) for a, b in zip(table.cs, table.sn))
    verdict = center_verdict(sign, res, tol, scale)
    if emit_orbit:
        write_csv(emit_orbit, table, {"mu": mu * sign})
    return {"I": approx(res.value), "error": approx(res.abs_error_estimate),
            "certificate": res.certificate or None, "verdict": verdict,
            "sign": sign, "level": approx(table.level), "period": approx(table.period),
            "note": "integral taken on the orbit through (1, 0) of sign(h)*h; other "
                    "levels rescale I by a positive factor"}


def analyse(spec: SystemSpec, degree: int | None, tol: float, emit_orbit: str | None = None,
            with_center: bool = True) -> tuple[dict, int]:
    notes: list = []
    t = resolve_type(spec, notes)
    try:
        h, r = leading_hamiltonian(spec.field, t)
    except NotHamiltonian as exc:
        raise PreconditionFailure(str(exc)) from exc
    D = degree or spec.truncation_degree or default_degree(t, r)
    report = {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
              "system": spec.echo(), "type": [t.t1, t.t2], "r": r, "h": poly_json(h),
              "config": {"degree": D, "tol": approx(tol)}, "notes": notes}
    hyp = check_hypotheses(h, t)
    report["hypothesis"] = hypothesis_json(hyp)
    report["monodromy"] = {"monodromic": hyp.monodromic, "sign": hyp.sign}
    if not (hyp.h1 and hyp.h2):
        raise PreconditionFailure("leading Hamiltonian fails " + ("H1" if not hyp.h1 else "H2"),
                                  report)
    try:
        nf = second_stage(normal_form(spec.field, h, D, t))
    except HypothesisError as exc:
        raise PreconditionFailure(str(exc), report) from exc
    v = classify_aiif(nf)
    report["normal_form"] = normal_form_json(nf)
    report["verdict"] = verdict_json(v)
    note = exponent_note(v)
    if note:
        notes.append(note)
    code = EXIT_OK
    if with_center and hyp.monodromic and v.kind == "AIIF":
        try:
            report["center"] = center_stage(h, t, nf.mu_poly(r + v.N), tol, emit_orbit)
        except NumericalFailure as exc:
            report["center"] = {"verdict": "Inconclusive", "error_message": str(exc)}
        if report["center"]["verdict"] == "Inconclusive":
            code = EXIT_INCONCLUSIVE
    return report, code


# -- commands -----------------------------------------------------------------

def cmd_index_set(args) -> tuple[dict, int]:
    t = _parse_type(args.type)
    s = sorted(index_set_complement(t, args.bound))
    return {"schema_version": SCHEMA_VERSION, "type": [t.t1, t.t2], "index_set_complement": s}, EXIT_OK


def cmd_bases(args) -> tuple[dict, int]:
    t = _parse_type(args.type)
    if args.degree < 0:
        raise InputError("degree must be nonnegative")
    return {"schema_version": SCHEMA_VERSION, "type": [t.t1, t.t2], "degree": args.degree,
            "basis": [str(m) for m in basis(t, args.degree)]}, EXIT_OK


def cmd_check_h(args) -> tuple[dict, int]:
    notes: list = []
    if args.system:
        spec = load_system(args.system)
        t = _parse_type(args.type) if args.type else resolve_type(spec, notes)
        try:
            h, r = leading_hamiltonian(spec.field, t)
        except NotHamiltonian as exc:
            raise PreconditionFailure(str(exc)) from exc
    else:
        if not args.type:
            raise InputError("--type is required with --h")
        t = _parse_type(args.type)
        h = load_polynomial(args.h, "h")
        try:
            r = qh_degree_of(h, t) - t.size
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    hyp = check_hypotheses(h, t)
    report = {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
              "type": [t.t1, t.t2], "r": r, "h": poly_json(h),
              "hypothesis": hypothesis_json(hyp),
              "monodromy": {"monodromic": hyp.monodromic, "sign": hyp.sign}, "notes": notes}
    if not hyp.monodromic:
        notes.append("h vanishes on a curve through the origin: not monodromic")
    return report, (EXIT_OK if hyp.h1 and hyp.h2 else EXIT_HYPOTHESIS)


def cmd_classify(args) -> tuple[dict, int]:
    paths = args.system
    if len(paths) == 1 and not args.batch:
        return analyse(load_system(paths[0]), args.degree, args.tol, args.emit_orbit)
    workers = int(os.environ.get("QHFLOW_THREADS", "1") or 1)

    def one(path):
        try:
            rep, code = analyse(load_system(path), args.degree, args.tol)
        except (InputError, PreconditionFailure) as exc:
            rep = {"error": str(exc)}
            code = EXIT_INPUT if isinstance(exc, InputError) else EXIT_HYPOTHESIS
        rep["file"] = path
        return rep, code

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(one, paths))
    return ({"schema_version": SCHEMA_VERSION, "reports": [r for r, _ in results]},
            max(c for _, c in results))


def cmd_center(args) -> tuple[dict, int]:
    spec = load_system(args.system)
    report, _ = analyse(spec, args.degree, args.tol, with_center=False)
    if not report["monodromy"]["monodromic"]:
        raise PreconditionFailure("the origin is not monodromic: h vanishes on a curve "
                                  "through the origin", report)
    v = report["verdict"]
    if v["kind"] == "NoAIIF":
        raise PreconditionFailure("the normal form has no single leading mu term up to the "
                                  "truncation", report)
    if v["kind"] == "IntegrableUpToD":
        report["center"] = {"verdict": "Inconclusive",
                            "note": f"formally integrable up to degree {v['D']}"}
        return report, EXIT_INCONCLUSIVE
    t = QHType(*report["type"])
    h = SparsePolynomial.from_records(report["h"]["terms"])
    r, N = report["r"], v["N"]
    entry = next(e for e in report["normal_form"] if e["degree"] == r + N)
    mu = SparsePolynomial.from_records(entry["mu"]["terms"])
    report["center"] = center_stage(h, t, mu, args.tol, args.emit_orbit)
    code = EXIT_INCONCLUSIVE if report["center"]["verdict"] == "Inconclusive" else EXIT_OK
    return report, code


def cmd_verify_iif(args) -> tuple[dict, int]:
    spec = load_system(args.system)
    w = load_polynomial(args.w, "w")
    try:
        s = mpq(args.exponent)
        cand = IifCandidate(w, s)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    t = spec.type
    if args.degree is not None and t is None:
        t = resolve_type(spec, [])
    ok, defect = verify_power_iif(spec.field, cand, args.degree, t)
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
            "system": spec.echo(), "w": poly_json(w), "exponent": exact(s),
            "truncation": args.degree, "ok": ok, "defect": poly_json(defect)}, EXIT_OK


# -- output --------------------------------------------------------------------

def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    out = []
    if isinstance(obj, dict):
        if set(obj) == {"exact"}:
            return [pad + obj["exact"]]
        if set(obj) == {"approx"}:
            return [pad + repr(obj["approx"])]
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and not (isinstance(v, dict) and len(v) == 1
                                                   and set(v) & {"exact", "approx"}):
                out.append(f"{pad}{k}:")
                out.extend(_text(v, indent + 1))
            else:
                out.append(f"{pad}{k}: {_text(v)[0].strip()}")
    elif isinstance(obj, list):
        for v in obj:
            lines = _text(v, indent + 1)
            out.append(pad + "- " + lines[0].strip() if lines else pad + "-")
            out.extend(lines[1:])
    else:
        out.append(pad + ("none" if obj is None else str(obj)))
    return out


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return "\n".join(_text(report)) + "\n"
    return dumps(report)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhflow", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"qhflow {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index-set", parents=[common], help="degrees with a trivial space")
    p.add_argument("--type", required=True)
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(func=cmd_index_set)

    p = sub.add_parser("bases", parents=[common], help="monomial basis of one degree")
    p.add_argument("--type", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.set_defaults(func=cmd_bases)

    p = sub.add_parser("check-h", parents=[common], help="H1, H2, monodromy and n0")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--h", help="JSON file with monomial records (list or {'h': [...]})")
    g.add_argument("--system", help="system file; h is read from its leading part")
    p.add_argument("--type")
    p.set_defaults(func=cmd_check_h)

    p = sub.add_parser("classify", parents=[common], help="normal form and AIIF verdict")
    p.add_argument("system", nargs="+")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--emit-orbit", dest="emit_orbit")
    p.add_argument("--batch", action="store_true", help="analyse all files concurrently")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("center", parents=[common], help="center or focus via the Poincaré integral")
    p.add_argument("system")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--emit-orbit", dest="emit_orbit")
    p.set_defaults(func=cmd_center)

    p = sub.add_parser("verify-iif", parents=[common], help="check W^s as an inverse integrating factor")
    p.add_argument("system")
    p.add_argument("--w", required=True)
    p.add_argument("--exponent", default="1")
    p.add_argument("--degree", type=int, help="compare components up to this degree only")
    p.set_defaults(func=cmd_verify_iif)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        report, code = args.func(args)
    except InputError as exc:
        print(f"qhflow: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionFailure as exc:
        print(f"qhflow: precondition failed: {exc}", file=sys.stderr)
        if exc.report is not None:
            exc.report["error"] = str(exc)
            sys.stdout.write(render(exc.report, args.format))
        return EXIT_HYPOTHESIS
    except PreconditionError as exc:
        print(f"qhflow: precondition failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    sys.stdout.write(render(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
