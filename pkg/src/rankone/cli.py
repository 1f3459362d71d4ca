"""Batch front-end: read a JSON problem file, run diagnostics, emit a report.

Subcommands pick which stages run:

    check         verdicts (c or r, witnesses, coefficients, closed-form identities)
    left-inverse  verdicts + explicit left inverse and its probe residual
    solve         verdicts + diagonal solves
    probe         analyticity probes and the power formula
    oracle        dense sigma_min cross-check only
    corpus        every stage on the bundled regression corpus (or a given file)

Exit status: 0 when every check passes, 1 on any failed check or per-problem
error, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
import zlib
from importlib import resources

import numpy as np

from . import __version__
from . import seqcore as sc
from .analytic import (
    analyticity_probe,
    classify_vm_vn,
    kernel_condition_residual,
    perturbed_power,
    square_identity_residual,
    vm_vn_operator,
    ShiftedFamily,
)
from .diagonal import (
    DiagonalVerdict,
    basis_range_criterion,
    bounded_below_checks,
    invertibility_verdict,
    r_value,
    solve,
    standing_assumption,
)
from .diagonal import perturbed as diag_perturbed
from .errors import NotLeftInvertibleError, ParseError, RankOneError, ValidationError
from .hardy import c_identity_check, intertwiner_u, isometry_condition, make_t_alpha_beta
from .operators import ShiftPow, apply, isometry_check, power, random_probes
from .oracle import residual_sweep, verdict_cross_check
from .perturbation import Verdict, left_inverse, nakamura_perturbation, perturbed, verdict
from .serialize import complex_from_json, complex_to_json, diagonal_from_json, vector_from_json

KINDS = ("isometry_perturbation", "diagonal_perturbation", "t_alpha_beta", "analytic_probe", "power_formula")
COMMANDS = {
    "check": {"verdict"},
    "left-inverse": {"verdict", "left_inverse"},
    "solve": {"verdict", "solve"},
    "probe": {"probe"},
    "oracle": {"oracle"},
    "corpus": {"verdict", "left_inverse", "solve", "probe", "oracle"},
}
IDENTITY_TOL = 1e-12
RESIDUAL_TOL = 1e-11
SOLVE_TOL = 1e-12


class Context:
    def __init__(self, args, stages):
        self.tol = args.tolerance
        self.seed = args.seed
        self.dims = tuple(args.oracle_dims)
        self.probes = args.probes
        self.stages = stages

    def problem_seed(self, pid: str) -> int:
        return (self.seed << 32) + zlib.crc32(pid.encode())


class Result:
    def __init__(self):
        self.data: dict = {}
        self.checks: list[dict] = []

    def check(self, name: str, passed, **info):
        row = {"name": name, "passed": bool(passed)}
        row.update(info)
        self.checks.append(row)


# -- problem-file parsing -----------------------------------------------------------


def _int(payload, key, where, default=None, minimum=0):
    if key not in payload:
        if default is None:
            raise ValidationError(f"{where}.{key}: missing field")
        return default
    v = payload[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise ValidationError(f"{where}.{key}: expected an integer >= {minimum}, got {v!r}")
    return v


def _vec(payload, key, where):
    if key not in payload:
        raise ValidationError(f"{where}.{key}: missing field")
    return vector_from_json(payload[key], f"{where}.{key}")


def load_spec(text: str, source: str = "<spec>") -> dict:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(spec, dict):
        raise ParseError(f"{source}: top level must be an object")
    if spec.get("version") != 1:
        raise ValidationError(f"{source}.version: expected 1, got {spec.get('version')!r}")
    problems = spec.get("problems")
    if not isinstance(problems, list):
        raise ValidationError(f"{source}.problems: expected a list")
    seen = set()
    for i, prob in enumerate(problems):
        where = f"problems[{i}]"
        if not isinstance(prob, dict):
            raise ValidationError(f"{where}: expected an object")
        pid = prob.get("id")
        if not isinstance(pid, str) or not pid:
            raise ValidationError(f"{where}.id: expected a nonempty string")
        if pid in seen:
            raise ValidationError(f"{where}.id: duplicate id {pid!r}")
        seen.add(pid)
        if prob.get("kind") not in KINDS:
            raise ValidationError(f"{where}.kind: expected one of {KINDS}, got {prob.get('kind')!r}")
        prob["_parsed"] = _parse_payload(prob, f"{where}")
    return spec


def _parse_payload(prob, where):
    kind = prob["kind"]
    out = {}
    if kind == "isometry_perturbation":
        out["p"] = _int(prob, "p", where)
        if "nakamura" in prob:
            nk = prob["nakamura"]
            out["h"] = _vec(nk, "h", f"{where}.nakamura")
            out["alpha"] = complex_from_json(nk.get("alpha"), f"{where}.nakamura.alpha")
        else:
            out["f"] = _vec(prob, "f", where)
            out["g"] = _vec(prob, "g", where)
    elif kind == "diagonal_perturbation":
        if "D" not in prob:
            raise ValidationError(f"{where}.D: missing field")
        out["D"] = diagonal_from_json(prob["D"], f"{where}.D")
        out["f"] = _vec(prob, "f", where)
        out["g"] = _vec(prob, "g", where)
        ys = prob.get("y", [])
        if not isinstance(ys, list):
            raise ValidationError(f"{where}.y: expected a list of vectors")
        out["y"] = [vector_from_json(y, f"{where}.y[{i}]") for i, y in enumerate(ys)]
        js = prob.get("j", [])
        if not isinstance(js, list) or not all(isinstance(j, int) and j >= 0 for j in js):
            raise ValidationError(f"{where}.j: expected a list of nonnegative integers")
        out["j"] = js
    elif kind == "t_alpha_beta":
        out["alpha"] = complex_from_json(prob.get("alpha"), f"{where}.alpha")
        out["beta"] = complex_from_json(prob.get("beta"), f"{where}.beta")
    elif kind == "analytic_probe":
        out["p"] = _int(prob, "p", where, default=1, minimum=1)
        out["depth"] = _int(prob, "depth", where, default=5, minimum=1)
        if "m" in prob:
            out["m"] = _int(prob, "m", where)
            out["n"] = _int(prob, "n", where)
            out["f0"] = _vec(prob, "f0", where)
            out["nval"] = out["n"]
        else:
            out["f"] = _vec(prob, "f", where)
            out["g"] = _vec(prob, "g", where)
            out["nval"] = _int(prob, "nval", where, default=0)
    elif kind == "power_formula":
        out["p"] = _int(prob, "p", where, default=1, minimum=1)
        out["m"] = _int(prob, "m", where)
        out["n"] = _int(prob, "n", where)
        out["k"] = _int(prob, "k", where)
        out["f0"] = _vec(prob, "f0", where)
    expect = prob.get("expect", {})
    if not isinstance(expect, dict):
        raise ValidationError(f"{where}.expect: expected an object")
    out["expect"] = expect
    return out


# -- problem handlers -----------------------------------------------------------


def _expect_number(res: Result, expect: dict, key: str, value, where: str):
    if key not in expect:
        return
    target = complex_from_json(expect[key], f"{where}.expect.{key}")
    res.check(f"expect.{key}", abs(complex(value) - target) <= IDENTITY_TOL * max(1.0, abs(target)),
              expected=complex_to_json(target), got=complex_to_json(value))


def _expect_equal(res: Result, expect: dict, key: str, value):
    if key in expect:
        res.check(f"expect.{key}", expect[key] == value, expected=expect[key], got=value)


def _isometry_family(res, ctx, pid, V, f, g, expect):
    T = perturbed(V, f, g)
    diag = verdict(V, f, g, ctx.tol)
    if "verdict" in ctx.stages:
        res.data.update(
            verdict=diag.verdict.value,
            c=diag.c,
            beta=complex_to_json(diag.beta),
            norms={"f2": diag.normF2, "VstarF2": diag.normVstarF2, "g2": diag.normG2},
            witnesses={"normVstarFEqualsNormF": diag.witness[0], "betaIsMinusOne": diag.witness[1]},
        )
        res.check("witnessAgreement", diag.left_invertible != all(diag.witness))
        if diag.a is not None:
            res.data["coefficients"] = [complex_to_json(a) for a in diag.a]
            res.check("coefficientsVanish", max(abs(a) for a in diag.a) <= IDENTITY_TOL)
        _expect_number(res, expect, "c", diag.c, pid)
        _expect_equal(res, expect, "verdict", diag.verdict.value)
    if "left_inverse" in ctx.stages:
        if diag.left_invertible:
            L = left_inverse(V, f, g, ctx.tol)
            resid = residual_sweep(L, T, ctx.probes, ctx.problem_seed(pid))
            bound = RESIDUAL_TOL * max(1.0, 0.1 / diag.c)
            res.data["leftInverseResidual"] = resid
            res.check("leftInverseResidual", resid <= bound, value=resid, bound=bound)
        else:
            try:
                left_inverse(V, f, g, ctx.tol)
                raised = False
            except NotLeftInvertibleError:
                raised = True
            res.check("leftInverseRefused", raised)
    if "oracle" in ctx.stages:
        u = sc.shift_left(f, V.p)
        exact = (not diag.left_invertible) and u.is_finite and u.support_bound <= min(ctx.dims)
        rep = verdict_cross_check(T, diag.left_invertible, ctx.dims, c=diag.c, exact_kernel=exact)
        res.data["oracle"] = rep
        res.check("oracleAgrees", rep["passed"])
    return diag


def run_isometry(prob, ctx, res):
    P = prob["_parsed"]
    V = ShiftPow(P["p"])
    if "h" in P:
        f, g, T = nakamura_perturbation(V, P["h"], P["alpha"])
        if "verdict" in ctx.stages:
            ok = isometry_check(T, ctx.probes, ctx.problem_seed(prob["id"]))
            res.data["isometric"] = ok
            res.check("nakamuraIsometric", ok)
    else:
        f, g = P["f"], P["g"]
    diag = _isometry_family(res, ctx, prob["id"], V, f, g, P["expect"])
    if "h" in P and "verdict" in ctx.stages:
        res.check("nakamuraCIsOne", abs(diag.c - 1) <= IDENTITY_TOL, value=diag.c)


def run_t_alpha_beta(prob, ctx, res):
    P = prob["_parsed"]
    a, b = P["alpha"], P["beta"]
    t = make_t_alpha_beta(a, b)
    if "verdict" in ctx.stages:
        c, target = c_identity_check(a, b)
        res.check("cIdentity", abs(c - target) <= IDENTITY_TOL * max(1.0, target), c=c, sumSquares=target)
        iso = isometry_condition(a, b, ctx.probes, ctx.problem_seed(prob["id"]))
        res.data["isometry"] = iso
        _expect_equal(res, P["expect"], "isometry", iso)
        if iso:
            _, rep = intertwiner_u(a, b, ctx.probes, ctx.problem_seed(prob["id"]))
            res.data["intertwiner"] = rep
            res.check("intertwining", rep["intertwiningResidual"] <= IDENTITY_TOL and rep["uIsometric"])
    _isometry_family(res, ctx, prob["id"], ShiftPow(2), t.f, t.g, P["expect"])


def run_diagonal(prob, ctx, res):
    P = prob["_parsed"]
    D, f, g = P["D"], P["f"], P["g"]
    T = diag_perturbed(D, f, g)
    standing = standing_assumption(D, f, g)
    res.data["standingAssumption"] = standing
    diag = invertibility_verdict(D, f, g) if standing else None
    pid = prob["id"]
    if "verdict" in ctx.stages:
        r = r_value(D, f, g) if diag is None else diag.r
        res.data["r"] = None if r is None else complex_to_json(r)
        if r is not None:
            _expect_number(res, P["expect"], "r", r, pid)
        if diag is not None:
            res.data.update(
                verdict=diag.verdict.value,
                squareSummable=diag.squareSummable,
                dInvertible=diag.dInvertible,
            )
            _expect_equal(res, P["expect"], "verdict", diag.verdict.value)
            if diag.kernelWitness is not None:
                w = diag.kernelWitness
                resid = sc.norm(apply(T, w)) / sc.norm(w)
                res.data["kernelWitnessResidual"] = resid
                res.check("kernelWitness", resid <= IDENTITY_TOL, value=resid)
            bb = bounded_below_checks(D, f, g)
            res.data["boundedBelow"] = {
                "dBoundedBelow": bb.dBoundedBelow,
                "tInjective": bb.tInjective,
                "leftInvertible": bb.leftInvertible,
            }
    if "solve" in ctx.stages and D.invertible and abs(r_value(D, f, g)) > 1e-12:
        rng = np.random.default_rng(ctx.problem_seed(pid))
        ys = P["y"] or random_probes(rng, ctx.probes)
        worst = 0.0
        for y in ys:
            x = solve(D, f, g, y)
            worst = max(worst, sc.norm(apply(T, x) - y) / max(1.0, sc.norm(y)))
        res.data["solveResidual"] = worst
        res.check("solveResidual", worst <= SOLVE_TOL, value=worst)
        if standing:
            for j in P["j"]:
                ok, y = basis_range_criterion(D, f, g, j)
                gap = sc.norm(apply(T, y) - sc.basis(j)) if ok else math.inf
                agree = sc.norm(y - solve(D, f, g, sc.basis(j))) if ok else math.inf
                res.check(f"basisPreimage[{j}]", ok and gap <= IDENTITY_TOL and agree <= IDENTITY_TOL,
                          residual=_jsonable(gap), solveAgreement=_jsonable(agree))
    if "oracle" in ctx.stages and diag is not None:
        li = diag.verdict is DiagonalVerdict.INVERTIBLE
        rep = verdict_cross_check(T, li, ctx.dims)
        res.data["oracle"] = rep
        res.check("oracleAgrees", rep["passed"])


def run_analytic(prob, ctx, res):
    P = prob["_parsed"]
    p = P["p"]
    V = ShiftPow(p)
    seed = ctx.problem_seed(prob["id"])
    if "m" in P:
        fam = ShiftedFamily(P["f0"], p)
        f, g = fam[P["m"]], fam[P["n"]]
        S = vm_vn_operator(P["m"], P["n"], P["f0"], p)
    else:
        f, g = P["f"], P["g"]
        S = perturbed(V, f, g)
    expect = P["expect"]
    if "verdict" in ctx.stages:
        diag = verdict(V, f, g, ctx.tol)
        res.data.update(verdict=diag.verdict.value, c=diag.c)
        _expect_number(res, expect, "c", diag.c, prob["id"])
        _expect_equal(res, expect, "verdict", diag.verdict.value)
    if "probe" not in ctx.stages:
        return
    if "m" in P:
        cls, c = classify_vm_vn(P["m"], P["n"], P["f0"], p)
        res.data["classification"] = cls.value
        _expect_equal(res, expect, "classification", cls.value)
    kres = kernel_condition_residual(V, f, g)
    kc = kres <= IDENTITY_TOL
    res.data["kernelCondition"] = kc
    res.data["kernelConditionResidual"] = kres
    _expect_equal(res, expect, "kernelCondition", kc)
    if kc:
        sq = square_identity_residual(V, f, g, ctx.probes, seed)
        res.check("squareEqualsVS", sq <= IDENTITY_TOL, value=sq)
    rep = analyticity_probe(S, p, P["nval"], P["depth"], min(ctx.probes, 10), seed)
    res.data["probe"] = rep.to_dict()
    res.data["probeClean"] = rep.clean
    _expect_equal(res, expect, "probeClean", rep.clean)


def run_power_formula(prob, ctx, res):
    P = prob["_parsed"]
    p, m, n, k, f0 = P["p"], P["m"], P["n"], P["k"], P["f0"]
    formula = perturbed_power(m, n, f0, k, p)
    iterated = power(vm_vn_operator(m, n, f0, p), k + 1)
    rng = np.random.default_rng(ctx.problem_seed(prob["id"]))
    worst = 0.0
    for h in [sc.basis(i) for i in range(4)] + random_probes(rng, ctx.probes):
        worst = max(worst, sc.norm(apply(formula, h) - apply(iterated, h)) / sc.norm(h))
    res.data["formulaResidual"] = worst
    res.check("powerFormula", worst <= IDENTITY_TOL, value=worst)
    cls, c = classify_vm_vn(m, n, f0, p)
    res.data["classification"] = cls.value
    res.data["c"] = c
    _expect_equal(res, P["expect"], "classification", cls.value)


HANDLERS = {
    "isometry_perturbation": run_isometry,
    "diagonal_perturbation": run_diagonal,
    "t_alpha_beta": run_t_alpha_beta,
    "analytic_probe": run_analytic,
    "power_formula": run_power_formula,
}
APPLICABLE = {
    "isometry_perturbation": {"verdict", "left_inverse", "oracle"},
    "diagonal_perturbation": {"verdict", "solve", "oracle"},
    "t_alpha_beta": {"verdict", "left_inverse", "oracle"},
    "analytic_probe": {"verdict", "probe"},
    "power_formula": {"probe"},
}


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "nan"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating,)):
        return _jsonable(float(x))
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def run_problem(prob, ctx, timing=True) -> dict:
    out = {"id": prob["id"], "kind": prob["kind"]}
    if isinstance(prob.get("note"), str):
        out["note"] = prob["note"]
    if not (APPLICABLE[prob["kind"]] & ctx.stages):
        out["status"] = "skipped"
        return out
    res = Result()
    t0 = time.perf_counter()
    try:
        HANDLERS[prob["kind"]](prob, ctx, res)
        out.update(res.data)
        out["checks"] = res.checks
        out["status"] = "pass" if all(c["passed"] for c in res.checks) else "fail"
    except (RankOneError, ArithmeticError, ValueError) as exc:
        out.update(res.data)
        out["checks"] = res.checks
        out["status"] = "error"
        out["error"] = {"type": type(exc).__name__, "message": str(exc)}
    if timing:
        out["timing"] = time.perf_counter() - t0
    return _jsonable(out)


def run(spec: dict, args, stages) -> dict:
    ctx = Context(args, stages)
    problems = sorted(spec["problems"], key=lambda p: p["id"])
    if args.problem:
        problems = [p for p in problems if p["id"] in args.problem]
        missing = set(args.problem) - {p["id"] for p in problems}
        if missing:
            raise ValidationError(f"--problem: unknown id(s) {sorted(missing)}")
    results = [run_problem(p, ctx, timing=not args.no_timing) for p in problems]
    return {
        "toolVersion": __version__,
        "seed": args.seed,
        "tolerances": {
            "c": args.tolerance,
            "r": 1e-12,
            "identity": IDENTITY_TOL,
            "leftInverseResidual": RESIDUAL_TOL,
            "solveResidual": SOLVE_TOL,
        },
        "oracleDims": list(ctx.dims),
        "probes": args.probes,
        "problems": results,
        "passed": all(r["status"] in ("pass", "skipped") for r in results),
    }


def bundled_corpus() -> str:
    return resources.files("rankone").joinpath("data/regression_corpus.json").read_text()


def format_text(report: dict) -> str:
    lines = []
    for r in report["problems"]:
        val = ""
        if "c" in r:
            val = f"c={r['c']:.6g}"
        elif r.get("r") is not None:
            re_, im_ = r["r"]
            val = f"r={complex(re_, im_):.6g}"
        failed = [c["name"] for c in r.get("checks", []) if not c["passed"]]
        extra = f" failed={','.join(failed)}" if failed else ""
        if r.get("error"):
            extra += f" error={r['error']['type']}: {r['error']['message']}"
        lines.append(f"{r['status'].upper():7s} {r['id']:32s} {r['kind']:22s} {r.get('verdict', '-'):18s} {val}{extra}")
    lines.append("ALL PASS" if report["passed"] else "FAILURES")
    return "\n".join(lines)


def _dims(text: str):
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not dims or any(d <= 0 for d in dims):
        raise argparse.ArgumentTypeError("dimensions must be positive")
    return sorted(dims)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=1e-10, help="zero threshold for c (default 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="probe RNG seed (default 0)")
    common.add_argument("--oracle-dims", type=_dims, default=[64, 128, 256], help="truncation sizes, e.g. 64,128,256")
    common.add_argument("--probes", type=int, default=20, help="random probes per check (default 20)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--problem", action="append", help="only run this problem id (repeatable)")
    common.add_argument("--no-timing", action="store_true", help="omit timings for byte-stable output")
    parser = argparse.ArgumentParser(prog="rankone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("spec", nargs="?" if name == "corpus" else None, help="JSON problem file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.spec is None:
            text, source = bundled_corpus(), "regression_corpus.json"
        else:
            with open(args.spec) as fh:
                text, source = fh.read(), args.spec
        spec = load_spec(text, source)
        report = run(spec, args, COMMANDS[args.command])
    except (ParseError, ValidationError, OSError) as exc:
        print(f"rankone: error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_text(report))
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
