"""Command-line front end.

Every data-emitting verb accepts ``--format json|csv|text``.  JSON carries
rationals as ``"p/q"`` strings and complex numbers as ``[re, im]``; CSV adds a
12-significant-digit decimal column next to every rational.
Exit codes: 0 ok, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import acceptance, complete_sums, levels, pairs, quadratic, search, sieve, trace
from .ntheory import factorize


class Status(Enum):
    ok = 0
    fail = 1
    usage_error = 2


@dataclass
class CommandResult:
    status: Status
    payload: Any
    rows: list[dict] | None = None
    text: str | None = None
    messages: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return self.status.value


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Serialisation
# --------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, Fraction):
        return pairs.format_fraction(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, pairs.ExponentTriple):
        return x.to_json()
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def _csv_cells(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, Fraction):
            out[k] = pairs.format_fraction(v)
            out[f"{k}_decimal"] = f"{float(v):.12g}"
        elif isinstance(v, (complex, np.complexfloating)):
            out[f"{k}_re"] = f"{v.real:.12g}"
            out[f"{k}_im"] = f"{v.imag:.12g}"
        elif isinstance(v, float):
            out[k] = f"{v:.12g}"
        else:
            out[k] = v
    return out


def render(result: CommandResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(jsonable(result.payload), indent=2) + "\n"
    if fmt == "csv":
        rows = result.rows if result.rows is not None else [_flatten(result.payload)]
        cells = [_csv_cells(r) for r in rows]
        buf = io.StringIO()
        if cells:
            w = csv.DictWriter(buf, fieldnames=list(cells[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(cells)
        return buf.getvalue()
    if result.text is not None:
        return result.text if result.text.endswith("\n") else result.text + "\n"
    return "".join(f"{k}: {v}\n" for k, v in _flatten(jsonable(result.payload)).items())


def _flatten(doc, prefix: str = "") -> dict:
    if not isinstance(doc, dict):
        return {prefix or "value": doc}
    out = {}
    for k, v in doc.items():
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, dict):
            out.update(_flatten(v, key))
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], dict):
            out[key] = json.dumps(jsonable(v))
        else:
            out[key] = v
    return out


# --------------------------------------------------------------------------
# Argument helpers
# --------------------------------------------------------------------------

def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _triple_row(t: pairs.ExponentTriple) -> dict:
    return {"kappa": t.kappa, "lambda": t.lam, "nu": t.nu}


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_pair_word(args) -> CommandResult:
    word = pairs.ProcessWord.parse(args.word)
    t = pairs.apply_word(word)
    doc = {
        "word": word.compact() or "",
        "canonical": word.canonical().compact(),
        "kappa": t.kappa,
        "lambda": t.lam,
        "nu": t.nu,
        "divisor_level": search.divisor_level(t),
        "subconvex_delta": search.subconvex_delta(t),
    }
    return CommandResult(Status.ok, doc, [doc])


def cmd_pair_table(args) -> CommandResult:
    rows = []
    for w in pairs.table1_words():
        t = pairs.apply_word(w)
        rows.append({"word": w, **_triple_row(t)})
    return CommandResult(Status.ok, {"pairs": rows}, rows)


def cmd_pair_optimize(args) -> CommandResult:
    obj = search.Objective.from_name(args.objective)
    rep = search.optimize_word(obj, args.depth, args.time_cap, seed=args.seed)
    doc = rep.to_json()
    doc["best_value"] = rep.best_value
    row = {"objective": obj.value, "best_word": rep.best_word.compact(), "best_value": rep.best_value,
           "nodes_expanded": rep.nodes_expanded, "timed_out": rep.timed_out}
    return CommandResult(Status.ok, doc, [row])


def cmd_level(args) -> CommandResult:
    pair = pairs.apply_word(args.word)
    variant = levels.Variant(args.variant)
    family = None if args.family == "none" else levels.Family(args.family)
    res = levels.level_max_gamma(levels.LevelProblem(args.theta, pair, variant, family))
    doc = {"theta": args.theta, "word": args.word, "variant": variant.value,
           "family": args.family, **res.to_json()}
    if family is not None:
        doc["validity_range"] = levels.validity_range(pair, variant, family)
    if variant is levels.Variant.AsStated:
        doc["note"] = "as-stated constraint list keeps the standalone alpha term; the default is the table2 variant"
    row = {"theta": args.theta, "gamma": res.gamma, "alpha": res.alpha, "beta": res.beta}
    return CommandResult(Status.ok if res.feasible else Status.fail, doc, [row])


def cmd_gamma_curve(args) -> CommandResult:
    rows = [{"theta": t, "gamma": g} for t, g in levels.gamma_curve(args.start, args.stop, args.step)]
    return CommandResult(Status.ok, {"curve": rows}, rows)


def cmd_bt(args) -> CommandResult:
    c = sieve.bt_upper_constant(args.theta)
    doc = {"theta": args.theta, "gamma": levels.gamma_of_theta(args.theta), "constant": c}
    return CommandResult(Status.ok, doc, [doc])


def cmd_csum(args) -> CommandResult:
    lam = complete_sums.RationalFunctionZ(args.f1, args.f2)
    c = args.modulus
    if c < 1:
        raise UsageError("modulus must be >= 1")
    if args.method == "direct":
        sv = complete_sums.sigma_direct(lam, c)
    elif args.method == "crt":
        sv = complete_sums.sigma_crt(lam, factorize(c), c)
    else:
        f = factorize(c)
        if len(f.pairs) != 1:
            raise UsageError("stationary method needs a prime-power modulus")
        p, beta = f.pairs[0]
        if p == 2 or beta < 2:
            d = complete_sums.sigma_direct(lam, c)
            sv = complete_sums.SumValue(d.value, c, d.excluded_count, ("fallback_direct",))
        else:
            sv = complete_sums.sigma_prime_power(lam, p, beta)
    doc = {"value": sv.value, "excluded": sv.excluded_count, "modulus": c, "method": args.method}
    if sv.flags:
        doc["flags"] = list(sv.flags)
    return CommandResult(Status.ok, doc, [{"modulus": c, "value": sv.value, "excluded": sv.excluded_count}])


def _parse_spec(text: str):
    try:
        return trace.parse_trace_spec(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad trace spec: {exc}") from None


def cmd_trace_eval(args) -> CommandResult:
    spec = _parse_spec(args.spec)
    if isinstance(spec, trace.CompositeTraceSpec):
        v = trace.eval_composite(spec, args.x)
        doc = {"q": spec.q, "n": args.x, "value": v}
    else:
        if args.p is None:
            raise UsageError("--p is required for a single-prime spec")
        v = trace.eval_trace(spec, args.p, args.x)
        doc = {"p": args.p, "x": args.x, "value": v}
    return CommandResult(Status.ok, doc, [doc])


def cmd_trace_line(args) -> CommandResult:
    spec = _parse_spec(args.spec)
    if isinstance(spec, trace.CompositeTraceSpec):
        raise UsageError("line needs a single-prime spec")
    vals = spec.values(args.p)
    rows = [{"x": x, "value": complex(v)} for x, v in enumerate(vals)]
    if args.transform:
        ft = trace.fourier_transform_p(vals, args.p)
        for r, v in zip(rows, ft):
            r["ft"] = complex(v)
    return CommandResult(Status.ok, {"p": args.p, "values": rows}, rows)


def cmd_trace_sum(args) -> CommandResult:
    spec = _parse_spec(args.spec)
    if not isinstance(spec, trace.CompositeTraceSpec):
        raise UsageError("sum needs a composite spec (q=p1*p2*...;p1=...)")
    s = trace.incomplete_sum(spec, args.M, args.N, args.workers)
    doc = {"q": spec.q, "M": args.M, "N": args.N, "value": s, "abs": abs(s)}
    return CommandResult(Status.ok, doc, [doc])


def cmd_trace_pair_check(args) -> CommandResult:
    spec = _parse_spec(args.spec)
    if not isinstance(spec, trace.CompositeTraceSpec):
        raise UsageError("pair-check needs a composite spec")
    t = pairs.apply_word(args.word)
    rep = trace.empirical_pair_check(spec, t, args.N, args.shifts, args.seed, args.workers)
    rows = [{"N": n, "max_ratio": r, "worst_M": m} for n, r, m in rep.rows]
    return CommandResult(Status.ok, rep.to_json(), rows)


def cmd_quad_roots(args) -> CommandResult:
    rs = quadratic.roots_minus_one(args.ell)
    return CommandResult(Status.ok, {"ell": args.ell, "rho": rs.rho, "roots": list(rs.roots)},
                         [{"ell": args.ell, "root": a} for a in rs.roots])


def cmd_quad_reps(args) -> CommandResult:
    reps = quadratic.two_squares(args.ell)
    rows = [{"r": x.r, "s": x.s} for x in reps]
    return CommandResult(Status.ok, {"ell": args.ell, "representations": rows}, rows)


def cmd_quad_weyl(args) -> CommandResult:
    v = quadratic.weyl_rho(args.n, args.ell)
    doc = {"n": args.n, "ell": args.ell, "value": v, "rho": quadratic.roots_minus_one(args.ell).rho}
    return CommandResult(Status.ok, doc, [doc])


def cmd_quad_verify(args) -> CommandResult:
    checked, bad = 0, []
    for ell in range(2, args.max + 1):
        if not quadratic.roots_minus_one(ell).rho:
            continue
        try:
            quadratic.correspondence(ell)
        except AssertionError as exc:
            bad.append({"ell": ell, "error": str(exc)})
        checked += 1
    doc = {"max": args.max, "checked": checked, "failures": bad}
    return CommandResult(Status.fail if bad else Status.ok, doc, [{"max": args.max, "checked": checked, "failures": len(bad)}])


def cmd_sieve_value(args) -> CommandResult:
    table = sieve.build_table(max(args.smax, min(20.0, max(3.0, float(args.s) + 1))), args.h)
    fn = table.F if args.which == "F" else table.f
    doc = {"function": args.which, "s": args.s, "value": fn(args.s)}
    return CommandResult(Status.ok, doc, [doc])


def cmd_sieve_table(args) -> CommandResult:
    table = sieve.build_table(args.smax, args.h)
    stride = max(1, round(args.every / args.h)) if args.every else 1
    rows = [{"s": s, "F": F, "f": f} for s, F, f in table.rows(stride)]
    return CommandResult(Status.ok, {"smax": args.smax, "h": args.h, "rows": rows}, rows)


def cmd_verify(args) -> CommandResult:
    if args.suite == "all":
        nums = sorted(acceptance.CRITERIA)
    else:
        try:
            nums = sorted({int(x) for x in args.suite.split(",")})
        except ValueError:
            raise UsageError("--suite takes 'all' or comma-separated criterion numbers") from None
        unknown = [n for n in nums if n not in acceptance.CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    results = acceptance.run_all(nums, args.seed, args.workers)
    ok = all(r.passed for r in results)
    doc = {"seed": args.seed, "passed": ok, "criteria": [r.to_json(args.timings) for r in results]}
    rows = [{"criterion": r.number, "name": r.name, "passed": r.passed} for r in results]
    text = "".join(r.line() + "\n" if args.timings else f"[{'PASS' if r.passed else 'FAIL'}] {r.number:2d} {r.name}\n"
                   for r in results)
    text += f"{sum(r.passed for r in results)}/{len(results)} criteria passed\n"
    return CommandResult(Status.ok if ok else Status.fail, doc, rows, text)


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_help()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", "--out", dest="format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)

    p = _Parser(prog="artifact", description="Exponent-pair calculus and exponential-sum verification toolkit.")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)
    sub.required = True

    pair = sub.add_parser("pair", help="exponent pairs from process words")
    psub = pair.add_subparsers(dest="action", parser_class=_Parser)
    psub.required = True
    w = psub.add_parser("word", parents=[common], help="apply a word such as BA3BA2 to the seed")
    w.add_argument("word")
    w.set_defaults(func=cmd_pair_word)
    t = psub.add_parser("table", parents=[common], help="the eight tabulated words")
    t.set_defaults(func=cmd_pair_table)
    o = psub.add_parser("optimize", parents=[common], help="branch-and-bound over words")
    o.add_argument("--objective", choices=[x.value for x in search.Objective], default="rankin")
    o.add_argument("--depth", type=int, default=30)
    o.add_argument("--time-cap", type=float, default=60.0)
    o.set_defaults(func=cmd_pair_optimize)

    lv = sub.add_parser("level", parents=[common], help="sieve level LP at one theta")
    lv.add_argument("--theta", type=_frac, required=True)
    lv.add_argument("--word", default="A")
    lv.add_argument("--variant", choices=[v.value for v in levels.Variant], default="table2")
    lv.add_argument("--family", choices=["Ak", "BAk", "none"], default="Ak")
    lv.set_defaults(func=cmd_level)

    gc = sub.add_parser("gamma-curve", parents=[common], help="gamma(theta) samples")
    gc.add_argument("--from", dest="start", type=_frac, default=Fraction(1, 2))
    gc.add_argument("--to", dest="stop", type=_frac, default=Fraction(16, 17))
    gc.add_argument("--step", type=_frac, default=Fraction(1, 100))
    gc.set_defaults(func=cmd_gamma_curve)

    bt = sub.add_parser("bt", parents=[common], help="Brun-Titchmarsh constant 2/gamma(theta)")
    bt.add_argument("--theta", type=_frac, required=True)
    bt.set_defaults(func=cmd_bt)

    cs_ = sub.add_parser("csum", parents=[common], help="complete sum of e(f1/f2 / c)")
    cs_.add_argument("--f1", type=_ints, required=True)
    cs_.add_argument("--f2", type=_ints, default=(1,))
    cs_.add_argument("--modulus", type=int, required=True)
    cs_.add_argument("--method", choices=("direct", "crt", "stationary"), default="direct")
    cs_.set_defaults(func=cmd_csum)

    tr = sub.add_parser("trace", help="trace functions and incomplete sums")
    tsub = tr.add_subparsers(dest="action", parser_class=_Parser)
    tsub.required = True
    te = tsub.add_parser("eval", parents=[common])
    te.add_argument("--spec", required=True)
    te.add_argument("--p", type=int)
    te.add_argument("--x", type=int, required=True)
    te.set_defaults(func=cmd_trace_eval)
    tl = tsub.add_parser("line", parents=[common])
    tl.add_argument("--spec", required=True)
    tl.add_argument("--p", type=int, required=True)
    tl.add_argument("--transform", action="store_true", help="add the normalised Fourier transform")
    tl.set_defaults(func=cmd_trace_line)
    ts = tsub.add_parser("sum", parents=[common])
    ts.add_argument("--spec", required=True)
    ts.add_argument("--M", type=int, default=0)
    ts.add_argument("--N", type=int, required=True)
    ts.add_argument("--workers", type=int)
    ts.set_defaults(func=cmd_trace_sum)
    tp = tsub.add_parser("pair-check", parents=[common])
    tp.add_argument("--spec", required=True)
    tp.add_argument("--word", default="A")
    tp.add_argument("--N", type=_ints, required=True)
    tp.add_argument("--shifts", type=int, default=32)
    tp.add_argument("--workers", type=int)
    tp.set_defaults(func=cmd_trace_pair_check)

    qd = sub.add_parser("quad", help="a^2 + 1 = 0 mod l and sums of two squares")
    qsub = qd.add_subparsers(dest="action", parser_class=_Parser)
    qsub.required = True
    for name, fn in (("roots", cmd_quad_roots), ("reps", cmd_quad_reps)):
        q = qsub.add_parser(name, parents=[common])
        q.add_argument("--ell", type=int, required=True)
        q.set_defaults(func=fn)
    qw = qsub.add_parser("weyl", parents=[common])
    qw.add_argument("--n", type=int, required=True)
    qw.add_argument("--ell", type=int, required=True)
    qw.set_defaults(func=cmd_quad_weyl)
    qv = qsub.add_parser("verify", parents=[common])
    qv.add_argument("--max", type=int, default=10**4)
    qv.set_defaults(func=cmd_quad_verify)

    sv = sub.add_parser("sieve", help="linear sieve functions")
    ssub = sv.add_subparsers(dest="action", parser_class=_Parser)
    ssub.required = True
    for name in ("F", "f"):
        s = ssub.add_parser(name, parents=[common])
        s.add_argument("--s", type=float, required=True)
        s.add_argument("--smax", type=float, default=12.0)
        s.add_argument("--h", type=float, default=1 / 1024)
        s.set_defaults(func=cmd_sieve_value, which=name)
    st = ssub.add_parser("table", parents=[common])
    st.add_argument("--smax", type=float, default=12.0)
    st.add_argument("--h", type=float, default=1 / 1024)
    st.add_argument("--every", type=float, default=1 / 64, help="spacing of emitted rows (0 = every grid point)")
    st.set_defaults(func=cmd_sieve_table)

    vf = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    vf.add_argument("--suite", default="all")
    vf.add_argument("--workers", type=int, help="parallel suites (default: VDC_THREADS or 1)")
    vf.add_argument("--timings", action="store_true", help="include wall-clock times (not byte-stable)")
    vf.set_defaults(func=cmd_verify)
    return p


def dispatch(argv: Sequence[str] | None = None) -> tuple[CommandResult, str]:
    parser = build_parser()
    fmt = "json"
    try:
        args = parser.parse_args(argv)
        fmt = args.format or ("text" if args.verb == "verify" else "json")
        result = args.func(args)
    except UsageError as exc:
        return CommandResult(Status.usage_error, {"error": str(exc)}, messages=[str(exc)]), fmt
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        msg = f"error: {exc}"
        return CommandResult(Status.usage_error, {"error": str(exc)}, messages=[msg]), fmt
    return result, fmt


def main(argv: Sequence[str] | None = None) -> int:
    result, fmt = dispatch(argv)
    if result.status is Status.usage_error:
        for m in result.messages:
            print(m, file=sys.stderr)
        return result.exit_code
    sys.stdout.write(render(result, fmt))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
