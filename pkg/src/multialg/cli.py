"""Command-line front end.

Every command returns a :class:`CommandResult` whose payload is plain JSON
data; ``--format json`` prints it with sorted keys so runs are byte-for-byte
reproducible.  Exit status: 0 on success, 1 when a check fails (axiom
profile, closedness, model checking, validation), 2 on usage or input
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from multialg import bitset
from multialg.axioms import PROFILES, characteristic, check_axioms
from multialg.core import format_formula, is_quantifier_free, satisfies, valid_in, valuations
from multialg.parser import ParseError, SourceFile, formula_of, parse, parse_formula, Binding
from multialg.polynomials import (
    PolySyntaxError,
    euclid_divide,
    evaluate,
    format_poly,
    is_algebraically_closed_upto,
    parse_poly,
    roots,
    verify_division,
)
from multialg.qe import ClauseLimitExceeded, axioms_tilde, eliminate
from multialg.structures import FiniteMultiring, FormatError, StructureError, make_builtin, serialize


class CliError(Exception):
    pass


@dataclass
class CommandResult:
    status: int
    text: str
    payload: dict = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload, sort_keys=True, indent=2)
        return self.text


# ---------------------------------------------------------------------------
# Name resolution
# ---------------------------------------------------------------------------


def fixture_names() -> list[str]:
    root = resources.files("multialg") / "fixtures"
    return sorted(p.name[: -len(".txt")] for p in root.iterdir() if p.name.endswith(".txt"))


def load_fixture(name: str) -> FiniteMultiring:
    text = (resources.files("multialg") / "fixtures" / f"{name}.txt").read_text()
    src = parse(text)
    return next(iter(src.structures.values()))


def resolve_structure(name: str, src: SourceFile) -> FiniteMultiring:
    """A structure defined in ``--file``, a built-in name (``K``, ``Q2``,
    ``H3``, ``X2``, ``Z5`` and long forms), or a path to a structure file."""
    if name in src.structures:
        return src.structures[name]
    try:
        return make_builtin(name)
    except (StructureError, ValueError, KeyError):
        pass
    if os.path.isfile(name):
        with open(name) as fh:
            found = parse(fh.read()).structures
        if not found:
            raise CliError(f"{name}: no structure defined")
        return next(iter(found.values()))
    raise CliError(f"unknown structure {name!r}")


def _poly_arg(R: FiniteMultiring, text: str, src: SourceFile):
    if text in src.polys:
        text = src.polys[text].text
    try:
        return parse_poly(R, text)
    except PolySyntaxError as exc:
        raise CliError(str(exc)) from None


def _element_arg(R: FiniteMultiring, text: str) -> int:
    try:
        return R.element(text)
    except KeyError as exc:
        raise CliError(exc.args[0]) from None


def _formula_arg(R: FiniteMultiring, text: str, src: SourceFile):
    binding = src.formulas.get(text) or Binding("<arg>", text, 1, 1)
    return formula_of(binding, R.names)


def _show_valuation(R: FiniteMultiring, v, names) -> dict[str, str]:
    return {names.get(i, f"x{i}"): R.names[a] for i, a in sorted(v.items())}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_check(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    if args.profile not in PROFILES:
        raise CliError(f"unknown profile {args.profile!r}; choose from {', '.join(sorted(PROFILES))}")
    report = check_axioms(R, args.profile)
    payload = {"command": "check", **report.to_dict()}
    return CommandResult(0 if report.passed else 1, str(report), payload)


def cmd_tables(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    payload = {
        "command": "tables",
        "structure": R.name,
        "names": list(R.names),
        "zero": R.names[R.zero],
        "one": R.names[R.one],
        "neg": {R.names[a]: R.names[R.neg[a]] for a in R.elements},
        "add": [[R.subset_names(R.add[a][b]) for b in R.elements] for a in R.elements],
        "mul": [[R.subset_names(R.mul[a][b]) for b in R.elements] for a in R.elements],
        "strict_mul": R.strict_mul,
    }
    return CommandResult(0, serialize(R).rstrip("\n"), payload)


def cmd_char(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    n = characteristic(R)
    return CommandResult(0, str(n), {"command": "char", "structure": R.name, "characteristic": n})


def cmd_eval(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    p = _poly_arg(R, args.poly, src)
    a = _element_arg(R, args.element)
    value = evaluate(R, p, a)
    payload = {
        "command": "eval",
        "structure": R.name,
        "poly": format_poly(R, p),
        "element": R.names[a],
        "value": R.subset_names(value),
        "is_root": bitset.contains(value, R.zero),
    }
    return CommandResult(0, R.show(value), payload)


def cmd_roots(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    p = _poly_arg(R, args.poly, src)
    rs = [R.names[a] for a in roots(R, p)]
    payload = {"command": "roots", "structure": R.name, "poly": format_poly(R, p), "roots": rs}
    return CommandResult(0, "{" + ",".join(rs) + "}", payload)


def cmd_divide(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    a, b = _poly_arg(R, args.a, src), _poly_arg(R, args.b, src)
    if b.is_zero:
        raise CliError("division by the zero polynomial")
    w = euclid_divide(R, a, b)
    ok = verify_division(R, a, b, w)
    payload = {
        "command": "divide",
        "structure": R.name,
        "a": format_poly(R, a),
        "b": format_poly(R, b),
        "q": format_poly(R, w.q),
        "r": format_poly(R, w.r),
        "method": w.method,
        "verified": ok,
        "certificate": [
            {"index": i, "coefficient": R.names[c], "cell": R.subset_names(cell)} for i, c, cell in w.certificate
        ],
    }
    text = f"q = {format_poly(R, w.q)}\nr = {format_poly(R, w.r)}\nverified: {ok}"
    return CommandResult(0 if ok else 1, text, payload)


def cmd_closed(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    if args.dmax < 1:
        raise CliError("dmax must be at least 1")
    res = is_algebraically_closed_upto(R, args.dmax)
    witness = None if res.witness is None else format_poly(R, res.witness)
    payload = {"command": "closed", "structure": R.name, "dmax": args.dmax, "closed": res.closed, "witness": witness}
    text = "closed" if res.closed else f"not closed: {witness} has no root"
    return CommandResult(0 if res.closed else 1, text, payload)


def cmd_modelcheck(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    pf = _formula_arg(R, args.formula, src)
    holds, v = valid_in(R, pf.formula)
    payload = {
        "command": "modelcheck",
        "structure": R.name,
        "formula": format_formula(pf.formula, pf.names),
        "holds": holds,
        "counterexample": None if v is None else _show_valuation(R, v, pf.names),
    }
    text = "true" if holds else f"false at {payload['counterexample']}"
    return CommandResult(0 if holds else 1, text, payload)


def _validate(R, phi, psi, seed: int, samples: int) -> dict:
    variables = sorted(phi.free_vars() | psi.free_vars())
    total = R.size ** len(variables)
    if total <= samples:
        vals = list(valuations(R.size, variables))
        mode = "exhaustive"
    else:
        rng = random.Random(seed)
        vals = [{x: rng.randrange(R.size) for x in variables} for _ in range(samples)]
        mode = "sampled"
    for v in vals:
        if satisfies(R, phi, v) != satisfies(R, psi, v):
            return {"mode": mode, "checked": len(vals), "agrees": False, "witness": v}
    return {"mode": mode, "checked": len(vals), "agrees": True, "witness": None}


def cmd_qe(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    pf = _formula_arg(R, args.formula, src)
    try:
        res = eliminate(pf.formula, args.max_clauses)
    except ClauseLimitExceeded as exc:
        raise CliError(str(exc)) from None
    out = format_formula(res.formula, pf.names)
    payload = {
        "command": "qe",
        "structure": R.name,
        "input": format_formula(pf.formula, pf.names),
        "output": out,
        "quantifier_free": is_quantifier_free(res.formula),
        "provisos": list(res.provisos),
        "trace": res.trace.to_list(),
    }
    status = 0
    text = out
    if args.validate:
        check = _validate(R, pf.formula, res.formula, args.seed, args.samples)
        if check["witness"] is not None:
            check["witness"] = _show_valuation(R, check["witness"], pf.names)
        payload["validation"] = check
        text += f"\nvalidation on {R.name} ({check['mode']}, {check['checked']} valuations): "
        text += "agrees" if check["agrees"] else f"differs at {check['witness']}"
        status = 0 if check["agrees"] else 1
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump(payload["trace"], fh, sort_keys=True, indent=2)
            fh.write("\n")
    return CommandResult(status, text, payload)


def cmd_axioms(args, src) -> CommandResult:
    R = resolve_structure(args.structure, src)
    if args.n < 1:
        raise CliError("n must be at least 1")
    rows = []
    for name, phi in axioms_tilde(args.n, args.n):
        rows.append({"name": name, "formula": format_formula(phi), "holds": satisfies(R, phi)})
    payload = {"command": "axioms", "structure": R.name, "n": args.n, "axioms": rows}
    text = "\n".join(f"{r['name']:6s} {'true ' if r['holds'] else 'false'} {r['formula']}" for r in rows)
    return CommandResult(0, text, payload)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--file", help="source file with structure, poly and formula definitions")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled validations")

    ap = argparse.ArgumentParser(prog="multialg", description="Finite multialgebras and quantifier elimination.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check an axiom profile")
    p.add_argument("structure")
    p.add_argument("profile", help=", ".join(sorted(PROFILES)))
    p.set_defaults(run=cmd_check)

    for name, fn, help_ in (("tables", cmd_tables, "print operation tables"), ("char", cmd_char, "characteristic")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("structure")
        p.set_defaults(run=fn)

    p = sub.add_parser("eval", parents=[common], help="evaluate a polynomial at an element")
    p.add_argument("structure")
    p.add_argument("poly")
    p.add_argument("element")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("roots", parents=[common], help="roots of a polynomial")
    p.add_argument("structure")
    p.add_argument("poly")
    p.set_defaults(run=cmd_roots)

    p = sub.add_parser("divide", parents=[common], help="Euclidean division with a certificate")
    p.add_argument("structure")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(run=cmd_divide)

    p = sub.add_parser("closed", parents=[common], help="check algebraic closedness up to a degree")
    p.add_argument("structure")
    p.add_argument("dmax", type=int)
    p.set_defaults(run=cmd_closed)

    p = sub.add_parser("modelcheck", parents=[common], help="check a formula at every valuation")
    p.add_argument("structure")
    p.add_argument("formula")
    p.set_defaults(run=cmd_modelcheck)

    p = sub.add_parser("qe", parents=[common], help="eliminate quantifiers")
    p.add_argument("structure")
    p.add_argument("formula")
    p.add_argument("--max-clauses", type=int, default=4096)
    p.add_argument("--trace", help="write the elimination trace as JSON to this path")
    p.add_argument("--validate", action="store_true", help="compare input and output on the structure")
    p.add_argument("--samples", type=int, default=512, help="valuations to sample when exhaustion is too large")
    p.set_defaults(run=cmd_qe)

    p = sub.add_parser("axioms", parents=[common], help="model-check the root and infinitude axioms")
    p.add_argument("structure")
    p.add_argument("n", type=int)
    p.set_defaults(run=cmd_axioms)
    return ap


def run(argv: Sequence[str]) -> tuple[CommandResult, str]:
    """Parse ``argv`` and run the command; returns the result and the
    requested output format."""
    args = build_parser().parse_args(list(argv))
    try:
        src = SourceFile()
        if args.file:
            with open(args.file) as fh:
                src = parse(fh.read())
        return args.run(args, src), args.format
    except (CliError, ParseError, FormatError, StructureError, OSError, ZeroDivisionError) as exc:
        return CommandResult(2, f"error: {exc}", {"command": args.command, "error": str(exc)}), args.format


def main(argv: Sequence[str] | None = None) -> int:
    result, fmt = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if result.status == 2 and fmt == "text" else sys.stdout
    print(result.render(fmt), file=stream)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
