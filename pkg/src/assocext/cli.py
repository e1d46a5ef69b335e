"""Command line front end.

A problem file is line oriented; ``#`` starts a comment::

    even:                 # even basis names (may be empty)
    odd: f1 f2
    M: f2                 # optional split
    W: f1
    grid: -1 0 1
    command: classify-extensions
    cochain delta = [f1 f1 -> f1]
    cochain mu = 0
    aux beta = 2 [f1 -> f2]   # parity not checked
    operands: delta mu
    piece: 0 2 M
    mode: iterated

Structure cochains (``cochain``) must be odd; ``aux`` ones may have any
parity.  Coefficients are integers or p/q.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .coalgebra import (
    M,
    W,
    BasisCoderivation,
    Bidegree,
    Cochain,
    GradedSpace,
    SplitSpace,
    apply_group_element,
    bracket,
)
from . import cohomology as coh
from . import deformations as dfm
from . import extensions as ext
from .linalg import Matrix, as_scalar

COMMANDS = (
    "bracket",
    "square",
    "validate",
    "cohomology",
    "classify-extensions",
    "classify-infinitesimal",
    "bimodule-classes",
    "deform-extension",
    "deform-rep-a",
    "deform-rep-b",
    "equivalence",
)

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_PRECONDITION, EXIT_UNPROVEN = 0, 1, 2, 3, 4


class ParseError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass
class Problem:
    space: GradedSpace
    split: Optional[SplitSpace]
    cochains: dict
    grid: tuple = ()
    command: Optional[str] = None
    operands: tuple = ()
    piece: Optional[Bidegree] = None
    mode: Optional[str] = None
    aux: set = field(default_factory=set)


_TERM = re.compile(r"([+-]?)\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*\[([^\]]*)\]")


def parse_cochain(text: str, space: GradedSpace, line: Optional[int] = None) -> Cochain:
    """Parse ``2 [a b -> c] - 1/3 [b -> c]`` (or ``0``)."""
    text = text.strip()
    if text == "0":
        return Cochain.zero(space)
    terms = {}
    pos = 0
    for m in _TERM.finditer(text):
        if text[pos : m.start()].strip():
            raise ParseError(f"cannot parse {text[pos:m.start()].strip()!r}", line)
        if pos > 0 and not m.group(1):
            raise ParseError("terms must be separated by + or -", line)
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        try:
            coeff = as_scalar(m.group(2)) if m.group(2) else Fraction(1)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed rational {m.group(2)!r}", line) from None
        body = m.group(3)
        if "->" not in body:
            raise ParseError(f"term [{body}] lacks '->'", line)
        ins, out = body.split("->")
        try:
            inputs = tuple(space.index(n) for n in ins.split())
            outs = out.split()
            if len(outs) != 1:
                raise ParseError(f"term [{body}] needs exactly one output", line)
            b = BasisCoderivation(inputs, space.index(outs[0]))
        except KeyError as exc:
            raise ParseError(f"unknown basis name {exc.args[0]}", line) from None
        if not inputs:
            raise ParseError("terms need at least one input", line)
        terms[b] = terms.get(b, 0) + sign * coeff
    if text[pos:].strip() or pos == 0:
        raise ParseError(f"cannot parse cochain {text!r}", line)
    return Cochain(space, terms)


def _parse_rational(tok: str, line: int) -> Fraction:
    try:
        return as_scalar(tok)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ParseError(f"malformed rational {tok!r}", line) from None


def parse(text: str) -> Problem:
    keys = {}
    defs = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"(cochain|aux)\s+([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(.*)$", line)
        if m:
            defs.append((no, m.group(1), m.group(2), m.group(3)))
            continue
        m = re.match(r"([A-Za-z_-]+)\s*:\s*(.*)$", line)
        if not m:
            raise ParseError(f"unrecognised line {line!r}", no)
        key = m.group(1)
        if key not in ("even", "odd", "M", "W", "grid", "command", "operands", "piece", "mode"):
            raise ParseError(f"unknown key {key!r}", no)
        if key in keys:
            raise ParseError(f"duplicate key {key!r}", no)
        keys[key] = (no, m.group(2).split())
    if "even" not in keys and "odd" not in keys:
        raise ParseError("no basis declared (need 'even:' and/or 'odd:')")
    try:
        space = GradedSpace.from_even_odd(keys.get("even", (0, []))[1], keys.get("odd", (0, []))[1])
    except ValueError as exc:
        raise ParseError(str(exc), keys.get("odd", keys.get("even"))[0]) from None
    split = None
    if "M" in keys or "W" in keys:
        try:
            split = SplitSpace.from_names(space, keys.get("M", (0, []))[1], keys.get("W", (0, []))[1])
        except (ValueError, KeyError) as exc:
            raise ParseError(str(exc), keys.get("M", keys.get("W"))[0]) from None
    cochains, aux = {}, set()
    for no, kind, name, body in defs:
        if name in cochains:
            raise ParseError(f"duplicate cochain name {name!r}", no)
        c = parse_cochain(body, space, no)
        if kind == "cochain" and c and c.parity != 1:
            raise ParseError(f"structure cochain {name!r} must be odd (use 'aux' for other parities)", no)
        cochains[name] = c
        if kind == "aux":
            aux.add(name)
    grid = tuple(_parse_rational(t, keys["grid"][0]) for t in keys["grid"][1]) if "grid" in keys else ()
    command = None
    if "command" in keys:
        no, toks = keys["command"]
        if len(toks) != 1 or toks[0] not in COMMANDS:
            raise ParseError(f"unknown command {' '.join(toks)!r}", no)
        command = toks[0]
    operands = ()
    if "operands" in keys:
        no, toks = keys["operands"]
        for t in toks:
            if t not in cochains:
                raise ParseError(f"operand {t!r} is not a declared cochain", no)
        operands = tuple(toks)
    piece = None
    if "piece" in keys:
        no, toks = keys["piece"]
        try:
            piece = Bidegree(int(toks[0]), int(toks[1]), toks[2] if len(toks) > 2 else M)
        except (IndexError, ValueError):
            raise ParseError("piece is 'k l [M|W]'", no) from None
        if piece.target not in (M, W):
            raise ParseError("piece target must be M or W", no)
    mode = keys["mode"][1][0] if "mode" in keys and keys["mode"][1] else None
    return Problem(space, split, cochains, grid, command, operands, piece, mode, aux)


def cochain_json(c: Cochain) -> dict:
    return {"text": str(c), "terms": c.to_json()}


def cochain_from_json(space: GradedSpace, data: dict) -> Cochain:
    return Cochain.from_json(space, data["terms"])


def matrix_json(m: Matrix) -> list:
    return [[str(x) for x in r] for r in m.rows]


@dataclass
class Report:
    command: str
    space: dict
    results: dict
    status: str = "ok"
    exit_code: int = EXIT_OK

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "space": self.space,
            "status": self.status,
            "exit_code": self.exit_code,
            "results": self.results,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["command"], d["space"], d["results"], d["status"], d["exit_code"])

    def render(self) -> str:
        lines = [f"command: {self.command}", f"space: {self.space['superdim']}"]
        _render(self.results, lines, "")
        lines.append(f"status: {self.status}")
        return "\n".join(lines)


def _is_cochain(v) -> bool:
    return isinstance(v, dict) and set(v) == {"text", "terms"}


def _inline(v) -> Optional[str]:
    """Short one-line form for scalars and (nested) lists of scalars."""
    if isinstance(v, (str, int, float, bool)) or v is None:
        return str(v)
    if _is_cochain(v):
        return v["text"]
    if isinstance(v, list) and all(not isinstance(x, dict) for x in v):
        parts = [_inline(x) for x in v]
        if all(p is not None for p in parts):
            return "[" + ", ".join(parts) + "]"
    return None


def _render(obj, lines, indent):
    if isinstance(obj, dict):
        for k, v in obj.items():
            short = _inline(v)
            if short is not None:
                lines.append(f"{indent}{k}: {short}")
            else:
                lines.append(f"{indent}{k}:")
                _render(v, lines, indent + "  ")
    elif isinstance(obj, list):
        for v in obj:
            short = _inline(v)
            if short is not None:
                lines.append(f"{indent}- {short}")
            else:
                lines.append(f"{indent}-")
                _render(v, lines, indent + "  ")


class Precondition(ValueError):
    pass


def _need_split(p: Problem) -> SplitSpace:
    if p.split is None:
        raise Precondition("this command needs an M/W split ('M:' and 'W:' lines)")
    return p.split


def _get(p: Problem, name: str) -> Cochain:
    return p.cochains.get(name, Cochain.zero(p.space))


def _structure(p: Problem):
    from .extensions import ExtensionStructure

    split = _need_split(p)
    if "d" in p.cochains:
        return ExtensionStructure.from_codifferential(p.cochains["d"], split)
    return ExtensionStructure.build(split, _get(p, "delta"), _get(p, "mu"), _get(p, "lambda"), _get(p, "psi"))


def _operands(p: Problem, n: int, default=()):
    ops = p.operands or tuple(default)
    if len(ops) != n:
        raise Precondition(f"command needs {n} operand(s), got {len(ops)}")
    for o in ops:
        if o not in p.cochains:
            raise Precondition(f"operand {o!r} is not declared")
    return [p.cochains[o] for o in ops]


def _grid(p: Problem, override=None):
    from .extensions import DEFAULT_GRID, ScalarGrid

    vals = override if override is not None else p.grid
    return ScalarGrid(tuple(vals)) if vals else DEFAULT_GRID


def run(p: Problem, command: Optional[str] = None, grid_override=None, parallel: bool = False, restricted: bool = False) -> Report:
    command = command or p.command
    if command is None:
        raise Precondition("no command given")
    if command not in COMMANDS:
        raise Precondition(f"unknown command {command!r}")
    space = {
        "superdim": p.space.superdim,
        "names": list(p.space.names),
        "parities": list(p.space.parities),
        "split": list(p.split.membership) if p.split else None,
    }
    res = {}
    status, code = "ok", EXIT_OK

    if command == "bracket":
        f, g = _operands(p, 2)
        res["bracket"] = cochain_json(bracket(f, g))
    elif command == "square":
        (d,) = _operands(p, 1, ["d"] if "d" in p.cochains else [])
        sq = bracket(d, d)
        res["square"] = cochain_json(sq)
        if sq:
            status, code = "failed", EXIT_FAILED
    elif command == "validate":
        e = _structure(p)
        rep = ext.validate(e)
        res["d"] = cochain_json(e.d)
        res["relations"] = {k: cochain_json(v) for k, v in rep.residuals.items()}
        res["passed"] = rep.passed
        if not rep.passed:
            status, code = "failed", EXIT_FAILED
    elif command == "cohomology":
        split = _need_split(p)
        if p.piece is None:
            raise Precondition("cohomology needs 'piece: k l [M|W]'")
        mode = p.mode or "plain"
        if mode == "plain":
            (a,) = _operands(p, 1)
            H = coh.cohomology(a, split, p.piece, restricted=restricted)
        elif mode == "restricted":
            a, c = _operands(p, 2)
            H = coh.restricted_cohomology(a, c, split, p.piece, restricted=restricted)
        elif mode == "iterated":
            a, c = _operands(p, 2)
            H = coh.iterated_cohomology(a, c, split, p.piece, restricted=restricted)
        elif mode == "triple":
            mu, dl, ps = _operands(p, 3)
            H = coh.triple_cohomology(mu, dl, ps, split, p.piece)
        else:
            raise Precondition(f"unknown cohomology mode {mode!r}")
        res["piece"] = str(p.piece)
        res["mode"] = mode
        res["ambient_dim"] = len(H.ambient_basis)
        res["cocycles_dim"] = H.cocycles.dim
        res["coboundaries_dim"] = H.modulus.dim
        res["dim"] = H.dim
        res["classes"] = [cochain_json(c) for c in H.classes]
    elif command == "classify-extensions":
        split = _need_split(p)
        cl = ext.classify_extensions(_get(p, "delta"), _get(p, "mu"), split, _grid(p, grid_override), parallel=parallel)
        res["count"] = len(cl.classes)
        res["classes"] = [
            {
                "d": cochain_json(c.d),
                "lambda": cochain_json(c.structure.lambda_),
                "psi": cochain_json(c.structure.psi),
                "fingerprint": list(c.invariants),
            }
            for c in cl.classes
        ]
        res["unresolved"] = [list(pair) for pair in cl.unresolved]
        if cl.unresolved:
            status, code = "distinct-unproven", EXIT_UNPROVEN
    elif command == "classify-infinitesimal":
        split = _need_split(p)
        r = ext.classify_infinitesimal_extensions(_get(p, "delta"), _get(p, "mu"), split, _grid(p, grid_override))
        res["lambda_basis"] = [cochain_json(c) for c in r.lambda_basis]
        res["tau_basis"] = [cochain_json(c) for c in r.tau_basis]
        res["representatives"] = [{"lambda": cochain_json(l), "psi": cochain_json(s)} for l, s in r.representatives]
    elif command == "bimodule-classes":
        split = _need_split(p)
        r = ext.classify_bimodule_extensions(_get(p, "delta"), _get(p, "mu"), _get(p, "lambda"), split)
        res["left_module"] = cochain_json(r.report.left)
        res["right_module"] = cochain_json(r.report.right)
        res["compatibility"] = cochain_json(r.report.compatibility)
        res["dim"] = r.dim
        res["classes"] = [cochain_json(c) for c in r.classes]
    elif command == "deform-extension":
        e = _structure(p)
        r = dfm.classify_infinitesimal_deformations(e)
        res["eta_dim"], res["tau_dim"] = r.dims
        res["eta_classes"] = [cochain_json(c) for c in r.eta_classes]
        res["tau_classes"] = [cochain_json(c) for c in r.tau_classes]
        res["directions"] = [{"eta": cochain_json(x.eta), "zeta": cochain_json(x.zeta)} for x in r.directions]
    elif command in ("deform-rep-a", "deform-rep-b"):
        e = _structure(p)
        r = dfm.rep_deform_A(e) if command == "deform-rep-a" else dfm.rep_deform_B(e)
        res["scenario"] = r.scenario
        res["first_classes"] = [cochain_json(c) for c in r.first_classes]
        res["admissible_dim"] = r.admissible_dim
        res["coboundary_dim"] = r.coboundary_dim
        res["tau_dim"] = r.tau.dim
        res["tau_classes"] = [cochain_json(c) for c in r.tau.classes]
    elif command == "equivalence":
        split = _need_split(p)
        d1, d2 = _operands(p, 2)
        mode = p.mode or "general"
        grid = _grid(p, grid_override)
        e1 = ext.ExtensionStructure.from_codifferential(d1, split)
        if mode == "full":
            # any even isomorphism; d2 need not be an extension for this split
            w = None
            for g in ext.group_elements(split, grid, preserve_split=False):
                if apply_group_element(d1, g) == d2:
                    w = ext.Witness(g, Cochain.zero(p.space))
                    break
        else:
            e2 = ext.ExtensionStructure.from_codifferential(d2, split)
            if mode == "restricted":
                beta = ext.equivalent_restricted(e1, e2, grid)
                w = None if beta is None else ext.Witness(Matrix.identity(p.space.dim), beta)
            elif mode == "general":
                w = ext.equivalent_general(e1, e2, grid)
            else:
                raise Precondition(f"unknown equivalence mode {mode!r}")
        res["mode"] = mode
        res["equivalent"] = w is not None
        if w is not None:
            res["g"] = matrix_json(w.g)
            res["beta"] = cochain_json(w.beta)
            res["h"] = matrix_json(w.h)
        else:
            status, code = "no-witness", EXIT_FAILED
    return Report(command, space, res, status, code)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="assocext", description="Extensions and deformations of associative algebras")
    ap.add_argument("problem", help="problem file")
    ap.add_argument("--command", choices=COMMANDS, help="override the file's command")
    ap.add_argument("--out", help="write the JSON report here")
    ap.add_argument("--grid-override", help="comma separated rationals, e.g. -1,0,1,2")
    ap.add_argument("--parallel", action="store_true", help="evaluate candidates in worker processes")
    ap.add_argument("--restricted-complex", action="store_true", help="drop the C^{0,l} pieces (k >= 1 complex)")
    args = ap.parse_args(argv)
    try:
        with open(args.problem, encoding="utf-8") as fh:
            problem = parse(fh.read())
        grid = None
        if args.grid_override:
            grid = [_parse_rational(t.strip(), None) for t in args.grid_override.split(",")]
    except (ParseError, UnicodeDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = run(problem, args.command, grid, args.parallel, args.restricted_complex)
    except ValueError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(report.render())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.dumps() + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
