"""Command-line frontend.

Inputs are either catalog ids (``kleene3``, ``mv_chain:3``, ``pseudo_b(2)``)
or paths to ``.alg`` files.  Exit codes: 0 success, 1 analysis unknown (a
size cap was hit), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .algebra import FiniteAlgebra, free_algebra
from .algfile import export_entry, parse_algebra_file
from .catalog import CONSTRUCTOR_IDS, make_id
from .classify import flowchart_classify
from .distlat import DReductSpec, d_reduct, priestley_dual
from .duality import coproduct, reveng_priestley
from .errors import CapExceeded, LatcopError, ParseError
from .piggyback import build_alter_ego, carrier_from_filter, minimal_omega_certified

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_INPUT = 2

CAP_ENV = "LATCOP_CAP"


class _Inputs:
    """Algebras with their reduct specs and optional declared carriers."""

    def __init__(self):
        self.items: list[tuple[FiniteAlgebra, DReductSpec, tuple[frozenset[int], ...]]] = []

    @property
    def algebras(self) -> list[FiniteAlgebra]:
        return [a for a, _, _ in self.items]

    @property
    def spec(self) -> DReductSpec:
        specs = {s for _, s, _ in self.items}
        if len(specs) != 1:
            raise LatcopError("all input algebras must share one reduct specification")
        return next(iter(specs))


def _load(source: str) -> _Inputs:
    out = _Inputs()
    path = Path(source)
    if path.suffix == ".alg" or path.exists():
        parsed = parse_algebra_file(path.read_text(encoding="utf-8"))
        for pa in parsed.algebras:
            spec = pa.reduct
            if spec is None:
                names = pa.algebra.signature.names
                if not {"meet", "join", "zero", "one"} <= set(names):
                    raise LatcopError(
                        f"algebra {pa.algebra.name!r} has no reduct line and no "
                        "literal meet/join/zero/one symbols"
                    )
                spec = DReductSpec.literal()
            d_reduct(pa.algebra, spec)  # validate early, with location-free error
            out.items.append((pa.algebra, spec, pa.carriers))
        return out
    entry = make_id(source)
    out.items.append((entry.algebra, entry.spec, entry.carriers or ()))
    return out


def _load_many(sources: list[str]) -> _Inputs:
    out = _Inputs()
    for s in sources:
        out.items.extend(_load(s).items)
    return out


def _resolve_omega(arg: str | None, inputs: _Inputs):
    """--omega: 'auto' for the minimal search, else semicolon-separated
    filters, each a comma list of labels/indices, optionally 'sort:...'."""
    if arg is None or arg == "auto":
        return None
    spec = inputs.spec
    algebras = inputs.algebras
    carriers = []
    for chunk in arg.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        sort = algebras[0]
        if ":" in chunk:
            sort_name, chunk = chunk.split(":", 1)
            matches = [a for a in algebras if a.name == sort_name]
            if not matches:
                raise LatcopError(f"--omega names unknown sort {sort_name!r}")
            sort = matches[0]
        elements = set()
        for tok in chunk.split(","):
            tok = tok.strip()
            # labels take precedence over raw indices (labels may be digits)
            if sort.element_names and tok in sort.element_names:
                elements.add(sort.element_names.index(tok))
            elif tok.isdigit():
                elements.add(int(tok))
            else:
                raise LatcopError(f"--omega value {tok!r} is not an element of {sort.name!r}")
        carriers.append(carrier_from_filter(sort, spec, elements))
    if not carriers:
        raise LatcopError("--omega gave no carriers")
    return tuple(carriers)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_classify(args) -> int:
    inputs = _load_many(args.source)
    kwargs = {"size_cap": args.cap} if args.cap else {}
    report = flowchart_classify(inputs.algebras, inputs.spec, **kwargs)
    _emit(report.to_json() + "\n" if args.json else report.to_text(), args.out)
    return EXIT_UNKNOWN if report.unknown is not None else EXIT_OK


def _cmd_duality(args) -> int:
    inputs = _load_many(args.source)
    omega = _resolve_omega(args.omega, inputs)
    gens = inputs.algebras
    if omega is None:
        omega, cert = minimal_omega_certified(gens, inputs.spec)
    else:
        cert = None
    ego = build_alter_ego(gens, inputs.spec, omega)
    if args.json:
        doc = {
            "schema": 1,
            "sorts": [{"name": m.name, "size": m.size} for m in ego.sorts],
            "omega": [w.label() for w in ego.carriers],
            "relations": [
                {
                    "omega1": ego.carriers[r.omega1].label(),
                    "omega2": ego.carriers[r.omega2].label(),
                    "pairs": [list(p) for p in r.pairs],
                }
                for r in ego.relations
            ],
            "operations": [
                {"source": g.source.name, "target": g.target.name, "map": list(g.map)}
                for g in ego.operations
            ],
        }
        if cert is not None:
            doc["omega_minimality"] = {
                "size": cert.size,
                "alternatives_of_same_size": cert.alternatives,
            }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    lines = [f"piggyback duality for ISP({', '.join(m.name for m in ego.sorts)})"]
    lines.append("carriers: " + ", ".join(w.label() for w in ego.carriers))
    if cert is not None:
        lines.append(
            f"  (minimal size {cert.size}, {cert.alternatives} alternative choice(s))"
        )
    lines.append("relations:")
    for r in ego.relations:
        m1, m2 = ego.sorts[r.sort1], ego.sorts[r.sort2]
        pretty = ",".join(
            f"({m1.element_name(a)},{m2.element_name(b)})" for a, b in r.pairs
        )
        lines.append(
            f"  R[{ego.carriers[r.omega1].label()},{ego.carriers[r.omega2].label()}]"
            f" {{{pretty}}}"
        )
    lines.append("operations:")
    for g in ego.operations:
        lines.append(f"  {g.source.name} -> {g.target.name}: {list(g.map)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_coproduct(args) -> int:
    inputs = _load_many(args.source)
    family = inputs.algebras
    # generators: the distinct algebras among the operands
    gens: list[FiniteAlgebra] = []
    for a in family:
        if not any(a == g for g in gens):
            gens.append(a)
    omega = _resolve_omega(args.omega, inputs)
    kwargs = {}
    if args.cap:
        kwargs = {"points_cap": args.cap, "visit_cap": args.cap}
    result = coproduct(gens, inputs.spec, omega, family, **kwargs)
    if args.json:
        doc = {
            "schema": 1,
            "family": [b.name for b in family],
            "size": result.algebra.size,
            "injections": [
                {"source": eps.source.name, "map": list(eps.map)}
                for eps in result.injections
            ],
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    lines = [f"coproduct of {', '.join(b.name for b in family)}"]
    lines.append(f"size {result.algebra.size}")
    for eps in result.injections:
        lines.append(f"injection from {eps.source.name}: {list(eps.map)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_free(args) -> int:
    inputs = _load_many(args.source)
    cap = args.cap if args.cap else 10**6
    f = free_algebra(inputs.algebras, args.n, cap=cap)
    if args.json:
        doc = {
            "schema": 1,
            "generators": [m.name for m in inputs.algebras],
            "rank": args.n,
            "size": f.size,
            "free_generators": list(f.generators or ()),
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    _emit(
        f"free algebra on {args.n} generator(s) over "
        f"ISP({', '.join(m.name for m in inputs.algebras)}): size {f.size}, "
        f"free generators at {list(f.generators or ())}\n",
        args.out,
    )
    return EXIT_OK


def _cmd_reveng(args) -> int:
    inputs = _load_many(args.source)
    omega = _resolve_omega(args.omega, inputs)
    ego = build_alter_ego(inputs.algebras, inputs.spec, omega)
    lines = []
    for a in inputs.algebras:
        r = reveng_priestley(a, ego)
        lines.append(
            f"{a.name}: preorder on {r.preorder.size} pairs, quotient poset of "
            f"size {r.quotient.size}, isomorphic to the prime-filter poset: yes"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_table1(args) -> int:
    from .catalog import table1_suite

    rows = []
    ok = True
    for entry, expected in table1_suite():
        report = flowchart_classify([entry.algebra], entry.spec)
        got = (report.verdict_E, report.verdict_S)
        match = got == expected
        ok = ok and match
        rows.append((entry.key, expected, got, match))
    if args.json:
        doc = {
            "schema": 1,
            "results": [
                {
                    "id": key,
                    "expected": {"E": e, "S": s},
                    "computed": {"E": ge, "S": gs},
                    "match": match,
                }
                for key, (e, s), (ge, gs), match in rows
            ],
            "all_match": ok,
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    else:
        lines = []
        for key, (e, s), (ge, gs), match in rows:
            flag = "ok " if match else "MISMATCH"
            lines.append(
                f"{flag} {key:22s} expected E={'y' if e else 'n'} S={'y' if s else 'n'}"
                f"  computed E={'y' if ge else 'n'} S={'y' if gs else 'n'}"
            )
        lines.append("all match" if ok else "SOME ROWS MISMATCH")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_UNKNOWN


def _cmd_export_dot(args) -> int:
    inputs = _load_many(args.source)
    if args.reveng:
        omega = _resolve_omega(args.omega, inputs)
        ego = build_alter_ego(inputs.algebras, inputs.spec, omega)
        poset = reveng_priestley(inputs.algebras[0], ego).quotient
        name = "reconstruction"
    else:
        poset = priestley_dual(d_reduct(inputs.algebras[0], inputs.spec))
        name = "priestley_dual"
    _emit(poset.to_dot(name), args.out)
    return EXIT_OK


def _cmd_export_alg(args) -> int:
    entry = make_id(args.id)
    _emit(export_entry(entry), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latcop",
        description=(
            "Coproduct analysis for finitely generated quasivarieties of "
            "distributive-lattice-based finite algebras.  Tables in .alg "
            "files are row-major over lexicographically ordered argument "
            "tuples.  Catalog ids: " + ", ".join(CONSTRUCTOR_IDS)
        ),
    )
    parser.add_argument("--version", action="version", version=f"latcop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, omega=False, many_sources=True):
        if many_sources:
            p.add_argument("source", nargs="+", help="catalog id or .alg file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--out", default=None, help="output path ('-' = stdout)")
        p.add_argument(
            "--cap",
            type=int,
            default=int(os.environ.get(CAP_ENV, 0)) or None,
            help=f"size cap override (also via ${CAP_ENV})",
        )
        if omega:
            p.add_argument(
                "--omega",
                default="auto",
                help=(
                    "carrier maps: 'auto' or ';'-separated filters, each a "
                    "comma list of element labels/indices, optionally "
                    "prefixed 'sortname:'"
                ),
            )

    p = sub.add_parser("classify", help="run the E/S flowchart")
    common(p)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("duality", help="print carriers, relations and operations")
    common(p, omega=True)
    p.set_defaults(fn=_cmd_duality)

    p = sub.add_parser("coproduct", help="coproduct of the listed algebras")
    common(p, omega=True)
    p.set_defaults(fn=_cmd_coproduct)

    p = sub.add_parser("free", help="free algebra on N generators")
    p.add_argument("n", type=int, help="number of free generators")
    common(p)
    p.set_defaults(fn=_cmd_free)

    p = sub.add_parser(
        "reveng-check", help="verify the Priestley dual reconstruction"
    )
    common(p, omega=True)
    p.set_defaults(fn=_cmd_reveng)

    p = sub.add_parser("table1", help="reproduce the classification table")
    common(p, many_sources=False)
    p.set_defaults(fn=_cmd_table1)

    p = sub.add_parser("export-dot", help="Hasse diagram of the Priestley dual")
    common(p, omega=True)
    p.add_argument(
        "--reveng",
        action="store_true",
        help="emit the reconstruction quotient poset instead",
    )
    p.set_defaults(fn=_cmd_export_dot)

    p = sub.add_parser("export-alg", help="print a catalog entry in .alg format")
    p.add_argument("id", help="catalog id")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_export_alg)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"unknown: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except (LatcopError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
