"""The E/S classification flowchart and the condition-(C) decision procedure.

Route: simplify the generating set to relatively subdirectly irreducible
subalgebras, look for a single generator, take a minimum-cardinality
separating carrier set, then read the verdicts off the relation sizes.
The coproduct-preservation verdict is the conjunction of E and S.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    direct_product,
    embeds,
    hom_enumerate,
    in_isp,
    induced_subalgebra,
    is_rel_subdirectly_irreducible,
    isomorphic,
    subuniverses,
    Congruence,
)
from .distlat import DReductSpec
from .errors import CapExceeded, LatcopError
from .piggyback import (
    AlterEgo,
    CarrierMap,
    MinimalityCertificate,
    build_alter_ego,
    leq_sublattice,
    maximal_subuniverses_in,
    minimal_omega_certified,
    sep_condition,
)

SUBALGEBRA_SIZE_CAP = 12


def subalgebras_up_to_iso(
    generators: Sequence[FiniteAlgebra], size_cap: int = SUBALGEBRA_SIZE_CAP
) -> list[FiniteAlgebra]:
    """All nontrivial subalgebras of the generators, up to isomorphism.

    Deterministic order: by (size, generator index, element tuple).
    """
    for m in generators:
        if m.size > size_cap:
            raise CapExceeded(
                f"subalgebra enumeration needs generator size <= {size_cap}, "
                f"got {m.size}",
                required=m.size,
            )
    found: list[FiniteAlgebra] = []
    candidates: list[tuple[int, int, tuple[int, ...], FiniteAlgebra]] = []
    for mi, m in enumerate(generators):
        for elems in subuniverses(m):
            if len(elems) < 2:
                continue
            sub, order = induced_subalgebra(m, elems)
            candidates.append((len(elems), mi, tuple(sorted(elems)), sub))
    candidates.sort(key=lambda t: t[:3])
    for _, _, _, sub in candidates:
        if not any(s.size == sub.size and isomorphic(sub, s) for s in found):
            found.append(sub)
    return found


def simplify_generators(
    generators: Sequence[FiniteAlgebra], size_cap: int = SUBALGEBRA_SIZE_CAP
) -> list[FiniteAlgebra]:
    """Replace the generators by relatively subdirectly irreducible
    subalgebras, greedily dropping any that the rest already generate.

    The result generates the same quasivariety; this is asserted via
    membership both ways.
    """
    gens = [m for m in generators if m.size > 1]
    if not generators:
        raise LatcopError("empty generating set")
    if not gens:
        return []
    ambient = list(gens)
    kept = [
        s
        for s in subalgebras_up_to_iso(gens, size_cap)
        if is_rel_subdirectly_irreducible(s, ambient)
    ]
    # greedy removal, smallest first, so large single generators survive
    i = 0
    while i < len(kept):
        rest = kept[:i] + kept[i + 1 :]
        if rest and in_isp(kept[i], rest):
            kept.pop(i)
        else:
            i += 1
    for m in ambient:
        if not in_isp(m, kept):
            raise LatcopError("internal error: simplified set lost a generator")
    for s in kept:
        if not in_isp(s, ambient):
            raise LatcopError("internal error: simplified set escapes the class")
    return kept


def find_single_generator(
    generators: Sequence[FiniteAlgebra],
    size_cap: int = SUBALGEBRA_SIZE_CAP,
    product_cap: int = 10**6,
) -> FiniteAlgebra | None:
    """A single algebra generating the same quasivariety, if one exists.

    Scans subalgebras of the generators smallest-first; failing that, tries
    the direct product of all generators.  Raises CapExceeded (meaning
    "unknown", not "no") when the search space is out of reach.
    """
    gens = list(generators)
    if not gens:
        return None
    for cand in subalgebras_up_to_iso(gens, size_cap):
        if all(in_isp(m, [cand]) for m in gens):
            return cand
    if len(gens) == 1:
        return None
    prod = direct_product(gens, cap=product_cap)
    if all(in_isp(m, [prod]) for m in gens):
        return prod
    return None


@dataclass
class ClassificationReport:
    """Output of the flowchart with all witnesses."""

    input_generators: list[FiniteAlgebra]
    simplified: list[FiniteAlgebra] = field(default_factory=list)
    single_generator: FiniteAlgebra | None = None
    generator_witnesses: dict[str, list[Homomorphism]] = field(default_factory=dict)
    omega: tuple[CarrierMap, ...] = ()
    minimality: MinimalityCertificate | None = None
    ego: AlterEgo | None = None
    relation_sizes: dict[tuple[int, int], int] = field(default_factory=dict)
    verdict_E: bool | None = None
    verdict_S: bool | None = None
    route: list[tuple[str, str]] = field(default_factory=list)
    unknown: str | None = None

    @property
    def preserves_coproducts(self) -> bool | None:
        if self.verdict_E is None or self.verdict_S is None:
            return None
        return self.verdict_E and self.verdict_S

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        def yesno(v):
            return None if v is None else ("yes" if v else "no")

        doc: dict = {
            "schema": 1,
            "input_generators": [
                {"name": m.name, "size": m.size} for m in self.input_generators
            ],
            "simplified": [
                {"name": m.name, "size": m.size} for m in self.simplified
            ],
            "single_generator": None
            if self.single_generator is None
            else {"name": self.single_generator.name, "size": self.single_generator.size},
            "omega": [w.label() for w in self.omega],
            "route": [{"question": q, "answer": a} for q, a in self.route],
            "E": yesno(self.verdict_E),
            "S": yesno(self.verdict_S),
            "preserves_coproducts": yesno(self.preserves_coproducts),
            "unknown": self.unknown,
        }
        if self.minimality is not None:
            doc["omega_minimality"] = {
                "size": self.minimality.size,
                "alternatives_of_same_size": self.minimality.alternatives,
                "smaller_sizes_failed": list(self.minimality.smaller_sizes_failed),
            }
        if self.ego is not None:
            rels = []
            for (i, j), count in sorted(self.relation_sizes.items()):
                entry = {
                    "omega1": self.omega[i].label(),
                    "omega2": self.omega[j].label(),
                    "count": count,
                    "relations": [
                        [list(p) for p in r.pairs]
                        for r in self.ego.relations_for(i, j)
                    ],
                }
                rels.append(entry)
            doc["relations"] = rels
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = []
        gen_names = ", ".join(f"{m.name}({m.size})" for m in self.input_generators)
        lines.append(f"classification of ISP({gen_names})")
        lines.append(
            "simplified generators: "
            + (", ".join(m.name for m in self.simplified) or "(none: trivial class)")
        )
        if self.unknown is not None:
            lines.append(f"verdict: unknown ({self.unknown})")
            return "\n".join(lines) + "\n"
        if self.single_generator is not None:
            lines.append(f"single generator: {self.single_generator.name}")
        if self.omega:
            alt = ""
            if self.minimality is not None:
                alt = (
                    f"  (minimal size {self.minimality.size}, "
                    f"{self.minimality.alternatives} alternative choice(s))"
                )
            lines.append(
                "carriers: " + ", ".join(w.label() for w in self.omega) + alt
            )
        if self.ego is not None:
            lines.append("relations:")
            for (i, j), count in sorted(self.relation_sizes.items()):
                lines.append(
                    f"  R[{self.omega[i].label()},{self.omega[j].label()}]: {count}"
                )
                for r in self.ego.relations_for(i, j):
                    pretty = ",".join(
                        f"({self.ego.sorts[r.sort1].element_name(a)},"
                        f"{self.ego.sorts[r.sort2].element_name(b)})"
                        for a, b in r.pairs
                    )
                    lines.append(f"    {{{pretty}}}")
        lines.append("route:")
        for k, (q, a) in enumerate(self.route, 1):
            lines.append(f"  ({k}) {q} {a}")
        pc = self.preserves_coproducts
        lines.append(f"preserves coproducts: {'yes' if pc else 'no'}")
        e = "yes" if self.verdict_E else "no"
        s = "yes" if self.verdict_S else "no"
        lines.append(f"E: {e}, S: {s}")
        return "\n".join(lines) + "\n"


def _separating_witnesses(n: FiniteAlgebra, m0: FiniteAlgebra) -> list[Homomorphism]:
    """A small family of homomorphisms n -> m0 with trivial joint kernel."""
    witnesses: list[Homomorphism] = []
    cur = Congruence.all(n.size)
    diag = Congruence.diagonal(n.size)
    for h in hom_enumerate(n, m0):
        merged = cur.meet(h.kernel())
        if merged != cur:
            witnesses.append(h)
            cur = merged
        if cur == diag:
            break
    return witnesses


def flowchart_classify(
    generators: Sequence[FiniteAlgebra],
    spec: DReductSpec,
    size_cap: int = SUBALGEBRA_SIZE_CAP,
) -> ClassificationReport:
    """Run the flowchart and fill a report with all witnesses."""
    report = ClassificationReport(input_generators=list(generators))
    try:
        simplified = simplify_generators(generators, size_cap)
    except CapExceeded as exc:
        report.unknown = str(exc)
        return report
    report.simplified = simplified
    if not simplified:
        # only trivial algebras: coproducts are trivially preserved
        report.route.append(("all generators trivial?", "yes"))
        report.verdict_E = True
        report.verdict_S = True
        return report
    try:
        m0 = find_single_generator(simplified, size_cap)
    except CapExceeded as exc:
        report.unknown = str(exc)
        return report
    report.single_generator = m0
    report.route.append(
        ("is the class generated by a single algebra?", "yes" if m0 else "no")
    )
    gens = [m0] if m0 is not None else simplified
    if m0 is not None:
        for n in simplified:
            report.generator_witnesses[n.name] = _separating_witnesses(n, m0)
    omega, cert = minimal_omega_certified(gens, spec)
    report.omega = omega
    report.minimality = cert
    single_omega = len(omega) == 1
    if m0 is not None:
        report.route.append(
            ("does a single carrier map satisfy separation?", "yes" if single_omega else "no")
        )
    ego = build_alter_ego(gens, spec, omega)
    report.ego = ego
    report.relation_sizes = ego.relation_sizes()
    if m0 is not None and single_omega:
        unique = report.relation_sizes[(0, 0)] == 1
        report.route.append(("is |R(w,w)| = 1?", "yes" if unique else "no"))
        report.verdict_E = True
        report.verdict_S = unique
    else:
        all_small = all(v <= 1 for v in report.relation_sizes.values())
        report.route.append(
            ("is |R(w1,w2)| <= 1 for all carrier pairs?", "yes" if all_small else "no")
        )
        report.verdict_E = m0 is not None and single_omega
        report.verdict_S = all_small
    return report


def check_condition_C(
    m: FiniteAlgebra,
    omega: CarrierMap,
    spec: DReductSpec,
    ambient: Sequence[FiniteAlgebra] | None = None,
) -> tuple[bool, bool, bool]:
    """The three-part coproduct-preservation check for a candidate (m, omega).

    (i) every relatively subdirectly irreducible algebra of the class embeds
    in m; (ii) separation holds for (m, omega); (iii) the subalgebras of m^2
    below (omega, omega)^-1(<=) have a top element.
    """
    if m.size < 2:
        raise LatcopError("condition (C) needs a nontrivial algebra")
    ambient_list = list(ambient) if ambient is not None else [m]
    si = [
        s
        for s in subalgebras_up_to_iso(ambient_list)
        if is_rel_subdirectly_irreducible(s, ambient_list)
    ]
    c1 = all(embeds(s, m) is not None for s in si)
    c2 = sep_condition([m], [omega]).holds
    square = direct_product([m, m])
    allowed = {square.encode(p) for p in leq_sublattice(omega, omega)}
    c3 = len(maximal_subuniverses_in(square, allowed)) == 1
    return (c1, c2, c3)
