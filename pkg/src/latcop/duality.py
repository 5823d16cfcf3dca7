"""The natural hom-functors at finite scale.

D sends an algebra to its multisorted dual (one sort of points per
generator, points are homomorphisms); E sends a structure back to the
algebra of its structure-preserving maps into the alter ego.  Coproducts are
computed as E of a product of duals, and the Priestley dual of the lattice
reduct is recovered from the natural dual via the carrier-indexed preorder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .algebra import (
    Congruence,
    FiniteAlgebra,
    Homomorphism,
    hom_enumerate,
    in_isp,
    quotient,
)
from .distlat import (
    DReductSpec,
    FinitePoset,
    PrimeFilter,
    d_reduct,
    poset_from_pairs,
    poset_isomorphic,
    prime_filters,
    priestley_dual,
)
from .errors import CapExceeded, LatcopError, MembershipError
from .piggyback import AlterEgo, build_alter_ego

DEFAULT_POINTS_CAP = 5000
DEFAULT_VISIT_CAP = 10**7


@dataclass(frozen=True)
class MultisortedStructure:
    """A finite structure over an alter ego's sorts.

    ``points`` holds, per sort, the carrier (homomorphisms for duals, tuples
    for products); ``relations`` and ``operations`` are index-based lifts
    aligned with the ego's relation and operation lists.
    """

    ego: AlterEgo
    points: tuple[tuple, ...]
    relations: tuple[frozenset[tuple[int, int]], ...]
    operations: tuple[tuple[int, ...], ...]

    @property
    def point_count(self) -> int:
        return sum(len(p) for p in self.points)

    def global_points(self) -> list[tuple[int, int]]:
        """Canonical point order: sort-major, then point index."""
        return [
            (s, i) for s in range(len(self.points)) for i in range(len(self.points[s]))
        ]


def natural_dual(algebra: FiniteAlgebra, ego: AlterEgo) -> MultisortedStructure:
    """D(algebra): sorts are the hom-sets into the generators, relations and
    operations lifted pointwise."""
    if not in_isp(algebra, ego.sorts):
        raise MembershipError(
            f"{algebra.name!r} is not in the quasivariety generated by the sorts"
        )
    points = tuple(tuple(hom_enumerate(algebra, m)) for m in ego.sorts)
    relations = []
    for rel in ego.relations:
        pairs = rel.pair_set
        lifted = frozenset(
            (i, j)
            for i, x in enumerate(points[rel.sort1])
            for j, y in enumerate(points[rel.sort2])
            if all((x.map[a], y.map[a]) in pairs for a in range(algebra.size))
        )
        relations.append(lifted)
    operations = []
    for g in ego.operations:
        s1 = ego.sort_index(g.source)
        s2 = ego.sort_index(g.target)
        index = {h.map: k for k, h in enumerate(points[s2])}
        operations.append(
            tuple(index[tuple(g.map[v] for v in x.map)] for x in points[s1])
        )
    return MultisortedStructure(ego, points, tuple(relations), tuple(operations))


def structure_product(
    structures: Sequence[MultisortedStructure],
    points_cap: int = DEFAULT_POINTS_CAP,
    ego: AlterEgo | None = None,
) -> MultisortedStructure:
    """Cartesian product of structures over the same ego, lifted
    componentwise; the empty product (one empty-tuple point per sort, all
    relation instances holding vacuously) needs the ego passed explicitly."""
    if structures:
        ego = structures[0].ego
        for x in structures[1:]:
            if x.ego != ego:
                raise LatcopError("structure product requires a common alter ego")
    elif ego is None:
        raise LatcopError("the empty structure product needs an explicit ego")
    else:
        points = tuple(((),) for _ in ego.sorts)
        relations = tuple(frozenset({(0, 0)}) for _ in ego.relations)
        operations = tuple((0,) for _ in ego.operations)
        return MultisortedStructure(ego, points, relations, operations)
    nsorts = len(ego.sorts)
    for s in range(nsorts):
        count = 1
        for x in structures:
            count *= len(x.points[s])
        if count > points_cap:
            raise CapExceeded(
                f"product structure needs {count} points in sort {s}, cap is {points_cap}",
                required=count,
            )
    points = tuple(
        tuple(itertools.product(*[x.points[s] for x in structures]))
        for s in range(nsorts)
    )
    # index decomposition per sort: mixed radix, leftmost factor most significant
    def decomp(s: int, idx: int) -> tuple[int, ...]:
        parts = []
        for x in reversed(structures):
            r = len(x.points[s])
            parts.append(idx % r)
            idx //= r
        return tuple(reversed(parts))

    relations = []
    for ri, rel in enumerate(ego.relations):
        s1, s2 = rel.sort1, rel.sort2
        lifted = set()
        for i in range(len(points[s1])):
            di = decomp(s1, i)
            for j in range(len(points[s2])):
                dj = decomp(s2, j)
                if all(
                    (a, b) in x.relations[ri]
                    for x, a, b in zip(structures, di, dj)
                ):
                    lifted.add((i, j))
        relations.append(frozenset(lifted))
    operations = []
    for gi, g in enumerate(ego.operations):
        s1 = ego.sort_index(g.source)
        s2 = ego.sort_index(g.target)
        lifted_op = []
        for i in range(len(points[s1])):
            di = decomp(s1, i)
            target = 0
            for x, a in zip(structures, di):
                target = target * len(x.points[s2]) + x.operations[gi][a]
            lifted_op.append(target)
        operations.append(tuple(lifted_op))
    return MultisortedStructure(ego, points, tuple(relations), tuple(operations))


# ---------------------------------------------------------------------------
# the E functor


@dataclass(frozen=True)
class EResult:
    """E(X) together with the morphisms realizing its elements."""

    algebra: FiniteAlgebra
    morphisms: tuple[tuple[int, ...], ...]  # value per global point
    point_order: tuple[tuple[int, int], ...]

    def index_of(self, vector: tuple[int, ...]) -> int:
        return self.morphisms.index(vector)


def e_functor(
    structure: MultisortedStructure,
    visit_cap: int = DEFAULT_VISIT_CAP,
) -> EResult:
    """E(X): all sort-preserving maps into the alter ego respecting every
    lifted relation and operation, found by backtracking with forward
    propagation over candidate-value bitmasks; the algebra is structured
    pointwise from the sorts."""
    ego = structure.ego
    order = structure.global_points()
    pos = {p: k for k, p in enumerate(order)}
    nvars = len(order)
    sort_of = [s for s, _ in order]
    full = [(1 << ego.sorts[s].size) - 1 for s in sort_of]

    # constraint edges
    rel_edges: list[tuple[int, int, frozenset[tuple[int, int]]]] = []
    for ri, rel in enumerate(ego.relations):
        pairs = rel.pair_set
        for (i, j) in sorted(structure.relations[ri]):
            rel_edges.append((pos[(rel.sort1, i)], pos[(rel.sort2, j)], pairs))
    op_edges: list[tuple[int, int, tuple[int, ...]]] = []
    for gi, g in enumerate(ego.operations):
        s1 = ego.sort_index(g.source)
        for i, j in enumerate(structure.operations[gi]):
            s2 = ego.sort_index(g.target)
            op_edges.append((pos[(s1, i)], pos[(s2, j)], g.map))

    # per edge, precompute value -> allowed-mask maps in both directions
    watchers: list[list] = [[] for _ in range(nvars)]
    for p, q, pairs in rel_edges:
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for a, b in pairs:
            fwd[a] = fwd.get(a, 0) | (1 << b)
            bwd[b] = bwd.get(b, 0) | (1 << a)
        watchers[p].append(("rel", q, fwd))
        watchers[q].append(("rel", p, bwd))
    for p, q, gmap in op_edges:
        fwd = {}
        bwd = {}
        for u, v in enumerate(gmap):
            fwd[u] = fwd.get(u, 0) | (1 << v)
            bwd[v] = bwd.get(v, 0) | (1 << u)
        watchers[p].append(("op", q, fwd))
        watchers[q].append(("op", p, bwd))

    def union_image(mask: int, table: dict[int, int]) -> int:
        out = 0
        v = mask
        while v:
            b = v & -v
            out |= table.get(b.bit_length() - 1, 0)
            v ^= b
        return out

    visits = 0

    def propagate(dom: list[int], queue: list[int]) -> bool:
        while queue:
            p = queue.pop()
            for _, q, table in watchers[p]:
                allowed = union_image(dom[p], table)
                newdom = dom[q] & allowed
                if newdom != dom[q]:
                    if newdom == 0:
                        return False
                    dom[q] = newdom
                    queue.append(q)
        return True

    solutions: list[tuple[int, ...]] = []

    def search(dom: list[int]) -> None:
        nonlocal visits
        visits += 1
        if visits > visit_cap:
            raise CapExceeded(
                f"E-functor enumeration exceeded {visit_cap} visited assignments",
                required=visits,
            )
        pivot = -1
        for k in range(nvars):
            if dom[k] & (dom[k] - 1):
                pivot = k
                break
        if pivot == -1:
            solutions.append(tuple(d.bit_length() - 1 for d in dom))
            return
        mask = dom[pivot]
        while mask:
            b = mask & -mask
            mask ^= b
            child = list(dom)
            child[pivot] = b
            if propagate(child, [pivot]):
                search(child)

    dom0 = list(full)
    if nvars == 0:
        solutions.append(())
    elif propagate(dom0, list(range(nvars))):
        search(dom0)

    if not solutions:
        raise LatcopError("E(X) is empty: the structure admits no morphisms")
    # verify and build the pointwise algebra
    sig = ego.sorts[0].signature
    for sol in solutions:
        for p, q, pairs in rel_edges:
            if (sol[p], sol[q]) not in pairs:
                raise LatcopError("internal error: relation constraint violated")
        for p, q, gmap in op_edges:
            if sol[q] != gmap[sol[p]]:
                raise LatcopError("internal error: operation constraint violated")
    index = {sol: k for k, sol in enumerate(solutions)}
    sort_algebras = [ego.sorts[s] for s in sort_of]
    tables = []
    for sym, arity in sig.symbols:
        sort_tabs = [m.table(sym) for m in sort_algebras]
        if arity == 0:
            vec = tuple(t[0] for t in sort_tabs)
            if vec not in index:
                raise LatcopError("internal error: constants escape E(X)")
            tables.append((index[vec],))
            continue
        entries = []
        for args in itertools.product(solutions, repeat=arity):
            vec = tuple(
                t[m.flat_index([arg[k] for arg in args])]
                for k, (m, t) in enumerate(zip(sort_algebras, sort_tabs))
            )
            if vec not in index:
                raise LatcopError("internal error: E(X) not closed under operations")
            entries.append(index[vec])
        tables.append(tuple(entries))
    algebra = FiniteAlgebra("E(X)", len(solutions), sig, tuple(tables))
    return EResult(algebra, tuple(solutions), tuple(order))


# ---------------------------------------------------------------------------
# coproducts


@dataclass(frozen=True)
class CoproductResult:
    algebra: FiniteAlgebra
    injections: tuple[Homomorphism, ...]
    structure: MultisortedStructure
    e_result: EResult
    ego: AlterEgo


@lru_cache(maxsize=None)
def _cached_ego(
    generators: tuple[FiniteAlgebra, ...],
    spec: DReductSpec,
    omega,
) -> AlterEgo:
    return build_alter_ego(generators, spec, omega)


def coproduct(
    generators: Sequence[FiniteAlgebra],
    spec: DReductSpec,
    omega,
    family: Sequence[FiniteAlgebra],
    check_universal: bool = True,
    points_cap: int = DEFAULT_POINTS_CAP,
    visit_cap: int = DEFAULT_VISIT_CAP,
) -> CoproductResult:
    """The coproduct of ``family`` in ISP(generators), as E(prod D(B)).

    The injection of B sends b to the morphism mapping a product point
    (x_A)_A of sort M to x_B(b).  Injections are checked to be
    homomorphisms; the universal property is checked against all
    homomorphism families into the generators.
    """
    gens = tuple(generators)
    ego = _cached_ego(gens, spec, tuple(omega) if omega is not None else None)
    members = list(family)
    for b in members:
        if not in_isp(b, gens):
            raise MembershipError(f"{b.name!r} is not in ISP of the generators")
    duals = [natural_dual(b, ego) for b in members]
    prod_structure = structure_product(duals, points_cap, ego=ego)
    e_res = e_functor(prod_structure, visit_cap)
    names = ",".join(b.name for b in members)
    algebra = e_res.algebra.rename(f"Coprod({names})")
    injections = []
    for bi, b in enumerate(members):
        vec = []
        for s, i in e_res.point_order:
            xs = prod_structure.points[s][i]
            vec_b = xs[bi]
            vec.append(vec_b)
        imap = []
        for x in range(b.size):
            target_vec = tuple(h.map[x] for h in vec)
            try:
                imap.append(e_res.index_of(target_vec))
            except ValueError:
                raise LatcopError(
                    "internal error: coproduct injection is not a morphism"
                ) from None
        eps = Homomorphism(b, algebra, tuple(imap))
        if not eps.is_valid():
            raise LatcopError("internal error: coproduct injection not a homomorphism")
        injections.append(eps)
    result = CoproductResult(algebra, tuple(injections), prod_structure, e_res, ego)
    if check_universal:
        _check_universal_property(result, members, gens)
    return result


def _check_universal_property(
    result: CoproductResult,
    members: list[FiniteAlgebra],
    generators: tuple[FiniteAlgebra, ...],
) -> None:
    """Sampled universal property: against every homomorphism family into
    each generator there is exactly one mediating map."""
    for m in generators:
        homs_c = hom_enumerate(result.algebra, m)
        hom_families = [hom_enumerate(b, m) for b in members]
        for combo in itertools.product(*hom_families):
            matching = [
                h
                for h in homs_c
                if all(
                    tuple(h.map[eps.map[x]] for x in range(b.size)) == f.map
                    for b, eps, f in zip(members, result.injections, combo)
                )
            ]
            if len(matching) != 1:
                raise LatcopError(
                    f"universal property fails against {m.name!r}: "
                    f"{len(matching)} mediating maps"
                )


# ---------------------------------------------------------------------------
# Priestley dual reconstruction from the natural dual


@dataclass(frozen=True)
class PreorderSpace:
    """The carrier-indexed preorder on pairs (dual point, carrier)."""

    elements: tuple[tuple[int, int, int], ...]  # (sort, point, carrier index)
    preceq_rows: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    def preceq(self, x: int, y: int) -> bool:
        return bool(self.preceq_rows[x] >> y & 1)


@dataclass(frozen=True)
class RevEngResult:
    preorder: PreorderSpace
    quotient: FinitePoset
    priestley: FinitePoset
    isomorphism: tuple[int, ...]


def reveng_priestley(algebra: FiniteAlgebra, ego: AlterEgo) -> RevEngResult:
    """Rebuild the Priestley dual of U(algebra) from its natural dual.

    Y is the union of (sort points) x (matching carriers); the preorder is
    membership in some lifted relation with matching carrier labels; the
    quotient by its symmetrization is checked to be order-isomorphic to the
    prime-filter poset and returned with the witness.
    """
    dual = natural_dual(algebra, ego)
    elements: list[tuple[int, int, int]] = []
    for wi, w in enumerate(ego.carriers):
        s = ego.sort_index(w.sort)
        for p in range(len(dual.points[s])):
            elements.append((s, p, wi))
    rel_by_label: dict[tuple[int, int], list[int]] = {}
    for ri, rel in enumerate(ego.relations):
        rel_by_label.setdefault((rel.omega1, rel.omega2), []).append(ri)
    rows = []
    for (s1, p, w1) in elements:
        row = 0
        for k, (s2, q, w2) in enumerate(elements):
            for ri in rel_by_label.get((w1, w2), ()):
                if (p, q) in dual.relations[ri]:
                    row |= 1 << k
                    break
        rows.append(row)
    space = PreorderSpace(tuple(elements), tuple(rows))
    n = space.size
    for x in range(n):
        if not space.preceq(x, x):
            raise LatcopError("reconstruction preorder is not reflexive")
        for y in range(n):
            if not space.preceq(x, y):
                continue
            for z in range(n):
                if space.preceq(y, z) and not space.preceq(x, z):
                    raise LatcopError("reconstruction preorder is not transitive")
    # quotient by the symmetrization
    cls = [-1] * n
    reps: list[int] = []
    for x in range(n):
        if cls[x] != -1:
            continue
        cls[x] = len(reps)
        for y in range(x + 1, n):
            if space.preceq(x, y) and space.preceq(y, x):
                cls[y] = cls[x]
        reps.append(x)
    pairs = {
        (cls[x], cls[y]) for x in range(n) for y in range(n) if space.preceq(x, y)
    }
    labels = tuple(f"c{k}" for k in range(len(reps)))
    quotient_poset = poset_from_pairs(len(reps), pairs, labels)
    priestley = priestley_dual(d_reduct(algebra, ego.spec))
    iso = poset_isomorphic(quotient_poset, priestley)
    if iso is None:
        raise LatcopError(
            "reconstruction quotient is not isomorphic to the Priestley dual"
        )
    return RevEngResult(space, quotient_poset, priestley, iso)


def reconstruction_order_poset(algebra: FiniteAlgebra, ego: AlterEgo) -> FinitePoset:
    """With a single sort, single carrier and a unique relation, the lifted
    relation itself partially orders D(algebra)."""
    if len(ego.sorts) != 1 or len(ego.carriers) != 1 or len(ego.relations) != 1:
        raise LatcopError("single-sort single-carrier unique-relation case only")
    dual = natural_dual(algebra, ego)
    npts = len(dual.points[0])
    pairs = set(dual.relations[0])
    return poset_from_pairs(npts, pairs, tuple(f"x{i}" for i in range(npts)))


@dataclass(frozen=True)
class EvaluationCheck:
    e_result: EResult
    evaluation: Homomorphism
    is_isomorphism: bool


def evaluation_check(algebra: FiniteAlgebra, ego: AlterEgo) -> EvaluationCheck:
    """The multisorted evaluation map into E(D(algebra)): a maps to the
    morphism sending a dual point x to x(a).  Under separation it is an
    isomorphism."""
    dual = natural_dual(algebra, ego)
    e_res = e_functor(dual)
    images = []
    for a in range(algebra.size):
        vec = tuple(dual.points[s][i].map[a] for (s, i) in e_res.point_order)
        try:
            images.append(e_res.index_of(vec))
        except ValueError:
            raise LatcopError("evaluation image is not a morphism") from None
    ev = Homomorphism(algebra, e_res.algebra, tuple(images))
    iso = (
        ev.is_valid()
        and len(set(images)) == algebra.size
        and e_res.algebra.size == algebra.size
    )
    return EvaluationCheck(e_res, ev, iso)


# ---------------------------------------------------------------------------
# the canonical map iota and the range formula


@dataclass(frozen=True)
class IotaCheck:
    family_names: tuple[str, ...]
    tuples: tuple[tuple[int, ...], ...]  # per prime filter of U(coprod)
    surjective: bool
    order_embedding: bool
    image: tuple[tuple[int, ...], ...]
    coproduct_size: int


def iota_check(
    generators: Sequence[FiniteAlgebra],
    spec: DReductSpec,
    omega,
    family: Sequence[FiniteAlgebra],
    **caps,
) -> IotaCheck:
    """Compute iota on prime filters: F maps to the tuple of preimages under
    the coproduct injections; report surjectivity and order-embedding."""
    cop = coproduct(generators, spec, omega, family, **caps)
    members = list(family)
    uc = d_reduct(cop.algebra, spec)
    pf_c = prime_filters(uc)
    pf_members = []
    for b in members:
        ub = d_reduct(b, spec)
        pf_members.append(prime_filters(ub))
    member_index = [
        {pf.elements: i for i, pf in enumerate(pfs)} for pfs in pf_members
    ]
    tuples = []
    for f in pf_c:
        coords = []
        for bi, (b, eps) in enumerate(zip(members, cop.injections)):
            pre = frozenset(x for x in range(b.size) if eps.map[x] in f.elements)
            if pre not in member_index[bi]:
                raise LatcopError("injection preimage of a prime filter is not prime")
            coords.append(member_index[bi][pre])
        tuples.append(tuple(coords))
    all_tuples = set(itertools.product(*[range(len(p)) for p in pf_members]))
    surjective = set(tuples) == all_tuples

    def tuple_leq(t1, t2) -> bool:
        return all(
            pf_members[bi][a].elements <= pf_members[bi][b].elements
            for bi, (a, b) in enumerate(zip(t1, t2))
        )

    embedding = True
    for i, fi in enumerate(pf_c):
        for j, fj in enumerate(pf_c):
            le_filters = fi.elements <= fj.elements
            le_tuples = tuple_leq(tuples[i], tuples[j])
            if le_filters and not le_tuples:
                raise LatcopError("iota is not order-preserving (internal error)")
            if le_tuples and not le_filters:
                embedding = False
    return IotaCheck(
        tuple(b.name for b in members),
        tuple(tuples),
        surjective,
        embedding,
        tuple(sorted(set(tuples))),
        cop.algebra.size,
    )


def lambda_map(
    algebra: FiniteAlgebra, ego: AlterEgo
) -> tuple[tuple[PrimeFilter, frozenset[int]], ...]:
    """For each prime filter f of U(algebra), the carriers w admitting a dual
    point x with w o x = f.  Non-empty throughout when separation holds."""
    lattice = d_reduct(algebra, ego.spec)
    pfs = prime_filters(lattice)
    dual = natural_dual(algebra, ego)
    out = []
    for f in pfs:
        hits = set()
        for wi, w in enumerate(ego.carriers):
            s = ego.sort_index(w.sort)
            for x in dual.points[s]:
                pre = frozenset(a for a in range(algebra.size) if x.map[a] in w.elements)
                if pre == f.elements:
                    hits.add(wi)
                    break
        if not hits:
            raise LatcopError(
                "joint surjectivity fails: a prime filter is not realized"
            )
        out.append((f, frozenset(hits)))
    return tuple(out)


# ---------------------------------------------------------------------------
# the reflector into a subquasivariety


@dataclass(frozen=True)
class ReflectorResult:
    algebra: FiniteAlgebra
    quotient_map: Homomorphism
    collapsed: bool  # True when no homomorphisms existed and everything glued


def reflector(
    algebra: FiniteAlgebra, generators: Sequence[FiniteAlgebra]
) -> ReflectorResult:
    """Quotient by the least congruence whose quotient lies in
    ISP(generators): the meet of all homomorphism kernels."""
    theta = Congruence.all(algebra.size)
    saw_hom = False
    for m in generators:
        for h in hom_enumerate(algebra, m):
            saw_hom = True
            theta = theta.meet(h.kernel())
    q, rho = quotient(algebra, theta)
    q = q.rename(f"R({algebra.name})")
    rho = Homomorphism(algebra, q, rho.map)
    return ReflectorResult(q, rho, not saw_hom and algebra.size > 1)
