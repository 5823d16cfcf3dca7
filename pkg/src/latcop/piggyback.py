"""Carrier maps, the separation condition, and maximal algebraic relations.

A carrier map is a bounded-lattice homomorphism from the reduct of a
generator into 2, i.e. a prime filter of that reduct.  For a pair of carrier
maps the relations R are the maximal subuniverses of the product of their
sorts contained in the sublattice of pairs (a, b) with w1(a) <= w2(b).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    direct_product,
    hom_enumerate,
    subuniverse_closure,
)
from .distlat import DReductSpec, d_reduct, prime_filters
from .errors import LatcopError, SeparationError


@dataclass(frozen=True)
class CarrierMap:
    """A prime filter of U(sort), viewed as a lattice map to 2."""

    sort: FiniteAlgebra
    elements: frozenset[int]
    generator: int

    def value(self, x: int) -> int:
        return 1 if x in self.elements else 0

    def label(self) -> str:
        return "{" + ",".join(self.sort.element_name(x) for x in sorted(self.elements)) + "}"

    def __repr__(self) -> str:
        return f"CarrierMap({self.sort.name!r}, {self.label()})"


def carriers_of(sort: FiniteAlgebra, spec: DReductSpec) -> tuple[CarrierMap, ...]:
    """All carrier maps of a generator, in canonical (generator-element) order."""
    lattice = d_reduct(sort, spec)
    return tuple(
        CarrierMap(sort, pf.elements, pf.generator) for pf in prime_filters(lattice)
    )


def carrier_from_filter(sort: FiniteAlgebra, spec: DReductSpec, elements: Iterable[int]) -> CarrierMap:
    """The carrier map with the given filter; validates it is a prime filter."""
    wanted = frozenset(elements)
    for c in carriers_of(sort, spec):
        if c.elements == wanted:
            return c
    raise LatcopError(
        f"{sorted(wanted)} is not a prime filter of the reduct of {sort.name!r}"
    )


# ---------------------------------------------------------------------------
# separation


@dataclass(frozen=True)
class SepResult:
    holds: bool
    witness: tuple[int, int, int] | None  # (sort index, a, b) left unseparated

    def __bool__(self) -> bool:
        return self.holds


def sep_condition(generators: Sequence[FiniteAlgebra], omega: Sequence[CarrierMap]) -> SepResult:
    """The separation condition for (generators, omega).

    Every pair a != b in each generator must be split by some w o u with u a
    homomorphism between generators and w a chosen carrier of u's target.
    """
    gens = list(generators)
    for w in omega:
        if w.sort not in gens:
            raise LatcopError("carrier sort is not among the generators")
    by_sort: dict[int, list[CarrierMap]] = {i: [] for i in range(len(gens))}
    for w in omega:
        by_sort[gens.index(w.sort)].append(w)
    homsets = {
        (i, j): hom_enumerate(gens[i], gens[j])
        for i in range(len(gens))
        for j in range(len(gens))
        if by_sort[j]
    }
    for i, m in enumerate(gens):
        for a in range(m.size):
            for b in range(a + 1, m.size):
                if not any(
                    w.value(u.map[a]) != w.value(u.map[b])
                    for (src, j), homs in homsets.items()
                    if src == i
                    for u in homs
                    for w in by_sort[j]
                ):
                    return SepResult(False, (i, a, b))
    return SepResult(True, None)


@dataclass(frozen=True)
class MinimalityCertificate:
    size: int
    alternatives: int        # other separating sets of the same size
    smaller_sizes_failed: tuple[int, ...]


def minimal_omega_certified(
    generators: Sequence[FiniteAlgebra], spec: DReductSpec
) -> tuple[tuple[CarrierMap, ...], MinimalityCertificate]:
    """A minimum-cardinality separating carrier set.

    Searched by increasing size with lexicographic tie-break over the
    canonical carrier enumeration (sort-major, then generator element).  The
    full carrier set always separates, so the search terminates.
    """
    all_carriers: list[CarrierMap] = []
    for m in generators:
        all_carriers.extend(carriers_of(m, spec))
    failed: list[int] = []
    for size in range(1, len(all_carriers) + 1):
        winners = [
            combo
            for combo in itertools.combinations(all_carriers, size)
            if sep_condition(generators, combo).holds
        ]
        if winners:
            return tuple(winners[0]), MinimalityCertificate(
                size, len(winners) - 1, tuple(failed)
            )
        failed.append(size)
    raise SeparationError(
        "the full carrier set does not separate: some generator is trivial "
        "or not in the quasivariety"
    )


def minimal_omega(generators: Sequence[FiniteAlgebra], spec: DReductSpec) -> tuple[CarrierMap, ...]:
    return minimal_omega_certified(generators, spec)[0]


# ---------------------------------------------------------------------------
# the sublattices (w1, w2)^-1(<=) and their maximal subuniverses


def leq_sublattice(w1: CarrierMap, w2: CarrierMap) -> frozenset[tuple[int, int]]:
    """All pairs (a, b) with w1(a) <= w2(b): everything except
    (a in filter1, b not in filter2)."""
    return frozenset(
        (a, b)
        for a in range(w1.sort.size)
        for b in range(w2.sort.size)
        if not (a in w1.elements and b not in w2.elements)
    )


def _first_violation(
    ops: list[tuple[int, np.ndarray]],
    member: np.ndarray,
) -> tuple[int, ...] | None:
    """Lexicographically least operation instance escaping the candidate set.

    Instances are ordered by (operation declaration order, input tuple); the
    returned tuple lists the participating input elements.
    """
    els = np.flatnonzero(member)
    for arity, table in ops:
        if arity == 0:
            if not member[int(table[0])]:
                return ()
        elif arity == 1:
            vals = table[els]
            bad = ~member[vals]
            if bad.any():
                return (int(els[int(np.argmax(bad))]),)
        elif arity == 2:
            sub = table[np.ix_(els, els)]
            bad = ~member[sub]
            if bad.any():
                flat = int(np.argmax(bad))
                i, j = divmod(flat, len(els))
                return (int(els[i]), int(els[j]))
        else:
            for args in itertools.product(els.tolist(), repeat=arity):
                idx = 0
                for a in args:
                    idx = idx * member.size + a
                if not member[int(table.flat[idx])]:
                    return tuple(args)
    return None


def maximal_subuniverses_in(
    product: FiniteAlgebra, allowed: Iterable[int]
) -> list[frozenset[int]]:
    """All maximal subuniverses of ``product`` contained in ``allowed``.

    Branch and bound from the full allowed set: at each node take the least
    violating operation instance and branch on deleting each participating
    element; visited sets are memoized, non-maximal results filtered at the
    end.  The empty list means no subuniverse fits (e.g. a nullary value
    escapes the allowed set).
    """
    n = product.size
    allowed_set = set(allowed)
    if not all(0 <= x < n for x in allowed_set):
        raise LatcopError("allowed set outside universe")
    member = np.zeros(n, dtype=bool)
    member[sorted(allowed_set)] = True

    np_ops: list[tuple[int, np.ndarray]] = []
    for _, arity, tab in product.ops():
        arr = np.asarray(tab, dtype=np.int64)
        if arity == 2:
            arr = arr.reshape(n, n)
        np_ops.append((arity, arr))

    for c in product.constants():
        if not member[c]:
            return []
    base = subuniverse_closure(product, ())
    if not base <= allowed_set:
        return []
    # feasibility prefilter: drop elements whose generated subuniverse escapes
    for e in sorted(allowed_set):
        if e in base:
            continue
        if not subuniverse_closure(product, tuple(base) + (e,)) <= allowed_set:
            member[e] = False

    visited: set[bytes] = set()
    results: list[frozenset[int]] = []

    def search(mem: np.ndarray) -> None:
        key = mem.tobytes()
        if key in visited:
            return
        visited.add(key)
        violation = _first_violation(np_ops, mem)
        if violation is None:
            if mem.any():
                results.append(frozenset(int(x) for x in np.flatnonzero(mem)))
            return
        if not violation:
            return  # a nullary value escaped: dead branch
        for e in sorted(set(violation)):
            child = mem.copy()
            child[e] = False
            search(child)

    search(member)
    maximal = [
        s
        for s in results
        if not any(s < t for t in results)
    ]
    return sorted(set(maximal), key=lambda s: sorted(s))


# ---------------------------------------------------------------------------
# alter egos


@dataclass(frozen=True)
class SortedRelation:
    """A maximal algebraic relation between two sorts, labeled by carriers."""

    sort1: int
    sort2: int
    omega1: int
    omega2: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def pair_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.pairs)


@dataclass(frozen=True)
class AlterEgo:
    """The multisorted dual-side structure: sorts, relations R, operations G."""

    sorts: tuple[FiniteAlgebra, ...]
    spec: DReductSpec
    carriers: tuple[CarrierMap, ...]
    relations: tuple[SortedRelation, ...]
    operations: tuple[Homomorphism, ...]

    def sort_index(self, algebra: FiniteAlgebra) -> int:
        return self.sorts.index(algebra)

    def relations_for(self, omega1: int, omega2: int) -> tuple[SortedRelation, ...]:
        return tuple(
            r for r in self.relations if r.omega1 == omega1 and r.omega2 == omega2
        )

    def relation_sizes(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for i in range(len(self.carriers)):
            for j in range(len(self.carriers)):
                out[(i, j)] = len(self.relations_for(i, j))
        return out


@lru_cache(maxsize=None)
def _relations_between(
    w1: CarrierMap, w2: CarrierMap
) -> tuple[tuple[tuple[int, int], ...], ...]:
    square = direct_product([w1.sort, w2.sort])
    allowed = {square.encode(p) for p in leq_sublattice(w1, w2)}
    subs = maximal_subuniverses_in(square, allowed)
    return tuple(
        tuple(sorted(square.decode(x) for x in s)) for s in subs
    )


def build_alter_ego(
    generators: Sequence[FiniteAlgebra],
    spec: DReductSpec,
    omega: Sequence[CarrierMap] | None = None,
) -> AlterEgo:
    """Assemble the alter ego for (generators, omega).

    Relations are the union of the maximal-relation sets over all ordered
    carrier pairs; G defaults to all homomorphisms between generators.
    Raises SeparationError when the separation condition fails.
    """
    gens = tuple(generators)
    if omega is None:
        omega = minimal_omega(gens, spec)
    omega = tuple(omega)
    sep = sep_condition(gens, omega)
    if not sep.holds:
        raise SeparationError(
            f"separation fails: elements {sep.witness[1]} and {sep.witness[2]} "
            f"of generator {gens[sep.witness[0]].name!r} are not separated",
            witness=sep.witness,
        )
    relations: list[SortedRelation] = []
    for i, w1 in enumerate(omega):
        for j, w2 in enumerate(omega):
            for pairs in _relations_between(w1, w2):
                relations.append(
                    SortedRelation(
                        gens.index(w1.sort), gens.index(w2.sort), i, j, pairs
                    )
                )
    operations: list[Homomorphism] = []
    for m1 in gens:
        for m2 in gens:
            operations.extend(hom_enumerate(m1, m2))
    return AlterEgo(gens, spec, omega, tuple(relations), tuple(operations))


# ---------------------------------------------------------------------------
# the unary-operations criterion for unique maximal relations


def _is_endomorphism(lattice, table: tuple[int, ...]) -> bool:
    n = lattice.size
    return all(
        table[lattice.meet(x, y)] == lattice.meet(table[x], table[y])
        and table[lattice.join(x, y)] == lattice.join(table[x], table[y])
        for x in range(n)
        for y in range(n)
    )


def _is_dual_endomorphism(lattice, table: tuple[int, ...]) -> bool:
    n = lattice.size
    return all(
        table[lattice.meet(x, y)] == lattice.join(table[x], table[y])
        and table[lattice.join(x, y)] == lattice.meet(table[x], table[y])
        for x in range(n)
        for y in range(n)
    )


def unique_max_applicable(algebra: FiniteAlgebra, spec: DReductSpec) -> bool:
    """True iff every basic operation is either part of the lattice structure
    or a unary (dual) lattice endomorphism of the reduct.

    When this holds, every bounded sublattice containing a subalgebra
    contains a largest one, so each relation set has at most one element.
    """
    lattice = d_reduct(algebra, spec)
    n = algebra.size
    meet_tab = lattice.meet_table
    join_tab = lattice.join_table
    for sym, arity, tab in algebra.ops():
        if arity == 0:
            if tab[0] not in (lattice.bot, lattice.top):
                return False
        elif arity == 1:
            if not (_is_endomorphism(lattice, tab) or _is_dual_endomorphism(lattice, tab)):
                return False
        elif arity == 2:
            if tab != meet_tab and tab != join_tab:
                return False
        else:
            return False
    return True


def relation_orbit_count(ego: AlterEgo, omega1: int, omega2: int) -> int:
    """Number of relations in R_{omega1,omega2} up to independent
    automorphism action on the two coordinates.

    This is the count of genuinely different relations; raw maximal sets
    also contain the images of each relation under automorphism pairs.
    """
    rels = ego.relations_for(omega1, omega2)
    if not rels:
        return 0
    m1 = ego.sorts[rels[0].sort1]
    m2 = ego.sorts[rels[0].sort2]
    autos1 = [h for h in hom_enumerate(m1, m1) if h.is_bijective]
    autos2 = [h for h in hom_enumerate(m2, m2) if h.is_bijective]
    seen: set[frozenset[tuple[int, int]]] = set()
    orbits = 0
    for r in rels:
        ps = r.pair_set
        if ps in seen:
            continue
        orbits += 1
        for s in autos1:
            for t in autos2:
                seen.add(frozenset((s.map[a], t.map[b]) for a, b in ps))
    return orbits


def bounds_preserved(algebra: FiniteAlgebra, spec: DReductSpec) -> bool:
    """Every unary basic operation maps {bot, top} into {bot, top}."""
    lattice = d_reduct(algebra, spec)
    bounds = {lattice.bot, lattice.top}
    return all(
        tab[lattice.bot] in bounds and tab[lattice.top] in bounds
        for _, arity, tab in algebra.ops()
        if arity == 1
    )
