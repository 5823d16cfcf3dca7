"""Bounded-distributive-lattice term reducts and finite Priestley duality.

The dual of a finite bounded distributive lattice is the poset of its prime
filters; in the finite case these are exactly the up-sets of join-irreducible
elements, which keeps both directions of the duality quadratic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .algebra import FiniteAlgebra, Signature, Term, app, eval_term, term_table, var
from .errors import LatcopError, LatticeAxiomError


@dataclass(frozen=True)
class DReductSpec:
    """Terms carving a bounded-distributive-lattice reduct out of a signature."""

    meet: Term
    join: Term
    bot: Term
    top: Term

    def __post_init__(self):
        if self.meet.max_var > 1 or self.join.max_var > 1:
            raise LatcopError("meet/join terms may only use x0 and x1")
        if self.bot.max_var >= 0 or self.top.max_var >= 0:
            raise LatcopError("bot/top terms must be closed")

    @staticmethod
    def literal(meet: str = "meet", join: str = "join", bot: str = "zero", top: str = "one") -> "DReductSpec":
        return DReductSpec(
            app(meet, var(0), var(1)), app(join, var(0), var(1)), app(bot), app(top)
        )


@dataclass(frozen=True)
class DistLatticeReduct:
    """A validated bounded-distributive-lattice reduct of a finite algebra."""

    carrier: FiniteAlgebra
    meet_table: tuple[int, ...]
    join_table: tuple[int, ...]
    bot: int
    top: int
    leq_rows: tuple[int, ...]  # row x is a bitmask of { y : x <= y }

    @property
    def size(self) -> int:
        return self.carrier.size

    def meet(self, x: int, y: int) -> int:
        return self.meet_table[x * self.size + y]

    def join(self, x: int, y: int) -> int:
        return self.join_table[x * self.size + y]

    def leq(self, x: int, y: int) -> bool:
        return bool(self.leq_rows[x] >> y & 1)

    def element_name(self, x: int) -> str:
        return self.carrier.element_name(x)

    def upset(self, x: int) -> frozenset[int]:
        return frozenset(y for y in range(self.size) if self.leq(x, y))

    def __repr__(self) -> str:
        return f"DistLatticeReduct({self.carrier.name!r}, size={self.size})"


def _check_identity(ok: bool, identity: str, witness: tuple) -> None:
    if not ok:
        raise LatticeAxiomError(identity, witness)


@lru_cache(maxsize=None)
def d_reduct(algebra: FiniteAlgebra, spec: DReductSpec) -> DistLatticeReduct:
    """Extract and validate the reduct; raises LatticeAxiomError with the
    failing identity and a witness tuple."""
    import numpy as np

    n = algebra.size
    m = term_table(algebra, spec.meet, 2)
    j = term_table(algebra, spec.join, 2)
    bot = eval_term(algebra, spec.bot, ())
    top = eval_term(algebra, spec.top, ())

    M = np.asarray(m, dtype=np.int64).reshape(n, n)
    J = np.asarray(j, dtype=np.int64).reshape(n, n)

    def first_bad(bad, identity: str, prefix: tuple = ()) -> None:
        if bad.any():
            where = np.unravel_index(int(np.argmax(bad)), bad.shape)
            raise LatticeAxiomError(identity, prefix + tuple(int(w) for w in where))

    first_bad(M != M.T, "meet commutativity")
    first_bad(J != J.T, "join commutativity")
    idx = np.arange(n)
    first_bad(M[idx[:, None], J] != idx[:, None], "absorption x^(xvy)=x")
    first_bad(J[idx[:, None], M] != idx[:, None], "absorption xv(x^y)=x")
    for x in range(n):
        first_bad(M[M[x], :] != M[x, M], "meet associativity", (x,))
        first_bad(J[J[x], :] != J[x, J], "join associativity", (x,))
        first_bad(
            M[x, J] != J[M[x][:, None], M[x][None, :]], "distributivity", (x,)
        )
    first_bad(J[:, bot] != idx, "bottom neutral")
    first_bad(M[:, top] != idx, "top neutral")

    rows = []
    for x in range(n):
        row = 0
        for y in range(n):
            if m[x * n + y] == x:
                row |= 1 << y
        rows.append(row)
    return DistLatticeReduct(algebra, m, j, bot, top, tuple(rows))


# ---------------------------------------------------------------------------
# prime filters


@dataclass(frozen=True)
class PrimeFilter:
    """A prime filter, stored with the join-irreducible generating it."""

    elements: frozenset[int]
    generator: int

    def __contains__(self, x: int) -> bool:
        return x in self.elements

    def value(self, x: int) -> int:
        """The filter as a lattice map to 2."""
        return 1 if x in self.elements else 0


def join_irreducibles(lattice: DistLatticeReduct) -> list[int]:
    """Elements that are not the join of their strict lower set."""
    out = []
    for x in range(lattice.size):
        if x == lattice.bot:
            continue
        acc = lattice.bot
        for y in range(lattice.size):
            if y != x and lattice.leq(y, x):
                acc = lattice.join(acc, y)
        if acc != x:
            out.append(x)
    return out


def prime_filters(lattice: DistLatticeReduct) -> list[PrimeFilter]:
    """All prime filters, one per join-irreducible, ordered by generator."""
    return [PrimeFilter(lattice.upset(jx), jx) for jx in join_irreducibles(lattice)]


# ---------------------------------------------------------------------------
# posets


@dataclass(frozen=True)
class FinitePoset:
    size: int
    leq_rows: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        for x in range(self.size):
            if not self.leq(x, x):
                raise LatcopError("poset order must be reflexive")
            for y in range(self.size):
                if not self.leq(x, y):
                    continue
                if x != y and self.leq(y, x):
                    raise LatcopError("poset order must be antisymmetric")
                for z in range(self.size):
                    if self.leq(y, z) and not self.leq(x, z):
                        raise LatcopError("poset order must be transitive")

    def leq(self, x: int, y: int) -> bool:
        return bool(self.leq_rows[x] >> y & 1)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs (lo, hi): the Hasse diagram edges."""
        out = []
        for lo in range(self.size):
            for hi in range(self.size):
                if lo == hi or not self.leq(lo, hi):
                    continue
                if any(
                    self.leq(lo, z) and self.leq(z, hi)
                    for z in range(self.size)
                    if z not in (lo, hi)
                ):
                    continue
                out.append((lo, hi))
        return out

    def upsets(self) -> list[frozenset[int]]:
        """All up-sets; deterministic order by (size, sorted tuple)."""
        order = sorted(
            range(self.size), key=lambda x: bin(self.leq_rows[x]).count("1")
        )  # maximal elements first: everything above x is decided before x
        out: list[frozenset[int]] = []

        def extend(i: int, chosen: set[int]) -> None:
            if i == len(order):
                out.append(frozenset(chosen))
                return
            x = order[i]
            extend(i + 1, chosen)
            if all(y in chosen for y in range(self.size) if y != x and self.leq(x, y)):
                chosen.add(x)
                extend(i + 1, chosen)
                chosen.remove(x)

        extend(0, set())
        return sorted(out, key=lambda s: (len(s), sorted(s)))

    def to_dot(self, graph_name: str = "poset") -> str:
        """Hasse diagram in DOT; edges are covering pairs only."""
        lines = [f"digraph {graph_name} {{", "  rankdir=BT;"]
        for x in range(self.size):
            lines.append(f'  n{x} [label="{self.labels[x]}"];')
        for lo, hi in self.covers():
            lines.append(f"  n{lo} -> n{hi};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def poset_from_pairs(size: int, pairs: set[tuple[int, int]], labels: tuple[str, ...] | None = None) -> FinitePoset:
    rows = [1 << x for x in range(size)]
    for x, y in pairs:
        rows[x] |= 1 << y
    return FinitePoset(size, tuple(rows), labels or tuple(str(i) for i in range(size)))


def antichain(size: int) -> FinitePoset:
    return poset_from_pairs(size, set())


def chain(size: int) -> FinitePoset:
    return poset_from_pairs(size, {(x, y) for x in range(size) for y in range(x, size)})


def poset_product(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    size = p.size * q.size
    pairs = set()
    for x1, x2 in itertools.product(range(p.size), range(q.size)):
        for y1, y2 in itertools.product(range(p.size), range(q.size)):
            if p.leq(x1, y1) and q.leq(x2, y2):
                pairs.add((x1 * q.size + x2, y1 * q.size + y2))
    labels = tuple(
        f"({p.labels[x1]},{q.labels[x2]})"
        for x1 in range(p.size)
        for x2 in range(q.size)
    )
    return poset_from_pairs(size, pairs, labels)


def poset_disjoint_union(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    size = p.size + q.size
    pairs = {(x, y) for x in range(p.size) for y in range(p.size) if p.leq(x, y)}
    pairs |= {
        (p.size + x, p.size + y)
        for x in range(q.size)
        for y in range(q.size)
        if q.leq(x, y)
    }
    return poset_from_pairs(size, pairs, p.labels + q.labels)


# ---------------------------------------------------------------------------
# the functors H and K


def priestley_dual(lattice: DistLatticeReduct) -> FinitePoset:
    """H(L): prime filters ordered by inclusion."""
    pfs = prime_filters(lattice)
    pairs = {
        (i, j)
        for i, fi in enumerate(pfs)
        for j, fj in enumerate(pfs)
        if fi.elements <= fj.elements
    }
    labels = tuple(lattice.element_name(f.generator) for f in pfs)
    return poset_from_pairs(len(pfs), pairs, labels)


@dataclass(frozen=True)
class LatticeHom:
    """A bound-preserving lattice homomorphism between reducts."""

    source: DistLatticeReduct
    target: DistLatticeReduct
    map: tuple[int, ...]

    def __post_init__(self):
        s, t = self.source, self.target
        if len(self.map) != s.size:
            raise LatcopError("lattice hom map has wrong length")
        if self.map[s.bot] != t.bot or self.map[s.top] != t.top:
            raise LatcopError("lattice hom must preserve the bounds")
        for x, y in itertools.product(range(s.size), repeat=2):
            if self.map[s.meet(x, y)] != t.meet(self.map[x], self.map[y]):
                raise LatcopError(f"map does not preserve meet at {(x, y)}")
            if self.map[s.join(x, y)] != t.join(self.map[x], self.map[y]):
                raise LatcopError(f"map does not preserve join at {(x, y)}")

    def __call__(self, x: int) -> int:
        return self.map[x]

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size


@dataclass(frozen=True)
class PosetMap:
    source: FinitePoset
    target: FinitePoset
    map: tuple[int, ...]

    def __post_init__(self):
        for x in range(self.source.size):
            for y in range(self.source.size):
                if self.source.leq(x, y) and not self.target.leq(self.map[x], self.map[y]):
                    raise LatcopError("poset map must be order-preserving")

    def __call__(self, x: int) -> int:
        return self.map[x]

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    @property
    def is_order_embedding(self) -> bool:
        return all(
            self.source.leq(x, y) == self.target.leq(self.map[x], self.map[y])
            for x in range(self.source.size)
            for y in range(self.source.size)
        )


def dual_of_hom(f: LatticeHom) -> PosetMap:
    """H(f): contravariant, sends a prime filter to its preimage."""
    src_pfs = prime_filters(f.target)
    tgt_pfs = prime_filters(f.source)
    tgt_index = {pf.elements: i for i, pf in enumerate(tgt_pfs)}
    out = []
    for pf in src_pfs:
        pre = frozenset(x for x in range(f.source.size) if f.map[x] in pf.elements)
        if pre not in tgt_index:
            raise LatcopError("preimage of a prime filter is not prime (bad hom)")
        out.append(tgt_index[pre])
    return PosetMap(priestley_dual(f.target), priestley_dual(f.source), tuple(out))


_LATTICE_SIG = Signature((("meet", 2), ("join", 2), ("zero", 0), ("one", 0)))


def lattice_algebra_from_leq(
    size: int,
    leq,
    name: str,
    element_names: tuple[str, ...] | None = None,
) -> FiniteAlgebra:
    """Build a pure bounded-lattice algebra from a (lattice) order predicate."""
    meet, join = [], []
    for x in range(size):
        for y in range(size):
            lower = [z for z in range(size) if leq(z, x) and leq(z, y)]
            upper = [z for z in range(size) if leq(x, z) and leq(y, z)]
            inf = [z for z in lower if all(leq(w, z) for w in lower)]
            sup = [z for z in upper if all(leq(z, w) for w in upper)]
            if len(inf) != 1 or len(sup) != 1:
                raise LatcopError("order is not a lattice order")
            meet.append(inf[0])
            join.append(sup[0])
    bots = [z for z in range(size) if all(leq(z, w) for w in range(size))]
    tops = [z for z in range(size) if all(leq(w, z) for w in range(size))]
    if len(bots) != 1 or len(tops) != 1:
        raise LatcopError("order has no bounds")
    return FiniteAlgebra(
        name,
        size,
        _LATTICE_SIG,
        (tuple(meet), tuple(join), (bots[0],), (tops[0],)),
        element_names,
    )


def upset_lattice(poset: FinitePoset, name: str | None = None) -> DistLatticeReduct:
    """K(P): the lattice of up-sets under intersection and union."""
    ups = poset.upsets()
    index = {u: i for i, u in enumerate(ups)}
    n = len(ups)
    labels = tuple(
        "{" + ",".join(poset.labels[x] for x in sorted(u)) + "}" for u in ups
    )
    meet = tuple(index[ups[i] & ups[j]] for i in range(n) for j in range(n))
    join = tuple(index[ups[i] | ups[j]] for i in range(n) for j in range(n))
    algebra = FiniteAlgebra(
        name or "Up(P)",
        n,
        _LATTICE_SIG,
        (meet, join, (index[frozenset()],), (index[frozenset(range(poset.size))],)),
        labels,
    )
    return d_reduct(algebra, DReductSpec.literal())


def poset_isomorphic(p: FinitePoset, q: FinitePoset) -> tuple[int, ...] | None:
    """An order-isomorphism p -> q as an image vector, or None.

    Backtracking over degree/height-style invariants refined iteratively.
    """
    if p.size != q.size:
        return None

    def colors(poset: FinitePoset, pool: dict) -> list[int]:
        def intern(key):
            if key not in pool:
                pool[key] = len(pool)
            return pool[key]

        col = [intern(("init",))] * poset.size
        for _ in range(poset.size):
            new = []
            for x in range(poset.size):
                ups = sorted(col[y] for y in range(poset.size) if x != y and poset.leq(x, y))
                dns = sorted(col[y] for y in range(poset.size) if x != y and poset.leq(y, x))
                new.append(intern((col[x], tuple(ups), tuple(dns))))
            if new == col:
                break
            col = new
        return col

    pool: dict = {}
    cp = colors(p, pool)
    cq = colors(q, pool)
    if sorted(cp) != sorted(cq):
        return None
    candidates = {x: [y for y in range(q.size) if cq[y] == cp[x]] for x in range(p.size)}

    def search(x: int, img: list[int], used: set[int]) -> tuple[int, ...] | None:
        if x == p.size:
            return tuple(img)
        for y in candidates[x]:
            if y in used:
                continue
            ok = all(
                img[z] == -1
                or (
                    p.leq(x, z) == q.leq(y, img[z])
                    and p.leq(z, x) == q.leq(img[z], y)
                )
                for z in range(p.size)
            )
            if not ok:
                continue
            img[x] = y
            used.add(y)
            found = search(x + 1, img, used)
            if found is not None:
                return found
            img[x] = -1
            used.remove(y)
        return None

    return search(0, [-1] * p.size, set())
