"""Finite algebras as operation tables.

Everything lives on a universe ``0..n-1``; element names are metadata only.
Tables are flat tuples in row-major order over lexicographically ordered
argument tuples, so all values are immutable and hashable.  Enumeration
outputs follow a documented total order (lexicographic over map vectors /
sorted element tuples) to keep results diff-stable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

from .errors import (
    CapExceeded,
    IncompatiblePartition,
    LatcopError,
    MembershipError,
    SignatureMismatch,
    UnknownSymbol,
)

DEFAULT_PRODUCT_CAP = 10**6


@dataclass(frozen=True)
class Signature:
    """An operation signature: named symbols with fixed arities."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [s for s, _ in self.symbols]
        if len(set(names)) != len(names):
            raise LatcopError(f"duplicate symbol names in signature: {names}")
        for name, arity in self.symbols:
            if arity < 0:
                raise LatcopError(f"negative arity for symbol {name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.symbols)

    def arity(self, name: str) -> int:
        for sym, arity in self.symbols:
            if sym == name:
                return arity
        raise UnknownSymbol(f"symbol {name!r} not in signature")

    def index(self, name: str) -> int:
        for i, (sym, _) in enumerate(self.symbols):
            if sym == name:
                return i
        raise UnknownSymbol(f"symbol {name!r} not in signature")

    def __contains__(self, name: str) -> bool:
        return any(sym == name for sym, _ in self.symbols)


@dataclass(frozen=True)
class Term:
    """A term tree: ``head`` is a variable index (int) or a symbol name (str)."""

    head: int | str
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if isinstance(self.head, int) and self.args:
            raise LatcopError("variable terms take no arguments")

    @property
    def is_var(self) -> bool:
        return isinstance(self.head, int)

    @property
    def max_var(self) -> int:
        """Largest variable index occurring in the term, or -1 if none."""
        if self.is_var:
            return self.head
        return max((a.max_var for a in self.args), default=-1)

    def validate(self, signature: Signature) -> None:
        if self.is_var:
            return
        if self.head not in signature:
            raise UnknownSymbol(f"symbol {self.head!r} not in signature")
        if signature.arity(self.head) != len(self.args):
            raise LatcopError(
                f"symbol {self.head!r} applied to {len(self.args)} arguments, "
                f"expected {signature.arity(self.head)}"
            )
        for a in self.args:
            a.validate(signature)

    def __str__(self) -> str:
        if self.is_var:
            return f"x{self.head}"
        if not self.args:
            return f"({self.head})"
        return "(" + self.head + " " + " ".join(str(a) for a in self.args) + ")"


def var(i: int) -> Term:
    return Term(i)


def app(symbol: str, *args: Term) -> Term:
    return Term(symbol, tuple(args))


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite algebra: universe ``0..size-1`` plus one table per symbol.

    ``tables`` is aligned with ``signature.symbols``; the table for an
    arity-k symbol has ``size**k`` entries indexed row-major (leftmost
    argument most significant).  ``factors`` is set by :func:`direct_product`
    and enables the tuple codec; ``generators`` is set by
    :func:`free_algebra`.
    """

    name: str
    size: int
    signature: Signature
    tables: tuple[tuple[int, ...], ...]
    element_names: tuple[str, ...] | None = None
    factors: tuple["FiniteAlgebra", ...] | None = None
    generators: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise LatcopError(f"algebra {self.name!r} must have positive size")
        if len(self.tables) != len(self.signature.symbols):
            raise LatcopError(f"algebra {self.name!r}: one table per symbol required")
        for (sym, arity), table in zip(self.signature.symbols, self.tables):
            if len(table) != self.size**arity:
                raise LatcopError(
                    f"algebra {self.name!r}: table for {sym!r} has {len(table)} "
                    f"entries, expected {self.size ** arity}"
                )
            for v in table:
                if not 0 <= v < self.size:
                    raise LatcopError(
                        f"algebra {self.name!r}: table entry {v} for {sym!r} "
                        f"outside universe 0..{self.size - 1}"
                    )
        if self.element_names is not None and len(self.element_names) != self.size:
            raise LatcopError(f"algebra {self.name!r}: wrong number of element names")

    # -- table access -------------------------------------------------------

    def table(self, symbol: str) -> tuple[int, ...]:
        return self.tables[self.signature.index(symbol)]

    def flat_index(self, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return idx

    def op(self, symbol: str, args: Sequence[int] = ()) -> int:
        for a in args:
            if not 0 <= a < self.size:
                raise LatcopError(f"argument {a} outside universe of {self.name!r}")
        return self.table(symbol)[self.flat_index(args)]

    def ops(self) -> list[tuple[str, int, tuple[int, ...]]]:
        """(symbol, arity, table) triples in signature order."""
        return [
            (sym, arity, tab)
            for (sym, arity), tab in zip(self.signature.symbols, self.tables)
        ]

    def constants(self) -> tuple[int, ...]:
        return tuple(tab[0] for (_, arity), tab in zip(self.signature.symbols, self.tables) if arity == 0)

    def element_name(self, x: int) -> str:
        if self.element_names is not None:
            return self.element_names[x]
        return str(x)

    def rename(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(
            name, self.size, self.signature, self.tables,
            self.element_names, self.factors, self.generators,
        )

    # -- tuple codec for products ------------------------------------------

    def encode(self, parts: Sequence[int]) -> int:
        """Mixed-radix encode a factor tuple; leftmost factor most significant."""
        if self.factors is None:
            raise LatcopError(f"algebra {self.name!r} has no product structure")
        if len(parts) != len(self.factors):
            raise LatcopError("wrong tuple length for product codec")
        x = 0
        for part, fac in zip(parts, self.factors):
            if not 0 <= part < fac.size:
                raise LatcopError("tuple entry outside factor universe")
            x = x * fac.size + part
        return x

    def decode(self, x: int) -> tuple[int, ...]:
        if self.factors is None:
            raise LatcopError(f"algebra {self.name!r} has no product structure")
        parts = []
        for fac in reversed(self.factors):
            parts.append(x % fac.size)
            x //= fac.size
        return tuple(reversed(parts))

    def __repr__(self) -> str:  # keep reprs short; tables can be huge
        return f"FiniteAlgebra({self.name!r}, size={self.size})"


def _check_same_signature(*algebras: FiniteAlgebra) -> None:
    sig = algebras[0].signature
    for a in algebras[1:]:
        if a.signature != sig:
            raise SignatureMismatch(
                f"{algebras[0].name!r} and {a.name!r} have different signatures"
            )


@dataclass(frozen=True)
class Homomorphism:
    """A map between same-signature algebras, stored as an image vector."""

    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    def is_valid(self) -> bool:
        """Exhaustively check that the map commutes with every operation."""
        if self.source.signature != self.target.signature:
            return False
        if len(self.map) != self.source.size:
            return False
        for (sym, arity, ta), (_, _, tb) in zip(self.source.ops(), self.target.ops()):
            for args in itertools.product(range(self.source.size), repeat=arity):
                lhs = self.map[ta[self.source.flat_index(args)]]
                rhs = tb[self.target.flat_index([self.map[a] for a in args])]
                if lhs != rhs:
                    return False
        return True

    def compose(self, inner: "Homomorphism") -> "Homomorphism":
        """self after inner."""
        if inner.target is not self.source and inner.target != self.source:
            raise LatcopError("composition mismatch")
        return Homomorphism(inner.source, self.target, tuple(self.map[v] for v in inner.map))

    def kernel(self) -> "Congruence":
        return Congruence.canonical(self.source.size, self.map)

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    def inverse(self) -> "Homomorphism":
        if not self.is_bijective:
            raise LatcopError("only bijections can be inverted")
        inv = [0] * self.target.size
        for x, y in enumerate(self.map):
            inv[y] = x
        return Homomorphism(self.target, self.source, tuple(inv))

    @staticmethod
    def identity(a: FiniteAlgebra) -> "Homomorphism":
        return Homomorphism(a, a, tuple(range(a.size)))


@dataclass(frozen=True)
class Congruence:
    """A partition of ``0..n-1`` as a block-index vector.

    Block numbering is canonical: blocks are numbered by first occurrence,
    so equal partitions compare equal as tuples.
    """

    blocks: tuple[int, ...]

    @staticmethod
    def canonical(n: int, raw: Sequence[int]) -> "Congruence":
        relabel: dict[int, int] = {}
        out = []
        for x in range(n):
            b = raw[x]
            if b not in relabel:
                relabel[b] = len(relabel)
            out.append(relabel[b])
        return Congruence(tuple(out))

    @staticmethod
    def diagonal(n: int) -> "Congruence":
        return Congruence(tuple(range(n)))

    @staticmethod
    def all(n: int) -> "Congruence":
        return Congruence((0,) * n)

    @property
    def size(self) -> int:
        return len(self.blocks)

    @property
    def num_blocks(self) -> int:
        return max(self.blocks) + 1 if self.blocks else 0

    def together(self, a: int, b: int) -> bool:
        return self.blocks[a] == self.blocks[b]

    def meet(self, other: "Congruence") -> "Congruence":
        """Intersection as relations (the common refinement)."""
        pairs = list(zip(self.blocks, other.blocks))
        relabel: dict[tuple[int, int], int] = {}
        raw = []
        for p in pairs:
            if p not in relabel:
                relabel[p] = len(relabel)
            raw.append(relabel[p])
        return Congruence(tuple(raw))

    def block_sets(self) -> tuple[frozenset[int], ...]:
        sets: list[set[int]] = [set() for _ in range(self.num_blocks)]
        for x, b in enumerate(self.blocks):
            sets[b].add(x)
        return tuple(frozenset(s) for s in sets)


# ---------------------------------------------------------------------------
# term evaluation


def eval_term(algebra: FiniteAlgebra, term: Term, args: Sequence[int]) -> int:
    """Evaluate ``term`` in ``algebra`` at the given argument tuple."""
    term.validate(algebra.signature)
    if term.max_var >= len(args):
        raise LatcopError(
            f"term uses x{term.max_var} but only {len(args)} arguments given"
        )
    for a in args:
        if not 0 <= a < algebra.size:
            raise LatcopError(f"argument {a} outside universe of {algebra.name!r}")

    def rec(t: Term) -> int:
        if t.is_var:
            return args[t.head]
        return algebra.op(t.head, [rec(s) for s in t.args])

    return rec(term)


def term_table(algebra: FiniteAlgebra, term: Term, arity: int) -> tuple[int, ...]:
    """Row-major value table of a term viewed as an ``arity``-ary operation."""
    return tuple(
        eval_term(algebra, term, args)
        for args in itertools.product(range(algebra.size), repeat=arity)
    )


# ---------------------------------------------------------------------------
# homomorphism enumeration


def _propagate(
    a: FiniteAlgebra, b: FiniteAlgebra, img: list[int], seeds: list[int] | None = None
) -> bool:
    """Close a partial map under operations; False on conflict.

    Incremental worklist: every operation instance involving a seed (or a
    derived assignment) gets derived once.  With ``seeds=None`` everything
    assigned is re-derived, which at a total assignment verifies the map is
    a homomorphism.
    """
    ops = [
        (arity, ta, tb)
        for (sym, arity, ta), (_, _2, tb) in zip(a.ops(), b.ops())
    ]
    assigned = [x for x in range(a.size) if img[x] != -1]
    queue = list(assigned) if seeds is None else list(seeds)

    def assign(x: int, v: int) -> bool:
        if img[x] == -1:
            img[x] = v
            assigned.append(x)
            queue.append(x)
            return True
        return img[x] == v

    for arity, ta, tb in ops:
        if arity == 0 and not assign(ta[0], tb[0]):
            return False
    while queue:
        x = queue.pop()
        fx = img[x]
        for arity, ta, tb in ops:
            if arity == 0:
                continue
            if arity == 1:
                if not assign(ta[x], tb[fx]):
                    return False
                continue
            if arity == 2:
                na, nb = a.size, b.size
                for y in list(assigned):
                    fy = img[y]
                    if not assign(ta[x * na + y], tb[fx * nb + fy]):
                        return False
                    if not assign(ta[y * na + x], tb[fy * nb + fx]):
                        return False
                continue
            for rest in itertools.product(list(assigned), repeat=arity - 1):
                for pos in range(arity):
                    args = rest[:pos] + (x,) + rest[pos:]
                    val = tb[b.flat_index([img[z] for z in args])]
                    if not assign(ta[a.flat_index(args)], val):
                        return False
    return True


def hom_enumerate(a: FiniteAlgebra, b: FiniteAlgebra) -> list[Homomorphism]:
    """All homomorphisms a -> b, sorted lexicographically by map vector.

    Backtracking with forward propagation: images are assigned in element
    order and the partial map is closed under all operations after each
    assignment, pruning on conflict.
    """
    _check_same_signature(a, b)
    out: list[tuple[int, ...]] = []
    img = [-1] * a.size
    if not _propagate(a, b, img):
        return []

    def search(img: list[int]) -> None:
        try:
            x = img.index(-1)
        except ValueError:
            out.append(tuple(img))
            return
        for v in range(b.size):
            trial = list(img)
            trial[x] = v
            if _propagate(a, b, trial, [x]):
                search(trial)

    search(img)
    out.sort()
    return [Homomorphism(a, b, m) for m in out]


def embeds(a: FiniteAlgebra, b: FiniteAlgebra) -> Homomorphism | None:
    """Some injective homomorphism a -> b, or None."""
    if a.signature != b.signature or a.size > b.size:
        return None
    img = [-1] * a.size

    def injective(img: list[int]) -> bool:
        seen = [v for v in img if v != -1]
        return len(seen) == len(set(seen))

    if not (_propagate(a, b, img) and injective(img)):
        return None

    def search(img: list[int]) -> tuple[int, ...] | None:
        try:
            x = img.index(-1)
        except ValueError:
            return tuple(img)
        used = {v for v in img if v != -1}
        for v in range(b.size):
            if v in used:
                continue
            trial = list(img)
            trial[x] = v
            if _propagate(a, b, trial, [x]) and injective(trial):
                found = search(trial)
                if found is not None:
                    return found
        return None

    found = search(img)
    return Homomorphism(a, b, found) if found is not None else None


# ---------------------------------------------------------------------------
# subuniverses


def subuniverse_closure(algebra: FiniteAlgebra, seed: Iterable[int]) -> frozenset[int]:
    """Least subset containing ``seed`` and all nullary values, closed under
    every table; computed by worklist saturation."""
    inside = set()
    work: list[int] = []

    def add(x: int) -> None:
        if x not in inside:
            inside.add(x)
            work.append(x)

    for x in seed:
        if not 0 <= x < algebra.size:
            raise LatcopError(f"seed element {x} outside universe")
        add(x)
    for c in algebra.constants():
        add(c)
    ops = [(arity, tab) for _, arity, tab in algebra.ops() if arity > 0]
    members: list[int] = list(inside)
    n = algebra.size
    while work:
        x = work.pop()
        for arity, tab in ops:
            if arity == 1:
                add(tab[x])
            elif arity == 2:
                # pairs with later members are handled when those are popped
                for y in list(members):
                    add(tab[x * n + y])
                    add(tab[y * n + x])
            else:
                for rest in itertools.product(list(members), repeat=arity - 1):
                    for pos in range(arity):
                        args = rest[:pos] + (x,) + rest[pos:]
                        add(tab[algebra.flat_index(args)])
        members = list(inside)
    return frozenset(inside)


def subuniverses(algebra: FiniteAlgebra) -> list[frozenset[int]]:
    """All nonempty subuniverses, by breadth-first closure extension.

    Deterministic order: sorted by (size, sorted element tuple).
    """
    base = subuniverse_closure(algebra, ())
    seen: set[frozenset[int]] = set()
    queue: list[frozenset[int]] = []
    if base:
        seen.add(base)
        queue.append(base)
    else:
        # no constants: singletons seed the search
        for x in range(algebra.size):
            s = subuniverse_closure(algebra, (x,))
            if s not in seen:
                seen.add(s)
                queue.append(s)
    while queue:
        s = queue.pop()
        for x in range(algebra.size):
            if x in s:
                continue
            t = subuniverse_closure(algebra, tuple(s) + (x,))
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def induced_subalgebra(algebra: FiniteAlgebra, elements: Iterable[int], name: str | None = None) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """The algebra induced on a subuniverse; returns it with the element list
    (position i of the result is ``elements_sorted[i]`` of the parent)."""
    elems = tuple(sorted(set(elements)))
    if not elems:
        raise LatcopError("subalgebra universe must be nonempty")
    if subuniverse_closure(algebra, elems) != frozenset(elems):
        raise LatcopError(f"{sorted(elems)} is not a subuniverse of {algebra.name!r}")
    pos = {x: i for i, x in enumerate(elems)}
    tables = []
    for sym, arity, tab in algebra.ops():
        entries = []
        for args in itertools.product(elems, repeat=arity):
            entries.append(pos[tab[algebra.flat_index(args)]])
        tables.append(tuple(entries))
    names = None
    if algebra.element_names is not None:
        names = tuple(algebra.element_names[x] for x in elems)
    if name is None:
        if len(elems) == algebra.size:
            name = algebra.name
        else:
            name = f"{algebra.name}|{{{','.join(str(x) for x in elems)}}}"
    label = name
    return (
        FiniteAlgebra(label, len(elems), algebra.signature, tuple(tables), names),
        elems,
    )


# ---------------------------------------------------------------------------
# products and quotients


def direct_product(
    algebras: Sequence[FiniteAlgebra],
    signature: Signature | None = None,
    cap: int = DEFAULT_PRODUCT_CAP,
    name: str | None = None,
) -> FiniteAlgebra:
    """Componentwise product with a mixed-radix tuple codec.

    The empty product is the one-element algebra; its signature must then be
    supplied explicitly.
    """
    if not algebras:
        if signature is None:
            raise LatcopError("empty product needs an explicit signature")
        tables = tuple((0,) * 1 for _ in signature.symbols)
        return FiniteAlgebra(name or "1", 1, signature, tables, None, ())
    _check_same_signature(*algebras)
    sig = algebras[0].signature
    if signature is not None and signature != sig:
        raise SignatureMismatch("explicit signature disagrees with factors")
    size = prod(a.size for a in algebras)
    if size > cap:
        raise CapExceeded(
            f"product would have {size} elements, cap is {cap}", required=size
        )
    factors = tuple(algebras)
    radices = [a.size for a in algebras]

    def decode(x: int) -> tuple[int, ...]:
        parts = []
        for r in reversed(radices):
            parts.append(x % r)
            x //= r
        return tuple(reversed(parts))

    def encode(parts: Sequence[int]) -> int:
        x = 0
        for p, r in zip(parts, radices):
            x = x * r + p
        return x

    all_parts = [decode(x) for x in range(size)]
    tables = []
    for k, (sym, arity) in enumerate(sig.symbols):
        ftabs = [a.tables[k] for a in algebras]
        if arity == 0:
            tables.append((encode([t[0] for t in ftabs]),))
            continue
        entries = []
        for args in itertools.product(range(size), repeat=arity):
            parts = [all_parts[a] for a in args]
            entries.append(
                encode([
                    t[f.flat_index([p[i] for p in parts])]
                    for i, (f, t) in enumerate(zip(algebras, ftabs))
                ])
            )
        tables.append(tuple(entries))
    return FiniteAlgebra(
        name or "x".join(a.name for a in algebras),
        size,
        sig,
        tuple(tables),
        None,
        factors,
    )


def _compatible_blocks(algebra: FiniteAlgebra, theta: Congruence) -> tuple[tuple[int, ...], ...] | None:
    """Block tables if theta is compatible, else None."""
    nb = theta.num_blocks
    reps = [-1] * nb
    for x, bidx in enumerate(theta.blocks):
        if reps[bidx] == -1:
            reps[bidx] = x
    tables = []
    for sym, arity, tab in algebra.ops():
        entries = {}
        for args in itertools.product(range(algebra.size), repeat=arity):
            key = tuple(theta.blocks[a] for a in args)
            res = theta.blocks[tab[algebra.flat_index(args)]]
            if key in entries and entries[key] != res:
                return None
            entries[key] = res
        flat = []
        for key in itertools.product(range(nb), repeat=arity):
            flat.append(entries[key])
        tables.append(tuple(flat))
    return tuple(tables)


def quotient(algebra: FiniteAlgebra, theta: Congruence) -> tuple[FiniteAlgebra, Homomorphism]:
    """Quotient algebra on blocks plus the natural surjection."""
    if theta.size != algebra.size:
        raise IncompatiblePartition("partition size disagrees with universe")
    tables = _compatible_blocks(algebra, theta)
    if tables is None:
        raise IncompatiblePartition(
            f"partition {theta.blocks} is not compatible with {algebra.name!r}"
        )
    q = FiniteAlgebra(f"{algebra.name}/~", theta.num_blocks, algebra.signature, tables)
    return q, Homomorphism(algebra, q, theta.blocks)


def congruence_generated(algebra: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least compatible equivalence containing ``pairs``, by saturation."""
    n = algebra.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[max(rx, ry)] = min(rx, ry)
        return True

    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise LatcopError("pair outside universe")
        union(a, b)
    ops = [(arity, tab) for _, arity, tab in algebra.ops() if arity > 0]
    changed = True
    while changed:
        changed = False
        for arity, tab in ops:
            groups: dict[tuple[int, ...], int] = {}
            for args in itertools.product(range(n), repeat=arity):
                key = tuple(find(a) for a in args)
                res = tab[algebra.flat_index(args)]
                prev = groups.get(key)
                if prev is None:
                    groups[key] = res
                elif union(prev, res):
                    changed = True
    return Congruence.canonical(n, [find(x) for x in range(n)])


# ---------------------------------------------------------------------------
# relative congruences and quasivariety membership


def relative_congruences(algebra: FiniteAlgebra, generators: Sequence[FiniteAlgebra]) -> list[Congruence]:
    """Congruences theta with algebra/theta in ISP(generators).

    Computed as the homomorphism kernels closed under pairwise meets, plus
    the one-block congruence; sorted canonically by block vector.
    """
    for m in generators:
        _check_same_signature(algebra, m)
    found: set[Congruence] = {Congruence.all(algebra.size)}
    kernels = []
    for m in generators:
        for h in hom_enumerate(algebra, m):
            k = h.kernel()
            if k not in found:
                found.add(k)
                kernels.append(k)
    frontier = list(found)
    while frontier:
        theta = frontier.pop()
        for k in kernels:
            m = theta.meet(k)
            if m not in found:
                found.add(m)
                frontier.append(m)
    return sorted(found, key=lambda c: c.blocks)


def in_isp(algebra: FiniteAlgebra, generators: Sequence[FiniteAlgebra]) -> bool:
    """True iff every pair of distinct elements is separated by a
    homomorphism into some generator."""
    for m in generators:
        _check_same_signature(algebra, m)
    if algebra.size == 1:
        return True
    cur = Congruence.all(algebra.size)
    diag = Congruence.diagonal(algebra.size)
    for m in generators:
        for h in hom_enumerate(algebra, m):
            cur = cur.meet(h.kernel())
            if cur == diag:
                return True
    return cur == diag


def is_rel_subdirectly_irreducible(algebra: FiniteAlgebra, generators: Sequence[FiniteAlgebra]) -> bool:
    """True iff the meet of all relative congruences other than the diagonal
    differs from the diagonal."""
    if not in_isp(algebra, generators):
        raise MembershipError(
            f"{algebra.name!r} is not in the quasivariety generated by "
            f"{[m.name for m in generators]}"
        )
    diag = Congruence.diagonal(algebra.size)
    rest = [c for c in relative_congruences(algebra, generators) if c != diag]
    cur = Congruence.all(algebra.size)
    for c in rest:
        cur = cur.meet(c)
    return cur != diag


# ---------------------------------------------------------------------------
# isomorphism


def _refine_colors(algebra: FiniteAlgebra, pool: dict) -> list[int]:
    """Iterated invariant coloring; the shared pool keeps color ids
    comparable across algebras.

    Binary operations contribute a multiset fingerprint accumulated as a sum
    of pair hashes: equal multisets give equal sums, so corresponding
    elements always share a color (collisions only weaken the pruning).
    """
    n = algebra.size

    def intern(key) -> int:
        if key not in pool:
            pool[key] = len(pool)
        return pool[key]

    col = [intern(("init",))] * n
    for _ in range(n):
        new = []
        for x in range(n):
            feats: list = [col[x]]
            for sym, arity, tab in algebra.ops():
                if arity == 0:
                    feats.append((sym, tab[0] == x))
                elif arity == 1:
                    feats.append((sym, col[tab[x]]))
                elif arity == 2:
                    acc = 0
                    row = set()
                    colv = set()
                    for y in range(n):
                        row.add(tab[x * n + y])
                        colv.add(tab[y * n + x])
                        acc += hash((col[y], col[tab[x * n + y]], col[tab[y * n + x]]))
                    # row/column ranks: for lattice operations these are the
                    # up-set and down-set sizes, which split free algebras
                    feats.append((sym, acc & 0xFFFFFFFFFFFF, len(row), len(colv)))
                else:
                    acc = 0
                    for args in itertools.product(range(n), repeat=arity):
                        if x in args:
                            acc += hash(
                                (
                                    tuple(col[z] for z in args),
                                    col[tab[algebra.flat_index(args)]],
                                )
                            )
                    feats.append((sym, acc & 0xFFFFFFFFFFFF))
            new.append(intern(tuple(feats)))
        if new == col:
            break
        col = new
    return col


def generating_set(algebra: FiniteAlgebra) -> tuple[int, ...]:
    """A small generating set: greedily add the element giving the largest
    closure growth (ties to the least element)."""
    gens: list[int] = []
    closed = subuniverse_closure(algebra, ())
    while len(closed) < algebra.size:
        best, best_closed = -1, closed
        for x in range(algebra.size):
            if x in closed:
                continue
            trial = subuniverse_closure(algebra, gens + [x])
            if len(trial) > len(best_closed):
                best, best_closed = x, trial
        gens.append(best)
        closed = best_closed
    return tuple(gens)


def isomorphic(a: FiniteAlgebra, b: FiniteAlgebra) -> Homomorphism | None:
    """An isomorphism a -> b if one exists, else None.

    Backtracking over a generating set with invariant-color pruning; images
    of generated elements follow by closure propagation.
    """
    if a.signature != b.signature or a.size != b.size:
        return None
    pool: dict = {}
    ca = _refine_colors(a, pool)
    cb = _refine_colors(b, pool)
    if sorted(ca) != sorted(cb):
        return None
    gens = generating_set(a)
    by_color: dict[int, list[int]] = {}
    for y in range(b.size):
        by_color.setdefault(cb[y], []).append(y)

    def finish(img: list[int]) -> Homomorphism | None:
        if -1 in img or len(set(img)) != a.size:
            return None
        return Homomorphism(a, b, tuple(img))

    def search(i: int, img: list[int]) -> Homomorphism | None:
        if i == len(gens):
            return finish(img)
        g = gens[i]
        if img[g] != -1:
            return search(i + 1, img)  # forced by propagation already
        for y in by_color.get(ca[g], ()):
            if cb[y] != ca[g]:
                continue
            trial = list(img)
            trial[g] = y
            if not _propagate(a, b, trial, [g]):
                continue
            # color consistency of everything propagation just decided
            if any(trial[x] != -1 and ca[x] != cb[trial[x]] for x in range(a.size)):
                continue
            found = search(i + 1, trial)
            if found is not None:
                return found
        return None

    img0 = [-1] * a.size
    if not _propagate(a, b, img0):
        return None
    return search(0, img0)


# ---------------------------------------------------------------------------
# free algebras


def free_algebra(
    generators: Sequence[FiniteAlgebra],
    n: int,
    cap: int = DEFAULT_PRODUCT_CAP,
) -> FiniteAlgebra:
    """Free algebra on n generators in ISP(generators).

    Realized as the subalgebra of the product over M of M^(M^n) generated by
    the n coordinate-projection tuples; only the generated elements are ever
    materialized.  The ``generators`` field of the result holds the free
    generators in order.
    """
    if not generators:
        raise LatcopError("free algebra needs at least one generating algebra")
    _check_same_signature(*generators)
    sig = generators[0].signature
    ambient = 1
    for m in generators:
        ambient *= m.size ** (m.size**n)
        if ambient > cap:
            raise CapExceeded(
                f"free-algebra ambient product needs {ambient}+ elements, cap is {cap}",
                required=ambient,
            )
    # coordinates: (generator index, assignment of the n variables)
    coords: list[tuple[int, tuple[int, ...]]] = []
    for mi, m in enumerate(generators):
        for v in itertools.product(range(m.size), repeat=n):
            coords.append((mi, v))
    gen_tuples = [tuple(v[i] for _, v in coords) for i in range(n)]

    coord_alg = [generators[mi] for mi, _ in coords]
    elems: dict[tuple[int, ...], int] = {}
    order: list[tuple[int, ...]] = []

    def add(t: tuple[int, ...]) -> None:
        if t not in elems:
            elems[t] = len(order)
            order.append(t)

    for sym, arity in sig.symbols:
        if arity == 0:
            add(tuple(m.table(sym)[0] for m in coord_alg))
    for t in gen_tuples:
        add(t)
    if not order:
        raise LatcopError("free algebra on 0 generators needs nullary operations")
    ops = [(sym, arity) for sym, arity in sig.symbols if arity > 0]
    frontier = list(order)
    while frontier:
        t = frontier.pop()
        snapshot = list(order)
        for sym, arity in ops:
            tabs = [m.table(sym) for m in coord_alg]
            if arity == 1:
                new = tuple(tab[x] for tab, x in zip(tabs, t))
                if new not in elems:
                    add(new)
                    frontier.append(new)
                continue
            for rest in itertools.product(snapshot, repeat=arity - 1):
                for pos in range(arity):
                    args = rest[:pos] + (t,) + rest[pos:]
                    new = tuple(
                        tab[m.flat_index([arg[ci] for arg in args])]
                        for ci, (tab, m) in enumerate(zip(tabs, coord_alg))
                    )
                    if new not in elems:
                        add(new)
                        frontier.append(new)
    final = sorted(order)
    index = {t: i for i, t in enumerate(final)}
    tables = []
    for sym, arity in sig.symbols:
        tabs = [m.table(sym) for m in coord_alg]
        if arity == 0:
            tables.append((index[tuple(tab[0] for tab in tabs)],))
            continue
        entries = []
        for args in itertools.product(final, repeat=arity):
            entries.append(
                index[
                    tuple(
                        tab[m.flat_index([arg[ci] for arg in args])]
                        for ci, (tab, m) in enumerate(zip(tabs, coord_alg))
                    )
                ]
            )
        tables.append(tuple(entries))
    name = f"Free({'+'.join(m.name for m in generators)},{n})"
    return FiniteAlgebra(
        name,
        len(final),
        sig,
        tuple(tables),
        None,
        None,
        tuple(index[t] for t in gen_tuples),
    )
