"""Shared fixtures and independent brute-force oracles.

The oracles deliberately avoid the code paths they check: homomorphisms by
filtering all maps, maximal subuniverses by subset enumeration, least
congruences by scanning all partitions.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import pytest

from latcop.algebra import FiniteAlgebra
from latcop.catalog import make
from latcop.classify import flowchart_classify
from latcop.piggyback import build_alter_ego


@lru_cache(maxsize=None)
def ego_for(constructor: str, *params):
    entry = make(constructor, *params)
    return build_alter_ego([entry.algebra], entry.spec)


@lru_cache(maxsize=None)
def report_for(constructor: str, *params):
    entry = make(constructor, *params)
    return flowchart_classify([entry.algebra], entry.spec)


@pytest.fixture(scope="session")
def catalog():
    return make


@pytest.fixture(scope="session")
def ego():
    return ego_for


@pytest.fixture(scope="session")
def classified():
    return report_for


# ---------------------------------------------------------------------------
# oracles


def brute_force_homs(a: FiniteAlgebra, b: FiniteAlgebra) -> list[tuple[int, ...]]:
    """All homomorphisms by filtering all |B|^|A| maps (vectorized)."""
    n, m = a.size, b.size
    total = m**n
    assert total <= 10**6, "oracle bound exceeded"
    maps = np.zeros((total, n), dtype=np.int64)
    idx = np.arange(total)
    for pos in range(n - 1, -1, -1):
        maps[:, pos] = idx % m
        idx //= m
    valid = np.ones(total, dtype=bool)
    for (sym, arity, ta), (_, _a, tb) in zip(a.ops(), b.ops()):
        if arity == 0:
            valid &= maps[:, ta[0]] == tb[0]
        elif arity == 1:
            tbv = np.asarray(tb)
            for x in range(n):
                valid &= maps[:, ta[x]] == tbv[maps[:, x]]
        elif arity == 2:
            tbv = np.asarray(tb).reshape(m, m)
            for x in range(n):
                for y in range(n):
                    valid &= maps[:, ta[x * n + y]] == tbv[maps[:, x], maps[:, y]]
        else:  # pragma: no cover - no catalog op has arity > 2
            tbv = np.asarray(tb)
            for args in itertools.product(range(n), repeat=arity):
                fa = ta[a.flat_index(args)]
                bidx = np.zeros(total, dtype=np.int64)
                for z in args:
                    bidx = bidx * m + maps[:, z]
                valid &= maps[:, fa] == tbv[bidx]
    return sorted(tuple(int(v) for v in maps[i]) for i in np.flatnonzero(valid))


def is_closed_subset(p: FiniteAlgebra, subset: frozenset[int]) -> bool:
    for sym, arity, tab in p.ops():
        if arity == 0:
            if tab[0] not in subset:
                return False
            continue
        for args in itertools.product(subset, repeat=arity):
            if tab[p.flat_index(args)] not in subset:
                return False
    return True


def brute_force_maximal_subuniverses(
    p: FiniteAlgebra, allowed: set[int]
) -> list[frozenset[int]]:
    """Exhaustive subset enumeration; only for |allowed| small."""
    elems = sorted(allowed)
    consts = set(p.constants())
    closed: list[frozenset[int]] = []
    optional = [x for x in elems if x not in consts]
    if not consts <= allowed:
        return []
    for mask in range(1 << len(optional)):
        s = set(consts)
        for i, x in enumerate(optional):
            if mask >> i & 1:
                s.add(x)
        fs = frozenset(s)
        if fs and is_closed_subset(p, fs):
            closed.append(fs)
    maximal = [s for s in closed if not any(s < t for t in closed)]
    return sorted(set(maximal), key=sorted)


def all_partitions(n: int):
    """All partitions of 0..n-1 as canonical block-index vectors."""

    def rec(i: int, blocks: list[int], nb: int):
        if i == n:
            yield tuple(blocks)
            return
        for b in range(nb + 1):
            blocks.append(b)
            yield from rec(i + 1, blocks, nb + 1 if b == nb else nb)
            blocks.pop()

    yield from rec(0, [], 0)
