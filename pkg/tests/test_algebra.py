"""Core finite-algebra machinery against small known cases and oracles."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_partitions, brute_force_homs
from latcop.algebra import (
    Congruence,
    Homomorphism,
    app,
    congruence_generated,
    direct_product,
    eval_term,
    free_algebra,
    hom_enumerate,
    in_isp,
    induced_subalgebra,
    is_rel_subdirectly_irreducible,
    isomorphic,
    quotient,
    relative_congruences,
    subuniverse_closure,
    subuniverses,
    var,
)
from latcop.catalog import make
from latcop.errors import (
    CapExceeded,
    IncompatiblePartition,
    LatcopError,
    MembershipError,
    SignatureMismatch,
)

K3 = make("kleene3").algebra
DM4 = make("demorgan4").algebra
C3 = make("heyting_chain", 3).algebra
MV2 = make("mv_chain", 2).algebra
B2 = make("pseudo_b", 2).algebra


class TestEvalTerm:
    def test_kleene_negation_fixpoint(self):
        assert eval_term(K3, app("neg", var(0)), (1,)) == 1

    def test_variable(self):
        for e in range(DM4.size):
            assert eval_term(DM4, var(0), (e,)) == e

    def test_mv_join_term(self):
        t = app("oplus", app("neg", app("oplus", app("neg", var(0)), var(1))), var(1))
        assert eval_term(MV2, t, (2, 1)) == 2

    def test_unknown_symbol(self):
        with pytest.raises(LatcopError):
            eval_term(K3, app("bogus", var(0)), (0,))

    def test_argument_out_of_range(self):
        with pytest.raises(LatcopError):
            eval_term(K3, var(0), (7,))


class TestHomEnumerate:
    def test_demorgan_endos(self):
        maps = [h.map for h in hom_enumerate(DM4, DM4)]
        assert maps == [(0, 1, 2, 3), (0, 2, 1, 3)]

    def test_kleene_endos(self):
        assert [h.map for h in hom_enumerate(K3, K3)] == [(0, 1, 2)]

    def test_identity_present_everywhere(self):
        for alg in (K3, DM4, C3, MV2, B2):
            assert tuple(range(alg.size)) in {h.map for h in hom_enumerate(alg, alg)}

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            hom_enumerate(K3, C3)

    @pytest.mark.parametrize(
        "a,b",
        [
            (K3, K3),
            (K3, DM4),
            (DM4, K3),
            (DM4, DM4),
            (C3, C3),
            (C3, make("heyting_chain", 4).algebra),
            (make("heyting_chain", 4).algebra, C3),
            (B2, make("pseudo_b", 1).algebra),
            (make("pseudo_b", 1).algebra, B2),
            (MV2, make("mv_chain", 6).algebra),
        ],
    )
    def test_matches_brute_force(self, a, b):
        assert [h.map for h in hom_enumerate(a, b)] == brute_force_homs(a, b)
        for h in hom_enumerate(a, b):
            assert h.is_valid()


class TestSubuniverseClosure:
    def test_demorgan_empty_seed(self):
        assert subuniverse_closure(DM4, ()) == frozenset({0, 3})

    def test_kleene_fixpoint_generates_all(self):
        assert subuniverse_closure(K3, (1,)) == frozenset({0, 1, 2})

    def test_heyting_middle(self):
        assert subuniverse_closure(C3, (1,)) == frozenset({0, 1, 2})

    @settings(max_examples=60, deadline=None)
    @given(st.sets(st.integers(min_value=0, max_value=4), max_size=5))
    def test_idempotent(self, seed):
        seed = {x for x in seed if x < B2.size}
        once = subuniverse_closure(B2, seed)
        assert subuniverse_closure(B2, once) == once

    def test_subuniverses_listing(self):
        subs = subuniverses(K3)
        assert frozenset({0, 2}) in subs and frozenset({0, 1, 2}) in subs
        assert all(subuniverse_closure(K3, s) == s for s in subs)


class TestProductQuotient:
    def test_product_sizes(self):
        assert direct_product([K3, K3]).size == 9

    def test_empty_product(self):
        one = direct_product([], signature=K3.signature)
        assert one.size == 1

    def test_componentwise_negation(self):
        p = direct_product([DM4, K3])
        x = p.encode((1, 2))
        assert p.decode(p.op("neg", [x])) == (1, 0)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            direct_product([B2] * 10, cap=10**4)

    def test_quotient_by_diagonal(self):
        q, nat = quotient(K3, Congruence.diagonal(3))
        assert q.size == 3 and isomorphic(q, K3) is not None
        assert nat.is_valid()

    def test_quotient_by_all(self):
        q, _ = quotient(K3, Congruence.all(3))
        assert q.size == 1

    def test_incompatible_partition_rejected(self):
        glue_a_top = Congruence.canonical(3, [0, 1, 1])
        with pytest.raises(IncompatiblePartition):
            quotient(K3, glue_a_top)


class TestCongruenceGenerated:
    def test_empty_is_diagonal(self):
        assert congruence_generated(K3, []) == Congruence.diagonal(3)

    @pytest.mark.parametrize("alg", [K3, DM4, C3, B2])
    def test_bounds_collapse_everything(self, alg):
        bot = alg.op("zero") if "zero" in alg.signature else 0
        top = alg.op("one")
        theta = congruence_generated(alg, [(bot, top)])
        assert theta == Congruence.all(alg.size)

    def test_heyting_principal(self):
        theta = congruence_generated(C3, [(1, 2)])
        assert theta.block_sets() == (frozenset({0}), frozenset({1, 2}))

    @pytest.mark.parametrize("alg", [K3, C3, DM4, make("mv_chain", 3).algebra])
    def test_least_among_compatible(self, alg):
        pairs = [(0, 1)]
        theta = congruence_generated(alg, pairs)
        best = None
        for raw in all_partitions(alg.size):
            cong = Congruence(raw)
            if not cong.together(0, 1):
                continue
            try:
                quotient(alg, cong)
            except IncompatiblePartition:
                continue
            if best is None or cong.num_blocks > best.num_blocks:
                best = cong
        assert best == theta


class TestRelativeCongruences:
    def test_kleene_self(self):
        cons = relative_congruences(K3, [K3])
        assert set(cons) == {Congruence.diagonal(3), Congruence.all(3)}

    def test_demorgan_relative_to_kleene(self):
        cons = relative_congruences(DM4, [K3])
        assert Congruence.diagonal(4) not in cons

    def test_separation_gives_diagonal(self):
        assert Congruence.diagonal(4) in relative_congruences(DM4, [DM4])

    def test_in_isp_iff_diagonal(self):
        for a, ms in [(K3, [K3]), (DM4, [K3]), (K3, [DM4]), (B2, [B2])]:
            assert in_isp(a, ms) == (
                Congruence.diagonal(a.size) in relative_congruences(a, ms)
            )


class TestRelSubdirectlyIrreducible:
    def test_kleene_is_si(self):
        assert is_rel_subdirectly_irreducible(K3, [K3])

    def test_two_element_is_si(self):
        b2 = make("bool2").algebra
        assert is_rel_subdirectly_irreducible(b2, [b2])

    def test_square_is_not_si(self):
        sq = direct_product([K3, K3])
        assert not is_rel_subdirectly_irreducible(sq, [K3])

    def test_membership_required(self):
        with pytest.raises(MembershipError):
            is_rel_subdirectly_irreducible(DM4, [K3])


class TestInIsp:
    def test_self(self):
        assert in_isp(DM4, [DM4])

    def test_demorgan_not_in_kleene(self):
        assert not in_isp(DM4, [K3])

    def test_kleene_in_demorgan(self):
        assert in_isp(K3, [DM4])


class TestIsomorphic:
    def test_identity(self):
        iso = isomorphic(DM4, DM4)
        assert iso is not None and iso.is_valid() and iso.is_bijective

    def test_different_signatures(self):
        assert isomorphic(K3, C3) is None

    def test_relabeled(self):
        # swap the roles of a and b in the De Morgan diamond
        perm = (0, 2, 1, 3)
        tables = []
        for (sym, arity), tab in zip(DM4.signature.symbols, DM4.tables):
            entries = []
            for args in itertools.product(range(4), repeat=arity):
                pre = [perm.index(x) for x in args]
                entries.append(perm[tab[DM4.flat_index(pre)]])
            tables.append(tuple(entries))
        relabeled = DM4.__class__(
            "dm_relabeled", 4, DM4.signature, tuple(tables)
        )
        iso = isomorphic(DM4, relabeled)
        assert iso is not None and iso.is_valid() and iso.is_bijective

    def test_non_isomorphic_same_size(self):
        assert isomorphic(make("mv_chain", 3).algebra, make("mv_chain", 3).algebra) is not None
        assert isomorphic(make("heyting_chain", 3).algebra, C3) is not None


class TestFreeAlgebra:
    def test_kleene_rank1(self):
        f = free_algebra([K3], 1)
        assert f.size == 6 and f.generators is not None

    def test_demorgan_rank1(self):
        assert free_algebra([DM4], 1).size == 6

    def test_rank0_two_elements(self):
        for alg in (K3, DM4, C3):
            assert free_algebra([alg], 0).size == 2

    def test_cap(self):
        with pytest.raises(CapExceeded):
            free_algebra([DM4], 2)  # ambient 4^16 over the default cap

    @pytest.mark.parametrize("gen", [K3, DM4, C3, MV2])
    def test_hom_count_equals_generator_size(self, gen):
        f = free_algebra([gen], 1, cap=10**9)
        assert len(hom_enumerate(f, gen)) == gen.size

    def test_multi_generator_free(self):
        # freeness against both generating algebras at once
        f = free_algebra([K3, DM4], 1, cap=10**9)
        assert len(hom_enumerate(f, K3)) == K3.size
        assert len(hom_enumerate(f, DM4)) == DM4.size
        assert in_isp(f, [K3, DM4])

    @pytest.mark.parametrize("gen,n", [(K3, 1), (K3, 2), (DM4, 1), (C3, 2), (MV2, 1)])
    def test_universal_property(self, gen, n):
        f = free_algebra([gen], n, cap=10**12)
        homs = hom_enumerate(f, gen)
        gens = f.generators
        by_assignment = {}
        for h in homs:
            key = tuple(h.map[g] for g in gens)
            by_assignment.setdefault(key, []).append(h)
        # exactly one extension per assignment of the free generators
        assert len(by_assignment) == gen.size**n
        assert all(len(v) == 1 for v in by_assignment.values())


class TestHomomorphismBasics:
    def test_kernel_and_compose(self):
        h = hom_enumerate(DM4, DM4)[1]  # the automorphism swapping a and b
        assert h.kernel() == Congruence.diagonal(4)
        assert h.compose(h).map == tuple(range(4))
        assert h.inverse().map == h.map

    def test_induced_subalgebra(self):
        sub, elems = induced_subalgebra(DM4, {0, 1, 3})
        assert elems == (0, 1, 3)
        assert isomorphic(sub, K3) is not None
