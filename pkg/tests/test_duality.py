"""Hom-functors, coproducts, reconstruction, iota, and the reflector."""

import pytest

from conftest import ego_for, report_for
from latcop.algebra import direct_product, free_algebra, isomorphic
from latcop.catalog import make
from latcop.distlat import chain as chain_poset
from latcop.distlat import d_reduct, poset_isomorphic, prime_filters, priestley_dual
from latcop.duality import (
    coproduct,
    e_functor,
    evaluation_check,
    iota_check,
    lambda_map,
    natural_dual,
    reconstruction_order_poset,
    reflector,
    reveng_priestley,
    structure_product,
)
from latcop.errors import MembershipError

DM = make("demorgan4")
K3 = make("kleene3")
C3 = make("heyting_chain", 3)


class TestNaturalDual:
    def test_demorgan_two_points(self):
        x = natural_dual(DM.algebra, ego_for("demorgan4"))
        assert len(x.points[0]) == 2
        # the lifted relation relates each endomorphism to itself only
        assert x.relations[0] == frozenset({(0, 0), (1, 1)})

    def test_trivial_algebra_has_no_points(self):
        one = direct_product([], signature=DM.algebra.signature, name="one")
        x = natural_dual(one, ego_for("demorgan4"))
        assert len(x.points[0]) == 0

    def test_free_dual_has_generator_count_points(self):
        f1 = free_algebra([K3.algebra], 1)
        x = natural_dual(f1, ego_for("kleene3"))
        assert len(x.points[0]) == 3

    def test_membership_checked(self):
        with pytest.raises(MembershipError):
            natural_dual(DM.algebra, ego_for("kleene3"))


class TestStructureProduct:
    def test_unary_product_keeps_counts(self):
        x = natural_dual(DM.algebra, ego_for("demorgan4"))
        p = structure_product([x])
        assert len(p.points[0]) == 2

    def test_two_copies(self):
        x = natural_dual(DM.algebra, ego_for("demorgan4"))
        p = structure_product([x, x])
        assert len(p.points[0]) == 4

    def test_empty_family_one_point_per_sort(self):
        ego = ego_for("kleene3")
        p = structure_product([], ego=ego)
        assert [len(pts) for pts in p.points] == [1]
        assert all(rel == frozenset({(0, 0)}) for rel in p.relations)


class TestEFunctor:
    def test_ego_as_structure_is_the_rank1_free_algebra(self):
        # the alter ego viewed as a one-sorted structure is the dual of the
        # free algebra on one generator; E recovers that algebra, and the
        # identity point is the evaluation at the free generator
        from latcop.duality import MultisortedStructure

        for key in ("demorgan4", "bool2"):
            ego = ego_for(key)
            m = ego.sorts[0]
            x = MultisortedStructure(
                ego,
                (tuple(range(m.size)),),
                tuple(frozenset(r.pairs) for r in ego.relations),
                tuple(g.map for g in ego.operations),
            )
            res = e_functor(x)
            assert tuple(range(m.size)) in res.morphisms
            free1 = free_algebra([m], 1)
            assert res.algebra.size == free1.size
            assert isomorphic(res.algebra, free1) is not None

    def test_e_of_dual_recovers_size(self):
        for key, params in [("demorgan4", ()), ("kleene3", ()), ("heyting_chain", (3,))]:
            entry = make(key, *params)
            x = natural_dual(entry.algebra, ego_for(key, *params))
            assert e_functor(x).algebra.size == entry.algebra.size

    def test_empty_structure_gives_one_element(self):
        one = direct_product([], signature=DM.algebra.signature, name="one")
        x = natural_dual(one, ego_for("demorgan4"))
        res = e_functor(x)
        assert res.algebra.size == 1

    def test_evaluations_are_morphisms(self):
        chk = evaluation_check(DM.algebra, ego_for("demorgan4"))
        assert chk.is_isomorphism


class TestEvaluationIso:
    @pytest.mark.parametrize(
        "key,params",
        [
            ("demorgan4", ()), ("kleene3", ()), ("bool2", ()),
            ("heyting_chain", (3,)), ("heyting_chain", (4,)),
            ("pseudo_b", (2,)), ("mv_chain", (2,)), ("mv_chain", (4,)),
            ("moisil_L", (3,)), ("moisil_M", (3,)),
            ("pre_moisil_L0", (2,)), ("pre_moisil_M0", (2,)),
        ],
    )
    def test_catalog(self, key, params):
        entry = make(key, *params)
        assert evaluation_check(entry.algebra, ego_for(key, *params)).is_isomorphism


class TestCoproduct:
    def test_demorgan_square(self):
        res = coproduct([DM.algebra], DM.spec, None, [DM.algebra, DM.algebra])
        assert res.algebra.size == 16
        assert all(eps.is_valid() and eps.is_injective for eps in res.injections)

    def test_unary_coproduct_is_identity_like(self):
        res = coproduct([DM.algebra], DM.spec, None, [DM.algebra])
        assert isomorphic(res.algebra, DM.algebra) is not None

    def test_empty_coproduct_is_initial(self):
        res = coproduct([K3.algebra], K3.spec, None, [])
        assert res.algebra.size == 2  # the free algebra on no generators

    def test_kleene_selfcoproduct_collapses(self):
        res = coproduct([K3.algebra], K3.spec, None, [K3.algebra, K3.algebra])
        assert isomorphic(res.algebra, K3.algebra) is not None

    def test_free_coproduct_is_free(self):
        f1 = free_algebra([K3.algebra], 1)
        f2 = free_algebra([K3.algebra], 2)
        res = coproduct([K3.algebra], K3.spec, None, [f1, f1])
        assert isomorphic(res.algebra, f2) is not None
        assert all(eps.is_injective for eps in res.injections)

    def test_goedel_square(self):
        res = coproduct([C3.algebra], C3.spec, None, [C3.algebra, C3.algebra])
        assert res.algebra.size == 9
        # E holds in this class: injections embed (free products exist)
        assert all(eps.is_injective for eps in res.injections)

    def test_free_product_witness_where_E_holds(self):
        for key, params in [("pre_moisil_L0", (2,)), ("pseudo_b", (2,))]:
            entry = make(key, *params)
            res = coproduct(
                [entry.algebra], entry.spec, None, [entry.algebra, entry.algebra]
            )
            assert all(eps.is_injective for eps in res.injections)

    def test_visit_cap(self):
        from latcop.errors import CapExceeded

        f1 = free_algebra([K3.algebra], 1)
        with pytest.raises(CapExceeded):
            coproduct([K3.algebra], K3.spec, None, [f1, f1], visit_cap=5)

    def test_points_cap(self):
        from latcop.errors import CapExceeded

        f1 = free_algebra([K3.algebra], 1)
        with pytest.raises(CapExceeded):
            coproduct([K3.algebra], K3.spec, None, [f1, f1, f1, f1], points_cap=50)


class TestRevEng:
    @pytest.mark.parametrize(
        "key,params",
        [
            ("demorgan4", ()), ("kleene3", ()), ("bool2", ()),
            ("heyting_chain", (3,)), ("pseudo_b", (2,)), ("mv_chain", (3,)),
            ("moisil_L", (3,)), ("pre_moisil_M0", (2,)),
        ],
    )
    def test_quotient_matches_priestley_dual(self, key, params):
        entry = make(key, *params)
        res = reveng_priestley(entry.algebra, ego_for(key, *params))
        assert res.isomorphism is not None

    def test_kleene_shape(self):
        res = reveng_priestley(K3.algebra, ego_for("kleene3"))
        assert res.preorder.size == 2
        # (id, w2) strictly below (id, w1): a two-chain
        assert poset_isomorphic(res.quotient, chain_poset(2)) is not None

    def test_single_relation_orders_the_dual(self):
        # single sort, single carrier, unique relation: the lifted relation
        # itself orders the dual
        for key, params in [
            ("demorgan4", ()), ("bool2", ()), ("pseudo_b", (1,)),
            ("mv_chain", (1,)), ("pre_moisil_L0", (2,)),
        ]:
            entry = make(key, *params)
            ego = ego_for(key, *params)
            poset = reconstruction_order_poset(entry.algebra, ego)
            expected = priestley_dual(d_reduct(entry.algebra, entry.spec))
            assert poset_isomorphic(poset, expected) is not None


class TestIota:
    def test_demorgan_pair(self):
        chk = iota_check([DM.algebra], DM.spec, None, [DM.algebra, DM.algebra])
        assert chk.surjective and chk.order_embedding
        assert chk.coproduct_size == 16
        rep = report_for("demorgan4")
        assert (chk.surjective, chk.order_embedding) == (
            rep.verdict_E, rep.verdict_S,
        )

    def test_kleene_pair(self):
        chk = iota_check([K3.algebra], K3.spec, None, [K3.algebra, K3.algebra])
        assert chk.order_embedding and not chk.surjective
        rep = report_for("kleene3")
        assert (chk.surjective, chk.order_embedding) == (
            rep.verdict_E, rep.verdict_S,
        )

    def test_kleene_image_matches_lambda_formula(self):
        chk = iota_check([K3.algebra], K3.spec, None, [K3.algebra, K3.algebra])
        lam = lambda_map(K3.algebra, ego_for("kleene3"))
        expected = tuple(
            sorted(
                (i, j)
                for i in range(len(lam))
                for j in range(len(lam))
                if lam[i][1] & lam[j][1]
            )
        )
        assert chk.image == expected

    def test_goedel_pair(self):
        chk = iota_check([C3.algebra], C3.spec, None, [C3.algebra, C3.algebra])
        assert chk.surjective and not chk.order_embedding
        rep = report_for("heyting_chain", 3)
        assert (chk.surjective, chk.order_embedding) == (
            rep.verdict_E, rep.verdict_S,
        )

    def test_singleton_family(self):
        chk = iota_check([K3.algebra], K3.spec, None, [K3.algebra])
        assert chk.surjective and chk.order_embedding

    def test_mv_pair_agrees_with_classifier(self):
        mv2 = make("mv_chain", 2)
        chk = iota_check([mv2.algebra], mv2.spec, None, [mv2.algebra, mv2.algebra])
        rep = report_for("mv_chain", 2)
        assert (chk.surjective, chk.order_embedding) == (
            rep.verdict_E, rep.verdict_S,
        )

    @pytest.mark.parametrize(
        "key,params",
        [("demorgan4", ()), ("kleene3", ()), ("heyting_chain", (3,)),
         ("mv_chain", (2,)), ("mv_chain", (3,))],
    )
    def test_image_equals_carrier_intersection_formula(self, key, params):
        # the range of the canonical map is exactly the tuples whose carrier
        # sets intersect
        entry = make(key, *params)
        ego = ego_for(key, *params)
        chk = iota_check([entry.algebra], entry.spec, None,
                         [entry.algebra, entry.algebra])
        lam = lambda_map(entry.algebra, ego)
        formula = tuple(
            sorted(
                (i, j)
                for i in range(len(lam))
                for j in range(len(lam))
                if lam[i][1] & lam[j][1]
            )
        )
        assert chk.image == formula


class TestLambda:
    def test_kleene_values(self):
        lam = lambda_map(K3.algebra, ego_for("kleene3"))
        by_filter = {f.elements: ws for f, ws in lam}
        assert by_filter == {
            frozenset({1, 2}): frozenset({0}),
            frozenset({2}): frozenset({1}),
        }

    def test_demorgan_singleton_omega(self):
        lam = lambda_map(DM.algebra, ego_for("demorgan4"))
        assert all(ws == frozenset({0}) for _, ws in lam)


class TestFactorization:
    @pytest.mark.parametrize(
        "key,params",
        [("demorgan4", ()), ("kleene3", ()), ("heyting_chain", (3,))],
    )
    def test_iota_after_phi_equals_psi(self, key, params):
        # compute iota on filters, then check it factors the pointwise map
        entry = make(key, *params)
        ego = ego_for(key, *params)
        family = [entry.algebra, entry.algebra]
        cop = coproduct([entry.algebra], entry.spec, None, family)
        chk = iota_check([entry.algebra], entry.spec, None, family)
        uc = d_reduct(cop.algebra, entry.spec)
        pf_c = {f.elements: i for i, f in enumerate(prime_filters(uc))}
        pf_b = prime_filters(d_reduct(entry.algebra, entry.spec))
        pf_b_index = {f.elements: i for i, f in enumerate(pf_b)}
        dual_c = natural_dual(cop.algebra, ego)
        for wi, w in enumerate(ego.carriers):
            s = ego.sort_index(w.sort)
            for x in dual_c.points[s]:
                # Phi: (x, w) -> the filter pulled back through x
                filt = frozenset(
                    a for a in range(cop.algebra.size) if x.map[a] in w.elements
                )
                iota_of_phi = chk.tuples[pf_c[filt]]
                # Psi: componentwise pullbacks through the injections
                psi = tuple(
                    pf_b_index[
                        frozenset(
                            b
                            for b in range(entry.algebra.size)
                            if x.map[eps.map[b]] in w.elements
                        )
                    ]
                    for eps in cop.injections
                )
                assert iota_of_phi == psi


class TestReflector:
    def test_identity_when_member(self):
        res = reflector(K3.algebra, [K3.algebra])
        assert res.algebra.size == 3 and not res.collapsed

    def test_demorgan_to_kleene_collapses(self):
        # no De Morgan homomorphisms from the diamond into the chain
        res = reflector(DM.algebra, [K3.algebra])
        assert res.algebra.size == 1 and res.collapsed

    def test_kleene_coproduct_via_demorgan_envelope(self):
        cop_dm = coproduct([DM.algebra], DM.spec, None, [K3.algebra, K3.algebra])
        assert cop_dm.algebra.size == 6
        res = reflector(cop_dm.algebra, [K3.algebra])
        native = coproduct([K3.algebra], K3.spec, None, [K3.algebra, K3.algebra])
        assert isomorphic(res.algebra, native.algebra) is not None
