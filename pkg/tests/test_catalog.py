"""Catalog constructors and the classification-table reproduction."""

import pytest

from conftest import report_for
from latcop.algebra import embeds, hom_enumerate
from latcop.algfile import export_entry, parse_algebra_file
from latcop.catalog import UNVERIFIED_TABLE_ROWS, make, make_id, table1_suite
from latcop.distlat import d_reduct
from latcop.errors import LatcopError
from latcop.piggyback import carrier_from_filter, sep_condition


class TestConstructors:
    def test_heyting_chain_implication(self):
        c3 = make("heyting_chain", 3).algebra
        assert c3.op("imp", (1, 0)) == 0
        assert c3.op("imp", (0, 1)) == 2
        assert c3.element_names == ("0", "d", "1")

    def test_pre_moisil_L0_tables(self):
        e = make("pre_moisil_L0", 2).algebra
        assert e.size == 4
        # e_1(j, k) is the top (1,1) exactly when k >= 1
        top = 3
        for j in range(2):
            for k in range(2):
                val = e.op("e1", (j * 2 + k,))
                assert val == (top if k >= 1 else 0)

    def test_mv_chain_1_is_boolean_like(self):
        entry = make("mv_chain", 1)
        lat = d_reduct(entry.algebra, entry.spec)
        assert lat.size == 2 and lat.bot == 0 and lat.top == 1

    def test_mv_chain_operations(self):
        l2 = make("mv_chain", 2).algebra
        assert l2.op("oplus", (1, 1)) == 2
        assert l2.op("neg", (0,)) == 2

    def test_moisil_tables(self):
        m3 = make("moisil_L", 3).algebra
        assert m3.table("d1") == (0, 0, 2)
        assert m3.table("d2") == (0, 2, 2)
        assert m3.table("dbar1") == (2, 2, 0)

    def test_pseudo_b_star(self):
        b2 = make("pseudo_b", 2).algebra
        # star is the largest y with x & y = bottom
        for x in range(b2.size):
            star = b2.op("star", (x,))
            assert b2.op("meet", (x, star)) == 0
            for y in range(b2.size):
                if b2.op("meet", (x, y)) == 0:
                    assert b2.op("join", (y, star)) == star  # y <= star

    def test_invalid_parameters(self):
        with pytest.raises(LatcopError):
            make("heyting_chain", 1)
        with pytest.raises(LatcopError):
            make("mv_chain", 0)
        with pytest.raises(LatcopError):
            make("nope")

    def test_make_id_forms(self):
        assert make_id("kleene3").key == "kleene3"
        assert make_id("mv_chain(3)").key == "mv_chain(3)"
        assert make_id("mv_chain:3").key == "mv_chain(3)"

    def test_every_entry_reduct_validates(self):
        for entry, _ in table1_suite():
            d_reduct(entry.algebra, entry.spec)  # raises on failure
            if entry.carriers:
                for filt in entry.carriers:
                    carrier_from_filter(entry.algebra, entry.spec, filt)


class TestTable1:
    def test_suite_is_the_table(self):
        rows = {e.key: exp for e, exp in table1_suite()}
        assert rows["demorgan4"] == (True, True)
        assert rows["kleene3"] == (False, True)
        assert rows["pseudo_b(1)"] == (True, True)
        assert rows["pseudo_b(2)"] == (True, False)
        assert rows["heyting_chain(4)"] == (True, False)
        assert rows["mv_chain(4)"] == (False, True)
        assert rows["mv_chain(6)"] == (False, False)
        assert rows["moisil_M(3)"] == (False, True)
        assert rows["pre_moisil_M0(2)"] == (True, True)

    def test_unverified_rows_documented(self):
        assert any("D_pq" in r for r in UNVERIFIED_TABLE_ROWS)
        assert any("Heyting" in r for r in UNVERIFIED_TABLE_ROWS)

    def test_full_reproduction(self):
        for entry, expected in table1_suite():
            rep = report_for(entry.constructor, *entry.params)
            assert (rep.verdict_E, rep.verdict_S) == expected, entry.key


class TestMVEmbeddings:
    def test_divisibility_rule(self):
        for m in range(1, 7):
            for n in range(1, 7):
                a = make("mv_chain", m).algebra
                b = make("mv_chain", n).algebra
                assert (embeds(a, b) is not None) == (n % m == 0), (m, n)


class TestPreMoisilWitnesses:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_pre_moisil_sep_with_first_projection(self, n):
        entry = make("pre_moisil_L0", n)
        w = carrier_from_filter(entry.algebra, entry.spec, entry.carriers[0])
        assert sep_condition([entry.algebra], [w]).holds

    def test_pre_moisil_M0_sep(self):
        entry = make("pre_moisil_M0", 2)
        w = carrier_from_filter(entry.algebra, entry.spec, entry.carriers[0])
        assert sep_condition([entry.algebra], [w]).holds

    @pytest.mark.parametrize("n", [2, 3])
    def test_separating_homs_exist(self, n):
        # the level-threshold maps are endomorphisms, and together with the
        # first-projection carrier they separate every pair
        entry = make("pre_moisil_L0", n)
        endos = {h.map for h in hom_enumerate(entry.algebra, entry.algebra)}
        for i in range(1, n):
            eta = tuple(
                (0 if k < i else 1) * n + k
                for j in range(2)
                for k in range(n)
            )
            assert eta in endos, f"eta_{i}"
        assert tuple(range(2 * n)) in endos


class TestExportRoundTrip:
    @pytest.mark.parametrize(
        "key,params",
        [("demorgan4", ()), ("kleene3", ()), ("mv_chain", (2,)),
         ("pre_moisil_L0", (2,)), ("pseudo_b", (2,))],
    )
    def test_round_trip(self, key, params):
        entry = make(key, *params)
        text = export_entry(entry)
        parsed = parse_algebra_file(text)
        assert len(parsed.algebras) == 1
        pa = parsed.algebras[0]
        assert pa.algebra == entry.algebra
        assert pa.reduct == entry.spec
        assert pa.carriers == (entry.carriers or ())
