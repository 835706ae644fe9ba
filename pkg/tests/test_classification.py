import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_value, harvey_ok, table_instances
from surfembed.classification import (
    BoundKind,
    MapDatum,
    dgf,
    dhat_bounds,
    enlarge,
    family_datum,
    family_match,
    lower_bound,
    seq_bound,
    table_matches,
    upper_bound,
)
from surfembed.errors import InvalidDatum, NotCovered, OutOfRange
from surfembed.surfaces import OrbifoldSignature, rh_euler_defect


def datum(g, n, sig):
    return MapDatum(g, n, OrbifoldSignature.parse(sig))


class TestDatum:
    def test_rh_failure(self):
        with pytest.raises(InvalidDatum):
            datum(2, 6, "(0:6,6,2)")

    def test_index_must_divide(self):
        with pytest.raises(InvalidDatum):
            datum(1, 6, "(0:6,4,2)")

    def test_string_signature(self):
        assert MapDatum(1, 4, "(0:4,2,4)").signature == OrbifoldSignature(0, (4, 4, 2))
        assert MapDatum(2, 1, "(2:)").free


class TestLower:
    def test_three_points(self):
        r = lower_bound(datum(1, 4, "(0:4,4,2)"))
        assert r.value == 4 and r.kind is BoundKind.LOWER
        assert "rule:three-branch-points" in r.provenance

    def test_equal_indices(self):
        r = lower_bound(datum(1, 3, "(0:3,3,3)"))
        assert r.value == 5 and r.provenance == ("rule:equal-indices",)

    def test_weakened_divisibility(self):
        r = lower_bound(datum(4, 12, "(0:12,6,4)"))
        assert r.value == 6 and "rule:prime-power-divisibility" in r.provenance
        # neither coprime nor the ratio rule applies here
        assert "rule:coprime-indices" not in r.provenance

    def test_large_ratio(self):
        r = lower_bound(datum(3, 9, "(0:9,9,3)"))
        assert r.value == 6 and "rule:large-index-ratio" in r.provenance

    def test_coprime(self):
        r = lower_bound(datum(1, 6, "(0:6,3,2)"))
        assert r.value == 6 and "rule:coprime-indices" in r.provenance

    def test_sequence_rule(self):
        assert lower_bound(datum(5, 8, "(0:8,8,4,2)")).value == 6
        assert lower_bound(datum(46, 27, "(0:27,27,27,9,9,3)")).value == 7

    def test_baselines(self):
        assert lower_bound(datum(0, 5, "(0:5,5)")).value == 2
        assert lower_bound(datum(2, 6, "(0:3,3,2,2)")).value == 3
        assert lower_bound(datum(3, 2, "(2:)")).value == 3

    def test_provenance_lists_all_maximal_rules(self):
        r = lower_bound(datum(1, 4, "(0:4,4,2)"))
        assert set(r.provenance) == {"rule:three-branch-points", "rule:nested-fixed-sets(p=2,k=2)"}


class TestSeq:
    def test_examples(self):
        sb = seq_bound(OrbifoldSignature.parse("(0:8,8,4,2)"), 8, 2)
        assert (sb.k, sb.bound) == (3, 6)
        sb = seq_bound(OrbifoldSignature.parse("(0:6,3,2)"), 6, 2)
        assert (sb.k, sb.bound) == (1, 2)
        sb = seq_bound(OrbifoldSignature.parse("(0:27,27,27,9,9,3)"), 27, 3)
        assert (sb.k, sb.bound) == (3, 7)

    @given(
        st.sampled_from([2, 3, 5]),
        st.integers(1, 5),
        st.lists(st.integers(0, 5), min_size=1, max_size=5),
        st.integers(1, 5),
    )
    def test_new_level_never_decreases(self, p, extra, exps, new_exp):
        n = p ** max(exps + [new_exp, extra])
        sig = OrbifoldSignature(0, tuple(p**e for e in exps))
        more = OrbifoldSignature(0, sig.indices + (p**new_exp,))
        assert seq_bound(more, n, p).bound >= seq_bound(sig, n, p).bound


class TestUpper:
    def test_table_rows(self):
        assert upper_bound(datum(2, 6, "(0:6,6,3)")).value == 4
        assert upper_bound(datum(1, 3, "(0:3,3,3)")).value == 5
        r = upper_bound(datum(6, 20, "(0:20,5,4)"))
        assert r.value == 6 and r.provenance == ("model-table:row8",)

    def test_free(self):
        for g, n in [(2, 1), (3, 2), (5, 4), (7, 6)]:
            base = (g - 1) // n + 1
            d = MapDatum(g, n, OrbifoldSignature(base))
            assert upper_bound(d).value == 3 and "free:nielsen" in upper_bound(d).provenance

    def test_not_covered(self):
        with pytest.raises(NotCovered):
            upper_bound(datum(2, 3, "(0:3,3,3,3)"))

    def test_minimum_over_matching_rows(self):
        # (0:4,4,2) on the torus is both row 2 at h=1 and row 14
        rows = {r.row for r, _ in table_matches(datum(1, 4, "(0:4,4,2)"))}
        assert rows == {2, 14}
        assert upper_bound(datum(1, 4, "(0:4,4,2)")).value == 4


class TestExact:
    def test_examples(self):
        assert dgf(datum(3, 12, "(0:12,4,3)")).value == 6
        assert dgf(datum(1, 4, "(0:4,4,2)")).value == 4
        assert dgf(datum(1, 2, "(0:2,2,2,2)")).value == 3
        assert dgf(datum(1, 2, "(1:)")).value == 3
        assert dgf(datum(5, 8, "(0:8,8,4,2)")).value == 6
        r = dgf(datum(2, 6, "(0:3,3,2,2)"))
        assert r.value == 3 and r.kind is BoundKind.EXACT

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            dgf(datum(2, 3, "(0:3,3,3,3)"))
        with pytest.raises(OutOfRange):
            dgf(datum(0, 5, "(0:5,5)"))

    def test_exact_carries_both_sides(self):
        r = dgf(datum(4, 12, "(0:12,6,4)"))
        assert any(t.startswith("rule:") for t in r.provenance)
        assert "model-table:row12" in r.provenance

    def test_table_instances(self):
        for h, row, g, n, idx, model, D in table_instances():
            d = MapDatum(g, n, OrbifoldSignature(0, idx))
            assert lower_bound(d).value == upper_bound(d).value == dgf(d).value == exact_value(g, n, idx)

    def test_complete_in_range(self):
        """Every realizable datum with n >= 3g (g <= 8) gets an exact value matching the case list."""
        count = 0
        for g in range(1, 9):
            for n in range(2 if g == 1 else 3 * g, 4 * g + 3):
                divs = [x for x in range(2, n + 1) if n % x == 0]
                for l in range(6):
                    for idx in itertools.combinations_with_replacement(divs, l):
                        for base in (0, 1):
                            sig = OrbifoldSignature(base, idx)
                            if rh_euler_defect(n, g, sig) or not harvey_ok(n, base, sig.indices):
                                continue
                            count += 1
                            assert dgf(MapDatum(g, n, sig)).value == exact_value(g, n, sig.indices)
        assert count > 30


class TestFamilies:
    @pytest.mark.parametrize("p", [2, 3, 5])
    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_bounds_meet(self, p, k):
        d = family_datum(p, k)
        want = 2 * k if p == 2 else 2 * k + 1
        assert lower_bound(d).value == upper_bound(d).value == dgf(d).value == want
        assert family_match(d) == (p, k)

    @pytest.mark.parametrize("t", [1, 2, 5])
    def test_enlargement_keeps_bounds(self, t):
        for p, k in [(2, 3), (3, 3), (2, 5)]:
            d = family_datum(p, k)
            e = enlarge(d, t)
            assert e.genus == d.genus + d.order * t and e.signature.base_genus == t
            assert lower_bound(e) == lower_bound(d)
            assert upper_bound(e) == upper_bound(d)
            assert dgf(e).value == dgf(d).value

    @settings(max_examples=60)
    @given(st.sampled_from([(1, 6, "(0:6,3,2)"), (4, 12, "(0:12,6,4)"), (1, 3, "(0:3,3,3)")]), st.integers(1, 6))
    def test_enlargement_keeps_lower_bound(self, base, t):
        d = datum(*base)
        assert lower_bound(enlarge(d, t)) == lower_bound(d)


class TestDhat:
    def test_family(self):
        assert dhat_bounds(datum(5, 8, "(0:8,8,4,2)")).as_list() == [6, 6]

    def test_table_rows(self):
        assert dhat_bounds(datum(1, 6, "(0:6,3,2)")).as_list() == [3, 4]
        assert dhat_bounds(datum(4, 12, "(0:12,6,4)")).as_list() == [3, 6]

    def test_other(self):
        assert dhat_bounds(datum(1, 3, "(0:3,3,3)")).as_list() == [3, 5]
        assert dhat_bounds(datum(2, 3, "(0:3,3,3,3)")).as_list() == [3, None]
        assert dhat_bounds(datum(0, 5, "(0:5,5)")).as_list() == [2, 2]
