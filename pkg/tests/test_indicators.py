import math
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobitrace.exceptions import EmptyInput, MissingCitations, NoMobileResearchers, NoPublications
from mobitrace.indicators import (
    boxplot_stats,
    bubble_aggregate,
    group_counts,
    group_counts_from_totals,
    hcp_flag_corpus,
    hcp_share,
    returned_share,
    round_half_up,
    share_of_mobile,
    temporal_stats,
)
from mobitrace.model import CohortMember, Corpus, MobilityProfile

from factories import pub


def profile(home="ES", mobile=False, returned=False, multi=False, pubs=5, hcp=0,
            to_emig=None, abroad=None, aid="a", first=2003):
    emig = None
    ret = None
    if mobile:
        to_emig = 1 if to_emig is None else to_emig
        emig = first + to_emig
    else:
        to_emig = None
    if returned:
        abroad = 1 if abroad is None else abroad
        ret = emig + abroad
    else:
        abroad = None
    return MobilityProfile(
        CohortMember(aid, home, first), mobile, multi, returned, emig, ret, to_emig, abroad, pubs, hcp
    )


def test_round_half_up():
    assert round_half_up(Fraction(1, 8), 2) == Decimal("0.13")  # 0.125
    assert round_half_up(Fraction(1, 200), 2) == Decimal("0.01")
    assert round_half_up(2.675, 2) == Decimal("2.68")  # decimal repr, not binary
    assert str(round_half_up(3, 2)) == "3.00"


def test_group_counts_rows():
    ps = [profile(aid="1"), profile(aid="2", mobile=True, returned=True),
          profile(aid="3", mobile=True, multi=True), profile(aid="4", home="NL")]
    rows = group_counts(ps)
    table = {(r.home_country, r.group_label): (r.n, str(r.pct_rounded)) for r in rows}
    assert table[("ES", "non_mobile")] == (1, "33.33")
    assert table[("ES", "mobile")] == (2, "66.67")
    assert table[("ES", "returned")] == (1, "33.33")
    assert table[("ES", "multiple_affiliation")] == (1, "33.33")
    assert table[("ES", "total")] == (3, "100.00")
    assert table[("NL", "non_mobile")] == (1, "100.00")
    assert [r.home_country for r in rows] == ["ES"] * 5 + ["NL"] * 5


def test_group_counts_empty():
    assert group_counts([]) == []
    rows = group_counts([], countries=["ES"])
    assert [(r.group_label, r.n, r.pct) for r in rows] == [("total", 0, None)]


@pytest.mark.parametrize("n,total,expected", [(824, 6151, "13.40"), (501, 6151, "8.15")])
def test_group_pct_published_values(n, total, expected):
    rows = group_counts_from_totals("ES", {"mobile": n, "total": total})
    assert str(rows[0].pct_rounded) == expected


def test_share_of_mobile():
    ps = [profile(aid=str(i), mobile=True, returned=i < 2) for i in range(3)]
    assert share_of_mobile(ps, "ES") == Decimal("66.7")
    assert str(returned_share(344, 867)) == "39.7"
    assert str(returned_share(501, 824)) == "60.8"
    with pytest.raises(NoMobileResearchers):
        share_of_mobile([profile()], "ES")


def oracle_quantile(sorted_values, p):
    # exact rational interpolation at position p*(n-1)
    pos = Fraction(p) * (len(sorted_values) - 1)
    lo = pos.numerator // pos.denominator
    frac = pos - lo
    if frac == 0:
        return Fraction(sorted_values[lo])
    return Fraction(sorted_values[lo]) + frac * (sorted_values[lo + 1] - sorted_values[lo])


def oracle_boxplot(values):
    xs = sorted(values)
    q1, med, q3 = (oracle_quantile(xs, Fraction(k, 4)) for k in (1, 2, 3))
    lo, hi = q1 - Fraction(3, 2) * (q3 - q1), q3 + Fraction(3, 2) * (q3 - q1)
    inside = [x for x in xs if lo <= x <= hi]
    return {
        "q1": q1, "median": med, "q3": q3,
        "lower_whisker": min(Fraction(inside[0]), q1),
        "upper_whisker": max(Fraction(inside[-1]), q3),
        "outliers": [x for x in xs if not lo <= x <= hi],
    }


def test_boxplot_singleton():
    s = boxplot_stats([5])
    assert (s.min, s.q1, s.median, s.q3, s.max, s.lower_whisker, s.upper_whisker) == (5,) * 7
    assert s.outliers == () and s.n == 1


def test_boxplot_examples():
    s = boxplot_stats([1, 2, 3, 4, 5])
    assert (s.q1, s.median, s.q3) == (2, 3, 4)
    s = boxplot_stats([1, 2, 3, 4, 100])
    assert s.q3 == 4 and s.q3 - s.q1 == 2
    assert s.upper_whisker == 4 and s.outliers == (100,)


def test_boxplot_whisker_clamped_to_box():
    # the only point above q3 is an outlier, the next one lies below q3
    s = boxplot_stats([0, 0, 0, 10])
    assert s.q3 == 2.5 and s.outliers == (10,)
    assert s.upper_whisker == s.q3


def test_boxplot_empty():
    with pytest.raises(EmptyInput):
        boxplot_stats([])


@given(st.lists(st.integers(0, 500), min_size=1, max_size=200))
@settings(max_examples=300)
def test_boxplot_matches_oracles(values):
    s = boxplot_stats(values)
    o = oracle_boxplot(values)
    for key in ("q1", "median", "q3", "lower_whisker", "upper_whisker"):
        assert getattr(s, key) == o[key]
    assert list(s.outliers) == o["outliers"]
    assert [s.q1, s.median, s.q3] == list(np.percentile(values, [25, 50, 75], method="linear"))
    assert s.min <= s.lower_whisker <= s.q1 <= s.median <= s.q3 <= s.upper_whisker <= s.max


def _rows(ps):
    return {(r.home_country, r.metric): r for r in temporal_stats(ps)}


def test_temporal_constant_sample():
    rows = _rows([profile(aid=str(i), mobile=True, to_emig=3) for i in range(2)])
    r = rows[("ES", "years_to_emigration")]
    assert (round_half_up(r.average, 2), round_half_up(r.std_dev, 2), r.population) == (
        Decimal("3.00"), Decimal("0.00"), 2)


def test_temporal_sample_std():
    rows = _rows([profile(aid=str(i), mobile=True, returned=True, abroad=v) for i, v in enumerate([2, 4])])
    r = rows[("ES", "years_abroad")]
    # sample variance of {2, 4} is ((2-3)^2 + (4-3)^2) / 1 = 2
    assert r.average == 3.0 and r.std_dev == pytest.approx(math.sqrt(2), abs=1e-15)
    assert str(round_half_up(r.std_dev, 2)) == "1.41"


def test_temporal_no_returned():
    rows = _rows([profile(mobile=True)])
    r = rows[("ES", "years_abroad")]
    assert (r.population, r.average, r.std_dev) == (0, None, None)
    assert rows[("ES", "years_to_emigration")].population == 1


def _stratum_corpus(citations, year=2005, field=None):
    return Corpus({f"p{i:04d}": pub(f"p{i:04d}", year, ("a", ["ES"]), citations=c, field_code=field)
                   for i, c in enumerate(citations)})


def oracle_flags(records):
    """Brute-force: a record is flagged iff fewer than ceil(n/10) records outrank it."""
    k = math.ceil(len(records) / 10)
    out = set()
    for r in records:
        better = sum(
            1 for o in records
            if o.citations > r.citations or (o.citations == r.citations and o.pub_id < r.pub_id)
        )
        if better < k:
            out.add(r.pub_id)
    return out


def flagged(corpus):
    return {p for p, r in corpus.items() if r.hcp_flag}


def test_hcp_ten_distinct():
    c = hcp_flag_corpus(_stratum_corpus(range(10)))
    assert flagged(c) == {"p0009"}


def test_hcp_single_record():
    assert flagged(hcp_flag_corpus(_stratum_corpus([0]))) == {"p0000"}


def test_hcp_ties_broken_by_pub_id():
    c = hcp_flag_corpus(_stratum_corpus([5] * 11))
    assert flagged(c) == {"p0000", "p0001"}


def test_hcp_year_field_strata():
    corpus = Corpus({**_stratum_corpus([1, 9], field="A"),
                     **{f"q{i}": pub(f"q{i}", 2005, ("a", ["ES"]), citations=c, field_code="B")
                        for i, c in enumerate([3, 4])}})
    assert flagged(hcp_flag_corpus(corpus, "year")) == {"p0001"}
    assert flagged(hcp_flag_corpus(corpus, "year-field")) == {"p0001", "q1"}


def test_hcp_existing_flags_kept_unless_recompute():
    corpus = Corpus({"a": pub("a", 2005, ("x", ["ES"]), citations=0, hcp_flag=True),
                     "b": pub("b", 2005, ("x", ["ES"]), citations=9)})
    kept = hcp_flag_corpus(corpus)
    assert kept["a"].hcp_flag is True and kept["b"].hcp_flag is True
    redone = hcp_flag_corpus(corpus, recompute=True)
    assert flagged(redone) == {"b"}


def test_hcp_missing_citations():
    corpus = Corpus({"a": pub("a", 2005, ("x", ["ES"])), "b": pub("b", 2005, ("x", ["ES"]), citations=2)})
    with pytest.raises(MissingCitations):
        hcp_flag_corpus(corpus)
    # stratum already fully flagged upstream: nothing to compute
    done = Corpus({"a": pub("a", 2005, ("x", ["ES"]), hcp_flag=False)})
    assert hcp_flag_corpus(done) == done


@given(st.lists(st.integers(0, 30), min_size=1, max_size=120), st.randoms())
@settings(max_examples=200)
def test_hcp_matches_oracle_and_is_permutation_invariant(citations, rnd):
    corpus = _stratum_corpus(citations)
    got = flagged(hcp_flag_corpus(corpus))
    assert got == oracle_flags(list(corpus.values()))
    assert len(got) == math.ceil(len(citations) / 10)
    items = list(corpus.items())
    rnd.shuffle(items)
    assert flagged(hcp_flag_corpus(Corpus(dict(items)))) == got


def test_hcp_share():
    assert hcp_share(profile(pubs=10, hcp=1)) == 0.1
    assert hcp_share(profile(pubs=7, hcp=0)) == 0.0
    with pytest.raises(NoPublications):
        hcp_share(profile(pubs=0))


def test_bubble_range_filter():
    ps = [profile(aid=str(n), pubs=n) for n in (2, 3, 30, 31)]
    assert [b.x for b in bubble_aggregate(ps, "mobility")] == [3, 30]


def test_bubble_pooled_share():
    ps = [profile(aid="1", pubs=10, hcp=1), profile(aid="2", pubs=10, hcp=3)]
    (b,) = bubble_aggregate(ps, "mobility")
    # pooled: (1 + 3) / (10 + 10)
    assert (b.x, b.size, b.group_label) == (10, 2, "non_mobile")
    assert b.y == pytest.approx(0.2, abs=1e-15)


def test_bubble_empty_and_groupings():
    assert bubble_aggregate([profile(pubs=1)], "mobility") == []
    ps = [profile(aid="1", mobile=True, returned=True, pubs=5),
          profile(aid="2", mobile=True, multi=True, pubs=5),
          profile(aid="3", pubs=5)]
    labels = [b.group_label for b in bubble_aggregate(ps, "return")]
    assert labels == ["not_returned", "returned"]
    labels = [b.group_label for b in bubble_aggregate(ps, "affiliation")]
    assert labels == ["single", "multiple"]
    with pytest.raises(ValueError):
        bubble_aggregate(ps, "nonsense")


@given(st.lists(st.tuples(st.booleans(), st.integers(0, 40), st.integers(0, 40)), max_size=40))
def test_bubble_y_in_unit_interval(specs):
    ps = [profile(aid=str(i), mobile=m, pubs=max(n, k), hcp=min(n, k)) for i, (m, n, k) in enumerate(specs)]
    for b in bubble_aggregate(ps, "mobility"):
        assert 0 <= b.y <= 1 and 2 < b.x < 31 and b.size >= 1
