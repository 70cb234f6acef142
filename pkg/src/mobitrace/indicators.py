"""Descriptive indicators over classified profiles.

Computation is done at full precision; rounding happens only through
:func:`round_half_up`, at serialization time.
"""

from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, replace, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exceptions import EmptyInput, MissingCitations, NoMobileResearchers, NoPublications
from .model import Corpus, MobilityProfile, PublicationRecord

GROUP_LABELS = ("non_mobile", "mobile", "returned", "multiple_affiliation", "total")
TEMPORAL_METRICS = ("years_to_emigration", "years_abroad")

# grouping -> (population filter, [(side label, predicate)])
GROUPINGS = {
    "mobility": (
        lambda p: True,
        (("non_mobile", lambda p: not p.is_mobile), ("mobile", lambda p: p.is_mobile)),
    ),
    "return": (
        lambda p: p.is_mobile,
        (("not_returned", lambda p: not p.is_returned), ("returned", lambda p: p.is_returned)),
    ),
    "affiliation": (
        lambda p: p.is_mobile,
        (
            ("single", lambda p: not p.is_multiple_affiliation),
            ("multiple", lambda p: p.is_multiple_affiliation),
        ),
    ),
}

BUBBLE_MIN_PUBS = 3
BUBBLE_MAX_PUBS = 30
HCP_SHARE = Fraction(1, 10)


def round_half_up(value, places: int) -> Decimal:
    """Round ``value`` (int, float, Fraction or Decimal) half-up to ``places`` decimals."""
    quantum = Decimal(1).scaleb(-places)
    if isinstance(value, Fraction):
        # exact: scale, round the rational, then rescale
        scaled = value * 10**places
        n = math.floor(scaled + Fraction(1, 2)) if scaled >= 0 else -math.floor(-scaled + Fraction(1, 2))
        return (Decimal(n) * quantum).quantize(quantum)
    if isinstance(value, float):
        value = Decimal(repr(value))
    return Decimal(value).quantize(quantum, rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class GroupCountsRow:
    home_country: str
    group_label: str
    n: int
    pct: Optional[Fraction]  # None when the country total is 0

    @property
    def pct_rounded(self) -> Optional[Decimal]:
        return None if self.pct is None else round_half_up(self.pct, 2)


def group_counts(profiles: Iterable[MobilityProfile], countries: Iterable[str] = ()) -> list[GroupCountsRow]:
    """Table-1 style counts and shares per home country.

    ``countries`` forces rows for countries without profiles (total 0, no
    percentage rows).
    """
    counts: dict[str, dict[str, int]] = {c: dict.fromkeys(GROUP_LABELS, 0) for c in countries}
    for p in profiles:
        c = counts.setdefault(p.home_country, dict.fromkeys(GROUP_LABELS, 0))
        c["total"] += 1
        c["mobile" if p.is_mobile else "non_mobile"] += 1
        c["returned"] += p.is_returned
        c["multiple_affiliation"] += p.is_multiple_affiliation
    rows = []
    for country in sorted(counts):
        c = counts[country]
        total = c["total"]
        if total == 0:
            rows.append(GroupCountsRow(country, "total", 0, None))
            continue
        rows.extend(
            GroupCountsRow(country, label, c[label], Fraction(100 * c[label], total))
            for label in GROUP_LABELS
        )
    return rows


def group_counts_from_totals(home_country: str, n_by_group: dict[str, int]) -> list[GroupCountsRow]:
    """Rows for already-aggregated counts (``n_by_group`` must include ``total``)."""
    total = n_by_group["total"]
    return [
        GroupCountsRow(home_country, label, n_by_group[label], Fraction(100 * n_by_group[label], total))
        for label in GROUP_LABELS
        if label in n_by_group
    ]


def share_of_mobile(profiles: Iterable[MobilityProfile], home_country: str) -> Decimal:
    """Percentage of mobile researchers from ``home_country`` who returned, 1 decimal."""
    mobile = returned = 0
    for p in profiles:
        if p.home_country == home_country and p.is_mobile:
            mobile += 1
            returned += p.is_returned
    return returned_share(returned, mobile)


def returned_share(returned: int, mobile: int) -> Decimal:
    if mobile == 0:
        raise NoMobileResearchers("no mobile researchers to take a share of")
    return round_half_up(Fraction(100 * returned, mobile), 1)


@dataclass(frozen=True)
class FiveNumberSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    lower_whisker: float
    upper_whisker: float
    outliers: tuple = ()
    n: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
            "lower_whisker": self.lower_whisker,
            "upper_whisker": self.upper_whisker,
            "outliers": list(self.outliers),
        }


def _quantile_sorted(xs: Sequence[float], p: float) -> float:
    # linear interpolation between order statistics at p*(n-1)
    pos = p * (len(xs) - 1)
    lo = math.floor(pos)
    frac = pos - lo
    if frac == 0:
        return float(xs[lo])
    return xs[lo] + frac * (xs[lo + 1] - xs[lo])


def boxplot_stats(values: Iterable[float], whis: float = 1.5) -> FiveNumberSummary:
    """Quartiles, Tukey whiskers and outliers of ``values``.

    Whiskers are the most extreme observations inside
    ``[q1 - whis*IQR, q3 + whis*IQR]``, clamped so they never fall inside
    the box.
    """
    xs = sorted(values)
    if not xs:
        raise EmptyInput("boxplot_stats needs at least one value")
    q1 = _quantile_sorted(xs, 0.25)
    med = _quantile_sorted(xs, 0.5)
    q3 = _quantile_sorted(xs, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - whis * iqr
    hi_fence = q3 + whis * iqr
    inside = [x for x in xs if lo_fence <= x <= hi_fence]
    lower = min(float(inside[0]), q1) if inside else q1
    upper = max(float(inside[-1]), q3) if inside else q3
    outliers = tuple(x for x in xs if x < lo_fence or x > hi_fence)
    return FiveNumberSummary(
        float(xs[0]), q1, med, q3, float(xs[-1]), lower, upper, outliers, len(xs)
    )


def boxplot_table(profiles: Sequence[MobilityProfile]) -> list[dict]:
    """Publication-count boxplots per country x grouping x side."""
    out = []
    for country in sorted({p.home_country for p in profiles}):
        mine = [p for p in profiles if p.home_country == country]
        for grouping, (population, sides) in GROUPINGS.items():
            for label, pred in sides:
                counts = [p.publication_count for p in mine if population(p) and pred(p)]
                entry = {"home_country": country, "grouping": grouping, "group_label": label}
                if counts:
                    entry.update(boxplot_stats(counts).to_dict())
                else:
                    entry.update({"n": 0})
                out.append(entry)
    return out


@dataclass(frozen=True)
class TemporalStatsRow:
    home_country: str
    metric: str
    average: Optional[float]
    std_dev: Optional[float]  # sample (n-1); None for populations below 2
    population: int


def _describe(country: str, metric: str, values: list[int]) -> TemporalStatsRow:
    if not values:
        return TemporalStatsRow(country, metric, None, None, 0)
    avg = statistics.mean(values)
    sd = statistics.stdev(values) if len(values) >= 2 else None
    return TemporalStatsRow(country, metric, float(avg), None if sd is None else float(sd), len(values))


def temporal_stats(profiles: Iterable[MobilityProfile], countries: Iterable[str] = ()) -> list[TemporalStatsRow]:
    emig: dict[str, list[int]] = {c: [] for c in countries}
    abroad: dict[str, list[int]] = {c: [] for c in countries}
    for p in profiles:
        emig.setdefault(p.home_country, [])
        abroad.setdefault(p.home_country, [])
        if p.is_mobile:
            emig[p.home_country].append(p.years_to_emigration)
        if p.is_returned:
            abroad[p.home_country].append(p.years_abroad)
    rows = []
    for c in sorted(emig):
        rows.append(_describe(c, "years_to_emigration", emig[c]))
        rows.append(_describe(c, "years_abroad", abroad[c]))
    return rows


def stratum_key(record: PublicationRecord, strata: str):
    if strata == "year":
        return (record.year,)
    if strata == "year-field":
        return (record.year, record.field_code or "")
    raise ValueError(f"strata must be 'year' or 'year-field', got {strata!r}")


def _rank_key(record: PublicationRecord):
    # ascending key order == citations descending, then pub_id ascending
    return (-record.citations, record.pub_id)


def hcp_cutoffs(records: Iterable[PublicationRecord], strata: str = "year") -> dict:
    """Rank key of the last flagged record in each stratum.

    A record is in the top decile of its stratum iff its rank key is
    ``<=`` the stratum cutoff; on the ranking corpus that selects exactly
    ``ceil(0.1 * n)`` records.
    """
    groups: dict[tuple, list[PublicationRecord]] = defaultdict(list)
    for rec in records:
        groups[stratum_key(rec, strata)].append(rec)
    cutoffs = {}
    for key, recs in groups.items():
        missing = [r.pub_id for r in recs if r.citations is None]
        if missing:
            raise MissingCitations(
                f"stratum {key}: {len(missing)} record(s) lack citations, e.g. {missing[0]!r}"
            )
        ranked = sorted(recs, key=_rank_key)
        k = math.ceil(HCP_SHARE * len(ranked))
        cutoffs[key] = _rank_key(ranked[k - 1])
    return cutoffs


def hcp_flag_corpus(corpus: Corpus, strata: str = "year", recompute: bool = False) -> Corpus:
    """Return a copy of ``corpus`` with ``hcp_flag`` set on every record.

    Records that already carry a flag keep it unless ``recompute``. Only
    strata containing a record that needs a flag are ranked, and every
    record in such a stratum must have citations.
    """
    todo_strata = {
        stratum_key(r, strata) for r in corpus.values() if recompute or r.hcp_flag is None
    }
    ranked = [r for r in corpus.values() if stratum_key(r, strata) in todo_strata]
    return apply_hcp_cutoffs(corpus, hcp_cutoffs(ranked, strata), strata, recompute)


def apply_hcp_cutoffs(corpus: Corpus, cutoffs: dict, strata: str = "year", recompute: bool = False) -> Corpus:
    """Flag records against precomputed stratum cutoffs (see :func:`hcp_cutoffs`)."""
    out = {}
    for pub_id, rec in corpus.items():
        if recompute or rec.hcp_flag is None:
            key = stratum_key(rec, strata)
            if key not in cutoffs:
                raise ValueError(f"{pub_id}: no HCP cutoff for stratum {key}")
            if rec.citations is None:
                raise MissingCitations(f"{pub_id}: no citations to compare with the HCP cutoff")
            rec = replace(rec, hcp_flag=_rank_key(rec) <= cutoffs[key])
        out[pub_id] = rec
    return Corpus(out)


def hcp_share(profile: MobilityProfile) -> float:
    if profile.publication_count < 1:
        raise NoPublications(f"{profile.author_id} has no publications")
    return profile.hcp_count / profile.publication_count


@dataclass(frozen=True)
class BubblePoint:
    home_country: str
    group_label: str
    x: int
    y: float
    size: int
    grouping: str = field(default="", compare=False)

    def to_dict(self) -> dict:
        return {
            "home_country": self.home_country,
            "grouping": self.grouping,
            "group_label": self.group_label,
            "x": self.x,
            "y": self.y,
            "size": self.size,
        }


def bubble_aggregate(profiles: Iterable[MobilityProfile], grouping: str) -> list[BubblePoint]:
    """Pooled HCP share per (country, side, publication count) bucket.

    Only researchers with 3 to 30 publications are included; ``y`` is
    sum(hcp) / sum(pubs) within the bucket.
    """
    if grouping not in GROUPINGS:
        raise ValueError(f"grouping must be one of {sorted(GROUPINGS)}, got {grouping!r}")
    population, sides = GROUPINGS[grouping]
    order = {label: i for i, (label, _) in enumerate(sides)}
    buckets: dict[tuple, list[int]] = {}
    for p in profiles:
        if not (BUBBLE_MIN_PUBS <= p.publication_count <= BUBBLE_MAX_PUBS) or not population(p):
            continue
        label = next(lbl for lbl, pred in sides if pred(p))
        b = buckets.setdefault((p.home_country, order[label], p.publication_count), [0, 0, 0])
        b[0] += p.hcp_count
        b[1] += p.publication_count
        b[2] += 1
    return [
        BubblePoint(country, sides[side][0], x, hcp / pubs, size, grouping)
        for (country, side, x), (hcp, pubs, size) in sorted(buckets.items())
    ]
