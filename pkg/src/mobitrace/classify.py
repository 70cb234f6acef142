"""Mobility classification of cohort members.

Three overlapping dichotomies are derived from a member's timeline:

* mobile: the career-wide set of affiliation countries has two or more
  entries;
* multiple affiliation: some single publication links the author to two
  or more countries;
* returned: after a strictly-abroad year (evidence present, home absent)
  the home country reappears.

Returned and multiple-affiliation researchers are always mobile.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from .exceptions import EmptyTimeline, InconsistentInputs
from .model import AuthorTimeline, CohortMember, MobilityProfile


def _require_years(timeline: AuthorTimeline):
    if not timeline.years:
        raise EmptyTimeline(f"timeline of {timeline.author_id!r} is empty")


def career_country_set(timeline: AuthorTimeline) -> frozenset[str]:
    _require_years(timeline)
    out: set[str] = set()
    for state in timeline.years.values():
        out |= state.countries
    return frozenset(out)


def detect_emigration(timeline: AuthorTimeline, home_country: str) -> Optional[int]:
    """First year with evidence of any country other than ``home_country``.

    A year showing both home and a foreign country counts.
    """
    _require_years(timeline)
    for year in timeline.sorted_years():
        if timeline.years[year].countries - {home_country}:
            return year
    return None


def detect_return(timeline: AuthorTimeline, home_country: str) -> Optional[tuple[int, int]]:
    """``(abroad_start, return_year)`` or ``None``.

    ``abroad_start`` is the first year with evidence that excludes the home
    country; ``return_year`` is the first later year in which home is seen
    again. Years without publications carry no evidence either way.
    """
    _require_years(timeline)
    abroad_start = None
    for year in timeline.sorted_years():
        countries = timeline.years[year].countries
        if abroad_start is None:
            if countries and home_country not in countries:
                abroad_start = year
        elif home_country in countries:
            return abroad_start, year
    return None


def classify_member(member: CohortMember, timeline: AuthorTimeline) -> MobilityProfile:
    _require_years(timeline)
    first = min(timeline.years)
    if member.author_id != timeline.author_id:
        raise InconsistentInputs(
            f"member {member.author_id!r} does not match timeline {timeline.author_id!r}"
        )
    if member.first_pub_year != first:
        raise InconsistentInputs(
            f"{member.author_id}: first_pub_year {member.first_pub_year} != timeline start {first}"
        )
    if member.home_country not in timeline.years[first].countries:
        raise InconsistentInputs(
            f"{member.author_id}: home {member.home_country} not evidenced in first year {first}"
        )

    home = member.home_country
    is_mobile = len(career_country_set(timeline)) >= 2
    multi = any(s.has_multi_country_pub for s in timeline.years.values())
    emigration = detect_emigration(timeline, home)
    ret = detect_return(timeline, home)
    return MobilityProfile(
        member=member,
        is_mobile=is_mobile,
        is_multiple_affiliation=multi,
        is_returned=ret is not None,
        emigration_year=emigration,
        return_year=ret[1] if ret else None,
        years_to_emigration=None if emigration is None else emigration - member.first_pub_year,
        years_abroad=ret[1] - ret[0] if ret else None,
        publication_count=timeline.publication_count,
        hcp_count=sum(s.hcp_count for s in timeline.years.values()),
    )


def _classify_chunk(pairs):
    return [classify_member(m, t) for m, t in pairs]


def classify_cohort(
    members: Sequence[CohortMember],
    timelines: dict[str, AuthorTimeline],
    jobs: int = 1,
) -> list[MobilityProfile]:
    """Classify every member; output order equals input order for any ``jobs``."""
    pairs = [(m, timelines[m.author_id]) for m in members]
    if jobs <= 1 or len(pairs) < 500:
        return _classify_chunk(pairs)
    size = -(-len(pairs) // (jobs * 4))
    chunks = [pairs[i:i + size] for i in range(0, len(pairs), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [p for chunk in pool.map(_classify_chunk, chunks) for p in chunk]
