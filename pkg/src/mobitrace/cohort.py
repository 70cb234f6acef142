"""Per-author timelines and cohort selection."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from .exceptions import EmptyTimeline, InvalidConfig, UnknownAuthor
from .model import AuthorTimeline, CohortMember, Corpus, YearState, check_country

DEFAULT_COHORT_START = 2003
DEFAULT_COHORT_END = 2005
DEFAULT_CAREER_END = 2014
DEFAULT_TARGETS = ("ES", "NL")


@dataclass(frozen=True)
class CohortConfig:
    cohort_start: int = DEFAULT_COHORT_START
    cohort_end: int = DEFAULT_COHORT_END
    career_end: int = DEFAULT_CAREER_END
    target_countries: frozenset[str] = frozenset(DEFAULT_TARGETS)

    def __post_init__(self):
        object.__setattr__(self, "target_countries", frozenset(self.target_countries))
        if not self.target_countries:
            raise InvalidConfig("target_countries must be non-empty")
        for c in self.target_countries:
            check_country(c)
        if not self.cohort_start <= self.cohort_end <= self.career_end:
            raise InvalidConfig(
                "expected cohort_start <= cohort_end <= career_end, got "
                f"{self.cohort_start}, {self.cohort_end}, {self.career_end}"
            )


class _YearAcc:
    __slots__ = ("countries", "pub_ids", "multi", "hcp")

    def __init__(self):
        self.countries = set()
        self.pub_ids = []
        self.multi = False
        self.hcp = 0


def _freeze(author_id: str, acc: dict[int, _YearAcc]) -> AuthorTimeline:
    years = {
        y: YearState(frozenset(a.countries), tuple(sorted(a.pub_ids)), a.multi, a.hcp)
        for y, a in sorted(acc.items())
    }
    return AuthorTimeline(author_id, years)


def build_timelines(corpus: Corpus, career_end: Optional[int] = DEFAULT_CAREER_END) -> dict[str, AuthorTimeline]:
    """Build the timeline of every author in ``corpus`` in a single pass.

    Years after ``career_end`` are dropped. Authors whose every publication
    falls after ``career_end`` get an empty timeline.
    """
    accs: dict[str, dict[int, _YearAcc]] = defaultdict(dict)
    for rec in corpus.values():
        keep = career_end is None or rec.year <= career_end
        for authorship in rec.authorships:
            per_author = accs[authorship.author_id]
            if not keep:
                continue
            acc = per_author.get(rec.year)
            if acc is None:
                acc = per_author[rec.year] = _YearAcc()
            countries = authorship.countries
            acc.countries.update(countries)
            acc.pub_ids.append(rec.pub_id)
            if len(countries) >= 2:
                acc.multi = True
            if rec.hcp_flag:
                acc.hcp += 1
    return {aid: _freeze(aid, accs[aid]) for aid in sorted(accs)}


def build_timeline(corpus: Corpus, author_id: str, career_end: Optional[int] = DEFAULT_CAREER_END) -> AuthorTimeline:
    """Timeline of a single author; see :func:`build_timelines`."""
    acc: dict[int, _YearAcc] = {}
    found = False
    for rec in corpus.values():
        for authorship in rec.authorships:
            if authorship.author_id != author_id:
                continue
            found = True
            if career_end is not None and rec.year > career_end:
                break
            a = acc.setdefault(rec.year, _YearAcc())
            countries = authorship.countries
            a.countries.update(countries)
            a.pub_ids.append(rec.pub_id)
            a.multi = a.multi or len(countries) >= 2
            a.hcp += bool(rec.hcp_flag)
            break
    if not found:
        raise UnknownAuthor(f"author {author_id!r} does not occur in the corpus")
    return _freeze(author_id, acc)


def first_publication_year(timeline: AuthorTimeline) -> int:
    if not timeline.years:
        raise EmptyTimeline(f"timeline of {timeline.author_id!r} is empty")
    return min(timeline.years)


def cohort_members(timeline: AuthorTimeline, config: CohortConfig) -> list[CohortMember]:
    """Members contributed by one author: one per target country in year one."""
    if not timeline.years:
        return []
    first = first_publication_year(timeline)
    if not config.cohort_start <= first <= config.cohort_end:
        return []
    homes = timeline.years[first].countries & config.target_countries
    return [CohortMember(timeline.author_id, c, first) for c in sorted(homes)]


def select_cohort(
    corpus: Corpus,
    config: CohortConfig,
    timelines: Optional[dict[str, AuthorTimeline]] = None,
) -> list[CohortMember]:
    """Select cohort members, ordered by ``(author_id, home_country)``.

    An author whose first-year affiliations span two target countries
    yields one member per country.
    """
    if timelines is None:
        timelines = build_timelines(corpus, config.career_end)
    members = []
    for aid in sorted(timelines):
        members.extend(cohort_members(timelines[aid], config))
    return members
