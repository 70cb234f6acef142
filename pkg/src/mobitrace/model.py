"""Domain types shared across the pipeline.

All types are frozen dataclasses and validate their invariants on
construction. Country is the unit of mobility; ``institution_id`` is
carried for provenance only.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .exceptions import InvalidCountryCode, MalformedRecord, DuplicateAuthorInRecord

_COUNTRY_RE = re.compile(r"[A-Z]{2}")

MIN_YEAR = 1900
MAX_YEAR = 2100


def check_country(code) -> str:
    """Return ``code`` if it is an uppercase ISO 3166-1 alpha-2 code."""
    if not isinstance(code, str) or not _COUNTRY_RE.fullmatch(code):
        raise InvalidCountryCode(f"invalid country code {code!r}")
    return code


@dataclass(frozen=True)
class Affiliation:
    country: str
    institution_id: Optional[str] = None

    def __post_init__(self):
        check_country(self.country)


@dataclass(frozen=True)
class Authorship:
    author_id: str
    affiliations: tuple[Affiliation, ...] = ()

    def __post_init__(self):
        if not isinstance(self.affiliations, tuple):
            object.__setattr__(self, "affiliations", tuple(self.affiliations))

    @property
    def countries(self) -> frozenset[str]:
        return frozenset(a.country for a in self.affiliations)


@dataclass(frozen=True)
class PublicationRecord:
    pub_id: str
    year: int
    authorships: tuple[Authorship, ...]
    citations: Optional[int] = None
    hcp_flag: Optional[bool] = None
    field_code: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.authorships, tuple):
            object.__setattr__(self, "authorships", tuple(self.authorships))
        if not self.authorships:
            raise MalformedRecord(f"{self.pub_id}: authorships must be non-empty")
        if not MIN_YEAR <= self.year <= MAX_YEAR:
            raise MalformedRecord(f"{self.pub_id}: year {self.year} outside [{MIN_YEAR}, {MAX_YEAR}]")
        if self.citations is not None and self.citations < 0:
            raise MalformedRecord(f"{self.pub_id}: negative citations")
        seen = set()
        for a in self.authorships:
            if a.author_id in seen:
                raise DuplicateAuthorInRecord(
                    f"{self.pub_id}: author {a.author_id!r} listed more than once"
                )
            seen.add(a.author_id)


class Corpus(Mapping):
    """Immutable mapping ``pub_id -> PublicationRecord``.

    Equality is key/value based, so two corpora loaded from permuted
    input compare equal.
    """

    def __init__(self, records: Mapping[str, PublicationRecord] | None = None):
        self._records = dict(records or {})

    def __getitem__(self, pub_id: str) -> PublicationRecord:
        return self._records[pub_id]

    def __iter__(self) -> Iterator[str]:
        return iter(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __repr__(self):
        return f"Corpus(<{len(self)} records>)"

    def sorted_records(self) -> list[PublicationRecord]:
        return [self._records[k] for k in sorted(self._records)]

    def author_ids(self) -> list[str]:
        ids = {a.author_id for r in self._records.values() for a in r.authorships}
        return sorted(ids)


@dataclass(frozen=True)
class YearState:
    """Evidence for one author in one calendar year.

    ``hcp_count`` is the number of that year's publications flagged as
    highly cited; it lets classification count HCPs from the timeline alone.
    """

    countries: frozenset[str]
    pub_ids: tuple[str, ...]
    has_multi_country_pub: bool = False
    hcp_count: int = 0

    def __post_init__(self):
        if self.has_multi_country_pub and len(self.countries) < 2:
            raise ValueError("has_multi_country_pub requires at least two countries")
        if not 0 <= self.hcp_count <= len(self.pub_ids):
            raise ValueError("hcp_count must lie in [0, len(pub_ids)]")


@dataclass(frozen=True)
class AuthorTimeline:
    author_id: str
    years: Mapping[int, YearState] = field(default_factory=dict)

    def __post_init__(self):
        for y, state in self.years.items():
            if not state.pub_ids:
                raise ValueError(f"year {y} has no publications")

    def sorted_years(self) -> list[int]:
        return sorted(self.years)

    @property
    def publication_count(self) -> int:
        return sum(len(s.pub_ids) for s in self.years.values())


@dataclass(frozen=True, order=True)
class CohortMember:
    author_id: str
    home_country: str
    first_pub_year: int

    def __post_init__(self):
        check_country(self.home_country)


@dataclass(frozen=True)
class MobilityProfile:
    member: CohortMember
    is_mobile: bool
    is_multiple_affiliation: bool
    is_returned: bool
    emigration_year: Optional[int] = None
    return_year: Optional[int] = None
    years_to_emigration: Optional[int] = None
    years_abroad: Optional[int] = None
    publication_count: int = 0
    hcp_count: int = 0

    def __post_init__(self):
        if self.is_returned and not self.is_mobile:
            raise ValueError("returned researcher must be mobile")
        if self.is_multiple_affiliation and not self.is_mobile:
            raise ValueError("multiple-affiliation researcher must be mobile")
        if self.is_mobile != (self.emigration_year is not None):
            raise ValueError("is_mobile must match presence of emigration_year")
        if self.is_returned != (self.return_year is not None):
            raise ValueError("is_returned must match presence of return_year")
        if (self.years_to_emigration is None) != (self.emigration_year is None):
            raise ValueError("years_to_emigration must accompany emigration_year")
        if (self.years_abroad is None) != (self.return_year is None):
            raise ValueError("years_abroad must accompany return_year")
        if self.emigration_year is not None:
            if self.years_to_emigration != self.emigration_year - self.member.first_pub_year:
                raise ValueError("years_to_emigration != emigration_year - first_pub_year")
            if self.years_to_emigration < 0:
                raise ValueError("years_to_emigration must be non-negative")
        if self.return_year is not None:
            if self.return_year <= self.emigration_year:
                raise ValueError("return_year must follow emigration_year")
            if self.years_abroad < 1:
                raise ValueError("years_abroad must be >= 1")
        if self.publication_count < 0 or not 0 <= self.hcp_count <= self.publication_count:
            raise ValueError("hcp_count must lie in [0, publication_count]")

    @property
    def author_id(self) -> str:
        return self.member.author_id

    @property
    def home_country(self) -> str:
        return self.member.home_country
