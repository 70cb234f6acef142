"""Seeded synthetic corpora with ground-truth mobility labels.

Each researcher follows a planned trajectory:

    home-only years | abroad years (one foreign country) | home-only years
    first_pub_year    emigration_year                      return_year

Non-returned mobile researchers stay abroad until ``career_end``. A
multiple-affiliation researcher additionally gets one publication listing
both home and the foreign country, placed in the return year (returned)
or the emigration year (not returned), so that the planned emigration and
return years remain the observable ones.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .cohort import CohortConfig
from .exceptions import InvalidConfig, MissingAuthor
from .model import Affiliation, Authorship, Corpus, MobilityProfile, PublicationRecord, check_country

_TOL = 1e-9


def _dist(mapping) -> tuple[tuple[int, float], ...]:
    """Normalize ``{value: prob}`` or ``[[value, prob], ...]`` to sorted pairs."""
    items = mapping.items() if isinstance(mapping, dict) else mapping
    try:
        pairs = sorted((int(v), float(p)) for v, p in items)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"bad distribution {mapping!r}: {exc}") from None
    return tuple(pairs)


@dataclass(frozen=True)
class SynthConfig:
    researchers_per_country: int = 500
    target_countries: tuple[str, ...] = ("ES", "NL")
    foreign_country_pool: tuple[str, ...] = ("BE", "CH", "DE", "FR", "GB", "IT", "SE", "US")
    p_mobile: float = 0.2
    p_return_given_mobile: float = 0.5
    p_multi_affiliation: float = 0.4
    emigration_delay_distribution: tuple = ((1, 0.2), (2, 0.25), (3, 0.25), (4, 0.2), (5, 0.1))
    abroad_duration_distribution: tuple = ((1, 0.3), (2, 0.3), (3, 0.25), (4, 0.15))
    pubs_per_active_year: tuple = ((1, 0.5), (2, 0.3), (3, 0.2))
    citation_distribution: tuple = (
        (0, 0.25), (1, 0.2), (2, 0.15), (4, 0.15), (8, 0.1), (16, 0.08), (40, 0.05), (120, 0.02)
    )
    cohort_start: int = 2003
    cohort_end: int = 2005
    career_end: int = 2014
    seed: int = 42
    gap_probability: float = 0.0

    def __post_init__(self):
        for name in ("target_countries", "foreign_country_pool"):
            object.__setattr__(self, name, tuple(sorted(set(getattr(self, name)))))
        for name in (
            "emigration_delay_distribution",
            "abroad_duration_distribution",
            "pubs_per_active_year",
            "citation_distribution",
        ):
            object.__setattr__(self, name, _dist(getattr(self, name)))
        self.validate()

    def validate(self):
        if self.researchers_per_country < 0:
            raise InvalidConfig("researchers_per_country must be >= 0")
        if not self.target_countries:
            raise InvalidConfig("target_countries must be non-empty")
        for c in self.target_countries + self.foreign_country_pool:
            try:
                check_country(c)
            except ValueError as exc:
                raise InvalidConfig(str(exc)) from None
        if set(self.target_countries) & set(self.foreign_country_pool):
            raise InvalidConfig("foreign_country_pool must be disjoint from target_countries")
        for name in ("p_mobile", "p_return_given_mobile", "p_multi_affiliation", "gap_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1], got {p}")
        if self.p_mobile > 0 and not self.foreign_country_pool:
            raise InvalidConfig("foreign_country_pool is empty but p_mobile > 0")
        minimum = {
            "emigration_delay_distribution": 1,
            "abroad_duration_distribution": 1,
            "pubs_per_active_year": 1,
            "citation_distribution": 0,
        }
        for name, low in minimum.items():
            dist = getattr(self, name)
            if not dist:
                raise InvalidConfig(f"{name} is empty")
            if any(v < low for v, _ in dist):
                raise InvalidConfig(f"{name} values must be >= {low}")
            if any(not 0.0 <= p <= 1.0 for _, p in dist):
                raise InvalidConfig(f"{name} probabilities must lie in [0, 1]")
            total = math.fsum(p for _, p in dist)
            if abs(total - 1.0) > _TOL:
                raise InvalidConfig(f"{name} probabilities sum to {total}, not 1")
        CohortConfig(self.cohort_start, self.cohort_end, self.career_end, self.target_countries)
        # every planned trajectory must fit inside the career window
        span = self.career_end - self.cohort_end
        longest = max(v for v, _ in self.emigration_delay_distribution) + max(
            v for v, _ in self.abroad_duration_distribution
        )
        if longest > span:
            raise InvalidConfig(
                f"longest planned trajectory ({longest} years) exceeds career_end - cohort_end ({span})"
            )

    @property
    def cohort_config(self) -> CohortConfig:
        return CohortConfig(self.cohort_start, self.cohort_end, self.career_end, self.target_countries)

    @classmethod
    def from_dict(cls, data: dict) -> "SynthConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config field(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "SynthConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidConfig(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in (
            "emigration_delay_distribution",
            "abroad_duration_distribution",
            "pubs_per_active_year",
            "citation_distribution",
        ):
            d[name] = {str(v): p for v, p in d[name]}
        d["target_countries"] = list(self.target_countries)
        d["foreign_country_pool"] = list(self.foreign_country_pool)
        return d


@dataclass(frozen=True)
class GroundTruthLabel:
    author_id: str
    home_country: str
    first_pub_year: int
    is_mobile: bool
    is_returned: bool
    is_multiple_affiliation: bool
    emigration_year: Optional[int] = None
    return_year: Optional[int] = None

    def __post_init__(self):
        if (self.is_returned or self.is_multiple_affiliation) and not self.is_mobile:
            raise ValueError("returned / multiple-affiliation labels require is_mobile")
        if self.is_mobile != (self.emigration_year is not None):
            raise ValueError("is_mobile must match presence of emigration_year")
        if self.is_returned != (self.return_year is not None):
            raise ValueError("is_returned must match presence of return_year")

    @property
    def years_to_emigration(self) -> Optional[int]:
        return None if self.emigration_year is None else self.emigration_year - self.first_pub_year

    @property
    def years_abroad(self) -> Optional[int]:
        # the abroad spell always starts at the emigration year in generated data
        return None if self.return_year is None else self.return_year - self.emigration_year


TRUTH_COLUMNS = (
    "author_id",
    "home_country",
    "first_pub_year",
    "is_mobile",
    "is_returned",
    "is_multiple_affiliation",
    "emigration_year",
    "return_year",
)


def _draw(rng: random.Random, dist) -> int:
    values = [v for v, _ in dist]
    weights = [p for _, p in dist]
    return rng.choices(values, weights)[0]


def _researcher(config: SynthConfig, index: int, home: str):
    # per-researcher substream: output does not depend on generation order
    rng = random.Random(f"{config.seed}/{index}")
    author_id = f"R{index:07d}"
    first = rng.randint(config.cohort_start, config.cohort_end)

    mobile = rng.random() < config.p_mobile
    returned = multi = False
    emigration = ret = None
    foreign = None
    if mobile:
        foreign = rng.choice(config.foreign_country_pool)
        emigration = first + _draw(rng, config.emigration_delay_distribution)
        returned = rng.random() < config.p_return_given_mobile
        if returned:
            ret = emigration + _draw(rng, config.abroad_duration_distribution)
        multi = rng.random() < config.p_multi_affiliation

    def country_in(year):
        if emigration is not None and year >= emigration and (ret is None or year < ret):
            return foreign
        return home

    records = []
    seq = 0
    for year in range(first, config.career_end + 1):
        if year != first and config.gap_probability and rng.random() < config.gap_probability:
            continue
        countries = [[country_in(year)] for _ in range(_draw(rng, config.pubs_per_active_year))]
        if multi and year == (ret if returned else emigration):
            countries.append([home, foreign])
        for cs in countries:
            seq += 1
            records.append(
                PublicationRecord(
                    pub_id=f"{author_id}-{seq:03d}",
                    year=year,
                    authorships=(Authorship(author_id, tuple(Affiliation(c) for c in cs)),),
                    citations=_draw(rng, config.citation_distribution),
                )
            )
    label = GroundTruthLabel(author_id, home, first, mobile, returned, multi, emigration, ret)
    return records, label


def generate_corpus(config: SynthConfig) -> tuple[Corpus, list[GroundTruthLabel]]:
    """Generate a corpus and its ground truth; identical config gives identical output."""
    config.validate()
    records: dict[str, PublicationRecord] = {}
    labels = []
    index = 0
    for home in config.target_countries:
        for _ in range(config.researchers_per_country):
            recs, label = _researcher(config, index, home)
            index += 1
            for r in recs:
                records[r.pub_id] = r
            labels.append(label)
    return Corpus(records), labels


@dataclass
class AgreementReport:
    n: int = 0
    matches: dict = field(default_factory=dict)  # field name -> number of agreeing pairs
    disagreements: list = field(default_factory=list)  # (author_id, home, field, profile, truth)

    FIELDS = (
        "is_mobile",
        "is_returned",
        "is_multiple_affiliation",
        "emigration_year",
        "return_year",
        "years_to_emigration",
        "years_abroad",
    )

    def rate(self, name: str) -> float:
        return 1.0 if self.n == 0 else self.matches.get(name, 0) / self.n

    @property
    def perfect(self) -> bool:
        return not self.disagreements

    def summary(self) -> str:
        lines = [f"researchers compared: {self.n}"]
        for name in self.FIELDS:
            lines.append(f"  {name:<24} {100 * self.rate(name):6.2f}%")
        lines.append(f"disagreements: {len(self.disagreements)}")
        for aid, home, name, got, want in self.disagreements[:20]:
            lines.append(f"  {aid} ({home}) {name}: pipeline={got!r} truth={want!r}")
        if self.perfect:
            lines.append("agreement 100%")
        return "\n".join(lines)


def verify_against_truth(profiles, labels) -> AgreementReport:
    """Compare pipeline profiles with generator labels, keyed by (author, home)."""
    by_key = {(p.author_id, p.home_country): p for p in profiles}
    truth = {(t.author_id, t.home_country): t for t in labels}
    missing = sorted(set(by_key) ^ set(truth))
    if missing:
        aid, home = missing[0]
        side = "truth label" if (aid, home) in by_key else "profile"
        raise MissingAuthor(f"{len(missing)} unmatched author(s); e.g. {aid} ({home}) has no {side}")
    report = AgreementReport(n=len(truth), matches=dict.fromkeys(AgreementReport.FIELDS, 0))
    for key in sorted(truth):
        p: MobilityProfile = by_key[key]
        t = truth[key]
        for name in AgreementReport.FIELDS:
            got, want = getattr(p, name), getattr(t, name)
            if got == want:
                report.matches[name] += 1
            else:
                report.disagreements.append((key[0], key[1], name, got, want))
    return report
