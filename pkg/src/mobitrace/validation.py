"""Input validation helpers used by the estimators and the CLI."""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping

from .cohort import CohortConfig
from .exceptions import DuplicatePublicationId, InvalidConfig, MalformedProfiles
from .ingest import load_corpus, parse_publication
from .model import Corpus, MobilityProfile, PublicationRecord, check_country


def check_corpus(X) -> Corpus:
    """Coerce ``X`` to a :class:`Corpus`.

    Accepts a Corpus, a mapping of pub_id to record, or an iterable of
    :class:`PublicationRecord`, dicts or JSON lines.
    """
    if isinstance(X, Corpus):
        return X
    if isinstance(X, Mapping):
        items = X.values()
    elif isinstance(X, (str, bytes)):
        raise TypeError("expected a corpus or an iterable of records, got a string")
    elif isinstance(X, Iterable):
        items = list(X)
    else:
        raise TypeError(f"cannot interpret {type(X).__name__} as a corpus")

    if items and all(isinstance(x, str) for x in items):
        corpus, _ = load_corpus(items)
        return corpus
    records = {}
    for x in items:
        if isinstance(x, dict):
            x = parse_publication(json.dumps(x))
        if not isinstance(x, PublicationRecord):
            raise TypeError(f"cannot interpret {type(x).__name__} as a publication record")
        if x.pub_id in records:
            raise DuplicatePublicationId(f"pub_id {x.pub_id!r} occurs twice")
        records[x.pub_id] = x
    return Corpus(records)


def check_targets(targets) -> frozenset[str]:
    if isinstance(targets, str):
        targets = [t for t in targets.split(",") if t.strip()]
    out = frozenset(t.strip().upper() for t in targets)
    if not out:
        raise InvalidConfig("at least one target country is required")
    for t in out:
        try:
            check_country(t)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
    return out


def check_cohort_config(cohort_start, cohort_end, career_end, target_countries) -> CohortConfig:
    for name, value in (("cohort_start", cohort_start), ("cohort_end", cohort_end), ("career_end", career_end)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise InvalidConfig(f"{name} must be an integer year, got {value!r}")
    return CohortConfig(cohort_start, cohort_end, career_end, check_targets(target_countries))


def check_profiles(profiles) -> list[MobilityProfile]:
    out = list(profiles)
    for p in out:
        if not isinstance(p, MobilityProfile):
            raise MalformedProfiles(f"expected MobilityProfile, got {type(p).__name__}")
    return out
