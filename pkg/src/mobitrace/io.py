"""Reading and writing the pipeline's file formats.

All files are UTF-8; CSV uses ``,`` and ``\\n`` with a header row.
Absent optionals are empty strings, booleans are ``true``/``false``.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional

from .exceptions import MalformedProfiles
from .indicators import (
    GroupCountsRow,
    TemporalStatsRow,
    round_half_up,
)
from .ingest import serialize_publication
from .model import CohortMember, Corpus, MobilityProfile
from .synth import TRUTH_COLUMNS, GroundTruthLabel

PROFILE_COLUMNS = (
    "author_id",
    "home_country",
    "first_pub_year",
    "is_mobile",
    "is_multiple_affiliation",
    "is_returned",
    "emigration_year",
    "return_year",
    "years_to_emigration",
    "years_abroad",
    "publication_count",
    "hcp_count",
)
TABLE1_COLUMNS = ("home_country", "group", "n", "pct")
TABLE2_COLUMNS = ("home_country", "metric", "average", "std_dev", "population")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _profile_row(p: MobilityProfile) -> tuple:
    return (
        p.author_id,
        p.home_country,
        p.member.first_pub_year,
        p.is_mobile,
        p.is_multiple_affiliation,
        p.is_returned,
        p.emigration_year,
        p.return_year,
        p.years_to_emigration,
        p.years_abroad,
        p.publication_count,
        p.hcp_count,
    )


def write_profiles(path, profiles: Iterable[MobilityProfile]) -> int:
    rows = [_profile_row(p) for p in profiles]
    write_csv(path, PROFILE_COLUMNS, rows)
    return len(rows)


def _bool(text: str, col: str, lineno: int) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise MalformedProfiles(f"line {lineno}: {col} must be true/false, got {text!r}")


def _opt_int(text: str, col: str, lineno: int) -> Optional[int]:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        raise MalformedProfiles(f"line {lineno}: {col} must be an integer, got {text!r}") from None


def read_profiles(path) -> list[MobilityProfile]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != PROFILE_COLUMNS:
            raise MalformedProfiles(f"{path}: unexpected header {header!r}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(PROFILE_COLUMNS):
                raise MalformedProfiles(f"line {lineno}: expected {len(PROFILE_COLUMNS)} fields")
            d = dict(zip(PROFILE_COLUMNS, row))
            try:
                member = CohortMember(d["author_id"], d["home_country"], int(d["first_pub_year"]))
                out.append(
                    MobilityProfile(
                        member=member,
                        is_mobile=_bool(d["is_mobile"], "is_mobile", lineno),
                        is_multiple_affiliation=_bool(
                            d["is_multiple_affiliation"], "is_multiple_affiliation", lineno
                        ),
                        is_returned=_bool(d["is_returned"], "is_returned", lineno),
                        emigration_year=_opt_int(d["emigration_year"], "emigration_year", lineno),
                        return_year=_opt_int(d["return_year"], "return_year", lineno),
                        years_to_emigration=_opt_int(d["years_to_emigration"], "years_to_emigration", lineno),
                        years_abroad=_opt_int(d["years_abroad"], "years_abroad", lineno),
                        publication_count=int(d["publication_count"]),
                        hcp_count=int(d["hcp_count"]),
                    )
                )
            except MalformedProfiles:
                raise
            except (ValueError, TypeError) as exc:
                raise MalformedProfiles(f"line {lineno}: {exc}") from None
    return out


def write_table1(path, rows: Iterable[GroupCountsRow]) -> None:
    write_csv(path, TABLE1_COLUMNS, ((r.home_country, r.group_label, r.n, r.pct_rounded) for r in rows))


def _r2(x):
    return None if x is None else round_half_up(x, 2)


def write_table2(path, rows: Iterable[TemporalStatsRow]) -> None:
    write_csv(
        path,
        TABLE2_COLUMNS,
        ((r.home_country, r.metric, _r2(r.average), _r2(r.std_dev), r.population) for r in rows),
    )


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def write_corpus(path, corpus: Corpus) -> int:
    records = corpus.sorted_records()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(serialize_publication(r))
            fh.write("\n")
    return len(records)


def write_truth(path, labels: Iterable[GroundTruthLabel]) -> None:
    write_csv(path, TRUTH_COLUMNS, ([getattr(t, c) for c in TRUTH_COLUMNS] for t in labels))


def read_truth(path) -> list[GroundTruthLabel]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        out = []
        for lineno, d in enumerate(reader, start=2):
            out.append(
                GroundTruthLabel(
                    d["author_id"],
                    d["home_country"],
                    int(d["first_pub_year"]),
                    _bool(d["is_mobile"], "is_mobile", lineno),
                    _bool(d["is_returned"], "is_returned", lineno),
                    _bool(d["is_multiple_affiliation"], "is_multiple_affiliation", lineno),
                    _opt_int(d["emigration_year"], "emigration_year", lineno),
                    _opt_int(d["return_year"], "return_year", lineno),
                )
            )
    return out


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()
