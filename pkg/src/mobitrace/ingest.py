"""Parsing, validation and loading of newline-delimited publication records.

Each input line is one JSON object::

    {"pub_id": "p1", "year": 2003,
     "authorships": [{"author_id": "a1", "affiliations": [{"country": "ES"}]}],
     "citations": 4, "hcp_flag": false, "field_code": "PHYS"}
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .exceptions import (
    DuplicateAuthorInRecord,
    DuplicatePublicationId,
    InvalidCountryCode,
    MalformedRecord,
    MissingField,
)
from .model import Affiliation, Authorship, Corpus, PublicationRecord

logger = logging.getLogger(__name__)

RECORD_FIELDS = ("pub_id", "year", "authorships", "citations", "hcp_flag", "field_code")
_AUTHORSHIP_FIELDS = ("author_id", "affiliations")
_AFFILIATION_FIELDS = ("institution_id", "country")


@dataclass
class ValidationReport:
    records_read: int = 0
    records_accepted: int = 0
    errors: list = field(default_factory=list)  # (line_number, error_kind, message)
    warnings: list = field(default_factory=list)  # (line_number, warning_kind, message)

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(
            self.records_read + other.records_read,
            self.records_accepted + other.records_accepted,
            self.errors + other.errors,
            self.warnings + other.warnings,
        )

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "records_read": self.records_read,
            "records_accepted": self.records_accepted,
            "errors": [
                {"line": ln, "kind": kind, "message": msg} for ln, kind, msg in self.errors
            ],
            "warnings": [
                {"line": ln, "kind": kind, "message": msg} for ln, kind, msg in self.warnings
            ],
        }


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _require_str(obj: dict, key: str, ctx: str) -> str:
    if key not in obj or obj[key] is None:
        raise MissingField(f"missing required field {ctx}{key}")
    value = obj[key]
    if not isinstance(value, str) or not value:
        raise MalformedRecord(f"{ctx}{key} must be a non-empty string")
    return value


def _unknown(obj: dict, known, ctx: str, warnings: Optional[list]):
    if warnings is None:
        return
    for key in obj:
        if key not in known:
            warnings.append(("UnknownField", f"ignored unknown field {ctx}{key}"))


def _parse_affiliation(obj, ctx: str, warnings) -> Affiliation:
    if not isinstance(obj, dict):
        raise MalformedRecord(f"{ctx} must be an object")
    if "country" not in obj or obj["country"] is None:
        raise MissingField(f"missing required field {ctx}.country")
    country = obj["country"]
    if not isinstance(country, str):
        raise InvalidCountryCode(f"{ctx}.country must be a string, got {country!r}")
    inst = obj.get("institution_id")
    if inst is not None and not isinstance(inst, str):
        raise MalformedRecord(f"{ctx}.institution_id must be a string")
    _unknown(obj, _AFFILIATION_FIELDS, ctx + ".", warnings)
    return Affiliation(country=country.upper(), institution_id=inst)


def _parse_authorship(obj, ctx: str, warnings) -> Authorship:
    if not isinstance(obj, dict):
        raise MalformedRecord(f"{ctx} must be an object")
    author_id = _require_str(obj, "author_id", ctx + ".")
    affs = obj.get("affiliations", [])
    if affs is None:
        affs = []
    if not isinstance(affs, list):
        raise MalformedRecord(f"{ctx}.affiliations must be an array")
    _unknown(obj, _AUTHORSHIP_FIELDS, ctx + ".", warnings)
    return Authorship(
        author_id,
        tuple(_parse_affiliation(a, f"{ctx}.affiliations[{i}]", warnings) for i, a in enumerate(affs)),
    )


def parse_publication(line: str, warnings: Optional[list] = None) -> PublicationRecord:
    """Parse one input line into a validated :class:`PublicationRecord`.

    Country codes are uppercased before validation. Unknown fields are
    ignored; if ``warnings`` is a list, ``(kind, message)`` tuples are
    appended to it for each of them.

    Raises
    ------
    MalformedRecord, InvalidCountryCode, MissingField, DuplicateAuthorInRecord
    """
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedRecord(f"unparseable line: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedRecord("record must be a JSON object")

    pub_id = _require_str(obj, "pub_id", "")
    if obj.get("year") is None:
        raise MissingField(f"{pub_id}: missing required field year")
    year = obj["year"]
    if not _is_int(year):
        raise MalformedRecord(f"{pub_id}: year must be an integer")
    auths = obj.get("authorships")
    if auths is None or auths == []:
        raise MissingField(f"{pub_id}: missing required field authorships")
    if not isinstance(auths, list):
        raise MalformedRecord(f"{pub_id}: authorships must be an array")

    citations = obj.get("citations")
    if citations is not None and (not _is_int(citations) or citations < 0):
        raise MalformedRecord(f"{pub_id}: citations must be a non-negative integer")
    hcp_flag = obj.get("hcp_flag")
    if hcp_flag is not None and not isinstance(hcp_flag, bool):
        raise MalformedRecord(f"{pub_id}: hcp_flag must be a boolean")
    field_code = obj.get("field_code")
    if field_code is not None and not isinstance(field_code, str):
        raise MalformedRecord(f"{pub_id}: field_code must be a string")

    _unknown(obj, RECORD_FIELDS, "", warnings)
    authorships = tuple(
        _parse_authorship(a, f"authorships[{i}]", warnings) for i, a in enumerate(auths)
    )
    return PublicationRecord(pub_id, year, authorships, citations, hcp_flag, field_code)


def record_to_dict(record: PublicationRecord) -> dict:
    out = {
        "pub_id": record.pub_id,
        "year": record.year,
        "authorships": [
            {
                "author_id": a.author_id,
                "affiliations": [
                    {"country": f.country}
                    if f.institution_id is None
                    else {"institution_id": f.institution_id, "country": f.country}
                    for f in a.affiliations
                ],
            }
            for a in record.authorships
        ],
    }
    for key in ("citations", "hcp_flag", "field_code"):
        value = getattr(record, key)
        if value is not None:
            out[key] = value
    return out


def serialize_publication(record: PublicationRecord) -> str:
    """Inverse of :func:`parse_publication` (single line, no trailing newline)."""
    return json.dumps(record_to_dict(record), ensure_ascii=False, separators=(",", ":"))


def _parse_chunk(start: int, lines: list[str]):
    out = []
    for offset, line in enumerate(lines):
        lineno = start + offset
        if not line.strip():
            continue
        warns: list = []
        try:
            rec = parse_publication(line, warns)
        except MalformedRecord as exc:
            out.append((lineno, None, (type(exc).__name__, str(exc)), warns))
        else:
            out.append((lineno, rec, None, warns))
    return out


def _parsed_lines(lines: list[str], jobs: int):
    if jobs <= 1 or len(lines) < 2000:
        yield from _parse_chunk(1, lines)
        return
    size = -(-len(lines) // (jobs * 4))
    starts = list(range(0, len(lines), size))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so merge order is the line order
        for chunk in pool.map(_parse_chunk, [s + 1 for s in starts], [lines[s:s + size] for s in starts]):
            yield from chunk


def load_corpus(record_stream: Iterable[str], on_error: str = "fail", jobs: int = 1):
    """Load a corpus from an iterable of lines.

    Returns ``(corpus, report)``. With ``on_error="fail"`` the first record
    error is raised; with ``"skip"`` bad lines are recorded in the report and
    skipped. A duplicate ``pub_id`` is always fatal.
    """
    if on_error not in ("fail", "skip"):
        raise ValueError(f"on_error must be 'fail' or 'skip', got {on_error!r}")
    lines = [ln.rstrip("\r\n") for ln in record_stream]
    report = ValidationReport()
    records: dict[str, PublicationRecord] = {}
    first_seen: dict[str, int] = {}
    for lineno, rec, err, warns in _parsed_lines(lines, jobs):
        report.records_read += 1
        report.warnings.extend((lineno, kind, msg) for kind, msg in warns)
        if err is not None:
            kind, msg = err
            report.errors.append((lineno, kind, msg))
            if on_error == "fail":
                exc_type = _ERROR_TYPES.get(kind, MalformedRecord)
                raise exc_type(f"line {lineno}: {msg}")
            continue
        if rec.pub_id in records:
            msg = f"pub_id {rec.pub_id!r} already defined on line {first_seen[rec.pub_id]}"
            report.errors.append((lineno, "DuplicatePublicationId", msg))
            raise DuplicatePublicationId(f"line {lineno}: {msg}", report=report)
        records[rec.pub_id] = rec
        first_seen[rec.pub_id] = lineno
        report.records_accepted += 1
    return Corpus(records), report


_ERROR_TYPES = {
    cls.__name__: cls
    for cls in (MalformedRecord, InvalidCountryCode, MissingField, DuplicateAuthorInRecord)
}


def validate_corpus(
    corpus: Corpus,
    career_start: Optional[int] = None,
    career_end: Optional[int] = None,
    require_citations: bool = False,
) -> ValidationReport:
    """Warn about soft problems in a loaded corpus; never raises.

    Line numbers in the returned report are 0 (records are addressed by
    pub_id in the message).
    """
    report = ValidationReport(records_read=len(corpus), records_accepted=len(corpus))
    for rec in corpus.sorted_records():
        for a in rec.authorships:
            if not a.affiliations:
                report.warnings.append(
                    (0, "NoAffiliationLink", f"{rec.pub_id}: author {a.author_id} has no affiliation")
                )
        if (career_end is not None and rec.year > career_end) or (
            career_start is not None and rec.year < career_start
        ):
            report.warnings.append(
                (0, "OutsideCareerWindow", f"{rec.pub_id}: year {rec.year} outside career window")
            )
        if require_citations and rec.citations is None and rec.hcp_flag is None:
            report.warnings.append(
                (0, "MissingCitations", f"{rec.pub_id}: no citations for HCP computation")
            )
    return report
