"""Command-line interface.

Subcommands: ``validate``, ``classify``, ``report``, ``synth``, ``run-all``.
Exit codes: 0 success, 1 data error, 2 I/O or usage error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .classify import classify_cohort
from .cohort import (
    DEFAULT_CAREER_END,
    DEFAULT_COHORT_END,
    DEFAULT_COHORT_START,
    DEFAULT_TARGETS,
    build_timelines,
    select_cohort,
)
from .exceptions import DuplicatePublicationId, MissingCitations, MobitraceError
from .indicators import (
    GROUPINGS,
    boxplot_table,
    bubble_aggregate,
    group_counts,
    hcp_flag_corpus,
    temporal_stats,
)
from .ingest import ValidationReport, load_corpus, validate_corpus
from .io import (
    file_digest,
    read_profiles,
    write_corpus,
    write_json,
    write_profiles,
    write_table1,
    write_table2,
    write_truth,
)
from .synth import SynthConfig, generate_corpus, verify_against_truth
from .validation import check_cohort_config

log = logging.getLogger("mobitrace")

EXIT_OK, EXIT_DATA, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3
REPORT_FILES = ("table1.csv", "table2.csv", "fig1_boxplots.json", "fig2_bubbles.json")


class VerificationFailed(Exception):
    pass


def _default_jobs() -> int:
    value = os.environ.get("MOBITRACE_JOBS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _write_manifest(path, args, config: dict, inputs: dict, counts: dict) -> None:
    manifest = {
        "tool": "mobitrace",
        "version": __version__,
        "command": ["mobitrace"] + list(args.argv),
        "config": config,
        "inputs": {str(p): file_digest(p) for p in inputs.values() if p is not None},
        "counts": counts,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }
    write_json(path, manifest)


def _read_corpus(path, on_error: str, jobs: int):
    with open(path, encoding="utf-8") as fh:
        corpus, report = load_corpus(fh, on_error=on_error, jobs=jobs)
    for lineno, kind, msg in report.warnings:
        log.warning("line %d: %s: %s", lineno, kind, msg)
    for lineno, kind, msg in report.errors:
        log.warning("line %d: skipped (%s): %s", lineno, kind, msg)
    return corpus, report


def _apply_hcp(corpus, strata: str, recompute: bool):
    """Fill in missing HCP flags from citations where possible."""
    if recompute:
        return hcp_flag_corpus(corpus, strata, recompute=True)
    if all(r.hcp_flag is not None for r in corpus.values()):
        return corpus
    try:
        return hcp_flag_corpus(corpus, strata)
    except MissingCitations as exc:
        log.warning("HCP flags not computed (%s); unflagged records count as not highly cited", exc)
        return corpus


def _cohort_config(args):
    return check_cohort_config(args.cohort_start, args.cohort_end, args.career_end, args.targets)


def _classify(args):
    config = _cohort_config(args)
    corpus, report = _read_corpus(args.input, args.on_error, args.jobs)
    soft = validate_corpus(corpus, career_end=config.career_end)
    n_soft = len(soft.warnings)
    if n_soft:
        log.info("%d soft validation warning(s); run `mobitrace validate` for details", n_soft)
    corpus = _apply_hcp(corpus, args.hcp_strata, args.recompute_hcp)
    timelines = build_timelines(corpus, config.career_end)
    members = select_cohort(corpus, config, timelines)
    if not members:
        log.warning("cohort is empty for %s", _config_dict(config))
    profiles = classify_cohort(members, timelines, jobs=args.jobs)
    counts = {
        "records": len(corpus),
        "authors": len(timelines),
        "cohort_members": len(members),
        "profiles": len(profiles),
    }
    return config, profiles, counts


def _config_dict(config) -> dict:
    return {
        "cohort_start": config.cohort_start,
        "cohort_end": config.cohort_end,
        "career_end": config.career_end,
        "target_countries": sorted(config.target_countries),
    }


def _write_reports(out_dir: Path, profiles) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_table1(out_dir / "table1.csv", group_counts(profiles))
    write_table2(out_dir / "table2.csv", temporal_stats(profiles))
    write_json(out_dir / "fig1_boxplots.json", boxplot_table(profiles))
    bubbles = [b.to_dict() for g in GROUPINGS for b in bubble_aggregate(profiles, g)]
    write_json(out_dir / "fig2_bubbles.json", bubbles)
    return {"profiles": len(profiles), "bubbles": len(bubbles)}


def cmd_validate(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            corpus, report = load_corpus(fh, on_error=args.on_error, jobs=args.jobs)
    except DuplicatePublicationId as exc:
        report = exc.report or ValidationReport()
        corpus = None
    except MobitraceError as exc:
        report = ValidationReport(errors=[(0, type(exc).__name__, str(exc))])
        corpus = None
    if corpus is not None:
        soft = validate_corpus(
            corpus,
            career_end=args.career_end,
            require_citations=args.require_citations,
        )
        report.warnings.extend(soft.warnings)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.ok else EXIT_DATA


def cmd_classify(args) -> int:
    config, profiles, counts = _classify(args)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_profiles(out, profiles)
    _write_manifest(
        out.with_name(out.name + ".manifest.json"),
        args,
        _config_dict(config) | {"hcp_strata": args.hcp_strata, "recompute_hcp": args.recompute_hcp},
        {"input": args.input},
        counts,
    )
    return EXIT_OK


def cmd_report(args) -> int:
    profiles = read_profiles(args.profiles)
    if args.recompute_hcp and not args.corpus:
        raise MissingCitations("--recompute-hcp needs --corpus with citation data")
    if args.corpus:
        corpus, _ = _read_corpus(args.corpus, "fail", args.jobs)
        corpus = _apply_hcp(corpus, args.hcp_strata, args.recompute_hcp)
        timelines = build_timelines(corpus, args.career_end)
        recount = []
        for p in profiles:
            tl = timelines.get(p.author_id)
            hcp = sum(s.hcp_count for s in tl.years.values()) if tl else 0
            recount.append(dataclasses.replace(p, hcp_count=hcp))
        profiles = recount
    out_dir = Path(args.output_dir)
    counts = _write_reports(out_dir, profiles)
    _write_manifest(
        out_dir / "manifest.json",
        args,
        {"hcp_strata": args.hcp_strata, "recompute_hcp": args.recompute_hcp, "career_end": args.career_end},
        {"profiles": args.profiles, "corpus": args.corpus},
        counts,
    )
    return EXIT_OK


def cmd_run_all(args) -> int:
    config, profiles, counts = _classify(args)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_profiles(out_dir / "profiles.csv", profiles)
    counts |= _write_reports(out_dir, profiles)
    _write_manifest(
        out_dir / "manifest.json",
        args,
        _config_dict(config) | {"hcp_strata": args.hcp_strata, "recompute_hcp": args.recompute_hcp},
        {"input": args.input},
        counts,
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    config = SynthConfig.from_json(args.config) if args.config else SynthConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    corpus, labels = generate_corpus(config)
    corpus_path = Path(args.corpus)
    corpus_path.parent.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus_path, corpus)
    truth_path = Path(args.truth) if args.truth else corpus_path.with_name("truth.csv")
    write_truth(truth_path, labels)
    counts = {"records": len(corpus), "researchers": len(labels)}
    status = EXIT_OK
    if args.verify:
        flagged = hcp_flag_corpus(corpus)
        cohort = config.cohort_config
        timelines = build_timelines(flagged, cohort.career_end)
        members = select_cohort(flagged, cohort, timelines)
        profiles = classify_cohort(members, timelines, jobs=args.jobs)
        report = verify_against_truth(profiles, labels)
        print(report.summary())
        counts["mobile_profiles"] = sum(p.is_mobile for p in profiles)
        counts["disagreements"] = len(report.disagreements)
        if not report.perfect:
            status = EXIT_VERIFY
    _write_manifest(
        corpus_path.with_name(corpus_path.name + ".manifest.json"),
        args,
        config.to_dict(),
        {"config": args.config},
        counts,
    )
    return status


def _add_cohort_flags(p):
    p.add_argument("--cohort-start", type=int, default=DEFAULT_COHORT_START)
    p.add_argument("--cohort-end", type=int, default=DEFAULT_COHORT_END)
    p.add_argument("--career-end", type=int, default=DEFAULT_CAREER_END)
    p.add_argument("--targets", default=",".join(DEFAULT_TARGETS), help="comma-separated ISO codes")
    p.add_argument("--on-error", choices=("fail", "skip"), default="fail")


def _add_hcp_flags(p):
    p.add_argument("--hcp-strata", choices=("year", "year-field"), default="year")
    p.add_argument("--recompute-hcp", action="store_true", help="overwrite upstream hcp_flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobitrace", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=int, default=None, help="worker processes (env MOBITRACE_JOBS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[jobs], help="check a corpus file")
    p.add_argument("input")
    p.add_argument("--on-error", choices=("fail", "skip"), default="fail")
    p.add_argument("--career-end", type=int, default=DEFAULT_CAREER_END)
    p.add_argument("--require-citations", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify", parents=[jobs], help="corpus -> profiles CSV")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_cohort_flags(p)
    _add_hcp_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", parents=[jobs], help="profiles CSV -> tables and plot data")
    p.add_argument("profiles")
    p.add_argument("-o", "--output-dir", required=True)
    p.add_argument("--corpus", help="corpus with citations, to recount HCPs")
    p.add_argument("--career-end", type=int, default=DEFAULT_CAREER_END)
    _add_hcp_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", parents=[jobs], help="generate a synthetic corpus with ground truth")
    p.add_argument("--config", help="synth.json")
    p.add_argument("--seed", type=int)
    p.add_argument("--corpus", required=True, help="output corpus (.jsonl)")
    p.add_argument("--truth", help="output truth CSV (default: truth.csv next to the corpus)")
    p.add_argument("--verify", action="store_true", help="run the pipeline and compare with truth")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run-all", parents=[jobs], help="classify and report in one go")
    p.add_argument("input")
    p.add_argument("-o", "--output-dir", required=True)
    _add_cohort_flags(p)
    _add_hcp_flags(p)
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    if args.jobs is None:
        args.jobs = _default_jobs()
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="mobitrace: %(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except MobitraceError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
