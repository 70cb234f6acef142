"""Researcher mobility from publication affiliation records.

Reconstructs per-author country timelines, selects a first-publication
cohort, classifies each member as mobile / returned / multiply affiliated,
and computes descriptive indicators over the resulting profiles.
"""

__version__ = "0.1.0"

from .classify import (
    career_country_set,
    classify_cohort,
    classify_member,
    detect_emigration,
    detect_return,
)
from .cohort import (
    CohortConfig,
    build_timeline,
    build_timelines,
    first_publication_year,
    select_cohort,
)
from .estimators import HCPFlagger, MobilityClassifier
from .indicators import (
    boxplot_stats,
    bubble_aggregate,
    group_counts,
    hcp_flag_corpus,
    hcp_share,
    share_of_mobile,
    temporal_stats,
)
from .ingest import ValidationReport, load_corpus, parse_publication, serialize_publication, validate_corpus
from .model import (
    Affiliation,
    Authorship,
    AuthorTimeline,
    CohortMember,
    Corpus,
    MobilityProfile,
    PublicationRecord,
    YearState,
)
from .synth import SynthConfig, generate_corpus, verify_against_truth
