"""scikit-learn compatible wrappers around the pipeline.

Both estimators take a corpus (or anything :func:`check_corpus` accepts) as
``X`` and compose in a :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(HCPFlagger(strata="year"), MobilityClassifier())
    profiles = pipe.fit_transform(corpus)
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .classify import classify_cohort
from .cohort import (
    DEFAULT_CAREER_END,
    DEFAULT_COHORT_END,
    DEFAULT_COHORT_START,
    DEFAULT_TARGETS,
    build_timelines,
    select_cohort,
)
from .indicators import stratum_key, apply_hcp_cutoffs, hcp_cutoffs
from .validation import check_cohort_config, check_corpus


class HCPFlagger(TransformerMixin, BaseEstimator):
    """Flag the top 10% most cited records within each stratum.

    Parameters
    ----------
    strata : {"year", "year-field"}, default="year"
        Records are ranked within the same publication year, optionally
        also within the same ``field_code``.
    recompute : bool, default=False
        Overwrite ``hcp_flag`` values already present in the input.

    Attributes
    ----------
    cutoffs_ : dict
        Per stratum, the ``(-citations, pub_id)`` rank key of the last
        flagged record. Ties on citations are broken by ascending pub_id.
    """

    def __init__(self, strata="year", recompute=False):
        self.strata = strata
        self.recompute = recompute

    def _needs_flag(self, rec):
        return self.recompute or rec.hcp_flag is None

    def fit(self, X, y=None):
        if self.strata not in ("year", "year-field"):
            raise ValueError(f"strata must be 'year' or 'year-field', got {self.strata!r}")
        corpus = check_corpus(X)
        todo = {stratum_key(r, self.strata) for r in corpus.values() if self._needs_flag(r)}
        self.cutoffs_ = hcp_cutoffs(
            (r for r in corpus.values() if stratum_key(r, self.strata) in todo), self.strata
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "cutoffs_")
        return apply_hcp_cutoffs(check_corpus(X), self.cutoffs_, self.strata, self.recompute)


class MobilityClassifier(TransformerMixin, BaseEstimator):
    """Select the cohort of a corpus and classify every member's mobility.

    Parameters
    ----------
    cohort_start, cohort_end : int, default=2003, 2005
        Window for the year of first publication.
    career_end : int, default=2014
        Publications after this year are ignored.
    target_countries : sequence of str or comma-separated str, default=("ES", "NL")
        Candidate home countries.
    n_jobs : int, default=1
        Worker processes for classification. Output does not depend on it.

    Attributes
    ----------
    config_ : CohortConfig
    timelines_ : dict of author_id -> AuthorTimeline, from the fitted corpus
    members_ : list of CohortMember, from the fitted corpus
    """

    def __init__(
        self,
        cohort_start=DEFAULT_COHORT_START,
        cohort_end=DEFAULT_COHORT_END,
        career_end=DEFAULT_CAREER_END,
        target_countries=DEFAULT_TARGETS,
        n_jobs=1,
    ):
        self.cohort_start = cohort_start
        self.cohort_end = cohort_end
        self.career_end = career_end
        self.target_countries = target_countries
        self.n_jobs = n_jobs

    def _config(self):
        return check_cohort_config(
            self.cohort_start, self.cohort_end, self.career_end, self.target_countries
        )

    def fit(self, X, y=None):
        self.config_ = self._config()
        corpus = check_corpus(X)
        self.timelines_ = build_timelines(corpus, self.config_.career_end)
        self.members_ = select_cohort(corpus, self.config_, self.timelines_)
        return self

    def transform(self, X):
        """Return the list of :class:`MobilityProfile` for the cohort of ``X``."""
        check_is_fitted(self, "config_")
        corpus = check_corpus(X)
        timelines = build_timelines(corpus, self.config_.career_end)
        members = select_cohort(corpus, self.config_, timelines)
        return classify_cohort(members, timelines, jobs=self.n_jobs)

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        return classify_cohort(self.members_, self.timelines_, jobs=self.n_jobs)
