import dataclasses
import math

import pytest

from mobitrace.classify import classify_cohort
from mobitrace.cohort import build_timelines, select_cohort
from mobitrace.exceptions import InvalidConfig, MissingAuthor
from mobitrace.ingest import serialize_publication
from mobitrace.synth import SynthConfig, generate_corpus, verify_against_truth


def pipeline(corpus, config):
    cohort = config.cohort_config
    timelines = build_timelines(corpus, cohort.career_end)
    return classify_cohort(select_cohort(corpus, cohort, timelines), timelines)


def small(**kw):
    return SynthConfig(researchers_per_country=200, **kw)


def test_non_mobile_when_p_mobile_zero():
    corpus, labels = generate_corpus(small(p_mobile=0.0))
    assert not any(t.is_mobile for t in labels)
    timelines = build_timelines(corpus, 2014)
    assert all(len(set().union(*(s.countries for s in tl.years.values()))) == 1 for tl in timelines.values())


def test_degenerate_distributions_force_trajectory():
    cfg = small(p_mobile=1.0, p_return_given_mobile=1.0,
                emigration_delay_distribution={3: 1.0}, abroad_duration_distribution={2: 1.0})
    _, labels = generate_corpus(cfg)
    for t in labels:
        assert t.is_mobile and t.is_returned
        assert t.emigration_year == t.first_pub_year + 3
        assert t.return_year == t.emigration_year + 2


def test_seed_determinism():
    def dump(cfg):
        corpus, labels = generate_corpus(cfg)
        return [serialize_publication(r) for r in corpus.sorted_records()], labels

    assert dump(small(seed=42)) == dump(small(seed=42))
    assert dump(small(seed=42)) != dump(small(seed=43))


def test_every_active_year_has_a_publication():
    corpus, labels = generate_corpus(small())
    timelines = build_timelines(corpus, 2014)
    for t in labels:
        assert sorted(timelines[t.author_id].years) == list(range(t.first_pub_year, 2015))


def test_multi_affiliation_publication_present():
    corpus, labels = generate_corpus(small(p_mobile=1.0, p_multi_affiliation=1.0))
    timelines = build_timelines(corpus, 2014)
    assert all(any(s.has_multi_country_pub for s in timelines[t.author_id].years.values()) for t in labels)


def test_clean_corpus_full_agreement():
    cfg = small(p_mobile=0.5, p_return_given_mobile=0.5, p_multi_affiliation=0.5)
    corpus, labels = generate_corpus(cfg)
    report = verify_against_truth(pipeline(corpus, cfg), labels)
    assert report.perfect
    assert all(report.rate(f) == 1.0 for f in report.FIELDS)


def test_fault_injection_one_disagreement():
    cfg = small(p_mobile=0.5)
    corpus, labels = generate_corpus(cfg)
    profiles = pipeline(corpus, cfg)
    victim = next(i for i, p in enumerate(profiles) if p.is_mobile and not p.is_multiple_affiliation)
    profiles[victim] = dataclasses.replace(profiles[victim], is_multiple_affiliation=True)
    report = verify_against_truth(profiles, labels)
    assert len(report.disagreements) == 1
    assert report.disagreements[0][2] == "is_multiple_affiliation"


def test_disjoint_authors():
    cfg = small()
    corpus, labels = generate_corpus(cfg)
    with pytest.raises(MissingAuthor):
        verify_against_truth(pipeline(corpus, cfg)[1:], labels)


def test_gaps_degrade_but_never_invent_mobility():
    cfg = small(p_mobile=0.5, gap_probability=0.5)
    corpus, labels = generate_corpus(cfg)
    report = verify_against_truth(pipeline(corpus, cfg), labels)
    truth = {t.author_id: t for t in labels}
    for aid, _, name, got, want in report.disagreements:
        if name == "is_mobile":
            assert want is True and got is False
        assert truth[aid].is_mobile


@pytest.mark.parametrize(
    "kw",
    [
        {"p_mobile": 1.5},
        {"emigration_delay_distribution": {1: 0.5, 2: 0.4}},
        {"foreign_country_pool": ("ES", "FR")},
        {"emigration_delay_distribution": {0: 1.0}},
        {"emigration_delay_distribution": {6: 1.0}, "abroad_duration_distribution": {4: 1.0}},
        {"target_countries": ("Spain",)},
        {"cohort_start": 2006},
    ],
)
def test_invalid_config(kw):
    with pytest.raises(InvalidConfig):
        SynthConfig(**kw)


def test_config_dict_round_trip():
    cfg = small(seed=7)
    assert SynthConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(InvalidConfig):
        SynthConfig.from_dict({"bogus": 1})


def test_mobile_share_within_three_standard_errors():
    cfg = SynthConfig(researchers_per_country=2500, p_mobile=0.3)
    _, labels = generate_corpus(cfg)
    n = len(labels)
    share = sum(t.is_mobile for t in labels) / n
    assert abs(share - 0.3) <= 3 * math.sqrt(0.3 * 0.7 / n)
