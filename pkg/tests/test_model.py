import pytest

from mobitrace.exceptions import DuplicateAuthorInRecord, InvalidCountryCode, MalformedRecord
from mobitrace.model import (
    Affiliation,
    Authorship,
    CohortMember,
    MobilityProfile,
    PublicationRecord,
    YearState,
)

M = CohortMember("a", "ES", 2003)


def test_affiliation_country_format():
    assert Affiliation("ES").country == "ES"
    for bad in ("es", "ESP", "E", "1A"):
        with pytest.raises(InvalidCountryCode):
            Affiliation(bad)


def test_publication_invariants():
    a = Authorship("a", (Affiliation("ES"),))
    with pytest.raises(MalformedRecord):
        PublicationRecord("p", 2003, ())
    with pytest.raises(MalformedRecord):
        PublicationRecord("p", 2101, (a,))
    with pytest.raises(DuplicateAuthorInRecord):
        PublicationRecord("p", 2003, (a, a))


def test_year_state_multi_needs_two_countries():
    with pytest.raises(ValueError):
        YearState(frozenset({"ES"}), ("p",), True)
    YearState(frozenset(), ("p",))


def test_profile_valid():
    p = MobilityProfile(M, True, True, True, 2005, 2008, 2, 3, 10, 1)
    assert p.author_id == "a" and p.home_country == "ES"


@pytest.mark.parametrize(
    "args",
    [
        (M, False, False, True, None, 2008, None, 1, 3, 0),  # returned but not mobile
        (M, False, True, False, None, None, None, None, 3, 0),  # multi but not mobile
        (M, True, False, False, None, None, None, None, 3, 0),  # mobile without emigration
        (M, True, False, False, 2005, None, 1, None, 3, 0),  # wrong years_to_emigration
        (M, True, False, True, 2005, 2005, 2, 0, 3, 0),  # return not after emigration
        (M, False, False, False, None, None, None, None, 3, 4),  # hcp > pubs
    ],
)
def test_profile_invariants_rejected(args):
    with pytest.raises(ValueError):
        MobilityProfile(*args)
