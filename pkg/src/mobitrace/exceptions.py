"""Exception hierarchy.

Every error is a ``ValueError`` subclass so callers that only care about
"bad data" can catch that; the CLI maps :class:`MobitraceError` to exit 1.
"""


class MobitraceError(ValueError):
    """Base class for all data errors raised by mobitrace."""


class MalformedRecord(MobitraceError):
    pass


class InvalidCountryCode(MalformedRecord):
    pass


class MissingField(MalformedRecord):
    pass


class DuplicateAuthorInRecord(MalformedRecord):
    pass


class DuplicatePublicationId(MobitraceError):
    def __init__(self, message, report=None):
        super().__init__(message)
        # partial ValidationReport at the point of failure
        self.report = report


class UnknownAuthor(MobitraceError):
    pass


class EmptyTimeline(MobitraceError):
    pass


class InconsistentInputs(MobitraceError):
    pass


class NoMobileResearchers(MobitraceError):
    pass


class EmptyInput(MobitraceError):
    pass


class MissingCitations(MobitraceError):
    pass


class NoPublications(MobitraceError):
    pass


class InvalidConfig(MobitraceError):
    pass


class MissingAuthor(MobitraceError):
    pass


class MalformedProfiles(MobitraceError):
    pass
