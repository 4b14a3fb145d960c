"""Exception hierarchy shared by every module."""


class LotlError(Exception):
    """Base class for all library errors."""


class ParseError(LotlError):
    """Raised on malformed formula, word-term or automaton text."""

    def __init__(self, message, offset=None, text=None):
        self.offset = offset
        self.text = text
        if offset is not None:
            message = f"{message} at offset {offset}"
        super().__init__(message)


class UnknownPropositionError(ParseError):
    pass


class ShapeError(LotlError):
    """Two word terms (or a term and a run) do not have the same structure."""


class InfiniteTermError(ShapeError):
    pass


class AlphabetError(LotlError):
    """A letter or an automaton alphabet does not fit where it is used."""


class RunError(LotlError):
    """A proposed run violates the run conditions.

    ``location`` names the cut or position where the first violation was found.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class NoRunError(LotlError):
    """The search proved that no (eventually periodic) accepting run exists."""


class BudgetExceeded(LotlError):
    """The run search gave up before finishing; absence is not proven."""


class ResourceExceeded(LotlError):
    """Saturation hit its item cap.

    ``partial`` holds the items derived so far; they are a sound
    under-approximation of the full fixed point.
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class SerializationError(LotlError):
    pass
