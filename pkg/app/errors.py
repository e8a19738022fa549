# errors.py
#
# Every failure the library signals on purpose derives from BsError, so the
# command line can map them to one exit status and a one-line diagnostic.


class BsError(Exception):
    """Base class for the errors raised by the library."""

    def __init__(self, reason=""):
        super().__init__(reason)
        self.reason = reason

    def __str__(self):
        return self.reason


class ParseError(BsError):
    """Malformed word, graph, preaction or config text."""


class BadParams(BsError):
    """Parameters or experiment settings outside the supported regime."""


class NotConnected(BsError):
    pass


class PhenotypeMismatch(BsError):
    pass


class MissingRoot(BsError):
    pass


class AlreadySaturated(BsError):
    pass


class InvalidGraph(BsError):
    pass


class HypothesesNotMet(BsError):
    """The inputs of a pasting do not satisfy the merge conditions."""


class HypothesisViolated(BsError):
    def __init__(self, index, reason=""):
        super().__init__(reason or f"hypothesis violated at step {index}")
        self.index = index

    def __reduce__(self):
        return type(self), (self.index, self.reason)


class UndefinedAction(BsError):
    """A letter of a word is not defined on the current point."""

    def __init__(self, prefix_length, reason=""):
        super().__init__(reason or f"undefined after prefix of length {prefix_length}")
        self.prefix_length = prefix_length

    def __reduce__(self):
        return type(self), (self.prefix_length, self.reason)
