"""Exception hierarchy shared by every module."""


class GbdsError(Exception):
    """Base class; the CLI maps these to exit status 1."""

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class DuplicateAtom(GbdsError):
    pass


class AlgebraMismatch(GbdsError):
    pass


class UnsupportedIdealForm(GbdsError):
    pass


class UnsupportedBackend(GbdsError):
    pass


class ActionEvaluationError(GbdsError):
    pass


class UnknownLabel(GbdsError):
    pass


class InvalidSystem(GbdsError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

    def to_dict(self):
        d = super().to_dict()
        if self.report is not None:
            d["violations"] = self.report.to_dict()["violations"]
        return d


class InvalidIdeal(GbdsError):
    pass


class SizeLimit(GbdsError):
    pass


class DepthExceeded(GbdsError):
    pass


class InvalidGenerator(GbdsError):
    pass


class NotExpandable(GbdsError):
    pass


class NotWeaklyLeftResolving(GbdsError):
    def __init__(self, label, u, u2, w):
        super().__init__(
            f"label {label!r}: vertices {u!r} and {u2!r} both reach {w!r}")
        self.witness = (label, u, u2, w)


class InternalInvariantViolation(GbdsError):
    pass


class ShapeError(GbdsError):
    pass


class ParseError(GbdsError):
    """Malformed input (JSON schema, term syntax); CLI exit status 2."""
