"""Exception hierarchy shared by all modules."""


class RospaceError(Exception):
    """Base class for every error raised by the package."""


class AlphabetError(RospaceError, ValueError):
    """A letter is not a generator of the free factor system."""


class StructuralError(RospaceError, ValueError):
    """Malformed combinatorial input (bad edge data, unknown vertices, ...)."""


class DomainError(RospaceError, ValueError):
    """An operation was called outside its mathematical domain."""


class VerificationIncomplete(RospaceError):
    """A certificate cannot be produced with the data supplied."""


class ResourceError(RospaceError):
    """An enumeration or closure computation exceeded its budget."""


class AuditError(RospaceError):
    """A finite generating family failed its stabilization audit."""


class InvariantFailure(RospaceError, AssertionError):
    """A proven bound or identity was violated; indicates a bug."""


class DegenerateSystemError(RospaceError, ValueError):
    """The free factor system does not admit the requested construction."""


class UnsupportedTree(RospaceError, ValueError):
    """The tree lies outside the supported class (nontrivial edge groups)."""


class SchemaError(RospaceError, ValueError):
    """A JSON document does not follow the expected schema."""

    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "/".join(str(p) for p in self.path) or "<root>"
        super().__init__(f"{where}: {message}")
