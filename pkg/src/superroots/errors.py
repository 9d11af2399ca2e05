"""Error types shared across the package.

Every domain failure raises a subclass of SuperrootsError so the CLI can
map them to a single exit code; usage/parse problems raise InputError
subclasses instead.
"""


class SuperrootsError(Exception):
    """Base class for domain errors (exit code 1 in the CLI)."""


class ZeroInverse(SuperrootsError):
    """Multiplicative inverse of zero requested."""


class Singular(SuperrootsError):
    """Square matrix has no inverse over the working field."""


class MalformedRow(SuperrootsError):
    """Diagonal/parity combination matches no node type."""


class NotApplicable(SuperrootsError):
    """Reflection requested in a root that is not odd with zero diagonal."""


class Diverged(SuperrootsError):
    """Reflection closure exceeded the class cap."""


class HeightExceeded(SuperrootsError):
    """Graded growth did not terminate within the height bound.

    Carries the partial algebra so callers can still inspect the layers
    that were completed.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotUnique(SuperrootsError):
    """More than one weight sits at the top height."""


class Incomplete(SuperrootsError):
    """Operation requires a fully built algebra."""


class InputError(Exception):
    """Base class for usage and parse errors (exit code 2 in the CLI)."""


class RelationSyntaxError(InputError):
    """Bad relation text; carries the offending position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class InhomogeneousSum(InputError):
    """Terms of a sum do not share one weight."""


class CorpusCorrupt(InputError):
    """Embedded corpus file failed validation."""


class NotFound(InputError):
    """Catalog lookup with an unknown name or index."""
