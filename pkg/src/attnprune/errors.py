"""Exception taxonomy shared across the toolkit.

Every data-dependent failure raises a typed subclass of
:class:`AttnpruneError`; the CLI maps these to exit code 2 and plain
I/O failures (``OSError``) to exit code 3.
"""


class AttnpruneError(Exception):
    """Base class for all toolkit errors."""


class FormatError(AttnpruneError):
    """The on-disk container is malformed (magic, header, or payload)."""


class ShapeError(AttnpruneError):
    """A tensor has the wrong rank or inconsistent dimensions."""


class ValueCheckError(AttnpruneError):
    """An element-level constraint failed (non-finite, negative, duplicate)."""


class GridError(AttnpruneError):
    """A token count cannot be arranged on the required square grid."""


class DegenerateInputError(AttnpruneError):
    """Input is structurally valid but carries no usable signal."""


class RowSumWarning(UserWarning):
    """Attention rows deviate from unit sum when row-stochastic checking is on."""
