"""Exception types shared across the package."""


class PladoError(Exception):
    """Base class for all errors raised by plado."""


class MalformedLine(PladoError):
    """A PLGRAPH line does not match the format."""


class DuplicateEdge(PladoError):
    """Two real edges connect the same vertex pair."""


class Disconnected(PladoError):
    """The graph is not connected over real edges."""


class EmbeddingInconsistent(PladoError):
    """A rotation list does not mention each incident edge exactly once."""


class EulerViolation(PladoError):
    """Face count contradicts Euler's formula n - m + f = 2."""


class InconsistentEmbedding(PladoError):
    """An off-cycle vertex touches faces on both sides of a separator cycle."""


class LabelAbsent(PladoError):
    """No vertex carries the requested label."""


class EdgeInTree(PladoError):
    """A fundamental cycle was requested for a tree edge."""


class NoBalancedEdge(PladoError):
    """No non-tree edge yields a 2/3-balanced cycle (indicates a bug upstream)."""


class BadRange(PladoError):
    """Invalid [i, j] range for a range-minimum query."""


class BadIndex(PladoError):
    """Bitvector rank index out of bounds."""


class VerificationFailed(PladoError):
    """An oracle answer violated the stretch guarantee against ground truth."""


class CorruptOracleFile(PladoError):
    """Oracle file failed checksum or structural validation."""
