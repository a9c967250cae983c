"""Exception types shared across the hollowcut modules."""


class HollowcutError(Exception):
    """Base class for all library errors."""


# --- corpus / knowledge base ---

class SchemaError(HollowcutError):
    """A corpus record is malformed or violates the file schema."""


class UnknownType(HollowcutError):
    """An annotation names a factor type absent from the taxonomy."""


class DuplicateId(HollowcutError):
    """Two records claim the same identifier."""


class UnknownPattern(HollowcutError):
    """A pattern name is not present in the lexicon."""


class EmptyCorpus(HollowcutError):
    """An operation requires at least one annotated work."""


# --- ideation ---

class EmptyTemplateCorpus(HollowcutError):
    """Exemplar selection requires a non-empty prompt-template corpus."""


class EmptyIdea(HollowcutError):
    """Idea composition requires accepted content or intent text."""


# --- retrieval ---

class ZeroVector(HollowcutError):
    """A zero-length vector cannot be normalized."""


class DimensionMismatch(HollowcutError):
    """Vector dimension does not match the index dimension."""


class EmbedderFault(HollowcutError):
    """The embedder failed for a specific item."""

    def __init__(self, item_id, cause=None):
        super().__init__(f"embedder failed for item {item_id!r}: {cause}")
        self.item_id = item_id
        self.cause = cause


class UnknownGroundTruth(HollowcutError):
    """An evaluation pair references an id absent from the index."""


class EmptyEvaluation(HollowcutError):
    """Recall evaluation requires at least one query pair."""


# --- pattern engine ---

class EmptyImage(HollowcutError):
    """The input image has no pixels."""


class EmptyMask(HollowcutError):
    """The mask contains no pixels."""


class DisconnectedMask(HollowcutError):
    """The mask is not a single connected component."""


class TooFewExemplars(HollowcutError):
    """k-NN classification needs at least k labeled exemplars."""


class PointOnOppositeClass(HollowcutError):
    """A prompt point lies on a pixel of the opposite class."""


class EmptyResult(HollowcutError):
    """Point-prompted segmentation selected no pixels."""


class ConflictingPoints(HollowcutError):
    """Foreground and background points select the same component."""


# --- model gateway ---

class ProviderError(HollowcutError):
    """The provider returned a non-success status."""

    def __init__(self, status, detail=""):
        super().__init__(f"provider error {status}: {detail}")
        self.status = status


class Timeout(HollowcutError):
    """The provider did not reply within the configured timeout."""


class OfflineMiss(HollowcutError):
    """Offline mode and the request is not in the cache."""


class SegmentationFailed(HollowcutError):
    """Both the provider and the classical fallback failed."""

    def __init__(self, detail="", cause=None):
        super().__init__(detail or f"segmentation failed: {cause}")
        self.cause = cause


# --- mood board ---

class UnknownId(HollowcutError):
    """The referenced node id does not exist on the board."""


class SingularTransform(HollowcutError):
    """The requested transform is not invertible."""


class CrossParentGroup(HollowcutError):
    """Grouping requires two or more siblings under one parent."""


class NotAGroup(HollowcutError):
    """Ungroup target is not a group node."""


class NotACutout(HollowcutError):
    """Cut-out application requires an element of kind 'cutout'."""


class NoOverlap(HollowcutError):
    """The cut-out does not intersect the target element."""


class UnsupportedFeature(HollowcutError):
    """The imported document uses constructs outside the export profile."""


class CorruptSession(HollowcutError):
    """The session document cannot be parsed or fails validation."""
