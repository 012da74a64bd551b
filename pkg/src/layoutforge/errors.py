"""Exception types shared across the toolkit.

Every error raised on purpose by this package derives from LayoutForgeError,
so callers can catch the whole family with one clause.  Plain ValueError /
TypeError still surface for garbage arguments (non-finite numbers, wrong
container shapes) the way any Python library would raise them.
"""

from __future__ import annotations


class LayoutForgeError(Exception):
    """Base class for all package-specific errors."""


# --- scene model -----------------------------------------------------------

class SchemaError(LayoutForgeError):
    """A document is structurally wrong: missing key, bad type, bad enum value."""


class NoMatchError(LayoutForgeError):
    """Catalog lookup found nothing usable for a description."""


class UnresolvedSizeError(LayoutForgeError):
    """An object has no bounding box and none could be retrieved."""


# --- geometry --------------------------------------------------------------

class EmptyLayoutError(LayoutForgeError):
    """An operation needs at least one placed object and got none."""


class DegenerateError(LayoutForgeError):
    """Geometry collapsed: zero-area footprint or floor polygon."""


class NonFiniteError(LayoutForgeError):
    """A coordinate or angle is NaN or infinite."""


# --- dataset pipeline ------------------------------------------------------

class InsufficientDataError(LayoutForgeError):
    """A split or statistic was requested from too few records."""


# --- prompt engine ---------------------------------------------------------

class UnsupportedEditError(LayoutForgeError):
    """An edit instruction matched neither the add nor the remove grammar."""


class UnknownTargetError(LayoutForgeError):
    """An edit names an object that is not in the layout."""


# --- completion parsing ----------------------------------------------------

class NoAnswerBlockError(LayoutForgeError):
    """A completion carries no recognizable answer payload."""


class MalformedLayoutError(LayoutForgeError):
    """An answer block was found but its content does not parse.

    ``offset`` is the position (UTF-8 byte index into the original text)
    where scanning gave up, or None when the failure is not positional.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class MalformedScoreError(LayoutForgeError):
    """A judge completion is missing score keys or carries non-integers."""


class RangeError(LayoutForgeError):
    """A judge score fell outside the 0..10 inclusive range."""


# --- llm gateway -----------------------------------------------------------

class TransportError(LayoutForgeError):
    """The chat backend failed after exhausting its retries."""


class AuthError(LayoutForgeError):
    """The chat backend was refused with 401/403; retrying cannot help."""


class ScriptExhaustedError(LayoutForgeError):
    """A scripted mock backend ran out of queued responses."""


# --- preference forge ------------------------------------------------------

class InjectionError(LayoutForgeError):
    """A synthetic-violation op could not produce the requested defect."""


class TooFewObjectsError(InjectionError):
    """Overlap injection needs at least two objects."""


class NoEligibleObjectError(InjectionError):
    """No object in the layout can host the requested violation."""


# --- navigation ------------------------------------------------------------

class InvalidStartError(LayoutForgeError):
    """The navigation start cell is blocked or outside the floor."""
