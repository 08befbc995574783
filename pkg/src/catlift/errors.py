"""Exception types shared across the package."""

from __future__ import annotations


class CatliftError(Exception):
    """Base class for all errors raised by this package."""


class TypingError(CatliftError):
    """An object, generator, path, or map fails a well-formedness check."""


class UnboundedError(CatliftError):
    """A bounded enumeration (paths, hom-classes, functors) did not saturate."""


class NotAFibrationError(CatliftError):
    """An operation defined only on relational fibrations was given something else."""


class ParseError(CatliftError):
    """A DSL file could not be parsed."""


class PatternError(CatliftError):
    """A graph pattern could not be compiled against the schema and instance."""


class NoReferentError(PatternError):
    """A pattern constant matched no row in its typed table."""


class AmbiguousReferentError(PatternError):
    """A pattern constant matched more than one row in its typed table."""


class UnknownPredicateError(PatternError):
    """A pattern predicate named no generator (and no typed path) in the schema."""
