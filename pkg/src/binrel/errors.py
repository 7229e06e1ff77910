"""Exception types shared across the package."""


class FormatError(Exception):
    """A serialized structure failed validation (bad magic, truncation, or inconsistent payload)."""


class DimensionMismatch(ValueError):
    """Two structures cannot be combined because their universe sizes differ."""
