"""Shared exception types.

``DataError`` marks problems with user-supplied inputs (malformed files,
inconsistent metadata, impossible parameter combinations). The CLI maps it to
exit code 2; anything else that escapes is an internal error (exit 1).
"""


class DataError(Exception):
    """Invalid or inconsistent input data."""
