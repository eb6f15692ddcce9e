"""Typological feature extraction from massively parallel verse-aligned text,
plus a family-aware probing framework for language representation vectors.

The pipeline stages are::

    corpus  -> subword -> align -> project -> features
                                           -> lexsim
    typodb + features + representations -> probe

Each stage is usable as a library; the ``typoprobe`` command line drives the
whole pipeline with cached intermediates.
"""

__version__ = "0.1.0"

from typoprobe.errors import DataError

__all__ = ["DataError", "__version__"]
