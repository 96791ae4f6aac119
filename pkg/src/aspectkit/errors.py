"""Exception types for data-level failures.

Everything raised here maps to CLI exit code 2; argparse usage problems map
to exit code 1.
"""


class AspectKitError(Exception):
    """Base class for all data and format errors raised by this package."""


class ParseError(AspectKitError):
    """Malformed input line in a corpus file."""

    def __init__(self, message, source=None, line_no=None):
        self.source = source
        self.line_no = line_no
        prefix = ""
        if source is not None:
            prefix += f"{source}: "
        if line_no is not None:
            prefix += f"line {line_no}: "
        super().__init__(prefix + message)


class VectorFormatError(AspectKitError):
    """Malformed word-vector file (bad header, row width, duplicates...)."""


class OOVError(AspectKitError):
    """Requested words resolve to no vectors at all."""


class EmptyDatasetError(AspectKitError):
    """A filtering or training step left nothing to work with."""


class NoCandidatesError(AspectKitError):
    """Candidate extraction produced zero in-vocabulary terms."""
