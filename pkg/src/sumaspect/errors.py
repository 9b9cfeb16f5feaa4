"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: validation problems exit 1, file
format and I/O problems exit 2.
"""


class SumAspectError(Exception):
    exit_code = 1


class ValidationError(SumAspectError):
    """Inputs are structurally readable but violate a contract."""

    exit_code = 1


class FormatError(SumAspectError):
    """A file could not be parsed: bad JSON, bad binary layout, missing file."""

    exit_code = 2
