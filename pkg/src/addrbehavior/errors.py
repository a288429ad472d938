"""Exception hierarchy and process exit codes.

Every error raised by this package derives from AddrBehaviorError so the CLI
can map failures onto stable exit codes:

    0  success
    2  input error        (missing file, bad flag/config value)
    3  validation error   (malformed ledger/labels content)
    4  compute error      (unknown address, non-convergence, bad shapes)
    5  i/o error          (failed writes)
"""

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VALIDATION = 3
EXIT_COMPUTE = 4
EXIT_IO = 5


class AddrBehaviorError(Exception):
    """Base class for all package errors."""

    exit_code = EXIT_COMPUTE


class InputError(AddrBehaviorError):
    """Missing inputs or unusable configuration values."""

    exit_code = EXIT_INPUT


class ConfigError(InputError):
    """A configuration value violates a precondition."""


class ParseError(AddrBehaviorError):
    """Malformed ledger stream; carries the offending line number."""

    exit_code = EXIT_VALIDATION

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(AddrBehaviorError):
    """Well-formed input that violates a documented invariant."""

    exit_code = EXIT_VALIDATION


class GraphBuildError(AddrBehaviorError):
    """Blocks that cannot form a graph (e.g. duplicate txid)."""

    exit_code = EXIT_VALIDATION


class UnknownNodeError(AddrBehaviorError):
    """Lookup of an address or node id that is not in the graph."""


class ConvergenceError(AddrBehaviorError):
    """Iterative solver failed to reach tolerance; carries the residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ShapeError(AddrBehaviorError):
    """Mismatched row widths or lengths between paired inputs."""


class SplitError(AddrBehaviorError):
    """Dataset cannot be partitioned as requested."""


class RankingError(AddrBehaviorError):
    """Feature ranking needs at least two classes."""


class SnapshotError(AddrBehaviorError):
    """Corrupt or incompatible graph snapshot file."""

    exit_code = EXIT_VALIDATION
