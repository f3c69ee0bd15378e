"""Exception hierarchy shared by all ldpcbench modules."""


class LdpcBenchError(Exception):
    """Base class for all errors raised by this package."""


class DataFileError(LdpcBenchError):
    """A vendored data file is malformed or inconsistent."""


class ConstructionError(LdpcBenchError):
    """A code instance cannot be built from the requested parameters."""


class InputError(LdpcBenchError):
    """Caller-supplied data has the wrong shape, length, or value."""


class UnsupportedConfigError(LdpcBenchError):
    """The configuration is syntactically valid but outside supported range."""


class BackendError(LdpcBenchError):
    """A decode backend is unknown or failed to execute."""


class ConfigError(LdpcBenchError):
    """A sweep, report, or CLI configuration is invalid."""
