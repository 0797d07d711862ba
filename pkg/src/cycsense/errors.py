"""Exception types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, runtime/numeric failures with 3, and I/O failures with 4.
"""


class ConfigurationError(ValueError):
    """Invalid parameters or configuration; the message names the violated constraint."""


class RunError(RuntimeError):
    """A computation failed at runtime (e.g. a fitness callback returned a non-finite value)."""
