"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: InputError -> 2,
NumericalError -> 3, ResourceError -> 4.
"""


class GweylError(Exception):
    """Base class for all gweyl errors."""


class InputError(GweylError, ValueError):
    """Invalid argument: dimension mismatch, bad parameter range, malformed spec."""


class NumericalError(GweylError, RuntimeError):
    """A numerical diagnostic failed (non-convergence, resolution check, divergence)."""


class ResourceError(GweylError, RuntimeError):
    """A configured budget (quadrature nodes, subset expansion) would be exceeded."""
