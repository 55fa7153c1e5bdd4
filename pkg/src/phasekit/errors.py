"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: input problems exit 1,
indefinite phase verdicts exit 2, unstable inputs exit 3 and runtime
simulation failures exit 4.
"""

__all__ = [
    "PhasekitError",
    "InputError",
    "IndefiniteError",
    "UnstableSystemError",
    "SimulationError",
]


class PhasekitError(Exception):
    """Base class for all package errors."""


class InputError(PhasekitError, ValueError):
    """Malformed or out-of-contract input data."""


class IndefiniteError(PhasekitError):
    """No phase sector exists (the range surrounds the origin)."""


class UnstableSystemError(PhasekitError):
    """A stable system was required; carries the offending pole."""

    def __init__(self, message: str, witness: complex | None = None):
        super().__init__(message)
        self.witness = witness


class SimulationError(PhasekitError):
    """Time-domain integration failed (divergence or unsolvable loop)."""

    def __init__(self, message: str, blow_up_time: float | None = None):
        super().__init__(message)
        self.blow_up_time = blow_up_time
