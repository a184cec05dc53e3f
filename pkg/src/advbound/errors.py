"""Exception types shared across the toolkit."""


class AdvBoundError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(AdvBoundError):
    """Malformed input: bad dimensions, broken symmetry, out-of-range values."""


class DegenerateMatrixError(AdvBoundError):
    """Adversary matrix is identically zero, so the bound ratio is undefined.

    Raised for constant functions (no output-differing pairs) and for
    explicitly all-zero weight matrices.
    """


class IntegrationError(AdvBoundError):
    """State propagation failed (non-Hermitian segment operator or norm drift)."""
