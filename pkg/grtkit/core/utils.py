import math
import os

# Tolerance hierarchy: each layer dominates the noise floor of the one below.
KERNEL_TOL = 1e-12
PREDICATE_TOL = 1e-12
EQUIVALENCE_TOL = 1e-10
UNIVERSAL_PERCEPTION_TOL = 1e-9
LIKELIHOOD_TWIN_TOL = 1e-6
PROBABILITY_FLOOR = 1e-300

THREADS_ENV_VAR = "GRT_KIT_THREADS"


def is_close_zero(value: float, abs_tol: float = PREDICATE_TOL) -> bool:
    """
    Check if a given floating-point value is close to zero within a small tolerance.

    Args:
        value (float): The floating-point value to check.
        abs_tol (float): Absolute tolerance. Defaults to PREDICATE_TOL.

    Returns:
        bool: True if the value is close to zero, False otherwise.

    Examples:
        >>> is_close_zero(1e-13)
        True
        >>> is_close_zero(1e-6)
        False
    """
    return math.isclose(value, 0.0, abs_tol=abs_tol)


def worker_count() -> int:
    """
    Number of joblib workers to use, capped by the GRT_KIT_THREADS environment variable.

    Returns:
        int: The value of GRT_KIT_THREADS if it is a positive integer, otherwise -1
            (joblib's "all cores").
    """
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return -1
    try:
        value = int(raw)
    except ValueError:
        return -1
    return value if value > 0 else -1
