"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numbers

import numpy as np

from .exceptions import InvalidCounts, InvalidParams


def check_count(value, name, minimum=0, error=InvalidCounts):
    """Return ``value`` as a Python int, rejecting floats with a fraction,
    bools and anything below ``minimum``."""
    if isinstance(value, bool) or not isinstance(value, (numbers.Integral, np.integer)):
        if isinstance(value, (float, np.floating)) and float(value).is_integer():
            value = int(value)
        else:
            raise error(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise error(f"{name} must be >= {minimum}, got {value}")
    return value


def check_positive_int(value, name):
    return check_count(value, name, minimum=1, error=InvalidParams)


def check_non_negative_real(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParams(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(value) or value < 0:
        raise InvalidParams(f"{name} must be a finite non-negative number, got {value}")
    return value


def check_odd_window(window):
    window = check_positive_int(window, "window")
    if window % 2 == 0:
        raise InvalidParams(f"window must be odd, got {window}")
    return window
