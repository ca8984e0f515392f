"""Transported group structures, Haar-ization of measures on the line, and numeric checks."""

from .groups import Carrier, GroupSpec, MeasureSpec, Tags, base_circle, base_group, base_real_line, base_real_n
from .haarize import (
    HaarizedGroup,
    HotelShift,
    LinePartition,
    haarize_probability,
    haarize_sigma_finite,
    mu_star,
    normalize_sigma_finite,
)
from .intervals import IntervalSet, parse_interval_set
from .measure import Bijection1D, Distribution, distribution_from_name, integrate, pushforward, quantile
from .transport import (
    TransportResult,
    arctan_group,
    log_group,
    one_dimensionality_certificate,
    shear_group,
    transport,
    transport_group,
    velocity_group,
)

__all__ = [
    "Bijection1D", "Carrier", "Distribution", "GroupSpec", "HaarizedGroup", "HotelShift", "IntervalSet",
    "LinePartition", "MeasureSpec", "Tags", "TransportResult", "arctan_group", "base_circle", "base_group",
    "base_real_line", "base_real_n", "distribution_from_name", "haarize_probability", "haarize_sigma_finite",
    "integrate", "log_group", "mu_star", "normalize_sigma_finite", "one_dimensionality_certificate",
    "parse_interval_set", "pushforward", "quantile", "shear_group", "transport", "transport_group",
    "velocity_group",
]
