"""Shooting toolkit for the periodically forced Duffing equation.

Thin Python facade over the compiled ``_duffing`` extension.
"""

from _duffing import (
    Lambda,
    certify_condition_a,
    cubic_branches,
    epsilon_lambda,
    find_five_symbol,
    find_itinerary,
    find_periodic_all,
    find_up,
    kneading_order,
    lambda0,
    shoot_g,
)

__all__ = [
    "Lambda",
    "certify_condition_a",
    "cubic_branches",
    "epsilon_lambda",
    "find_five_symbol",
    "find_itinerary",
    "find_periodic_all",
    "find_up",
    "kneading_order",
    "lambda0",
    "shoot_g",
]
