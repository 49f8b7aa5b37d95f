"""State-dependent reward/discount scheme for repeated-reachability objectives.

Accepting states pay reward ``1 - gamma_b`` and discount by ``gamma_b``;
all other states pay 0 and discount by ``gamma``. With a schedule where
``(1 - gamma) / (1 - gamma_b(gamma)) -> 0`` as ``gamma -> 1``, state values
under this scheme approach the probability of visiting accepting states
infinitely often.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["RewardScheme", "reward_of", "discount_of", "return_of", "gamma_b_schedule"]


@dataclass(frozen=True)
class RewardScheme:
    gamma: float
    gamma_b: float

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ValidationError(f"gamma must lie in (0,1), got {self.gamma}")
        if not (0.0 < self.gamma_b < 1.0):
            raise ValidationError(f"gamma_b must lie in (0,1), got {self.gamma_b}")


def reward_of(scheme: RewardScheme, accepting: bool) -> float:
    return 1.0 - scheme.gamma_b if accepting else 0.0


def discount_of(scheme: RewardScheme, accepting: bool) -> float:
    return scheme.gamma_b if accepting else scheme.gamma


def return_of(scheme: RewardScheme, accepting_flags) -> float:
    """Finite truncation of the discounted return along a path.

    Sums ``reward(flag_i) * prod_{j<i} discount(flag_j)`` with the empty
    product equal to 1. Truncation error of the infinite return is at most
    ``max(gamma, gamma_b) ** len(flags)``.
    """
    total = 0.0
    disc = 1.0
    for flag in accepting_flags:
        total += disc * reward_of(scheme, flag)
        disc *= discount_of(scheme, flag)
    return total


def gamma_b_schedule(name: str, gamma: float) -> float:
    """Named schedules gamma -> gamma_b.

    ``fixed:<c>`` returns the constant c. ``power:<kappa>`` returns
    ``1 - (1 - gamma) ** kappa`` with kappa in (0,1), for which
    ``(1 - gamma) / (1 - gamma_b) = (1 - gamma) ** (1 - kappa) -> 0``.
    """
    kind, _, arg = name.partition(":")
    if kind == "fixed":
        c = float(arg)
        if not (0.0 < c < 1.0):
            raise ValidationError(f"fixed gamma_b must lie in (0,1), got {c}")
        return c
    if kind == "power":
        kappa = float(arg)
        if not (0.0 < kappa < 1.0):
            raise ValidationError(f"power exponent must lie in (0,1), got {kappa}")
        if not (0.0 < gamma < 1.0):
            raise ValidationError(f"gamma must lie in (0,1), got {gamma}")
        return 1.0 - (1.0 - gamma) ** kappa
    raise ValidationError(f"unknown gamma_b schedule {name!r}")
