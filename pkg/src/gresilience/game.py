"""The resilience-vs-green coordination game.

Player 1 is the resilience player and prefers the robot action (``a1``);
player 2 is the green player and prefers the human action (``a2``).  Both
players prefer coordinating on either action over a mismatch, which gives
the game its Battle-of-the-Sexes shape: two pure equilibria on the diagonal
and one mixed equilibrium.

Cell layout (row = player 1, column = player 2)::

                 p2: a1      p2: a2
    p1: a1       (A, b)      (C, d)
    p1: a2       (D, c)      (B, a)

with ``A > B > C > D`` and ``a > b > c > d``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DegenerateGameError, DomainError, InvariantError, ValidationError

__all__ = [
    "Action",
    "Player",
    "P2ScaleMode",
    "ActionProfile",
    "SystemFactors",
    "BimatrixPayoffs",
    "MixedStrategyProfile",
    "EquilibriumSolution",
    "PROFILES",
    "payoff_p1",
    "payoff_p2",
    "build_bimatrix",
    "find_psne",
    "expected_utility_action",
    "msne",
    "msne_expected_payoffs",
    "solve",
]


class Action(enum.Enum):
    ROBOT = "a1"
    HUMAN = "a2"

    def __str__(self) -> str:
        return self.value


class Player(enum.Enum):
    P1 = 1
    P2 = 2


class P2ScaleMode(enum.Enum):
    """Multiplier applied to the green player's payoffs."""

    COMPLEMENT = "complement"  # 1 - eps
    SAME = "same"  # eps
    UNIT = "unit"  # 1

    def factor(self, eps: float) -> float:
        if self is P2ScaleMode.COMPLEMENT:
            return 1.0 - eps
        if self is P2ScaleMode.SAME:
            return eps
        return 1.0


class ActionProfile(NamedTuple):
    p1_action: Action
    p2_action: Action

    def __str__(self) -> str:
        return f"({self.p1_action},{self.p2_action})"


R, H = Action.ROBOT, Action.HUMAN
PROFILES: tuple[ActionProfile, ...] = (
    ActionProfile(R, R),
    ActionProfile(R, H),
    ActionProfile(H, R),
    ActionProfile(H, H),
)


@dataclass(frozen=True)
class SystemFactors:
    """Normalized factor scores entering the payoff formulas.

    ``t_h`` human classification time, ``t_a`` arm classification time,
    ``h`` human-interaction reduction, ``co2`` footprint reduction.
    """

    t_h: float
    t_a: float
    h: float
    co2: float

    def __post_init__(self) -> None:
        for name in ("t_h", "t_a", "h", "co2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValidationError(f"must be a finite number, got {value!r}", name)
        if self.t_a <= 0:
            raise ValidationError(f"must be > 0, got {self.t_a}", "t_a")
        if self.h <= 0:
            raise ValidationError(f"must be > 0, got {self.h}", "h")
        if self.t_h < 0:
            raise ValidationError(f"must be >= 0, got {self.t_h}", "t_h")
        if self.co2 < 0:
            raise ValidationError(f"must be >= 0, got {self.co2}", "co2")


def _check_eps(eps: float) -> float:
    if not isinstance(eps, (int, float)) or not math.isfinite(eps):
        raise DomainError(f"confidence must be a finite number, got {eps!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"confidence must lie strictly inside (0, 1), got {eps}")
    return float(eps)


def _check_probability(p: float, name: str) -> float:
    if not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    return float(p)


def _factor_sums(f: SystemFactors) -> tuple[float, float, float, float]:
    # best, coordinated-but-not-preferred, mismatch, worst mismatch
    return (
        f.t_h + f.t_a + f.h + f.co2,
        f.t_h + f.t_a + f.co2 - f.h,
        f.t_h + f.co2 - f.h,
        f.t_h + f.co2 - f.t_a - f.h,
    )


def payoff_p1(profile: ActionProfile, factors: SystemFactors, eps: float) -> float:
    """Payoff of the resilience player for ``profile``."""
    eps = _check_eps(eps)
    best, coord, mismatch, worst = _factor_sums(factors)
    p1, p2 = profile
    if p1 is R and p2 is R:
        return eps * best
    if p1 is H and p2 is H:
        return eps * coord
    if p1 is R:
        return eps * mismatch
    return eps * worst


def payoff_p2(
    profile: ActionProfile,
    factors: SystemFactors,
    eps: float,
    scale_mode: P2ScaleMode = P2ScaleMode.COMPLEMENT,
) -> float:
    """Payoff of the green player for ``profile``.

    Mirror image of :func:`payoff_p1` with ``a2`` as the preferred action,
    scaled by ``scale_mode.factor(eps)``.
    """
    eps = _check_eps(eps)
    s = P2ScaleMode(scale_mode).factor(eps)
    best, coord, mismatch, worst = _factor_sums(factors)
    p1, p2 = profile
    if p1 is H and p2 is H:
        return s * best
    if p1 is R and p2 is R:
        return s * coord
    if p1 is H:
        return s * mismatch
    return s * worst


@dataclass(frozen=True)
class BimatrixPayoffs:
    """2x2 payoff table addressed by the named entries of the game.

    Construction only checks finiteness so that arbitrary hand-built tables
    can be analyzed; use :meth:`check_ordering` for the game's invariants.
    """

    A: float
    B: float
    C: float
    D: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        for name in "ABCDabcd":
            if not math.isfinite(getattr(self, name)):
                raise ValidationError("payoff entries must be finite", name)

    @classmethod
    def from_cells(cls, p1: list[list[float]], p2: list[list[float]]) -> BimatrixPayoffs:
        """Build from row-major 2x2 tables indexed ``[p1 action][p2 action]``."""
        return cls(
            A=p1[0][0], C=p1[0][1], D=p1[1][0], B=p1[1][1],
            b=p2[0][0], d=p2[0][1], c=p2[1][0], a=p2[1][1],
        )

    def cell(self, profile: ActionProfile) -> tuple[float, float]:
        p1, p2 = profile
        if p1 is R:
            return (self.A, self.b) if p2 is R else (self.C, self.d)
        return (self.D, self.c) if p2 is R else (self.B, self.a)

    def tables(self) -> tuple[list[list[float]], list[list[float]]]:
        """Row-major ``(p1, p2)`` tables, index 0 = ROBOT, 1 = HUMAN."""
        return (
            [[self.A, self.C], [self.D, self.B]],
            [[self.b, self.d], [self.c, self.a]],
        )

    def scaled(self, k1: float = 1.0, k2: float = 1.0) -> BimatrixPayoffs:
        return BimatrixPayoffs(
            self.A * k1, self.B * k1, self.C * k1, self.D * k1,
            self.a * k2, self.b * k2, self.c * k2, self.d * k2,
        )

    def satisfies_ordering(self) -> bool:
        return self.A > self.B > self.C > self.D and self.a > self.b > self.c > self.d

    def check_ordering(self) -> None:
        if not self.satisfies_ordering():
            raise InvariantError(f"payoff ordering violated: {self}")


@dataclass(frozen=True)
class MixedStrategyProfile:
    sigma_p1_a1: float
    sigma_p2_a1: float

    def __post_init__(self) -> None:
        _check_probability(self.sigma_p1_a1, "sigma_p1_a1")
        _check_probability(self.sigma_p2_a1, "sigma_p2_a1")


@dataclass(frozen=True)
class EquilibriumSolution:
    bimatrix: BimatrixPayoffs
    psne: list[ActionProfile]
    msne: MixedStrategyProfile
    msne_payoff_p1: float
    msne_payoff_p2: float


def build_bimatrix(
    factors: SystemFactors,
    eps: float,
    scale_mode: P2ScaleMode = P2ScaleMode.COMPLEMENT,
) -> BimatrixPayoffs:
    cells = {
        prof: (payoff_p1(prof, factors, eps), payoff_p2(prof, factors, eps, scale_mode))
        for prof in PROFILES
    }
    m = BimatrixPayoffs(
        A=cells[PROFILES[0]][0], C=cells[PROFILES[1]][0],
        D=cells[PROFILES[2]][0], B=cells[PROFILES[3]][0],
        b=cells[PROFILES[0]][1], d=cells[PROFILES[1]][1],
        c=cells[PROFILES[2]][1], a=cells[PROFILES[3]][1],
    )
    m.check_ordering()
    return m


def find_psne(m: BimatrixPayoffs) -> list[ActionProfile]:
    """All pure profiles from which no player gains by deviating alone.

    Ties count as equilibria.  Output follows :data:`PROFILES` order.
    """
    out = []
    for prof in PROFILES:
        u1, u2 = m.cell(prof)
        other1 = ActionProfile(H if prof.p1_action is R else R, prof.p2_action)
        other2 = ActionProfile(prof.p1_action, H if prof.p2_action is R else R)
        if u1 >= m.cell(other1)[0] and u2 >= m.cell(other2)[1]:
            out.append(prof)
    return out


def expected_utility_action(
    m: BimatrixPayoffs, player: Player, action: Action, opponent_sigma_a1: float
) -> float:
    """Expected payoff of a pure ``action`` against the opponent's mix."""
    s = _check_probability(opponent_sigma_a1, "opponent_sigma_a1")
    player = Player(player)
    if player is Player.P2:
        if action is R:
            return s * m.b + (1.0 - s) * m.c
        return s * m.d + (1.0 - s) * m.a
    if action is R:
        return s * m.A + (1.0 - s) * m.C
    return s * m.D + (1.0 - s) * m.B


def msne(m: BimatrixPayoffs) -> MixedStrategyProfile:
    """Interior mixed equilibrium from the two indifference conditions.

    Player 1's mix makes player 2 indifferent and vice versa.
    """
    den1 = m.a + m.b - m.c - m.d
    den2 = m.A + m.B - m.C - m.D
    if den1 == 0.0 or den2 == 0.0:
        raise DegenerateGameError(
            f"indifference denominators must be nonzero (p2: {den1}, p1: {den2})"
        )
    s1 = (m.a - m.c) / den1
    s2 = (m.B - m.C) / den2
    if not (0.0 <= s1 <= 1.0 and 0.0 <= s2 <= 1.0):
        raise DegenerateGameError(f"no interior mixed equilibrium: sigma = ({s1}, {s2})")
    return MixedStrategyProfile(s1, s2)


def msne_expected_payoffs(m: BimatrixPayoffs, s: MixedStrategyProfile) -> tuple[float, float]:
    """Bilinear expected payoffs of both players under independent mixes."""
    s1 = _check_probability(s.sigma_p1_a1, "sigma_p1_a1")
    s2 = _check_probability(s.sigma_p2_a1, "sigma_p2_a1")
    eu1 = (m.A + m.B - m.C - m.D) * s1 * s2 + (m.C - m.B) * s1 + (m.D - m.B) * s2 + m.B
    # (a+b-c-d), not (a+b+c+d): the latter disagrees with the four-cell expectation
    eu2 = (m.a + m.b - m.c - m.d) * s1 * s2 + (m.d - m.a) * s1 + (m.c - m.a) * s2 + m.a
    return eu1, eu2


def solve(
    factors: SystemFactors,
    eps: float,
    scale_mode: P2ScaleMode = P2ScaleMode.COMPLEMENT,
) -> EquilibriumSolution:
    m = build_bimatrix(factors, eps, scale_mode)
    s = msne(m)
    u1, u2 = msne_expected_payoffs(m, s)
    return EquilibriumSolution(m, find_psne(m), s, u1, u2)
