"""Turn a classification confidence into a single recovery action.

Confident and hopeless predictions are short-circuited by thresholds; the
ambiguous band in between is settled by sampling from the mixed equilibrium
of the coordination game.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .game import Action, EquilibriumSolution, MixedStrategyProfile, P2ScaleMode, SystemFactors, solve

__all__ = [
    "SamplingMode",
    "Rationale",
    "PolicyKind",
    "Gresilience",
    "AlwaysRobot",
    "AlwaysHuman",
    "Threshold",
    "Policy",
    "Decision",
    "RandomSource",
    "sampling_probability",
    "decide",
    "gate_threshold",
    "policy_label",
]


class SamplingMode(enum.Enum):
    CONDITIONAL_COORDINATION = "conditional_coordination"
    P1_MARGINAL = "p1_marginal"
    P2_MARGINAL = "p2_marginal"


class Rationale(enum.Enum):
    HIGH_CONFIDENCE = "high_confidence"
    LOW_CONFIDENCE = "low_confidence"
    GAME_SAMPLED = "game_sampled"
    POLICY_FIXED = "policy_fixed"


class PolicyKind(enum.Enum):
    GRESILIENCE = "gresilience"
    ALWAYS_ROBOT = "always-robot"
    ALWAYS_HUMAN = "always-human"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class Gresilience:
    eps_low: float = 0.3
    eps_high: float = 0.7
    sampling: SamplingMode = SamplingMode.CONDITIONAL_COORDINATION
    scale_mode: P2ScaleMode = P2ScaleMode.COMPLEMENT
    kind = PolicyKind.GRESILIENCE

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps_low < self.eps_high <= 1.0:
            raise ValidationError(
                f"need 0 <= eps_low < eps_high <= 1, got {self.eps_low}, {self.eps_high}",
                "policy",
            )


@dataclass(frozen=True)
class AlwaysRobot:
    kind = PolicyKind.ALWAYS_ROBOT


@dataclass(frozen=True)
class AlwaysHuman:
    kind = PolicyKind.ALWAYS_HUMAN


@dataclass(frozen=True)
class Threshold:
    cutoff: float = 0.5
    kind = PolicyKind.THRESHOLD

    def __post_init__(self) -> None:
        if not 0.0 <= self.cutoff <= 1.0:
            raise ValidationError(f"cutoff must lie in [0, 1], got {self.cutoff}", "policy.cutoff")


Policy = Gresilience | AlwaysRobot | AlwaysHuman | Threshold


def policy_label(policy: Policy) -> str:
    if isinstance(policy, Threshold):
        return f"threshold:{policy.cutoff:g}"
    return policy.kind.value


def gate_threshold(policy: Policy) -> float:
    """Confidence at or above which the first prediction goes straight to the arm."""
    if isinstance(policy, Gresilience):
        return policy.eps_high
    if isinstance(policy, Threshold):
        return policy.cutoff
    if isinstance(policy, AlwaysRobot):
        return 0.0
    return float("inf")


class RandomSource:
    """Seeded stream of uniforms on [0, 1), backed by numpy's PCG64."""

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self._gen = np.random.Generator(np.random.PCG64(seed))
        else:
            if not 0 <= int(seed) < 2**64:
                raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
            self._gen = np.random.Generator(np.random.PCG64(int(seed)))
        self.draws = 0

    def uniform(self) -> float:
        self.draws += 1
        return float(self._gen.random())


@dataclass(frozen=True)
class Decision:
    action: Action
    rationale: Rationale
    solution: EquilibriumSolution | None = None
    sampled_probability_a1: float | None = None
    # set when the coordination rule had no mass and fell back to p1's marginal
    sampling_fallback: bool = field(default=False)

    def __post_init__(self) -> None:
        sampled = self.rationale is Rationale.GAME_SAMPLED
        if sampled != (self.solution is not None) or sampled != (
            self.sampled_probability_a1 is not None
        ):
            raise ValidationError("solution/probability present iff rationale is GAME_SAMPLED")


def _sampling_probability(s: MixedStrategyProfile, mode: SamplingMode) -> tuple[float, bool]:
    s1, s2 = s.sigma_p1_a1, s.sigma_p2_a1
    mode = SamplingMode(mode)
    if mode is SamplingMode.P1_MARGINAL:
        return s1, False
    if mode is SamplingMode.P2_MARGINAL:
        return s2, False
    both_robot = s1 * s2
    both_human = (1.0 - s1) * (1.0 - s2)
    total = both_robot + both_human
    if total == 0.0:
        return s1, True
    return both_robot / total, False


def sampling_probability(s: MixedStrategyProfile, mode: SamplingMode) -> float:
    """Probability of executing ROBOT given the two equilibrium mixes.

    ``CONDITIONAL_COORDINATION`` conditions the independent product of the
    two mixes on the coordinated cells, the only ones the system can execute.
    If neither coordinated cell has mass, p1's marginal is used instead.
    """
    return _sampling_probability(s, mode)[0]


def decide(
    eps: float,
    factors: SystemFactors | None,
    policy: Policy,
    rng: RandomSource,
) -> Decision:
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"confidence must lie in [0, 1], got {eps}")
    if isinstance(policy, AlwaysRobot):
        return Decision(Action.ROBOT, Rationale.POLICY_FIXED)
    if isinstance(policy, AlwaysHuman):
        return Decision(Action.HUMAN, Rationale.POLICY_FIXED)
    if isinstance(policy, Threshold):
        return Decision(Action.ROBOT if eps >= policy.cutoff else Action.HUMAN, Rationale.POLICY_FIXED)

    if eps >= policy.eps_high:
        return Decision(Action.ROBOT, Rationale.HIGH_CONFIDENCE)
    if eps <= policy.eps_low:
        return Decision(Action.HUMAN, Rationale.LOW_CONFIDENCE)
    if factors is None:
        raise ValidationError("system factors are required on the game path", "factors")
    sol = solve(factors, eps, policy.scale_mode)
    p, fallback = _sampling_probability(sol.msne, policy.sampling)
    action = Action.ROBOT if rng.uniform() < p else Action.HUMAN
    return Decision(action, Rationale.GAME_SAMPLED, sol, p, fallback)
