"""Scenario configuration: the single input document of a simulation run.

Scenarios are JSON objects validated by pydantic models with unknown keys
rejected.  The JSON Schema published alongside the package is generated
from these models (:func:`json_schema`).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Annotated, Literal, Union

import pydantic
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .decision import AlwaysHuman, AlwaysRobot, Gresilience, Policy, SamplingMode, Threshold
from .errors import ValidationError
from .game import P2ScaleMode

SCHEMA_VERSION = 1

Probability = Annotated[float, Field(ge=0.0, le=1.0)]
Positive = Annotated[float, Field(gt=0.0)]
NonNegative = Annotated[float, Field(ge=0.0)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConveyorConfig(_Model):
    speed_mps: Positive = 0.1
    picking_area_m: Positive = 1.5
    slowdown_factor: Annotated[float, Field(gt=0.0, le=1.0)] = 0.5
    power_w: Positive = 40.0


class ClassifierConfig(_Model):
    eps_known_mean: Probability = 0.8
    eps_known_spread: NonNegative = 0.12
    eps_novel_mean: Probability = 0.5
    eps_novel_spread: NonNegative = 0.15
    second_image_boost_mean: float = 0.08
    second_image_boost_spread: NonNegative = 0.05
    classify_time_s: Positive = 0.3


class HumanConfig(_Model):
    reaction_time_mean_s: Positive = 2.0
    reaction_time_spread_s: NonNegative = 0.5
    classify_time_s: Positive = 4.0
    correction_time_s: Positive = 6.0
    retrieval_penalty_s: Positive = 15.0


class ArmConfig(_Model):
    move_time_s: Positive = 3.0
    power_w: Positive = 60.0


class ComputeConfig(_Model):
    power_w: Positive = 45.0


class Bound(_Model):
    lo: float
    hi: float

    @model_validator(mode="after")
    def _width(self) -> Bound:
        if not self.hi > self.lo:
            raise ValueError(f"bound needs hi > lo, got [{self.lo}, {self.hi}]")
        return self


class FactorBounds(_Model):
    t_h: Bound = Bound(lo=2.0, hi=12.0)
    t_a: Bound = Bound(lo=1.0, hi=10.0)
    h: Bound = Bound(lo=0.0, hi=10.0)
    co2: Bound = Bound(lo=0.0, hi=0.2)


class FactorPriors(_Model):
    """Raw measurements assumed when the window holds no observation."""

    t_h: NonNegative = 6.0
    t_a: NonNegative = 4.0
    h: NonNegative = 2.0
    co2: NonNegative = 0.08


class FactorConfig(_Model):
    window_s: Positive = 120.0
    bounds: FactorBounds = FactorBounds()
    priors: FactorPriors = FactorPriors()


class GresiliencePolicyConfig(_Model):
    kind: Literal["gresilience"] = "gresilience"
    eps_low: Probability = 0.3
    eps_high: Probability = 0.7
    sampling: SamplingMode = SamplingMode.CONDITIONAL_COORDINATION
    scale_mode: P2ScaleMode = P2ScaleMode.COMPLEMENT

    @model_validator(mode="after")
    def _band(self) -> GresiliencePolicyConfig:
        if not self.eps_low < self.eps_high:
            raise ValueError(f"need eps_low < eps_high, got {self.eps_low} >= {self.eps_high}")
        return self

    def to_policy(self) -> Gresilience:
        return Gresilience(self.eps_low, self.eps_high, self.sampling, self.scale_mode)


class AlwaysRobotPolicyConfig(_Model):
    kind: Literal["always-robot"] = "always-robot"

    def to_policy(self) -> AlwaysRobot:
        return AlwaysRobot()


class AlwaysHumanPolicyConfig(_Model):
    kind: Literal["always-human"] = "always-human"

    def to_policy(self) -> AlwaysHuman:
        return AlwaysHuman()


class ThresholdPolicyConfig(_Model):
    kind: Literal["threshold"] = "threshold"
    cutoff: Probability = 0.5

    def to_policy(self) -> Threshold:
        return Threshold(self.cutoff)


PolicyConfig = Annotated[
    Union[
        GresiliencePolicyConfig,
        AlwaysRobotPolicyConfig,
        AlwaysHumanPolicyConfig,
        ThresholdPolicyConfig,
    ],
    Field(discriminator="kind"),
]


class ScoreConfig(_Model):
    """Weights of the combined policy-comparison score."""

    w_resilience: NonNegative = 0.5
    w_green: NonNegative = 0.3
    w_human: NonNegative = 0.2
    ref_recovery_s: Positive = 10.0
    ref_co2e_per_object_g: Positive = 0.1


class ScenarioConfig(_Model):
    schema_version: Literal[1] = SCHEMA_VERSION
    scenario_id: str = "scenario"
    seed: Annotated[int, Field(ge=0, lt=2**64)] = 0
    duration_s: Positive = 600.0
    arrival_rate_per_min: Positive = 6.0
    empty_image_fraction: Probability = 0.0
    known_color_fraction: Probability = 0.75
    known_colors: Annotated[list[str], Field(min_length=1)] = ["red", "green", "blue"]
    novel_colors: Annotated[list[str], Field(min_length=1)] = ["yellow", "purple", "orange"]
    conveyor: ConveyorConfig = ConveyorConfig()
    classifier: ClassifierConfig = ClassifierConfig()
    human: HumanConfig = HumanConfig()
    arm: ArmConfig = ArmConfig()
    compute: ComputeConfig = ComputeConfig()
    carbon_intensity_g_per_kwh: NonNegative = 475.0
    factors: FactorConfig = FactorConfig()
    policy: PolicyConfig = GresiliencePolicyConfig()
    score: ScoreConfig = ScoreConfig()

    @model_validator(mode="after")
    def _palettes(self) -> ScenarioConfig:
        colors = self.known_colors + self.novel_colors
        if len(set(colors)) != len(colors):
            raise ValueError("color labels must be unique across both palettes")
        for c in colors:
            if not c or any(ch in c for ch in ",;= \n"):
                raise ValueError(f"color label {c!r} must be nonempty without , ; = or whitespace")
        return self

    def policy_obj(self) -> Policy:
        return self.policy.to_policy()

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


def _wrap(err: pydantic.ValidationError) -> ValidationError:
    first = err.errors()[0]
    path = ".".join(str(p) for p in first["loc"]) or "<root>"
    return ValidationError(first["msg"], path)


def parse_scenario(data: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except pydantic.ValidationError as err:
        raise _wrap(err) from None


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Read and validate a scenario file.  Raises FileNotFoundError or ValidationError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValidationError(f"not valid JSON: {err}", "<root>") from None
    if not isinstance(data, dict):
        raise ValidationError("scenario must be a JSON object", "<root>")
    return parse_scenario(data)


def reference_scenario() -> ScenarioConfig:
    """The pinned reference scenario shipped with the package."""
    text = resources.files("gresilience.data").joinpath("reference.json").read_text(encoding="utf-8")
    return parse_scenario(json.loads(text))


def with_override(cfg: ScenarioConfig, dotted: str, value) -> ScenarioConfig:
    """Return a copy of ``cfg`` with the field at ``dotted`` replaced."""
    data = cfg.to_dict()
    node = data
    keys = dotted.split(".")
    for k in keys[:-1]:
        if not isinstance(node, dict) or k not in node:
            raise ValidationError("unknown parameter", dotted)
        node = node[k]
    if not isinstance(node, dict) or keys[-1] not in node:
        raise ValidationError("unknown parameter", dotted)
    node[keys[-1]] = value
    return parse_scenario(data)


def with_policy(cfg: ScenarioConfig, name: str) -> ScenarioConfig:
    """Swap the policy by CLI name: gresilience, always-robot, always-human, threshold[:cutoff]."""
    data = cfg.to_dict()
    kind, _, arg = name.partition(":")
    if kind == "gresilience":
        if data["policy"]["kind"] != "gresilience":
            data["policy"] = {"kind": "gresilience"}
    elif kind in ("always-robot", "always-human"):
        if arg:
            raise ValidationError(f"policy {kind} takes no argument", "policy")
        data["policy"] = {"kind": kind}
    elif kind == "threshold":
        try:
            cutoff = float(arg) if arg else data["policy"].get("cutoff", 0.5)
        except ValueError:
            raise ValidationError(f"bad threshold cutoff {arg!r}", "policy.cutoff") from None
        data["policy"] = {"kind": "threshold", "cutoff": cutoff}
    else:
        raise ValidationError(f"unknown policy {name!r}", "policy")
    return parse_scenario(data)


def json_schema() -> dict:
    schema = ScenarioConfig.model_json_schema()
    schema["$schema"] = "https://json-schema.org/draft/2020-12/schema"
    schema["$id"] = f"gresilience/scenario/v{SCHEMA_VERSION}"
    return schema
