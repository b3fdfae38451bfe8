"""Resilience and green metrics computed from a run's event log.

A degradation episode starts when an object enters the uncertain path
(conveyor slowdown) or the unclassified queue.  It ends once the object is
in a terminal state *and* the conveyor runs at nominal speed again.
Recovery time is the length of that interval.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import DomainError, IntegrityError
from .eventlog import EventLog
from .green import Source
from .scenario import ScenarioConfig, ScoreConfig
from .sim import Counters

Z95 = 1.959963984540054


@dataclass(frozen=True)
class DegradationEpisode:
    object_id: int
    detected_at_s: float
    resolved_at_s: float | None  # None while unresolved at the end of the run

    @property
    def recovery_time_s(self) -> float | None:
        if self.resolved_at_s is None:
            return None
        return self.resolved_at_s - self.detected_at_s


def detect_episodes(log: EventLog) -> list[DegradationEpisode]:
    """One episode per object that left the confident path, in detection order."""
    detected: dict[int, int] = {}
    resolved: dict[int, int] = {}
    waiting: list[int] = []  # terminal objects waiting for the conveyor
    slowed = False
    prev = None
    for e in log:
        if prev is not None and e.t_ms < prev:
            raise IntegrityError(f"timestamps out of order: {e.t_ms} ms after {prev} ms")
        prev = e.t_ms
        if e.kind in ("slowdown", "queue_insert"):
            detected.setdefault(e.object_id, e.t_ms)
        if e.kind == "slowdown":
            slowed = True
        elif e.kind == "restore":
            slowed = False
            for oid in waiting:
                resolved[oid] = e.t_ms
            waiting.clear()
        elif e.kind == "terminal" and e.object_id in detected:
            if slowed:
                waiting.append(e.object_id)
            else:
                resolved[e.object_id] = e.t_ms
    return [
        DegradationEpisode(
            oid, t / 1000.0, resolved[oid] / 1000.0 if oid in resolved else None
        )
        for oid, t in detected.items()
    ]


def counters_from_log(log: EventLog) -> Counters:
    c = Counters()
    placed_by: dict[int, str] = {}
    terminal: set[int] = set()
    for e in log:
        if e.kind == "arrival":
            c.objects_total += 1
        elif e.kind == "place":
            placed_by[e.object_id] = e.payload["by"]
            if e.payload["by"] == "human":
                c.human_interactions += 1
        elif e.kind == "retrieval":
            c.human_interactions += 1
        elif e.kind == "correction":
            c.corrections += 1
        elif e.kind == "slowdown":
            c.slowdowns += 1
        elif e.kind == "queue_insert":
            c.queue_inserts += 1
        elif e.kind == "decision" and e.payload["rationale"] == "game_sampled":
            c.game_decisions += 1
        elif e.kind == "terminal":
            terminal.add(e.object_id)
            state = e.payload["state"]
            if state == "DISCARDED":
                c.discarded += 1
            elif state == "MISSED":
                c.missed += 1
            elif placed_by.get(e.object_id) == "robot":
                c.robot_placed += 1
            else:
                c.human_placed += 1
    c.in_flight = c.objects_total - len(terminal)
    return c


def energy_from_log(log: EventLog) -> dict[Source, float]:
    """Joules per source from the log's energy entries."""
    out = {s: 0.0 for s in Source}
    for e in log.of_kind("energy"):
        out[Source(e.payload["source"])] += e.payload["joules"]
    return out


@dataclass(frozen=True)
class RunReport:
    scenario_id: str
    seed: int
    policy: str
    objects_total: int
    robot_placed: int
    human_placed: int
    missed: int
    discarded: int
    in_flight: int
    corrections: int
    human_interactions: int
    episodes: int
    recovery_mean_s: float
    recovery_p50_s: float
    recovery_p95_s: float
    recovery_max_s: float
    energy_wh_arm: float
    energy_wh_compute: float
    energy_wh_conveyor: float
    energy_wh_human_aid: float
    energy_wh: float
    co2e_g: float
    combined_score: float

    def as_dict(self) -> dict:
        return asdict(self)


NUMERIC_FIELDS = tuple(f.name for f in fields(RunReport) if f.name not in ("scenario_id", "seed", "policy"))


def recovery_stats(episodes: list[DegradationEpisode]) -> tuple[float, float, float, float]:
    """(mean, p50, p95, max) of resolved recovery times; zeros when there are none."""
    times = np.array([ep.recovery_time_s for ep in episodes if ep.recovery_time_s is not None])
    if times.size == 0:
        return 0.0, 0.0, 0.0, 0.0
    return (
        float(times.mean()),
        float(np.percentile(times, 50)),
        float(np.percentile(times, 95)),
        float(times.max()),
    )


def combined_score(
    recovery_mean_s: float,
    co2e_g: float,
    human_interactions: int,
    objects_total: int,
    weights: ScoreConfig,
) -> float:
    """Weighted, normalized penalty sum, negated so that larger is better.

    A comparison device for policies; it carries no meaning beyond that.
    """
    n = max(objects_total, 1)
    return -(
        weights.w_resilience * recovery_mean_s / weights.ref_recovery_s
        + weights.w_green * (co2e_g / n) / weights.ref_co2e_per_object_g
        + weights.w_human * human_interactions / n
    )


def build_report(log: EventLog, cfg: ScenarioConfig, policy: str) -> RunReport:
    """Compute a run report from the event log alone."""
    c = counters_from_log(log)
    episodes = detect_episodes(log)
    mean, p50, p95, mx = recovery_stats(episodes)
    joules = energy_from_log(log)
    total_j = sum(joules.values())
    co2 = total_j / 3.6e6 * cfg.carbon_intensity_g_per_kwh
    return RunReport(
        scenario_id=cfg.scenario_id,
        seed=cfg.seed,
        policy=policy,
        objects_total=c.objects_total,
        robot_placed=c.robot_placed,
        human_placed=c.human_placed,
        missed=c.missed,
        discarded=c.discarded,
        in_flight=c.in_flight,
        corrections=c.corrections,
        human_interactions=c.human_interactions,
        episodes=len(episodes),
        recovery_mean_s=mean,
        recovery_p50_s=p50,
        recovery_p95_s=p95,
        recovery_max_s=mx,
        energy_wh_arm=joules[Source.ARM] / 3600.0,
        energy_wh_compute=joules[Source.COMPUTE] / 3600.0,
        energy_wh_conveyor=joules[Source.CONVEYOR] / 3600.0,
        energy_wh_human_aid=joules[Source.HUMAN_AID] / 3600.0,
        energy_wh=total_j / 3600.0,
        co2e_g=co2,
        combined_score=combined_score(mean, co2, c.human_interactions, c.objects_total, cfg.score),
    )


@dataclass(frozen=True)
class FieldSummary:
    mean: float
    half_width: float


@dataclass
class PolicySummary:
    policy: str
    n: int
    fields: dict[str, FieldSummary] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "n": self.n,
            "fields": {k: {"mean": v.mean, "half_width": v.half_width} for k, v in self.fields.items()},
        }


def aggregate(reports: list[RunReport]) -> dict[str, PolicySummary]:
    """Per-policy means with 95% normal-approximation half-widths.

    Policies appear in order of first occurrence in ``reports``.
    """
    if not reports:
        raise DomainError("cannot aggregate an empty list of reports")
    groups: dict[str, list[RunReport]] = {}
    for r in reports:
        groups.setdefault(r.policy, []).append(r)
    out = {}
    for policy, rs in groups.items():
        summary = PolicySummary(policy, len(rs))
        for name in NUMERIC_FIELDS:
            x = np.array([getattr(r, name) for r in rs], dtype=float)
            hw = 0.0 if len(x) < 2 else Z95 * float(x.std(ddof=1)) / math.sqrt(len(x))
            summary.fields[name] = FieldSummary(float(x.mean()), hw)
        out[policy] = summary
    return out
