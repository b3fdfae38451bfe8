"""Event-driven simulation of the conveyor / classifier / arm / human cell.

Objects arrive on the conveyor and pass one at a time through a single
classification station.  Per object:

* an empty image is discarded;
* the first appearance of a color fails the similarity check and is sent
  to the unclassified queue, where the human operator classifies it;
* otherwise the classifier predicts a label with confidence ``eps``.  A
  prediction at or above the policy's gate goes straight to the arm.  Below
  the gate the conveyor is slowed, a second image is taken and the decision
  engine picks ROBOT or HUMAN.  The conveyor is restored once the chosen
  actor has placed the object.

Robot placements with a wrong label are corrected by the human afterwards.
An object that drifts past the picking area before it is grabbed is missed
and retrieved by the human with a fixed time penalty.

The clock counts integer milliseconds.  All randomness derives from the
scenario seed through independent numpy streams, one per concern, so two
policies run on the same seed see the same arrivals and object colors.
"""

from __future__ import annotations

import bisect
import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decision import Decision, Gresilience, Rationale, RandomSource, decide, gate_threshold, policy_label
from .errors import InvariantError, ValidationError
from .eventlog import Event, EventLog
from .game import Action, SystemFactors
from .green import JOULES_PER_KWH, EnergyLedger, Source
from .scenario import ClassifierConfig, FactorBounds, FactorPriors, ScenarioConfig

EPS_MIN, EPS_MAX = 0.01, 0.99
SCORE_FLOOR, SCORE_CEIL = 0.05, 1.0


def to_ms(seconds: float) -> int:
    return int(round(seconds * 1000.0))


@dataclass
class WorldObject:
    id: int
    true_color: str
    is_novel: bool
    arrival_time_s: float
    position_m: float = 0.0
    empty_image: bool = False


# ---------------------------------------------------------------------------
# classifier model


def classify(
    obj: WorldObject,
    params: ClassifierConfig,
    rng: np.random.Generator,
    labels: list[str],
    eps: float | None = None,
) -> tuple[str, float]:
    """Predict a label for ``obj``.

    Confidence is drawn from the known or novel distribution and clamped to
    [0.01, 0.99] unless ``eps`` is given.  The prediction is correct with
    probability ``eps``; otherwise a wrong label is drawn uniformly.
    Consumes exactly three draws from ``rng`` in every case.
    """
    if obj.is_novel:
        mean, spread = params.eps_novel_mean, params.eps_novel_spread
    else:
        mean, spread = params.eps_known_mean, params.eps_known_spread
    z, u_correct, u_label = rng.standard_normal(), rng.random(), rng.random()
    if eps is None:
        eps = float(np.clip(mean + spread * z, EPS_MIN, EPS_MAX))
    return _predict(obj.true_color, eps, u_correct, u_label, labels), eps


def _predict(truth: str, eps: float, u_correct: float, u_label: float, labels: list[str]) -> str:
    if u_correct < eps:
        return truth
    wrong = [c for c in labels if c != truth]
    if not wrong:
        return truth
    return wrong[min(int(u_label * len(wrong)), len(wrong) - 1)]


# ---------------------------------------------------------------------------
# factor measurement


@dataclass(frozen=True)
class RawMeasurements:
    """Un-normalized factor inputs (seconds, seconds, count, g CO2e/object)."""

    human_time_s: float
    arm_time_s: float
    human_interactions: float
    co2e_per_object_g: float


def normalize(raw: float, lo: float, hi: float) -> float:
    """Affine map of [lo, hi] onto [0.05, 1.0], clamped outside."""
    if not hi > lo:
        raise ValidationError(f"normalization bound has zero or negative width: [{lo}, {hi}]")
    x = (raw - lo) / (hi - lo)
    return min(SCORE_CEIL, max(SCORE_FLOOR, SCORE_FLOOR + (SCORE_CEIL - SCORE_FLOOR) * x))


def normalize_factors(raw: RawMeasurements, bounds: FactorBounds) -> SystemFactors:
    return SystemFactors(
        t_h=normalize(raw.human_time_s, bounds.t_h.lo, bounds.t_h.hi),
        t_a=normalize(raw.arm_time_s, bounds.t_a.lo, bounds.t_a.hi),
        h=normalize(raw.human_interactions, bounds.h.lo, bounds.h.hi),
        co2=normalize(raw.co2e_per_object_g, bounds.co2.lo, bounds.co2.hi),
    )


def is_human_interaction(e: Event, include_corrections: bool = True) -> bool:
    if e.kind == "place":
        return e.payload.get("by") == "human"
    if e.kind == "correction":
        return include_corrections
    return e.kind == "retrieval"


def raw_measurements(
    window: list[Event], priors: FactorPriors, carbon_intensity_g_per_kwh: float
) -> RawMeasurements:
    """Summarize a slice of the event log.  Empty categories fall back to ``priors``."""
    human_t = [e.payload["handling_s"] for e in window if e.kind == "place" and e.payload["by"] == "human"]
    arm_t = [e.payload["handling_s"] for e in window if e.kind == "place" and e.payload["by"] == "robot"]
    interactions = sum(1 for e in window if is_human_interaction(e))
    joules = sum(e.payload["joules"] for e in window if e.kind == "energy")
    arrivals = sum(1 for e in window if e.kind == "arrival")
    if arrivals and joules:
        co2 = joules / JOULES_PER_KWH * carbon_intensity_g_per_kwh / arrivals
    else:
        co2 = priors.co2
    return RawMeasurements(
        human_time_s=float(np.mean(human_t)) if human_t else priors.t_h,
        arm_time_s=float(np.mean(arm_t)) if arm_t else priors.t_a,
        human_interactions=float(interactions) if window else priors.h,
        co2e_per_object_g=co2,
    )


def measure_factors(
    window: list[Event],
    bounds: FactorBounds,
    priors: FactorPriors | None = None,
    carbon_intensity_g_per_kwh: float = 475.0,
) -> SystemFactors:
    return normalize_factors(
        raw_measurements(window, priors or FactorPriors(), carbon_intensity_g_per_kwh), bounds
    )


# ---------------------------------------------------------------------------
# simulation


@dataclass
class Counters:
    objects_total: int = 0
    discarded: int = 0
    robot_placed: int = 0
    human_placed: int = 0
    missed: int = 0
    in_flight: int = 0
    corrections: int = 0
    human_interactions: int = 0
    slowdowns: int = 0
    queue_inserts: int = 0
    game_decisions: int = 0

    def conserved(self) -> bool:
        return self.objects_total == (
            self.discarded + self.robot_placed + self.human_placed + self.missed + self.in_flight
        )


@dataclass
class RunResult:
    config: ScenarioConfig
    policy: str
    log: EventLog
    ledger: EnergyLedger
    counters: Counters
    decisions: list[Decision] = field(default_factory=list)


@dataclass
class _Track:
    obj: WorldObject
    odo_at_arrival: float
    station_start_ms: int = 0
    predicted: str = ""
    eps: float = 0.0
    slowed: bool = False
    placed_by: str | None = None
    terminal: str | None = None


class Simulation:
    """Single-threaded run of one scenario.  Use :func:`run_scenario`."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.policy = cfg.policy_obj()
        self.gate = gate_threshold(self.policy)
        self.labels = list(cfg.known_colors) + list(cfg.novel_colors)
        streams = np.random.SeedSequence(cfg.seed).spawn(5)
        self.rng_arrival = np.random.Generator(np.random.PCG64(streams[0]))
        self.rng_world = np.random.Generator(np.random.PCG64(streams[1]))
        self.rng_classifier = np.random.Generator(np.random.PCG64(streams[2]))
        self.rng_human = np.random.Generator(np.random.PCG64(streams[3]))
        self.rng_decision = RandomSource(streams[4])

        self.end_ms = to_ms(cfg.duration_s)
        self.log = EventLog()
        self._times: list[int] = []
        self.ledger = EnergyLedger()
        self.counters = Counters()
        self.decisions: list[Decision] = []

        self._heap: list = []
        self._seq = itertools.count()
        self.now = 0

        # conveyor odometer: distance traveled at the start of the current speed segment
        self._speed_factor = 1.0
        self._seg_start_ms = 0
        self._seg_odo = 0.0
        self._slow_source = Source.CONVEYOR

        self._tracks: dict[int, _Track] = {}
        self._seen_colors: set[str] = set(cfg.known_colors)
        self._station_queue: deque[int] = deque()
        self._station_busy = False
        self._human_jobs: deque[tuple[str, int]] = deque()
        self._human_busy = False

    # -- plumbing -------------------------------------------------------

    def _at(self, t_ms: int, fn: Callable, *args) -> None:
        heapq.heappush(self._heap, (t_ms, next(self._seq), fn, args))

    def _emit(self, kind: str, oid: int | None = None, **payload) -> None:
        self.log.append(Event(self.now, kind, oid, payload))
        self._times.append(self.now)

    def _energy(self, source: Source, power_w: float, duration_s: float, oid: int | None = None) -> None:
        entry = self.ledger.record(source, power_w, duration_s)
        self._emit(
            "energy", oid, source=source.value, power_w=entry.power_w,
            duration_s=entry.duration_s, joules=entry.joules,
        )

    def _odometer(self) -> float:
        speed = self.cfg.conveyor.speed_mps * self._speed_factor
        return self._seg_odo + speed * (self.now - self._seg_start_ms) / 1000.0

    def _position(self, oid: int) -> float:
        return self._odometer() - self._tracks[oid].odo_at_arrival

    def _close_segment(self, source: Source) -> None:
        dur = (self.now - self._seg_start_ms) / 1000.0
        self._seg_odo = self._odometer()
        self._seg_start_ms = self.now
        if dur > 0:
            self._energy(source, self.cfg.conveyor.power_w * self._speed_factor, dur)

    def _set_speed(self, factor: float, closing_source: Source) -> None:
        self._close_segment(closing_source)
        self._speed_factor = factor

    def _terminal(self, oid: int, state: str) -> None:
        tr = self._tracks[oid]
        if tr.terminal is not None:
            raise InvariantError(f"object {oid} reached a second terminal state {state}")
        tr.terminal = state
        c = self.counters
        if state == "DISCARDED":
            c.discarded += 1
        elif state == "MISSED":
            c.missed += 1
        elif tr.placed_by == "robot":
            c.robot_placed += 1
        elif tr.placed_by == "human":
            c.human_placed += 1
        else:
            raise InvariantError(f"object {oid} done without placement")
        self._emit("terminal", oid, state=state)

    # -- arrivals and station --------------------------------------------

    def _schedule_arrivals(self) -> None:
        mean_gap_s = 60.0 / self.cfg.arrival_rate_per_min
        t_s, oid = 0.0, 0
        while True:
            t_s += float(self.rng_arrival.exponential(mean_gap_s))
            t_ms = to_ms(t_s)
            if t_ms >= self.end_ms:
                break
            self._at(t_ms, self._on_arrival, oid)
            oid += 1

    def _on_arrival(self, oid: int) -> None:
        cfg = self.cfg
        u_empty, u_palette, u_color = self.rng_world.random(3)
        known = u_palette < cfg.known_color_fraction
        palette = cfg.known_colors if known else cfg.novel_colors
        color = palette[min(int(u_color * len(palette)), len(palette) - 1)]
        obj = WorldObject(oid, color, not known, self.now / 1000.0)
        obj.empty_image = bool(u_empty < cfg.empty_image_fraction)
        self._tracks[oid] = _Track(obj, self._odometer())
        self.counters.objects_total += 1
        self._emit("arrival", oid, color=color, novel=obj.is_novel)
        self._emit("image", oid, empty=obj.empty_image)
        if obj.empty_image:
            self._terminal(oid, "DISCARDED")
            return
        self._station_queue.append(oid)
        self._station_next()

    def _station_next(self) -> None:
        while not self._station_busy and self._station_queue:
            oid = self._station_queue.popleft()
            tr = self._tracks[oid]
            tr.station_start_ms = self.now
            tr.obj.position_m = self._position(oid)
            if tr.obj.position_m > self.cfg.conveyor.picking_area_m:
                self._miss(oid)
                continue
            similar = tr.obj.true_color in self._seen_colors
            self._seen_colors.add(tr.obj.true_color)
            self._emit("similarity", oid, similar=similar)
            if not similar:
                self.counters.queue_inserts += 1
                self._emit("queue_insert", oid, color=tr.obj.true_color)
                self._human_submit("learn", oid)
                continue
            self._station_busy = True
            dt = self.cfg.classifier.classify_time_s
            self._energy(Source.COMPUTE, self.cfg.compute.power_w, dt, oid)
            self._at(self.now + to_ms(dt), self._on_classified, oid)

    def _station_release(self) -> None:
        if self._speed_factor != 1.0:
            raise InvariantError("station released while conveyor is slowed")
        self._station_busy = False
        self._station_next()

    def _on_classified(self, oid: int) -> None:
        tr = self._tracks[oid]
        tr.predicted, tr.eps = classify(tr.obj, self.cfg.classifier, self.rng_classifier, self.labels)
        self._emit("classify", oid, eps=tr.eps, label=tr.predicted, correct=tr.predicted == tr.obj.true_color)
        if tr.eps >= self.gate:
            self._emit("gate", oid, eps=tr.eps, route="robot")
            self._record_decision(oid, decide(tr.eps, None, self.policy, self.rng_decision))
            self._robot_execute(oid)
            return
        self._emit("gate", oid, eps=tr.eps, route="slow")
        if self._speed_factor != 1.0:
            raise InvariantError("gate decision reached while conveyor is slowed")
        tr.slowed = True
        self.counters.slowdowns += 1
        self._set_speed(self.cfg.conveyor.slowdown_factor, Source.CONVEYOR)
        self._slow_source = Source.CONVEYOR
        self._emit("slowdown", oid, factor=self._speed_factor)
        dt = self.cfg.classifier.classify_time_s
        self._energy(Source.COMPUTE, self.cfg.compute.power_w, dt, oid)
        self._at(self.now + to_ms(dt), self._on_second_image, oid)

    def _on_second_image(self, oid: int) -> None:
        tr = self._tracks[oid]
        c = self.cfg.classifier
        boost = c.second_image_boost_mean + c.second_image_boost_spread * float(self.rng_classifier.standard_normal())
        eps2 = float(np.clip(tr.eps + boost, EPS_MIN, EPS_MAX))
        tr.predicted, tr.eps = classify(tr.obj, c, self.rng_classifier, self.labels, eps=eps2)
        self._emit("second_image", oid, eps=tr.eps, label=tr.predicted, correct=tr.predicted == tr.obj.true_color)
        factors = None
        if isinstance(self.policy, Gresilience) and self.policy.eps_low < tr.eps < self.policy.eps_high:
            factors = self._current_factors()
        decision = decide(tr.eps, factors, self.policy, self.rng_decision)
        self._record_decision(oid, decision)
        if decision.action is Action.ROBOT:
            self._robot_execute(oid)
        else:
            self._slow_source = Source.HUMAN_AID
            self._human_submit("classify", oid)

    def _current_factors(self) -> SystemFactors:
        lo = bisect.bisect_right(self._times, self.now - to_ms(self.cfg.factors.window_s))
        window = self.log.events[lo:]
        return measure_factors(window, self.cfg.factors.bounds, self.cfg.factors.priors,
                               self.cfg.carbon_intensity_g_per_kwh)

    def _record_decision(self, oid: int, d: Decision) -> None:
        self.decisions.append(d)
        payload = dict(action=d.action.name, rationale=d.rationale.value)
        if d.rationale is Rationale.GAME_SAMPLED:
            self.counters.game_decisions += 1
            f = d.solution
            payload.update(
                p_a1=d.sampled_probability_a1,
                sigma_p1=f.msne.sigma_p1_a1, sigma_p2=f.msne.sigma_p2_a1,
                fallback=d.sampling_fallback,
            )
        self._emit("decision", oid, **payload)

    def _restore(self) -> None:
        self._set_speed(1.0, self._slow_source)
        self._emit("restore", None, factor=1.0)

    # -- robot ----------------------------------------------------------

    def _robot_execute(self, oid: int) -> None:
        if self._position(oid) > self.cfg.conveyor.picking_area_m:
            self._miss(oid)
            self._leave_station(oid)
            return
        move = self.cfg.arm.move_time_s
        self._emit("arm_move", oid, dur_s=move)
        self._energy(Source.ARM, self.cfg.arm.power_w, move, oid)
        self._at(self.now + to_ms(move), self._on_robot_placed, oid)

    def _on_robot_placed(self, oid: int) -> None:
        tr = self._tracks[oid]
        tr.placed_by = "robot"
        correct = tr.predicted == tr.obj.true_color
        self._emit("place", oid, by="robot", label=tr.predicted, correct=correct,
                   handling_s=(self.now - tr.station_start_ms) / 1000.0)
        if tr.slowed:
            self._restore()
        if correct:
            self._terminal(oid, "DONE")
        else:
            self._human_submit("correct", oid)
        self._station_release()

    def _leave_station(self, oid: int) -> None:
        if self._tracks[oid].slowed:
            self._restore()
        self._station_release()

    def _miss(self, oid: int) -> None:
        self._emit("miss", oid, position_m=self._position(oid))
        self._human_submit("retrieve", oid)

    # -- human ----------------------------------------------------------
    # Jobs run one at a time in submission order:
    #   learn     unclassified-queue object, human classifies and places it
    #   classify  slow-path object handed over by the decision engine
    #   correct   fix a robot misplacement
    #   retrieve  fetch an object that left the picking area

    def _human_submit(self, job: str, oid: int) -> None:
        self._human_jobs.append((job, oid))
        self._human_next()

    def _human_next(self) -> None:
        if self._human_busy or not self._human_jobs:
            return
        job, oid = self._human_jobs.popleft()
        self._human_busy = True
        h = self.cfg.human
        if job in ("learn", "classify"):
            reaction = max(0.0, h.reaction_time_mean_s + h.reaction_time_spread_s * float(self.rng_human.standard_normal()))
            self._at(self.now + to_ms(reaction), self._on_human_grab, job, oid, self.now)
        elif job == "correct":
            self._at(self.now + to_ms(h.correction_time_s), self._on_corrected, oid)
        elif job == "retrieve":
            self._at(self.now + to_ms(h.retrieval_penalty_s), self._on_retrieved, oid)
        else:
            raise InvariantError(f"unknown human job {job}")

    def _human_done(self) -> None:
        self._human_busy = False
        self._human_next()

    def _on_human_grab(self, job: str, oid: int, start_ms: int) -> None:
        if self._position(oid) > self.cfg.conveyor.picking_area_m:
            # the human is already on it, so the retrieval starts now instead of queuing
            self._emit("miss", oid, position_m=self._position(oid))
            if job == "classify":
                self._leave_station(oid)
            self._at(self.now + to_ms(self.cfg.human.retrieval_penalty_s), self._on_retrieved, oid)
            return
        self._emit("human_grab", oid, job=job)
        self._at(self.now + to_ms(self.cfg.human.classify_time_s), self._on_human_placed, job, oid, start_ms)

    def _on_human_placed(self, job: str, oid: int, start_ms: int) -> None:
        tr = self._tracks[oid]
        tr.placed_by = "human"
        self.counters.human_interactions += 1
        self._emit("place", oid, by="human", label=tr.obj.true_color, correct=True,
                   handling_s=(self.now - start_ms) / 1000.0)
        if job == "classify":
            self._restore()
        self._terminal(oid, "DONE")
        if job == "classify":
            self._station_release()
        self._human_done()

    def _on_corrected(self, oid: int) -> None:
        self.counters.corrections += 1
        self._emit("correction", oid, label=self._tracks[oid].obj.true_color)
        self._terminal(oid, "DONE")
        self._human_done()

    def _on_retrieved(self, oid: int) -> None:
        self.counters.human_interactions += 1
        self._emit("retrieval", oid)
        self._terminal(oid, "MISSED")
        self._human_done()

    # -- main loop --------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        self._emit("start", None, scenario=cfg.scenario_id, seed=cfg.seed, policy=policy_label(self.policy))
        self._schedule_arrivals()
        while self._heap and self._heap[0][0] <= self.end_ms:
            t, _, fn, args = heapq.heappop(self._heap)
            self.now = t
            fn(*args)
        self.now = self.end_ms
        self._close_segment(self._slow_source if self._speed_factor != 1.0 else Source.CONVEYOR)
        c = self.counters
        c.in_flight = sum(1 for tr in self._tracks.values() if tr.terminal is None)
        if not c.conserved():
            raise InvariantError(f"object conservation violated: {c}")
        self._emit("end", None, objects=c.objects_total, in_flight=c.in_flight)
        return RunResult(cfg, policy_label(self.policy), self.log, self.ledger, c, self.decisions)


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    """Simulate ``cfg.duration_s`` seconds of operation."""
    if not isinstance(cfg, ScenarioConfig):
        raise ValidationError("expected a ScenarioConfig", "<root>")
    return Simulation(cfg).run()
