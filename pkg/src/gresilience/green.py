"""Energy bookkeeping and CO2-equivalent estimation.

Energy is tracked per source as power x duration and converted to grams of
CO2e through a single carbon-intensity constant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import DomainError

JOULES_PER_KWH = 3.6e6
DEFAULT_CARBON_INTENSITY = 475.0  # g CO2e / kWh


class Source(enum.Enum):
    ARM = "ARM"
    COMPUTE = "COMPUTE"
    CONVEYOR = "CONVEYOR"
    HUMAN_AID = "HUMAN_AID"


@dataclass(frozen=True)
class EnergyEntry:
    source: Source
    power_w: float
    duration_s: float

    @property
    def joules(self) -> float:
        return self.power_w * self.duration_s


@dataclass
class EnergyLedger:
    entries: list[EnergyEntry] = field(default_factory=list)

    def record(self, source: Source, power_w: float, duration_s: float) -> EnergyEntry:
        if power_w < 0 or duration_s < 0:
            raise DomainError(f"power and duration must be >= 0, got {power_w} W, {duration_s} s")
        entry = EnergyEntry(Source(source), float(power_w), float(duration_s))
        self.entries.append(entry)
        return entry

    def joules_by_source(self) -> dict[Source, float]:
        totals = {s: 0.0 for s in Source}
        for e in self.entries:
            totals[e.source] += e.joules
        return totals

    @property
    def total_joules(self) -> float:
        return sum(e.joules for e in self.entries)

    def __add__(self, other: EnergyLedger) -> EnergyLedger:
        return EnergyLedger(self.entries + other.entries)


def record(ledger: EnergyLedger | None, source: Source, power_w: float, duration_s: float) -> EnergyLedger:
    """Append an entry and return the ledger (a fresh one if ``ledger`` is None)."""
    ledger = EnergyLedger() if ledger is None else ledger
    ledger.record(source, power_w, duration_s)
    return ledger


@dataclass(frozen=True)
class CO2Report:
    joules_by_source: dict[Source, float]
    total_kwh: float
    co2e_g: float
    carbon_intensity_g_per_kwh: float

    @property
    def total_joules(self) -> float:
        return sum(self.joules_by_source.values())

    def wh_by_source(self) -> dict[Source, float]:
        return {s: j / 3600.0 for s, j in self.joules_by_source.items()}


def co2e(ledger: EnergyLedger, carbon_intensity_g_per_kwh: float = DEFAULT_CARBON_INTENSITY) -> CO2Report:
    if carbon_intensity_g_per_kwh < 0:
        raise DomainError(f"carbon intensity must be >= 0, got {carbon_intensity_g_per_kwh}")
    by_source = ledger.joules_by_source()
    kwh = sum(by_source.values()) / JOULES_PER_KWH
    return CO2Report(by_source, kwh, kwh * carbon_intensity_g_per_kwh, float(carbon_intensity_g_per_kwh))
