"""Timestamped event records and their text / JSON serializations.

Text form, one record per line::

    t_ms,kind,object_id,key=value;key=value

``object_id`` is ``-`` for run-level events.  Floats are written with
``repr`` so that parsing a line gives back the identical value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import IntegrityError

Scalar = Union[int, float, str]


@dataclass(frozen=True)
class Event:
    t_ms: int
    kind: str
    object_id: int | None
    payload: dict[str, Scalar] = field(default_factory=dict)

    @property
    def t_s(self) -> float:
        return self.t_ms / 1000.0

    def to_line(self) -> str:
        oid = "-" if self.object_id is None else str(self.object_id)
        body = ";".join(f"{k}={_fmt(v)}" for k, v in self.payload.items())
        return f"{self.t_ms},{self.kind},{oid},{body}"

    @classmethod
    def from_line(cls, line: str) -> Event:
        try:
            t, kind, oid, body = line.rstrip("\n").split(",", 3)
            payload = {}
            if body:
                for item in body.split(";"):
                    k, v = item.split("=", 1)
                    payload[k] = _parse(v)
            return cls(int(t), kind, None if oid == "-" else int(oid), payload)
        except ValueError as err:
            raise IntegrityError(f"malformed event line {line!r}: {err}") from None

    def to_dict(self) -> dict:
        return {"t_ms": self.t_ms, "kind": self.kind, "object_id": self.object_id, "payload": dict(self.payload)}

    @classmethod
    def from_dict(cls, d: dict) -> Event:
        return cls(int(d["t_ms"]), d["kind"], d["object_id"], dict(d["payload"]))


def _fmt(v: Scalar) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite payload value {v}")
        return repr(v)
    return str(v)


def _parse(s: str) -> Scalar:
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


class EventLog:
    """Append-only, time-ordered event sequence."""

    def __init__(self, events: Iterable[Event] = ()):
        self.events: list[Event] = []
        for e in events:
            self.append(e)

    def append(self, event: Event) -> None:
        if self.events and event.t_ms < self.events[-1].t_ms:
            raise IntegrityError(
                f"event at {event.t_ms} ms precedes previous event at {self.events[-1].t_ms} ms"
            )
        self.events.append(event)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EventLog) and self.events == other.events

    def of_kind(self, *kinds: str) -> list[Event]:
        return [e for e in self.events if e.kind in kinds]

    def to_text(self) -> str:
        return "".join(e.to_line() + "\n" for e in self.events)

    @classmethod
    def from_text(cls, text: str) -> EventLog:
        return cls(Event.from_line(line) for line in text.splitlines() if line)

    def to_json(self) -> str:
        return json.dumps([e.to_dict() for e in self.events], indent=None, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> EventLog:
        return cls(Event.from_dict(d) for d in json.loads(text))
