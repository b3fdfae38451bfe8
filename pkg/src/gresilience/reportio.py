"""CSV and JSON serialization of run reports.

``report.csv`` columns, in order:

==================  ====================================================
scenario_id         scenario identifier from the scenario file
seed                seed used for the replication
policy              policy label (``gresilience``, ``always-robot``, ...)
objects_total       objects that arrived during the run
robot_placed        objects placed by the arm (including later-corrected)
human_placed        objects placed by the human
missed              objects that left the picking area
corrections         robot misplacements corrected by the human
human_interactions  human placements plus retrievals of missed objects
recovery_mean_s     mean degradation-episode recovery time, seconds
recovery_p95_s      95th percentile recovery time, seconds
energy_wh           total energy over all sources, watt-hours
co2e_g              grams CO2-equivalent
combined_score      weighted comparison score (higher is better)
schema_version      CSV schema version, currently 1
==================  ====================================================
"""

from __future__ import annotations

import csv
import io
import json

from .metrics import PolicySummary, RunReport

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "scenario_id",
    "seed",
    "policy",
    "objects_total",
    "robot_placed",
    "human_placed",
    "missed",
    "corrections",
    "human_interactions",
    "recovery_mean_s",
    "recovery_p95_s",
    "energy_wh",
    "co2e_g",
    "combined_score",
    "schema_version",
)
_INT = {"seed", "objects_total", "robot_placed", "human_placed", "missed", "corrections",
        "human_interactions", "schema_version"}
_STR = {"scenario_id", "policy"}


def _cell(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def report_row(r: RunReport) -> dict:
    d = r.as_dict()
    row = {k: d[k] for k in CSV_COLUMNS if k != "schema_version"}
    row["schema_version"] = SCHEMA_VERSION
    return row


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_cell(row[k]) for k in CSV_COLUMNS])
    return buf.getvalue()


def reports_to_csv(reports: list[RunReport]) -> str:
    return rows_to_csv([report_row(r) for r in reports])


def parse_csv(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for cells in reader:
        row = {}
        for k, v in zip(CSV_COLUMNS, cells):
            row[k] = v if k in _STR else int(v) if k in _INT else float(v)
        rows.append(row)
    return rows


def summary_json(command: str, scenario_id: str, summaries: dict[str, PolicySummary], extra: dict | None = None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "scenario_id": scenario_id,
        **(extra or {}),
        "policies": [s.to_dict() for s in summaries.values()],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
