"""Task-trace reading and writing (line-delimited JSON).

One record per line, UTF-8, LF endings, keys sorted:

    {"arrival_time": 12.5, "id": 0, "service_times": {"cpu_core": 493.1},
     "type": "fft"}

with optional per-record keys ``deadline`` (number) and ``power`` (map
server-type to watts).  Floats are written with full round-trip
precision, so a trace emitted from a seeded probabilistic run replays to
the identical task stream.  Schema details in docs/trace_format.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .config import SimConfig
from .model import Task

__all__ = [
    "TraceError",
    "TraceRecord",
    "TraceWriter",
    "write_trace",
    "write_trace_records",
    "read_trace",
    "read_trace_records",
]


class TraceError(Exception):
    """Malformed or inconsistent trace content."""


@dataclass(frozen=True)
class TraceRecord:
    """One trace line, decoded."""

    id: int
    type_name: str
    arrival_time: float
    service_times: dict[str, float]
    deadline: Optional[float] = None
    power: Optional[dict[str, float]] = None


def _record_to_line(record: TraceRecord) -> str:
    doc = {
        "id": record.id,
        "type": record.type_name,
        "arrival_time": record.arrival_time,
        "service_times": record.service_times,
    }
    if record.deadline is not None:
        doc["deadline"] = record.deadline
    if record.power is not None:
        doc["power"] = record.power
    return json.dumps(doc, sort_keys=True) + "\n"


def _task_to_record(task: Task) -> TraceRecord:
    return TraceRecord(
        id=task.id,
        type_name=task.type_name,
        arrival_time=task.arrival_time,
        service_times=task.service_time_by_server,
        deadline=task.deadline,
        power=task.power_by_server,
    )


class TraceWriter:
    """Streaming trace writer; records appended one task at a time."""

    def __init__(self, path: str):
        self._handle = open(path, "w", encoding="utf-8", newline="\n")

    def write_record(self, record: TraceRecord) -> None:
        self._handle.write(_record_to_line(record))

    def write_task(self, task: Task) -> None:
        self.write_record(_task_to_record(task))

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None


def write_trace_records(records: Iterable[TraceRecord], path: str) -> None:
    writer = TraceWriter(path)
    try:
        for record in records:
            writer.write_record(record)
    finally:
        writer.close()


def write_trace(tasks: Iterable[Task], path: str) -> None:
    """Write one record per task, in the given (arrival) order."""
    write_trace_records((_task_to_record(task) for task in tasks), path)


def read_trace_records(path: str) -> list[TraceRecord]:
    """Decode a trace file into records, with structural validation only."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            try:
                deadline = doc.get("deadline")
                power = doc.get("power")
                record = TraceRecord(
                    id=int(doc["id"]),
                    type_name=str(doc["type"]),
                    arrival_time=float(doc["arrival_time"]),
                    service_times={k: float(v) for k, v in doc["service_times"].items()},
                    deadline=None if deadline is None else float(deadline),
                    power=None if power is None else {k: float(v) for k, v in power.items()},
                )
            except (KeyError, TypeError, ValueError, AttributeError) as exc:
                raise TraceError(f"{path}:{lineno}: bad record: {exc}") from None
            records.append(record)
    return records


def read_trace(path: str, cfg: SimConfig) -> list[Task]:
    """Load a trace as the realistic-mode workload for ``cfg``.

    Actual service times are the trace values verbatim.  Mean estimates
    (what policies see) come from the configured TaskTypeSpec where the
    task type and server type are declared, falling back to the trace
    values themselves; a record whose type is not configured at all must
    carry service times.  Per-record deadline and power override the
    configured per-type values.
    """
    records = read_trace_records(path)
    server_types = set(cfg.simulation.servers)
    specs = cfg.simulation.tasks
    tasks = []
    seen_ids = set()
    previous_arrival = None
    for i, record in enumerate(records):
        where = f"{path}: record {i} (id {record.id})"
        if record.id in seen_ids:
            raise TraceError(f"{where}: duplicate task id")
        seen_ids.add(record.id)
        if previous_arrival is not None and record.arrival_time < previous_arrival:
            raise TraceError(f"{where}: arrival times must be non-decreasing")
        previous_arrival = record.arrival_time
        unknown = set(record.service_times) - server_types
        if unknown:
            raise TraceError(f"{where}: unknown server type(s) {sorted(unknown)}")
        spec = specs.get(record.type_name)
        if spec is None and not record.service_times:
            raise TraceError(
                f"{where}: task type {record.type_name!r} is not configured "
                "and the record carries no service times"
            )
        if not record.service_times:
            # fall back to the configured per-type means as the actuals
            actual = dict(spec.mean_service_time)
        else:
            actual = dict(record.service_times)
        for server_type, value in actual.items():
            if value <= 0:
                raise TraceError(f"{where}: non-positive service time on {server_type!r}")
        if spec is not None:
            means = {
                server_type: spec.mean_service_time.get(server_type, value)
                for server_type, value in actual.items()
            }
        else:
            means = dict(actual)
        deadline = record.deadline if record.deadline is not None else (
            spec.deadline if spec is not None else None
        )
        power = record.power if record.power is not None else (
            spec.power if spec is not None else None
        )
        tasks.append(
            Task(
                id=record.id,
                type_name=record.type_name,
                arrival_time=record.arrival_time,
                service_time_by_server=actual,
                mean_service_time_by_server=means,
                target_servers=sorted(means, key=lambda s: (means[s], s)),
                power_by_server=power,
                deadline=deadline,
            )
        )
    return tasks
