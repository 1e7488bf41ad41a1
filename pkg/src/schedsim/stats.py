"""Per-task statistics collection and end-of-run reports.

The engine feeds one observation per completed task into a streaming
:class:`StatsCollector`; nothing per-task is retained, so memory stays
flat over million-task runs.  :func:`finalize` is the batch equivalent
for callers that already hold :class:`TaskRecord` lists.

Report semantics worth knowing before reading the code:

* mean response is computed as mean waiting + mean computation, so the
  response/waiting/computation means are linearly consistent by
  construction, not merely up to summation rounding;
* the queue-size histogram is time-weighted: fraction(n) is the share of
  simulated time the queue held exactly n tasks, not a per-event count;
* stdevs are population stdevs over completed tasks;
* utilization of a server is busy_time_accum / sim_time (0 when no time
  has elapsed).

``write_report`` emits either one JSON document or four CSV tables
(summary, per-type, per-server, histogram); both layouts are documented
in docs/report_format.md.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, fields
from typing import Iterable, Optional

from .model import Server

__all__ = [
    "TaskRecord",
    "GroupStats",
    "ServerTypeStats",
    "ServerStats",
    "StatsReport",
    "StatsCollector",
    "finalize",
    "write_report",
]


@dataclass(slots=True, frozen=True)
class TaskRecord:
    """One completed task, as the statistics layer sees it."""

    id: int
    type_name: str
    arrival_time: float
    schedule_time: float
    completion_time: float
    server_type: str
    server_id: int
    waiting: float
    computation: float
    response: float
    deadline_met: Optional[bool] = None
    energy: Optional[float] = None


@dataclass(frozen=True)
class GroupStats:
    """Waiting/computation/response moments for one group of tasks."""

    count: int
    mean_waiting: Optional[float]
    stdev_waiting: Optional[float]
    mean_computation: Optional[float]
    stdev_computation: Optional[float]
    mean_response: Optional[float]
    stdev_response: Optional[float]


@dataclass(frozen=True)
class ServerTypeStats:
    """Aggregates for all servers of one type."""

    server_count: int
    tasks_served: int
    busy_time: float
    utilization: float
    timing: GroupStats


@dataclass(frozen=True)
class ServerStats:
    """Aggregates for one individual server."""

    type_name: str
    id: int
    tasks_served: int
    busy_time: float
    utilization: float


_EMPTY_GROUP = GroupStats(0, None, None, None, None, None, None)


@dataclass
class StatsReport:
    """End-of-run aggregates; value-comparable except for the config echo."""

    tasks_completed: int
    sim_time: float
    overall: GroupStats
    per_task_type: dict[str, GroupStats]
    per_server_type: dict[str, ServerTypeStats]
    per_server: list[ServerStats]
    queue_histogram: dict[int, float]
    deadlines_observed: int
    deadlines_missed: int
    total_energy: Optional[float]
    policy_stats: list[tuple[str, object]]
    config: Optional[dict] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        doc = {
            "tasks_completed": self.tasks_completed,
            "sim_time": self.sim_time,
            "overall": _group_to_dict(self.overall),
            "per_task_type": {
                name: _group_to_dict(group) for name, group in sorted(self.per_task_type.items())
            },
            "per_server_type": {
                name: {
                    "server_count": sts.server_count,
                    "tasks_served": sts.tasks_served,
                    "busy_time": sts.busy_time,
                    "utilization": sts.utilization,
                    "timing": _group_to_dict(sts.timing),
                }
                for name, sts in sorted(self.per_server_type.items())
            },
            "per_server": [
                {
                    "type_name": s.type_name,
                    "id": s.id,
                    "tasks_served": s.tasks_served,
                    "busy_time": s.busy_time,
                    "utilization": s.utilization,
                }
                for s in self.per_server
            ],
            "queue_histogram": {str(n): f for n, f in sorted(self.queue_histogram.items())},
            "deadlines_observed": self.deadlines_observed,
            "deadlines_missed": self.deadlines_missed,
            "total_energy": self.total_energy,
            "policy_stats": [[label, value] for label, value in self.policy_stats],
        }
        if self.config is not None:
            doc["config"] = self.config
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "StatsReport":
        return cls(
            tasks_completed=doc["tasks_completed"],
            sim_time=doc["sim_time"],
            overall=_group_from_dict(doc["overall"]),
            per_task_type={
                name: _group_from_dict(g) for name, g in doc["per_task_type"].items()
            },
            per_server_type={
                name: ServerTypeStats(
                    server_count=d["server_count"],
                    tasks_served=d["tasks_served"],
                    busy_time=d["busy_time"],
                    utilization=d["utilization"],
                    timing=_group_from_dict(d["timing"]),
                )
                for name, d in doc["per_server_type"].items()
            },
            per_server=[
                ServerStats(
                    type_name=d["type_name"],
                    id=d["id"],
                    tasks_served=d["tasks_served"],
                    busy_time=d["busy_time"],
                    utilization=d["utilization"],
                )
                for d in doc["per_server"]
            ],
            queue_histogram={int(n): f for n, f in doc["queue_histogram"].items()},
            deadlines_observed=doc["deadlines_observed"],
            deadlines_missed=doc["deadlines_missed"],
            total_energy=doc["total_energy"],
            policy_stats=[(label, value) for label, value in doc["policy_stats"]],
            config=doc.get("config"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "StatsReport":
        return cls.from_dict(json.loads(text))


def _group_to_dict(group: GroupStats) -> dict:
    return {f.name: getattr(group, f.name) for f in fields(GroupStats)}


def _group_from_dict(doc: dict) -> GroupStats:
    return GroupStats(**{f.name: doc[f.name] for f in fields(GroupStats)})


class _Acc:
    """Streaming count/sum/sum-of-squares for one (task type, server type) cell."""

    __slots__ = ("count", "sum_w", "sumsq_w", "sum_c", "sumsq_c", "sum_r", "sumsq_r")

    def __init__(self):
        self.count = 0
        self.sum_w = 0.0
        self.sumsq_w = 0.0
        self.sum_c = 0.0
        self.sumsq_c = 0.0
        self.sum_r = 0.0
        self.sumsq_r = 0.0

    def add(self, waiting: float, computation: float, response: float) -> None:
        self.count += 1
        self.sum_w += waiting
        self.sumsq_w += waiting * waiting
        self.sum_c += computation
        self.sumsq_c += computation * computation
        self.sum_r += response
        self.sumsq_r += response * response

    def merge(self, other: "_Acc") -> None:
        self.count += other.count
        self.sum_w += other.sum_w
        self.sumsq_w += other.sumsq_w
        self.sum_c += other.sum_c
        self.sumsq_c += other.sumsq_c
        self.sum_r += other.sum_r
        self.sumsq_r += other.sumsq_r

    def group_stats(self) -> GroupStats:
        n = self.count
        if n == 0:
            return _EMPTY_GROUP
        mean_w = self.sum_w / n
        mean_c = self.sum_c / n
        mean_r = mean_w + mean_c
        return GroupStats(
            count=n,
            mean_waiting=mean_w,
            stdev_waiting=_stdev(self.sumsq_w, mean_w, n),
            mean_computation=mean_c,
            stdev_computation=_stdev(self.sumsq_c, mean_c, n),
            mean_response=mean_r,
            stdev_response=_stdev(self.sumsq_r, self.sum_r / n, n),
        )


def _stdev(sumsq: float, mean: float, n: int) -> float:
    return math.sqrt(max(sumsq / n - mean * mean, 0.0))


class StatsCollector:
    """Streaming per-(task type, server type) accumulator for one run."""

    def __init__(self):
        self._cells: dict[tuple[str, str], _Acc] = {}
        self.tasks_completed = 0
        self.deadlines_observed = 0
        self.deadlines_missed = 0
        self._energy_sum = 0.0
        self._energy_seen = False

    def add(
        self,
        type_name: str,
        server_type: str,
        waiting: float,
        computation: float,
        deadline_met: Optional[bool] = None,
        energy: Optional[float] = None,
    ) -> None:
        key = (type_name, server_type)
        cell = self._cells.get(key)
        if cell is None:
            cell = self._cells[key] = _Acc()
        cell.add(waiting, computation, waiting + computation)
        self.tasks_completed += 1
        if deadline_met is not None:
            self.deadlines_observed += 1
            if not deadline_met:
                self.deadlines_missed += 1
        if energy is not None:
            self._energy_seen = True
            self._energy_sum += energy

    def add_record(self, record: TaskRecord) -> None:
        self.add(
            record.type_name,
            record.server_type,
            record.waiting,
            record.computation,
            record.deadline_met,
            record.energy,
        )

    def finalize(
        self,
        occupancy_accum: dict[int, float],
        servers: Iterable[Server],
        sim_time: float,
        policy_stats: Optional[list[tuple[str, object]]] = None,
    ) -> StatsReport:
        overall = _Acc()
        by_task: dict[str, _Acc] = {}
        by_server: dict[str, _Acc] = {}
        for (task_type, server_type), cell in sorted(self._cells.items()):
            overall.merge(cell)
            by_task.setdefault(task_type, _Acc()).merge(cell)
            by_server.setdefault(server_type, _Acc()).merge(cell)

        per_server = []
        type_busy: dict[str, float] = {}
        type_count: dict[str, int] = {}
        type_served: dict[str, int] = {}
        for server in servers:
            util = server.busy_time_accum / sim_time if sim_time > 0 else 0.0
            per_server.append(
                ServerStats(
                    type_name=server.type_name,
                    id=server.id,
                    tasks_served=server.tasks_served,
                    busy_time=server.busy_time_accum,
                    utilization=util,
                )
            )
            type_busy[server.type_name] = type_busy.get(server.type_name, 0.0) + server.busy_time_accum
            type_count[server.type_name] = type_count.get(server.type_name, 0) + 1
            type_served[server.type_name] = type_served.get(server.type_name, 0) + server.tasks_served

        per_server_type = {}
        for type_name in sorted(type_count):
            count = type_count[type_name]
            busy = type_busy[type_name]
            per_server_type[type_name] = ServerTypeStats(
                server_count=count,
                tasks_served=type_served[type_name],
                busy_time=busy,
                utilization=busy / (count * sim_time) if sim_time > 0 else 0.0,
                timing=by_server.get(type_name, _Acc()).group_stats(),
            )

        histogram = {}
        if sim_time > 0:
            histogram = {n: t / sim_time for n, t in sorted(occupancy_accum.items()) if t > 0}

        return StatsReport(
            tasks_completed=self.tasks_completed,
            sim_time=sim_time,
            overall=overall.group_stats(),
            per_task_type={name: acc.group_stats() for name, acc in sorted(by_task.items())},
            per_server_type=per_server_type,
            per_server=per_server,
            queue_histogram=histogram,
            deadlines_observed=self.deadlines_observed,
            deadlines_missed=self.deadlines_missed,
            total_energy=self._energy_sum if self._energy_seen else None,
            policy_stats=list(policy_stats or []),
        )


def finalize(
    records: Iterable[TaskRecord],
    occupancy_accum: dict[int, float],
    servers: Iterable[Server],
    sim_time: float,
    policy_stats: Optional[list[tuple[str, object]]] = None,
) -> StatsReport:
    """Batch entry point: aggregate ready-made records into a StatsReport."""
    collector = StatsCollector()
    for record in records:
        collector.add_record(record)
    return collector.finalize(occupancy_accum, servers, sim_time, policy_stats)


_SUMMARY_COLUMNS = (
    "tasks_completed",
    "sim_time",
    "mean_waiting",
    "stdev_waiting",
    "mean_computation",
    "stdev_computation",
    "mean_response",
    "stdev_response",
    "deadlines_observed",
    "deadlines_missed",
    "total_energy",
)

_GROUP_COLUMNS = (
    "count",
    "mean_waiting",
    "stdev_waiting",
    "mean_computation",
    "stdev_computation",
    "mean_response",
    "stdev_response",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_report(report: StatsReport, format: str, path: str) -> None:
    """Write ``report`` to disk.

    ``format="json"`` writes one document at ``path``.  ``format="csv"``
    treats ``path`` as a filename prefix and writes ``{path}summary.csv``,
    ``{path}per_type.csv``, ``{path}per_server.csv``, ``{path}histogram.csv``.
    """
    if format == "json":
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(report.to_json())
        return
    if format != "csv":
        raise ValueError(f"unknown report format {format!r}")

    o = report.overall
    _write_csv(
        path + "summary.csv",
        _SUMMARY_COLUMNS,
        [
            [
                report.tasks_completed,
                report.sim_time,
                o.mean_waiting,
                o.stdev_waiting,
                o.mean_computation,
                o.stdev_computation,
                o.mean_response,
                o.stdev_response,
                report.deadlines_observed,
                report.deadlines_missed,
                report.total_energy,
            ]
        ],
    )
    _write_csv(
        path + "per_type.csv",
        ("task_type",) + _GROUP_COLUMNS,
        [
            [name] + [getattr(group, col) for col in _GROUP_COLUMNS]
            for name, group in sorted(report.per_task_type.items())
        ],
    )
    _write_csv(
        path + "per_server.csv",
        ("server_type", "server_id", "tasks_served", "busy_time", "utilization"),
        [
            [s.type_name, s.id, s.tasks_served, s.busy_time, s.utilization]
            for s in report.per_server
        ],
    )
    _write_csv(
        path + "histogram.csv",
        ("queue_length", "fraction_of_time"),
        [[n, f] for n, f in sorted(report.queue_histogram.items())],
    )
