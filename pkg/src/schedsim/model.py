"""Core domain objects: tasks, servers, the simulation clock.

Time is unitless throughout; the caller gives meaning to the numbers.
A task carries two views of its execution cost: ``service_time_by_server``
holds the actual (sampled or trace-provided) times the engine uses, while
``mean_service_time_by_server`` holds the estimates policies are allowed
to see.  Keeping the two apart is what lets estimate-driven policies
degrade under high service-time dispersion.
"""

from __future__ import annotations

from dataclasses import dataclass


class PolicyFault(RuntimeError):
    """A scheduling policy violated its contract; the run must abort."""


@dataclass(slots=True, eq=False)
class Task:
    """One simulated unit of work.

    ``target_servers`` lists supported server types fastest-mean first.
    ``schedule_time``, ``completion_time`` and ``assigned_server`` start
    unset and are filled in as the task moves through the system.
    """

    id: int
    type_name: str
    arrival_time: float
    service_time_by_server: dict[str, float]
    mean_service_time_by_server: dict[str, float]
    target_servers: list[str]
    power_by_server: dict[str, float] | None = None
    deadline: float | None = None
    schedule_time: float | None = None
    completion_time: float | None = None
    assigned_server: tuple[str, int] | None = None


@dataclass(slots=True, eq=False)
class Server:
    """A single-task processing element; ``id`` is unique within its type."""

    type_name: str
    id: int
    busy: bool = False
    current_task: Task | None = None
    assign_time: float | None = None
    current_mean_estimate: float | None = None
    busy_time_accum: float = 0.0
    tasks_served: int = 0

    def clear(self) -> None:
        self.busy = False
        self.current_task = None
        self.assign_time = None
        self.current_mean_estimate = None


@dataclass(slots=True)
class SimClock:
    """Monotonically non-decreasing simulation time."""

    now: float = 0.0

    def advance(self, to: float) -> None:
        if to < self.now:
            raise ValueError(f"clock cannot move backwards: {self.now} -> {to}")
        self.now = to


def remaining_busy_time(server: Server, now: float) -> float:
    """Estimated time until ``server`` frees up, based on the mean estimate.

    Idle servers return 0.  Busy servers return
    ``max(0, assign_time + mean_estimate - now)``; the actual sampled
    service time is deliberately not consulted, so a task that overruns
    its mean clamps to 0 while it keeps running.
    """
    if not server.busy:
        return 0.0
    remaining = server.assign_time + server.current_mean_estimate - now
    return remaining if remaining > 0.0 else 0.0


def assign_task(server: Server, task: Task, now: float) -> float:
    """Place ``task`` on ``server`` at time ``now``; return the completion time.

    Raises :class:`PolicyFault` if the server is busy or does not support
    the task, since either means the scheduling policy broke its contract.
    """
    if server.busy:
        raise PolicyFault(
            f"policy assigned task {task.id} to busy server"
            f" {server.type_name}[{server.id}]"
        )
    if server.type_name not in task.target_servers:
        raise PolicyFault(
            f"policy assigned task {task.id} ({task.type_name}) to unsupported"
            f" server type {server.type_name}"
        )
    server.busy = True
    server.current_task = task
    server.assign_time = now
    server.current_mean_estimate = task.mean_service_time_by_server[server.type_name]
    task.schedule_time = now
    task.assigned_server = (server.type_name, server.id)
    return now + task.service_time_by_server[server.type_name]
