"""Pluggable scheduling policies and the name-keyed policy registry.

A policy is asked, once per simulation event and then repeatedly until it
declines, to pick one (queued task, idle server) pair.  It returns the
queue index of the task and the chosen :class:`~schedsim.model.Server`,
or ``None`` to decline; the engine performs the actual assignment.  A
policy must never pick a busy server or a server type the task does not
support, and must not mutate queued tasks.

New policies subclass :class:`SchedulingPolicy`, get registered under a
name with :func:`register_policy`, and are then selectable through the
``sched_policy_module`` configuration key.  See ``docs/policy_guide.md``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

from .model import Server, Task, remaining_busy_time


class PolicyError(Exception):
    """Registry misuse: unknown policy name or duplicate registration."""


class SchedulingPolicy(ABC):
    """Interface every scheduling policy implements."""

    def init(self, servers: list[Server], config) -> None:
        """Called once before the run with the server list and SimConfig."""
        self.servers = servers
        self.config = config
        self.servers_by_type = {}
        for server in servers:
            self.servers_by_type.setdefault(server.type_name, []).append(server)
        self.assignments = 0
        self.declines = 0

    @abstractmethod
    def assign_task_to_server(self, now: float, queue: list[Task]):
        """Return (queue index, server) for one assignment, or None to decline."""

    def remove_task_from_server(self, now: float, server: Server) -> None:
        """Called when ``server`` finishes its task, before it is freed."""

    def output_final_stats(self) -> list[tuple[str, object]]:
        """Policy-specific labeled values appended to the final report."""
        return [("assignments", self.assignments), ("declines", self.declines)]


class FastestAvailablePolicy(SchedulingPolicy):
    """Queue head goes to its fastest server type, or nowhere.

    Only the head of the queue is considered, and only servers of its
    single best (lowest mean service time) type are scanned, in id order.
    If all of them are busy the policy declines and the head blocks the
    rest of the queue.
    """

    def assign_task_to_server(self, now, queue):
        if not queue:
            return None
        task = queue[0]
        for server in self.servers_by_type.get(task.target_servers[0], ()):
            if not server.busy:
                return 0, server
        return None


class SimplePolicyV1(FastestAvailablePolicy):
    """Version 1: blocking, best-option-only (same rule as fastest-available)."""


class SimplePolicyV2(SchedulingPolicy):
    """Version 2: queue head falls back to gradually less optimal types.

    Walks the head task's target servers in preference order (fastest mean
    first) and assigns to the first type with an idle unit; declines only
    when every supported type is fully busy.
    """

    def assign_task_to_server(self, now, queue):
        if not queue:
            return None
        task = queue[0]
        for server_type in task.target_servers:
            for server in self.servers_by_type.get(server_type, ()):
                if not server.busy:
                    return 0, server
        return None


def _min_finish_server(task: Task, servers: list[Server], now: float) -> Server:
    """Server minimizing estimated finish = remaining busy time + mean service.

    Remaining times come from mean estimates, never from actual sampled
    service times.  Ties break toward the lower mean service time, then an
    idle server over a busy one (an overrun task has estimate 0 but still
    holds its server), then the lower server id, then declaration order.
    """
    means = task.mean_service_time_by_server
    best = None
    best_key = None
    for server in servers:
        mean = means.get(server.type_name)
        if mean is None:
            continue
        key = (remaining_busy_time(server, now) + mean, mean, server.busy, server.id)
        if best is None or key < best_key:
            best = server
            best_key = key
    return best


class SimplePolicyV3(SchedulingPolicy):
    """Version 3: send the head to the smallest estimated-finish server.

    For every server supporting the head task, estimate when it would
    finish there (remaining busy time plus the task's mean service time)
    and pick the minimum.  If that server is currently busy the policy
    waits for it, blocking the queue.
    """

    def assign_task_to_server(self, now, queue):
        if not queue:
            return None
        server = _min_finish_server(queue[0], self.servers, now)
        if server is not None and not server.busy:
            return 0, server
        return None


class SimplePolicyV4(SchedulingPolicy):
    """Version 4: version 3's rule applied non-blocking over a task window.

    Applies the smallest-estimated-finish selection to each of the first
    ``scheduling_window`` queued tasks in order and starts the first task
    whose chosen server is idle; with a window of 1 it is decision-for-
    decision identical to version 3.
    """

    def init(self, servers, config):
        super().init(servers, config)
        self.window = config.simulation.scheduling_window

    def assign_task_to_server(self, now, queue):
        for index, task in enumerate(queue[: self.window]):
            server = _min_finish_server(task, self.servers, now)
            if server is not None and not server.busy:
                return index, server
        return None


class SimplePolicyV5(SchedulingPolicy):
    """Version 5: window scan that also projects preceding tasks' load.

    Walks the window keeping one projected-load accumulator per server,
    seeded with its remaining busy time.  Each task is tentatively placed
    on the server minimizing accumulator + mean service time; the task is
    actually started only if that server is idle and no preceding task was
    projected onto it, otherwise its mean service time is added to the
    accumulator and the scan moves on.
    """

    def init(self, servers, config):
        super().init(servers, config)
        self.window = config.simulation.scheduling_window

    def assign_task_to_server(self, now, queue):
        if not queue:
            return None
        load = {server: remaining_busy_time(server, now) for server in self.servers}
        for index, task in enumerate(queue[: self.window]):
            means = task.mean_service_time_by_server
            best = None
            best_key = None
            for server in self.servers:
                mean = means.get(server.type_name)
                if mean is None:
                    continue
                key = (load[server] + mean, mean, server.busy, server.id)
                if best is None or key < best_key:
                    best = server
                    best_key = key
            if best is None:
                continue
            if not best.busy and load[best] == 0.0:
                return index, best
            load[best] += means[best.type_name]
        return None


_REGISTRY: dict[str, type[SchedulingPolicy]] = {}


def register_policy(name: str, constructor: type[SchedulingPolicy]) -> None:
    """Make ``constructor`` selectable as ``sched_policy_module`` = ``name``."""
    if not name:
        raise PolicyError("policy name must be nonempty")
    if name in _REGISTRY:
        raise PolicyError(f"policy {name!r} is already registered")
    _REGISTRY[name] = constructor


def resolve_policy(name: str) -> SchedulingPolicy:
    """Instantiate a fresh policy for one run; unknown names fail at startup."""
    try:
        constructor = _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise PolicyError(f"unknown policy {name!r}; registered: {known}") from None
    return constructor()


def registered_policies() -> list[str]:
    return sorted(_REGISTRY)


_BUILTINS = {
    "fastest_available": FastestAvailablePolicy,
    "v1": SimplePolicyV1,
    "v2": SimplePolicyV2,
    "v3": SimplePolicyV3,
    "v4": SimplePolicyV4,
    "v5": SimplePolicyV5,
}
for _name, _ctor in _BUILTINS.items():
    register_policy(_name, _ctor)
for _version, _ctor in enumerate(
    (SimplePolicyV1, SimplePolicyV2, SimplePolicyV3, SimplePolicyV4, SimplePolicyV5), 1
):
    register_policy(f"policies.simple_policy_ver{_version}", _ctor)
