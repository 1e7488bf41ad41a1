"""Event-driven simulation core.

Continuous-time, single-threaded, deterministic.  Pending events live in
a heap ordered by (time, kind, seq) where completions (kind 0) precede
arrivals (kind 1) at equal timestamps, so a freed server is visible to
the scheduler before the simultaneous arrival joins the queue; seq is
the global issue order and makes the ordering total.

Per event: the queue-occupancy accumulator is charged for the elapsed
interval, the clock advances, the event is applied (arrival appended to
the FIFO queue tail, or server freed and the completed task recorded),
and then the policy is called repeatedly until it declines to assign.

Task creation stops when the workload source is exhausted (at
max_tasks_simulated in probabilistic mode); everything queued or running
is then drained to completion, so per-task aggregates cover complete
lifetimes only.
"""

from __future__ import annotations

from collections import defaultdict
from heapq import heappush, heappop
from typing import Iterable, Iterator, Optional, Union

from .config import SimConfig
from .model import PolicyFault, Server, Task, assign_task
from .policies import SchedulingPolicy, resolve_policy
from .sampling import Rng, draw_exponential, draw_service_time, draw_task_type
from .stats import StatsCollector, StatsReport, TaskRecord

_COMPLETION = 0
_ARRIVAL = 1


class QueueOverflowError(RuntimeError):
    """Task queue grew past simulation.max_queue_size."""


def build_servers(cfg: SimConfig) -> list[Server]:
    """Instantiate servers in declaration order, ids counted within type."""
    servers = []
    for type_name, count in cfg.simulation.servers.items():
        for i in range(count):
            servers.append(Server(type_name=type_name, id=i))
    return servers


def generate_arrivals(cfg: SimConfig, rng: Rng) -> Iterator[Task]:
    """Probabilistic workload: max_tasks_simulated tasks, lazily.

    Per task the draw order is fixed: arrival gap (exponential with mean
    mean_arrival_time x arrival_time_scale), then task type, then one
    service time per supported server type in sorted server-type-name
    order.  Mean estimates are shared references to the TaskTypeSpec maps;
    only actual service times are per-task.
    """
    mean_gap = cfg.effective_mean_interarrival
    total = cfg.simulation.max_tasks_simulated
    now = 0.0
    for task_id in range(total):
        now += draw_exponential(rng, mean_gap)
        spec = draw_task_type(rng, cfg)
        actual = {
            server_type: draw_service_time(rng, spec, server_type)
            for server_type in sorted(spec.mean_service_time)
        }
        yield Task(
            id=task_id,
            type_name=spec.name,
            arrival_time=now,
            service_time_by_server=actual,
            mean_service_time_by_server=spec.mean_service_time,
            target_servers=spec.target_servers,
            power_by_server=spec.power,
            deadline=spec.deadline,
        )


def run(
    cfg: SimConfig,
    policy: SchedulingPolicy,
    workload: Iterable[Task],
    record_sink: Optional[list[TaskRecord]] = None,
) -> StatsReport:
    """Simulate one workload to completion and return the report.

    ``record_sink``, when given, receives one TaskRecord per completed
    task in completion order; omit it on large runs (statistics are
    streamed either way).
    """
    servers = build_servers(cfg)
    policy.init(servers, cfg)

    max_queue_size = cfg.simulation.max_queue_size
    queue: list[Task] = []
    occupancy: dict[int, float] = defaultdict(float)
    heap: list = []
    seq = 0
    now = 0.0
    tasks_created = 0
    collector = StatsCollector()
    stats_add = collector.add
    assign = policy.assign_task_to_server

    tasks = iter(workload)
    first = next(tasks, None)
    if first is not None:
        heappush(heap, (first.arrival_time, _ARRIVAL, seq, first))
        seq += 1

    while heap:
        time, kind, _, payload = heappop(heap)
        if time != now:
            occupancy[len(queue)] += time - now
            now = time

        if kind == _COMPLETION:
            server: Server = payload
            task = server.current_task
            service = task.service_time_by_server[server.type_name]
            server.busy_time_accum += service
            server.tasks_served += 1
            policy.remove_task_from_server(now, server)
            server.clear()
            task.completion_time = now
            waiting = task.schedule_time - task.arrival_time
            deadline = task.deadline
            deadline_met = None if deadline is None else (waiting + service) <= deadline
            power = task.power_by_server
            energy = None
            if power is not None:
                watts = power.get(server.type_name)
                if watts is not None:
                    energy = watts * service
            stats_add(task.type_name, server.type_name, waiting, service, deadline_met, energy)
            if record_sink is not None:
                record_sink.append(
                    TaskRecord(
                        id=task.id,
                        type_name=task.type_name,
                        arrival_time=task.arrival_time,
                        schedule_time=task.schedule_time,
                        completion_time=now,
                        server_type=server.type_name,
                        server_id=server.id,
                        waiting=waiting,
                        computation=service,
                        response=waiting + service,
                        deadline_met=deadline_met,
                        energy=energy,
                    )
                )
        else:
            queue.append(payload)
            tasks_created += 1
            if len(queue) > max_queue_size:
                raise QueueOverflowError(
                    f"queue length {len(queue)} exceeds max_queue_size "
                    f"{max_queue_size} at time {now}"
                )
            nxt = next(tasks, None)
            if nxt is not None:
                heappush(heap, (nxt.arrival_time, _ARRIVAL, seq, nxt))
                seq += 1

        while queue:
            decision = assign(now, queue)
            if decision is None:
                policy.declines += 1
                break
            policy.assignments += 1
            index, server = decision
            if not 0 <= index < len(queue):
                raise PolicyFault(
                    f"policy returned queue index {index} for a queue of length {len(queue)}"
                )
            task = queue[index]
            completion_time = assign_task(server, task, now)
            del queue[index]
            heappush(heap, (completion_time, _COMPLETION, seq, server))
            seq += 1

    return collector.finalize(occupancy, servers, now, policy.output_final_stats())


def run_simulation(
    cfg: SimConfig,
    policy: Union[SchedulingPolicy, str, None] = None,
    record_sink: Optional[list[TaskRecord]] = None,
) -> StatsReport:
    """High-level driver: build workload and policy from ``cfg`` and run.

    Probabilistic mode draws the workload from the configured seed;
    realistic mode replays general.input_trace_file.  When
    general.output_trace_file is set, every created task is mirrored to
    that trace: before simulation starts if pre_gen_arrivals, streamed
    during the run otherwise.  Relative trace paths resolve against
    general.working_dir.  The effective configuration is echoed into the
    report (``config`` key) for provenance.
    """
    import json
    import os

    from .config import serialize_config
    from .traceio import TraceWriter, read_trace

    if policy is None:
        policy = cfg.simulation.sched_policy_module
    if isinstance(policy, str):
        policy = resolve_policy(policy)

    def _resolve(path: str) -> str:
        if os.path.isabs(path):
            return path
        return os.path.join(cfg.general.working_dir, path)

    if cfg.realistic_mode:
        workload: Iterable[Task] = read_trace(_resolve(cfg.general.input_trace_file), cfg)
    else:
        rng = Rng(cfg.general.random_seed)
        workload = generate_arrivals(cfg, rng)
        if cfg.general.pre_gen_arrivals:
            workload = list(workload)

    writer = None
    out_path = cfg.general.output_trace_file
    if out_path:
        writer = TraceWriter(_resolve(out_path))
        if isinstance(workload, list):
            # pre-generated (or replayed) workload: full trace on disk
            # before the first event is processed
            for task in workload:
                writer.write_task(task)
            writer.close()
            writer = None
        else:
            workload = _mirror_to_trace(workload, writer)

    try:
        report = run(cfg, policy, workload, record_sink)
    finally:
        if writer is not None:
            writer.close()
    report.config = json.loads(serialize_config(cfg))
    return report


def _mirror_to_trace(tasks: Iterable[Task], writer) -> Iterator[Task]:
    for task in tasks:
        writer.write_task(task)
        yield task
