"""Discrete-event simulator for task-scheduling policies on heterogeneous servers.

Typical use:

    >>> import schedsim
    >>> cfg = schedsim.load_config("configs/reference_soc.json")
    >>> report = schedsim.run_simulation(cfg)
    >>> report.overall.mean_response  # doctest: +SKIP

See README.md for the configuration schema, the CLI, and how to write
and register a custom scheduling policy.
"""

from .analytic import ErrorSample, MMKParams, erlang_c, mmk_mean_wait, relative_error
from .config import (
    ConfigError,
    GeneralConfig,
    SimConfig,
    SimulationConfig,
    TaskTypeSpec,
    load_config,
    parse_config,
    serialize_config,
    validate_config,
    with_stdev_factor,
)
from .engine import QueueOverflowError, build_servers, generate_arrivals, run, run_simulation
from .model import PolicyFault, Server, SimClock, Task, assign_task, remaining_busy_time
from .policies import (
    FastestAvailablePolicy,
    PolicyError,
    SchedulingPolicy,
    register_policy,
    registered_policies,
    resolve_policy,
)
from .sampling import Rng, draw_exponential, draw_service_time, draw_task_type
from .stats import (
    GroupStats,
    ServerStats,
    ServerTypeStats,
    StatsCollector,
    StatsReport,
    TaskRecord,
    finalize,
    write_report,
)
from .traceio import (
    TraceError,
    TraceRecord,
    TraceWriter,
    read_trace,
    read_trace_records,
    write_trace,
    write_trace_records,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # config
    "ConfigError",
    "GeneralConfig",
    "SimConfig",
    "SimulationConfig",
    "TaskTypeSpec",
    "load_config",
    "parse_config",
    "serialize_config",
    "validate_config",
    "with_stdev_factor",
    # model
    "Task",
    "Server",
    "SimClock",
    "PolicyFault",
    "assign_task",
    "remaining_busy_time",
    # sampling
    "Rng",
    "draw_exponential",
    "draw_service_time",
    "draw_task_type",
    # engine
    "run",
    "run_simulation",
    "generate_arrivals",
    "build_servers",
    "QueueOverflowError",
    # policies
    "SchedulingPolicy",
    "FastestAvailablePolicy",
    "PolicyError",
    "register_policy",
    "resolve_policy",
    "registered_policies",
    # stats
    "StatsReport",
    "StatsCollector",
    "TaskRecord",
    "GroupStats",
    "ServerStats",
    "ServerTypeStats",
    "finalize",
    "write_report",
    # analytic
    "MMKParams",
    "ErrorSample",
    "erlang_c",
    "mmk_mean_wait",
    "relative_error",
    # traceio
    "TraceRecord",
    "TraceError",
    "TraceWriter",
    "read_trace",
    "read_trace_records",
    "write_trace",
    "write_trace_records",
]
