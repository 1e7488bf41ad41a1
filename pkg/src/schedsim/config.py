"""JSON run-configuration: parsing, validation, default filling, serialization.

A configuration file has two blocks.  The ``general`` block holds run
plumbing (seed, logging, trace file paths); the ``simulation`` block holds
the workload and platform definition (policy name, arrival process, server
counts, task types).  ``parse_config`` maps the file one-to-one onto
:class:`SimConfig`, fills documented defaults for missing optional keys,
and warns about unknown keys instead of failing, so extended files stay
loadable.  See ``docs/config_schema.md`` for the full key reference.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace

log = logging.getLogger(__name__)

LOGGING_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
SERVICE_DISTRIBUTIONS = ("normal", "exponential")

GENERAL_KEYS = (
    "logging_level",
    "random_seed",
    "working_dir",
    "basename",
    "pre_gen_arrivals",
    "input_trace_file",
    "output_trace_file",
)
SIMULATION_KEYS = (
    "sched_policy_module",
    "max_tasks_simulated",
    "mean_arrival_time",
    "arrival_time_scale",
    "power_mgmt_enabled",
    "max_queue_size",
    "scheduling_window",
    "servers",
    "tasks",
)
SERVER_KEYS = ("count",)
TASK_KEYS = (
    "mean_service_time",
    "stdev_service_time",
    "power",
    "deadline",
    "service_distribution",
    "weight",
)


class ConfigError(Exception):
    """Configuration text that cannot be parsed or violates an invariant."""


@dataclass
class GeneralConfig:
    logging_level: str = "INFO"
    random_seed: int = 0
    working_dir: str = "."
    basename: str = ""
    pre_gen_arrivals: bool = False
    input_trace_file: str = ""
    output_trace_file: str = ""


@dataclass
class TaskTypeSpec:
    """One task type: per-server-type service statistics and optional extras.

    ``mean_service_time`` and ``stdev_service_time`` must cover the same
    server types; server types absent from the maps are unsupported for
    this task type.  The preference order of target servers is ascending
    mean service time (fastest first).
    """

    name: str
    mean_service_time: dict[str, float]
    stdev_service_time: dict[str, float]
    power: dict[str, float] | None = None
    deadline: float | None = None
    service_distribution: str = "normal"
    weight: float = 1.0
    # Derived, not part of the file schema.
    target_servers: list[str] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        self.target_servers = sorted(
            self.mean_service_time, key=lambda s: (self.mean_service_time[s], s)
        )


@dataclass
class SimulationConfig:
    sched_policy_module: str
    servers: dict[str, int]
    tasks: dict[str, TaskTypeSpec]
    max_tasks_simulated: int | None = None
    mean_arrival_time: float | None = None
    arrival_time_scale: float = 1.0
    power_mgmt_enabled: bool = False   # parsed for compatibility; behaviorally inert
    max_queue_size: int = 1_000_000
    scheduling_window: int = 10


@dataclass
class SimConfig:
    general: GeneralConfig
    simulation: SimulationConfig

    @property
    def realistic_mode(self) -> bool:
        """True when tasks are replayed from an input trace file."""
        return bool(self.general.input_trace_file)

    @property
    def effective_mean_interarrival(self) -> float:
        """Mean inter-arrival time after scaling (scale 0.5 doubles the rate)."""
        return self.simulation.mean_arrival_time * self.simulation.arrival_time_scale


def _warn_unknown(block: dict, known, where: str) -> None:
    for key in block:
        if key not in known:
            log.warning("ignoring unknown configuration key %s.%s", where, key)


def _float_map(raw, path: str) -> dict[str, float]:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must be an object mapping server types to numbers")
    out = {}
    for server_type, value in raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{path}.{server_type} must be numeric")
        out[server_type] = float(value)
    return out


def _parse_task(name: str, raw: dict) -> TaskTypeSpec:
    path = f"simulation.tasks.{name}"
    _warn_unknown(raw, TASK_KEYS, path)
    if "mean_service_time" not in raw:
        raise ConfigError(f"{path}.mean_service_time is required")
    mean = _float_map(raw["mean_service_time"], f"{path}.mean_service_time")
    stdev = _float_map(raw.get("stdev_service_time", {}), f"{path}.stdev_service_time")
    power = None
    if "power" in raw:
        power = _float_map(raw["power"], f"{path}.power")
    deadline = raw.get("deadline")
    if deadline is not None:
        deadline = float(deadline)
    return TaskTypeSpec(
        name=name,
        mean_service_time=mean,
        stdev_service_time=stdev,
        power=power,
        deadline=deadline,
        service_distribution=raw.get("service_distribution", "normal"),
        weight=float(raw.get("weight", 1.0)),
    )


def parse_config(json_text: str, *, check: bool = True) -> SimConfig:
    """Parse configuration JSON text into a :class:`SimConfig`.

    Missing optional keys take their documented defaults; unknown keys are
    logged and ignored.  With ``check=True`` (the default) the parsed
    configuration is also run through :func:`validate_config` and any
    diagnostic raises :class:`ConfigError`.
    """
    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object")
    _warn_unknown(raw, ("general", "simulation"), "<root>")

    raw_general = raw.get("general", {})
    if not isinstance(raw_general, dict):
        raise ConfigError("general must be an object")
    _warn_unknown(raw_general, GENERAL_KEYS, "general")
    general = GeneralConfig(
        logging_level=raw_general.get("logging_level", "INFO"),
        random_seed=raw_general.get("random_seed", 0),
        working_dir=raw_general.get("working_dir", "."),
        basename=raw_general.get("basename", ""),
        pre_gen_arrivals=bool(raw_general.get("pre_gen_arrivals", False)),
        input_trace_file=raw_general.get("input_trace_file", ""),
        output_trace_file=raw_general.get("output_trace_file", ""),
    )

    if "simulation" not in raw or not isinstance(raw["simulation"], dict):
        raise ConfigError("simulation block is required")
    raw_sim = raw["simulation"]
    _warn_unknown(raw_sim, SIMULATION_KEYS, "simulation")

    if "sched_policy_module" not in raw_sim:
        raise ConfigError("simulation.sched_policy_module is required")
    if "servers" not in raw_sim or not isinstance(raw_sim["servers"], dict):
        raise ConfigError("simulation.servers is required")

    servers = {}
    for server_type, raw_server in raw_sim["servers"].items():
        if not isinstance(raw_server, dict) or "count" not in raw_server:
            raise ConfigError(f"simulation.servers.{server_type}.count is required")
        _warn_unknown(raw_server, SERVER_KEYS, f"simulation.servers.{server_type}")
        count = raw_server["count"]
        if not isinstance(count, int) or isinstance(count, bool):
            raise ConfigError(f"simulation.servers.{server_type}.count must be an integer")
        servers[server_type] = count

    probabilistic = not general.input_trace_file
    raw_tasks = raw_sim.get("tasks")
    if raw_tasks is None:
        if probabilistic:
            raise ConfigError("simulation.tasks is required in probabilistic mode")
        raw_tasks = {}
    if not isinstance(raw_tasks, dict):
        raise ConfigError("simulation.tasks must be an object")
    tasks = {name: _parse_task(name, spec) for name, spec in raw_tasks.items()}

    mean_arrival = raw_sim.get("mean_arrival_time")
    if probabilistic and mean_arrival is None:
        raise ConfigError("simulation.mean_arrival_time is required in probabilistic mode")
    max_tasks = raw_sim.get("max_tasks_simulated")
    if probabilistic and max_tasks is None:
        raise ConfigError("simulation.max_tasks_simulated is required in probabilistic mode")

    simulation = SimulationConfig(
        sched_policy_module=raw_sim["sched_policy_module"],
        servers=servers,
        tasks=tasks,
        max_tasks_simulated=max_tasks,
        mean_arrival_time=None if mean_arrival is None else float(mean_arrival),
        arrival_time_scale=float(raw_sim.get("arrival_time_scale", 1.0)),
        power_mgmt_enabled=bool(raw_sim.get("power_mgmt_enabled", False)),
        max_queue_size=raw_sim.get("max_queue_size", 1_000_000),
        scheduling_window=raw_sim.get("scheduling_window", 10),
    )
    cfg = SimConfig(general=general, simulation=simulation)

    if check:
        diagnostics = validate_config(cfg)
        if diagnostics:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(diagnostics))
    return cfg


def load_config(path, *, check: bool = True) -> SimConfig:
    """Read and parse a configuration file (UTF-8 JSON)."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config(text, check=check)


def validate_config(cfg: SimConfig) -> list[str]:
    """Check every configuration invariant; return one diagnostic per violation.

    An empty list means the configuration is valid.  Each diagnostic names
    the offending key path, e.g. ``simulation.tasks.fft.mean_service_time.dsp``.
    """
    diags = []
    gen, sim = cfg.general, cfg.simulation

    if gen.logging_level not in LOGGING_LEVELS:
        diags.append(f"general.logging_level: {gen.logging_level!r} not one of {LOGGING_LEVELS}")
    if not isinstance(gen.random_seed, int) or isinstance(gen.random_seed, bool) or gen.random_seed < 0:
        diags.append("general.random_seed: must be a non-negative integer")

    if not sim.sched_policy_module or not isinstance(sim.sched_policy_module, str):
        diags.append("simulation.sched_policy_module: must be a nonempty string")

    probabilistic = not cfg.realistic_mode
    if probabilistic:
        if sim.max_tasks_simulated is None or sim.max_tasks_simulated < 1:
            diags.append("simulation.max_tasks_simulated: must be a positive integer")
        if sim.mean_arrival_time is None or sim.mean_arrival_time <= 0:
            diags.append("simulation.mean_arrival_time: must be positive")
        if not sim.tasks:
            diags.append("simulation.tasks: at least one task type is required")
    if sim.arrival_time_scale <= 0:
        diags.append("simulation.arrival_time_scale: must be positive")
    if sim.max_queue_size < 1:
        diags.append("simulation.max_queue_size: must be a positive integer")
    if sim.scheduling_window < 1:
        diags.append("simulation.scheduling_window: must be a positive integer")

    if not sim.servers:
        diags.append("simulation.servers: at least one server type is required")
    for server_type, count in sim.servers.items():
        if count < 1:
            diags.append(f"simulation.servers.{server_type}.count: must be >= 1")

    for name, spec in sim.tasks.items():
        path = f"simulation.tasks.{name}"
        if spec.name != name:
            diags.append(f"{path}: spec name {spec.name!r} does not match its key")
        if set(spec.mean_service_time) != set(spec.stdev_service_time):
            diags.append(f"{path}.stdev_service_time: keys differ from mean_service_time")
        if not spec.mean_service_time:
            diags.append(f"{path}.mean_service_time: at least one server type is required")
        for server_type, mean in spec.mean_service_time.items():
            if server_type not in sim.servers:
                diags.append(f"{path}.mean_service_time.{server_type}: undeclared server type")
            if mean <= 0:
                diags.append(f"{path}.mean_service_time.{server_type}: must be positive")
        for server_type, stdev in spec.stdev_service_time.items():
            if server_type not in sim.servers:
                diags.append(f"{path}.stdev_service_time.{server_type}: undeclared server type")
            if stdev < 0:
                diags.append(f"{path}.stdev_service_time.{server_type}: must be non-negative")
        if spec.power is not None:
            for server_type, watts in spec.power.items():
                if server_type not in spec.mean_service_time:
                    diags.append(f"{path}.power.{server_type}: not a supported server type")
                if watts < 0:
                    diags.append(f"{path}.power.{server_type}: must be non-negative")
        if spec.deadline is not None and spec.deadline <= 0:
            diags.append(f"{path}.deadline: must be positive")
        if spec.service_distribution not in SERVICE_DISTRIBUTIONS:
            diags.append(
                f"{path}.service_distribution: {spec.service_distribution!r}"
                f" not one of {SERVICE_DISTRIBUTIONS}"
            )
        if spec.weight <= 0:
            diags.append(f"{path}.weight: must be positive")
    return diags


def serialize_config(cfg: SimConfig) -> str:
    """Render a configuration back to JSON with every default made explicit.

    Round trip: ``parse_config(serialize_config(cfg))`` equals ``cfg``
    field by field.
    """
    gen, sim = cfg.general, cfg.simulation
    raw_tasks = {}
    for name, spec in sim.tasks.items():
        raw = {
            "mean_service_time": spec.mean_service_time,
            "stdev_service_time": spec.stdev_service_time,
            "service_distribution": spec.service_distribution,
            "weight": spec.weight,
        }
        if spec.power is not None:
            raw["power"] = spec.power
        if spec.deadline is not None:
            raw["deadline"] = spec.deadline
        raw_tasks[name] = raw
    raw_sim = {
        "sched_policy_module": sim.sched_policy_module,
        "arrival_time_scale": sim.arrival_time_scale,
        "power_mgmt_enabled": sim.power_mgmt_enabled,
        "max_queue_size": sim.max_queue_size,
        "scheduling_window": sim.scheduling_window,
        "servers": {t: {"count": c} for t, c in sim.servers.items()},
        "tasks": raw_tasks,
    }
    if sim.max_tasks_simulated is not None:
        raw_sim["max_tasks_simulated"] = sim.max_tasks_simulated
    if sim.mean_arrival_time is not None:
        raw_sim["mean_arrival_time"] = sim.mean_arrival_time
    document = {
        "general": {
            "logging_level": gen.logging_level,
            "random_seed": gen.random_seed,
            "working_dir": gen.working_dir,
            "basename": gen.basename,
            "pre_gen_arrivals": gen.pre_gen_arrivals,
            "input_trace_file": gen.input_trace_file,
            "output_trace_file": gen.output_trace_file,
        },
        "simulation": raw_sim,
    }
    return json.dumps(document, indent=2, sort_keys=True)


def with_stdev_factor(cfg: SimConfig, factor: float) -> SimConfig:
    """Derive a configuration whose service-time stdevs are ``factor * mean``.

    Used by dispersion sweeps: a factor of 0.5 sets every task's standard
    deviation to half its mean on each server type.
    """
    if factor < 0:
        raise ConfigError("stdev factor must be non-negative")
    tasks = {
        name: replace(
            spec,
            stdev_service_time={s: factor * m for s, m in spec.mean_service_time.items()},
        )
        for name, spec in cfg.simulation.tasks.items()
    }
    return replace(cfg, simulation=replace(cfg.simulation, tasks=tasks))
