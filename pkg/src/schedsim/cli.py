"""Command-line entry point: run, validate, and sweep subcommands.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime error
(trace problems, queue overflow, policy faults, I/O).

All subcommands are deterministic given their flags: `run` uses the
config seed unless --seed overrides it; `validate` gives sweep point i
the seed base+i; `sweep` gives run i the seed base+i counting runs in
value-major, policy-minor order.  Flags override config-file values, and
every report embeds the effective configuration under its ``config`` key.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import replace

from .analytic import MMKParams, mmk_mean_wait, relative_error
from .config import (
    ConfigError,
    GeneralConfig,
    SimConfig,
    SimulationConfig,
    TaskTypeSpec,
    load_config,
    with_stdev_factor,
)
from .engine import QueueOverflowError, run_simulation
from .model import PolicyFault
from .policies import PolicyError, registered_policies, resolve_policy
from .stats import write_report
from .traceio import TraceError

SWEEP_PARAMS = ("mean_arrival_time", "arrival_time_scale", "stdev_factor", "sched_policy_module")


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors (exit 1), not runtime errors
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schedsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="execute one simulation from a JSON config")
    p_run.add_argument("--config", required=True, help="path to the JSON configuration file")
    p_run.add_argument("--seed", type=int, default=None, help="override general.random_seed")
    p_run.add_argument(
        "--policy",
        default=None,
        help="override simulation.sched_policy_module "
        f"(registered: {', '.join(registered_policies())})",
    )
    p_run.add_argument("--out", default=None, help="output directory (overrides general.working_dir)")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser(
        "validate", help="compare simulated M/M/k waiting times against the closed form"
    )
    p_val.add_argument("--servers", type=int, default=1, help="number of identical servers (k)")
    p_val.add_argument(
        "--utilizations",
        default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
        help="comma-separated target utilizations, each in (0,1)",
    )
    p_val.add_argument("--tasks", type=int, default=100_000, help="tasks simulated per point")
    p_val.add_argument("--seed", type=int, default=0, help="base seed; point i uses seed base+i")
    p_val.add_argument(
        "--mean-service", type=float, default=50.0, help="mean service time (exponential)"
    )
    p_val.add_argument("--out", default=".", help="directory for validation.csv")
    p_val.set_defaults(func=cmd_validate)

    p_sweep = sub.add_parser("sweep", help="run one simulation per parameter value (x policy)")
    p_sweep.add_argument("--config", required=True, help="path to the JSON configuration file")
    p_sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS, help="swept parameter")
    p_sweep.add_argument("--values", required=True, help="comma-separated parameter values")
    p_sweep.add_argument(
        "--policies",
        default=None,
        help="optional comma-separated policy names crossed with the values",
    )
    p_sweep.add_argument("--seed", type=int, default=None, help="base seed; run i uses base+i")
    p_sweep.add_argument("--out", default=None, help="output directory (overrides general.working_dir)")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PolicyError) as exc:
        print(f"schedsim: configuration error: {exc}", file=sys.stderr)
        return 1
    except (TraceError, QueueOverflowError, PolicyFault, OSError) as exc:
        print(f"schedsim: runtime error: {exc}", file=sys.stderr)
        return 2


def _load(args) -> SimConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, general=replace(cfg.general, random_seed=args.seed))
    if getattr(args, "policy", None):
        resolve_policy(args.policy)
        cfg = replace(cfg, simulation=replace(cfg.simulation, sched_policy_module=args.policy))
    if args.out is not None:
        cfg = replace(cfg, general=replace(cfg.general, working_dir=args.out))
    logging.basicConfig(level=getattr(logging, cfg.general.logging_level))
    os.makedirs(cfg.general.working_dir, exist_ok=True)
    return cfg


def _fmt(value) -> str:
    return "n/a" if value is None else f"{value:.6g}"


def _write_outputs(cfg: SimConfig, report) -> str:
    prefix = os.path.join(cfg.general.working_dir, cfg.general.basename)
    write_report(report, "json", prefix + "report.json")
    write_report(report, "csv", prefix)
    return prefix


def cmd_run(args) -> int:
    cfg = _load(args)
    report = run_simulation(cfg)
    prefix = _write_outputs(cfg, report)
    o = report.overall
    print(
        f"policy {cfg.simulation.sched_policy_module}: "
        f"{report.tasks_completed} tasks, sim time {_fmt(report.sim_time)}, "
        f"mean waiting {_fmt(o.mean_waiting)}, mean response {_fmt(o.mean_response)}"
    )
    print(f"reports written with prefix {prefix!r}")
    return 0


def _validation_config(k: int, utilization: float, tasks: int, mean_service: float, seed: int) -> SimConfig:
    # lambda = rho * k * mu, so the mean inter-arrival gap is mean_service/(rho*k)
    spec = TaskTypeSpec(
        name="job",
        mean_service_time={"server": mean_service},
        stdev_service_time={"server": 0.0},
        service_distribution="exponential",
    )
    return SimConfig(
        general=GeneralConfig(random_seed=seed),
        simulation=SimulationConfig(
            sched_policy_module="v1",
            servers={"server": k},
            tasks={"job": spec},
            max_tasks_simulated=tasks,
            mean_arrival_time=mean_service / (utilization * k),
        ),
    )


def cmd_validate(args) -> int:
    try:
        utilizations = [float(u) for u in args.utilizations.split(",") if u.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --utilizations: {exc}") from None
    if not utilizations or any(not 0.0 < u < 1.0 for u in utilizations):
        raise ConfigError("--utilizations must be a nonempty list of values in (0,1)")
    if args.servers < 1:
        raise ConfigError("--servers must be >= 1")
    if args.tasks < 1:
        raise ConfigError("--tasks must be >= 1")
    if args.mean_service <= 0:
        raise ConfigError("--mean-service must be positive")

    os.makedirs(args.out, exist_ok=True)
    rows = []
    print(f"{'utilization':>11} {'wait_sim':>12} {'wait_mmk':>12} {'rel_error':>10}")
    for i, utilization in enumerate(utilizations):
        cfg = _validation_config(
            args.servers, utilization, args.tasks, args.mean_service, args.seed + i
        )
        report = run_simulation(cfg)
        params = MMKParams(
            servers=args.servers,
            arrival_rate=1.0 / cfg.simulation.mean_arrival_time,
            service_rate=1.0 / args.mean_service,
        )
        wait_sim = report.overall.mean_waiting
        wait_mmk = mmk_mean_wait(params)
        error = relative_error(wait_sim, wait_mmk)
        rows.append([utilization, args.tasks, wait_sim, wait_mmk, error])
        print(f"{utilization:>11.3f} {wait_sim:>12.5f} {wait_mmk:>12.5f} {error:>10.5f}")

    average = sum(r[4] for r in rows) / len(rows)
    print(f"average relative error: {average:.5f}")
    path = os.path.join(args.out, "validation.csv")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["utilization", "tasks", "wait_sim", "wait_mmk", "relative_error"])
        writer.writerows(rows)
    print(f"wrote {path}")
    return 0


def apply_sweep_param(cfg: SimConfig, param: str, value) -> SimConfig:
    if param == "mean_arrival_time":
        return replace(cfg, simulation=replace(cfg.simulation, mean_arrival_time=float(value)))
    if param == "arrival_time_scale":
        return replace(cfg, simulation=replace(cfg.simulation, arrival_time_scale=float(value)))
    if param == "stdev_factor":
        return with_stdev_factor(cfg, float(value))
    if param == "sched_policy_module":
        resolve_policy(str(value))
        return replace(cfg, simulation=replace(cfg.simulation, sched_policy_module=str(value)))
    raise ConfigError(f"unknown sweep parameter {param!r}")


def cmd_sweep(args) -> int:
    cfg = _load(args)
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values must be a nonempty comma-separated list")
    if args.param != "sched_policy_module":
        try:
            values = [float(v) for v in values]
        except ValueError as exc:
            raise ConfigError(f"bad --values for {args.param}: {exc}") from None
    policies = [cfg.simulation.sched_policy_module]
    if args.policies is not None:
        if args.param == "sched_policy_module":
            raise ConfigError("--policies cannot be combined with --param sched_policy_module")
        policies = [p for p in args.policies.split(",") if p.strip()]
        if not policies:
            raise ConfigError("--policies must be a nonempty comma-separated list")
        for name in policies:
            resolve_policy(name)

    base_seed = cfg.general.random_seed
    prefix = os.path.join(cfg.general.working_dir, cfg.general.basename)
    combined = []
    run_index = 0
    for value in values:
        for policy_name in policies:
            point = apply_sweep_param(cfg, args.param, value)
            if args.param == "sched_policy_module":
                policy_name = str(value)
            else:
                point = replace(
                    point, simulation=replace(point.simulation, sched_policy_module=policy_name)
                )
            point = replace(point, general=replace(point.general, random_seed=base_seed + run_index))
            report = run_simulation(point)
            tag = f"{args.param}_{value}_{policy_name}"
            write_report(report, "json", f"{prefix}{tag}_report.json")
            o = report.overall
            combined.append(
                [
                    args.param,
                    value,
                    policy_name,
                    point.general.random_seed,
                    report.tasks_completed,
                    report.sim_time,
                    o.mean_waiting,
                    o.mean_computation,
                    o.mean_response,
                    report.queue_histogram.get(0, 0.0),
                ]
            )
            print(
                f"{args.param}={value} policy={policy_name} seed={point.general.random_seed}: "
                f"mean response {_fmt(o.mean_response)}"
            )
            run_index += 1

    path = prefix + "sweep.csv"
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "param",
                "value",
                "policy",
                "seed",
                "tasks_completed",
                "sim_time",
                "mean_waiting",
                "mean_computation",
                "mean_response",
                "queue_empty_fraction",
            ]
        )
        writer.writerows(combined)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
