"""Shared builders for test configurations."""

from schedsim import GeneralConfig, SimConfig, SimulationConfig, TaskTypeSpec


def mm_cfg(k, rho, tasks, seed, mean_service=50.0, **general):
    """Single-type exponential M/M/k setup: lambda = rho * k / mean_service."""
    spec = TaskTypeSpec(
        name="job",
        mean_service_time={"server": mean_service},
        stdev_service_time={"server": 0.0},
        service_distribution="exponential",
    )
    return SimConfig(
        general=GeneralConfig(random_seed=seed, **general),
        simulation=SimulationConfig(
            sched_policy_module="v1",
            servers={"server": k},
            tasks={"job": spec},
            max_tasks_simulated=tasks,
            mean_arrival_time=mean_service / (rho * k),
        ),
    )


def soc_cfg(**overrides):
    """The reference heterogeneous setup: 8 cores, 2 gpus, 1 fft accelerator."""
    fft = TaskTypeSpec(
        name="fft",
        mean_service_time={"cpu_core": 500.0, "gpu": 100.0, "fft_accel": 10.0},
        stdev_service_time={"cpu_core": 5.0, "gpu": 1.0, "fft_accel": 0.1},
    )
    decoder = TaskTypeSpec(
        name="decoder",
        mean_service_time={"cpu_core": 200.0, "gpu": 150.0},
        stdev_service_time={"cpu_core": 2.0, "gpu": 1.5},
    )
    sim = dict(
        sched_policy_module="v3",
        servers={"cpu_core": 8, "gpu": 2, "fft_accel": 1},
        tasks={"fft": fft, "decoder": decoder},
        max_tasks_simulated=10_000,
        mean_arrival_time=50.0,
    )
    general = dict(random_seed=0)
    for key, value in overrides.items():
        if key in ("random_seed", "working_dir", "basename", "pre_gen_arrivals",
                   "input_trace_file", "output_trace_file", "logging_level"):
            general[key] = value
        else:
            sim[key] = value
    return SimConfig(general=GeneralConfig(**general), simulation=SimulationConfig(**sim))
