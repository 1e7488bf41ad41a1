"""Quickstart: load the reference config, run it, poke at the report.

Run from the repository root:

    python3 demos/01_quickstart.py
"""

from dataclasses import replace
from pathlib import Path

import schedsim

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference_soc.json"


def main():
    cfg = schedsim.load_config(CONFIG)
    # the shipped file simulates 100k tasks; 10k is plenty for a demo
    cfg = replace(cfg, simulation=replace(cfg.simulation, max_tasks_simulated=10_000))

    print(f"policy: {cfg.simulation.sched_policy_module}")
    print(f"servers: {cfg.simulation.servers}")
    print(f"task types: {list(cfg.simulation.tasks)}")

    report = schedsim.run_simulation(cfg)

    o = report.overall
    print(f"\ncompleted {report.tasks_completed} tasks in {report.sim_time:.0f} time units")
    print(f"mean waiting     {o.mean_waiting:8.2f}")
    print(f"mean computation {o.mean_computation:8.2f}")
    print(f"mean response    {o.mean_response:8.2f}")

    print("\nwho ran what:")
    for name, sts in sorted(report.per_server_type.items()):
        print(
            f"  {name:10s} x{sts.server_count}  "
            f"{sts.tasks_served:6d} tasks  utilization {sts.utilization:.3f}"
        )

    empty = report.queue_histogram.get(0, 0.0)
    print(f"\nqueue empty {empty:.1%} of the time")
    print("histogram (first 5 lengths):")
    for n in sorted(report.queue_histogram)[:5]:
        print(f"  {n}: {report.queue_histogram[n]:.4f}")

    # the same seed always reproduces the same report
    again = schedsim.run_simulation(cfg)
    assert again == report
    print("\nrerun with the same seed: identical report")


if __name__ == "__main__":
    main()
