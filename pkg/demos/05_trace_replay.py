"""Record a workload trace, then replay it.

Replaying a recorded trace under the same configuration reproduces the
original report exactly; replaying it under a different policy compares
schedulers on byte-identical arrivals. Traces are line-delimited JSON,
one task per line (docs/trace_format.md).

    python3 demos/05_trace_replay.py
"""

import tempfile
from dataclasses import replace
from pathlib import Path

import schedsim

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference_soc.json"
TASKS = 5_000


def main():
    base = schedsim.load_config(CONFIG)
    base = replace(base, simulation=replace(base.simulation, max_tasks_simulated=TASKS))

    with tempfile.TemporaryDirectory() as tmp:
        trace_path = str(Path(tmp) / "workload.jsonl")

        # 1. record: a probabilistic run that mirrors every task to disk
        recording = replace(base, general=replace(base.general, output_trace_file=trace_path))
        original = schedsim.run_simulation(recording)
        n_lines = sum(1 for _ in open(trace_path))
        print(f"recorded {n_lines} tasks to {trace_path}")
        print(f"  first line: {open(trace_path).readline().strip()[:100]}...")

        # 2. replay under the same policy: the identical report
        replaying = replace(base, general=replace(base.general, input_trace_file=trace_path))
        replayed = schedsim.run_simulation(replaying)
        assert replayed == original
        print("\nreplay under the same policy: report identical to the original")

        # 3. replay under different policies: same arrivals, different outcomes
        print("\nsame trace, different schedulers:")
        for name in ("v1", "v2", "v3"):
            report = schedsim.run_simulation(replaying, policy=name)
            print(
                f"  {name}: mean waiting {report.overall.mean_waiting:7.2f}, "
                f"mean response {report.overall.mean_response:7.2f}"
            )


if __name__ == "__main__":
    main()
