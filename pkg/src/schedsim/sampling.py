"""Seeded random variates for arrivals, task-type selection, and service times.

Reproducibility contract: every stochastic draw of a run comes from one
:class:`Rng`, and every draw is derived from the raw uniform stream of a
PCG64 generator.  Exponentials use the inverse transform, normals use the
Box-Muller transform (one normal consumes two uniforms), and task-type
selection consumes one uniform.  Because only ``Generator.random()`` is
ever consumed, an identical seed reproduces the identical draw sequence
across runs and platforms.

Draw order per generated task: arrival gap, then task type, then one
service time per supported server type in sorted server-type-name order.
"""

from __future__ import annotations

import math

import numpy as np

from .config import SimConfig, TaskTypeSpec

_TWO_PI = 2.0 * math.pi


class Rng:
    """Deterministic uniform source (PCG64) confined to a single run.

    Draws are served from a refilled block buffer; numpy fills blocks from
    the same double stream it would use for scalar calls, so buffering does
    not change the sequence, only the per-draw overhead.
    """

    __slots__ = ("seed", "_random", "_buffer", "_index")

    _BLOCK = 4096

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed
        self._random = np.random.Generator(np.random.PCG64(seed)).random
        self._buffer: list[float] = []
        self._index = 0

    def uniform(self) -> float:
        """One uniform draw in the half-open interval (0, 1]."""
        i = self._index
        if i == len(self._buffer):
            self._buffer = self._random(self._BLOCK).tolist()
            i = 0
        self._index = i + 1
        return 1.0 - self._buffer[i]


def draw_exponential(rng: Rng, mean: float) -> float:
    """Exponential draw with the given mean, by inverse transform.

    Computes ``-mean * ln(u)`` for ``u`` uniform in (0, 1], so the boundary
    draw ``u = 1`` yields exactly 0 and draws for different means taken
    from the same uniform scale proportionally.
    """
    if mean <= 0:
        raise ValueError(f"mean must be positive, got {mean}")
    return -mean * math.log(rng.uniform())


def _draw_normal(rng: Rng, mean: float, stdev: float) -> float:
    # Box-Muller; the sibling variate is discarded to keep the documented
    # two-uniforms-per-draw stream discipline simple.
    u1 = rng.uniform()
    u2 = rng.uniform()
    return mean + stdev * math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


def draw_service_time(rng: Rng, spec: TaskTypeSpec, server_type: str) -> float:
    """One actual service time for ``spec`` on ``server_type``.

    Normal mode draws Normal(mean, stdev) and rejects (redraws) any result
    that is not strictly positive; rejection rather than clamping keeps the
    distribution a true truncated normal instead of biasing mass onto a
    point.  A stdev of 0 returns the mean exactly without consuming draws.
    Exponential mode draws Exp with the configured mean and ignores stdev.
    """
    if server_type not in spec.mean_service_time:
        raise ValueError(f"task type {spec.name!r} does not support server type {server_type!r}")
    mean = spec.mean_service_time[server_type]
    if spec.service_distribution == "exponential":
        return draw_exponential(rng, mean)
    stdev = spec.stdev_service_time[server_type]
    if stdev == 0.0:
        return mean
    while True:
        value = _draw_normal(rng, mean, stdev)
        if value > 0.0:
            return value


def draw_task_type(rng: Rng, cfg: SimConfig) -> TaskTypeSpec:
    """Pick a task type; uniform unless per-type weights are configured.

    The choice is made over task-type names in sorted order and consumes
    exactly one uniform, including the single-type case.
    """
    tasks = cfg.simulation.tasks
    if not tasks:
        raise ValueError("no task types configured")
    names = sorted(tasks)
    total = 0.0
    cumulative = []
    for name in names:
        total += tasks[name].weight
        cumulative.append(total)
    target = rng.uniform() * total
    for name, bound in zip(names, cumulative):
        if target <= bound:
            return tasks[name]
    return tasks[names[-1]]
