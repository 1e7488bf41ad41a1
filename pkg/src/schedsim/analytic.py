"""Closed-form steady-state results for M/M/k queues (Erlang C).

These are the analytical counterparts used to validate the simulation
engine: mean waiting time for a single queue feeding ``k`` identical
servers with Poisson arrivals and exponential service.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MMKParams:
    """M/M/k system parameters.

    ``arrival_rate`` is tasks per unit time; ``service_rate`` is per-server
    completions per unit time (1 / mean service time).  The system is
    stable only for utilization < 1, and the closed-form operations reject
    unstable parameters.
    """

    servers: int
    arrival_rate: float
    service_rate: float

    def __post_init__(self):
        if self.servers < 1:
            raise ValueError("servers must be >= 1")
        if self.arrival_rate <= 0 or self.service_rate <= 0:
            raise ValueError("arrival_rate and service_rate must be positive")

    @property
    def offered_load(self) -> float:
        return self.arrival_rate / self.service_rate

    @property
    def utilization(self) -> float:
        return self.arrival_rate / (self.servers * self.service_rate)


def _require_stable(params: MMKParams) -> None:
    if params.utilization >= 1.0:
        raise ValueError(
            f"unstable system: utilization {params.utilization:.4g} >= 1"
        )


def erlang_c(params: MMKParams) -> float:
    """Probability that an arriving task must wait (all k servers busy).

    Evaluated through the Erlang B recurrence
    ``B(0) = 1;  B(n) = a*B(n-1) / (n + a*B(n-1))`` followed by the
    conversion ``C = k*B(k) / (k - a*(1 - B(k)))``, which avoids explicit
    factorials and stays numerically stable well past k = 100.
    """
    _require_stable(params)
    a = params.offered_load
    k = params.servers
    blocking = 1.0
    for n in range(1, k + 1):
        blocking = a * blocking / (n + a * blocking)
    return k * blocking / (k - a * (1.0 - blocking))


def mmk_mean_wait(params: MMKParams) -> float:
    """Steady-state mean time in queue: Erlang C / (k*mu - lambda)."""
    _require_stable(params)
    return erlang_c(params) / (
        params.servers * params.service_rate - params.arrival_rate
    )


def relative_error(wait_sim: float, wait_analytic: float) -> float:
    """|simulated - analytical| / analytical; undefined at zero load."""
    if wait_analytic <= 0:
        raise ValueError("analytical waiting time must be positive")
    return abs(wait_sim - wait_analytic) / wait_analytic


@dataclass(frozen=True)
class ErrorSample:
    """One validation measurement: simulated vs analytical mean wait."""

    wait_sim: float
    wait_analytic: float
    relative_error: float

    @classmethod
    def from_waits(cls, wait_sim: float, wait_analytic: float) -> "ErrorSample":
        return cls(wait_sim, wait_analytic, relative_error(wait_sim, wait_analytic))
