import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schedsim import (
    Rng,
    TaskTypeSpec,
    draw_exponential,
    draw_service_time,
    draw_task_type,
)
from _helpers import soc_cfg


class _FixedUniform:
    """Stands in for Rng where a specific uniform sequence is needed."""

    def __init__(self, values):
        self._values = list(values)

    def uniform(self):
        return self._values.pop(0)


def test_uniform_stream_is_one_minus_pcg64_doubles():
    # the documented source: PCG64 via numpy, mapped onto (0, 1]
    rng = Rng(12345)
    reference = np.random.Generator(np.random.PCG64(12345)).random(10_000)
    drawn = [rng.uniform() for _ in range(10_000)]
    assert drawn == [1.0 - u for u in reference.tolist()]


def test_uniform_never_returns_zero_and_can_return_values_near_one():
    rng = Rng(0)
    draws = [rng.uniform() for _ in range(100_000)]
    assert min(draws) > 0.0
    assert max(draws) <= 1.0


def test_same_seed_same_sequence():
    a, b = Rng(99), Rng(99)
    assert [a.uniform() for _ in range(1000)] == [b.uniform() for _ in range(1000)]


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        Rng(-1)


def test_exponential_boundary_u_equals_one_gives_exact_zero():
    assert draw_exponential(_FixedUniform([1.0]), 50.0) == 0.0


def test_exponential_rejects_bad_mean():
    with pytest.raises(ValueError):
        draw_exponential(Rng(0), 0.0)
    with pytest.raises(ValueError):
        draw_exponential(Rng(0), -1.0)


def test_exponential_large_sample_mean():
    # tolerance is 4 sigma / sqrt(n) = 4*50/1000 = 0.2
    rng = Rng(7)
    n = 1_000_000
    total = 0.0
    for _ in range(n):
        total += draw_exponential(rng, 50.0)
    assert abs(total / n - 50.0) < 0.2


def test_exponential_mean_scaling_is_exact_per_draw():
    # same uniform stream: a mean-100 draw is bit-exactly twice a mean-50 draw
    a, b = Rng(3), Rng(3)
    for _ in range(1000):
        assert draw_exponential(a, 100.0) == 2.0 * draw_exponential(b, 50.0)


def _spec(mean, stdev, distribution="normal"):
    return TaskTypeSpec(
        name="t",
        mean_service_time={"s": mean},
        stdev_service_time={"s": stdev},
        service_distribution=distribution,
    )


def test_service_time_unsupported_server_type_rejected():
    with pytest.raises(ValueError, match="does not support"):
        draw_service_time(Rng(0), _spec(10.0, 0.1), "gpu")


def test_service_time_zero_stdev_returns_mean_without_consuming_draws():
    rng = Rng(5)
    assert draw_service_time(rng, _spec(10.0, 0.0), "s") == 10.0
    # stream untouched: next uniform equals a fresh generator's first
    assert rng.uniform() == Rng(5).uniform()


def test_service_time_normal_is_box_muller_on_two_uniforms():
    rng = Rng(11)
    probe = Rng(11)
    u1, u2 = probe.uniform(), probe.uniform()
    expected = 10.0 + 0.5 * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
    assert draw_service_time(rng, _spec(10.0, 0.5), "s") == expected


def test_service_time_normal_concentration():
    # 5 sigma band: mean 10, stdev 0.1 stays within 10 +- 0.5 essentially always
    rng = Rng(2)
    spec = _spec(10.0, 0.1)
    draws = [draw_service_time(rng, spec, "s") for _ in range(10_000)]
    within = sum(1 for d in draws if abs(d - 10.0) <= 0.5)
    assert within / len(draws) > 0.999
    assert abs(sum(draws) / len(draws) - 10.0) < 0.01


def test_service_time_normal_rejection_keeps_values_positive():
    # mean 1, stdev 5: most of the untruncated mass is negative
    rng = Rng(4)
    spec = _spec(1.0, 5.0)
    draws = [draw_service_time(rng, spec, "s") for _ in range(5_000)]
    assert all(d > 0.0 for d in draws)


def test_service_time_exponential_ignores_stdev():
    a = draw_service_time(Rng(8), _spec(500.0, 123.0, "exponential"), "s")
    b = draw_exponential(Rng(8), 500.0)
    assert a == b


def test_service_time_exponential_large_sample_mean():
    rng = Rng(9)
    spec = _spec(500.0, 0.0, "exponential")
    n = 1_000_000
    total = 0.0
    for _ in range(n):
        total += draw_service_time(rng, spec, "s")
    assert abs(total / n - 500.0) < 2.0


def test_task_type_single_type_is_always_chosen_but_consumes_one_draw():
    from _helpers import mm_cfg

    cfg = mm_cfg(1, 0.5, 10, 0)
    rng = Rng(6)
    assert draw_task_type(rng, cfg).name == "job"
    probe = Rng(6)
    probe.uniform()
    assert rng.uniform() == probe.uniform()


def test_task_type_two_types_split_evenly():
    cfg = soc_cfg()
    rng = Rng(1)
    n = 1_000_000
    fft = 0
    for _ in range(n):
        if draw_task_type(rng, cfg).name == "fft":
            fft += 1
    # binomial 4 sigma: 4*0.5/sqrt(n) = 0.002
    assert abs(fft / n - 0.5) < 0.002


def test_task_type_respects_weights():
    cfg = soc_cfg()
    cfg.simulation.tasks["fft"].weight = 3.0
    rng = Rng(1)
    n = 200_000
    fft = sum(1 for _ in range(n) if draw_task_type(rng, cfg).name == "fft")
    assert abs(fft / n - 0.75) < 0.005


def test_task_type_empty_map_rejected():
    cfg = soc_cfg()
    cfg.simulation.tasks = {}
    with pytest.raises(ValueError):
        draw_task_type(Rng(0), cfg)


@settings(max_examples=50)
@given(seed=st.integers(min_value=0, max_value=2**32), mean=st.floats(min_value=0.01, max_value=1e4))
def test_exponential_draws_are_always_non_negative(seed, mean):
    rng = Rng(seed)
    for _ in range(20):
        assert draw_exponential(rng, mean) >= 0.0


@settings(max_examples=50)
@given(
    seed=st.integers(min_value=0, max_value=2**32),
    mean=st.floats(min_value=0.01, max_value=100.0),
    stdev=st.floats(min_value=0.0, max_value=100.0),
)
def test_rejection_sampling_terminates_and_stays_positive(seed, mean, stdev):
    rng = Rng(seed)
    spec = _spec(mean, stdev)
    for _ in range(5):
        assert draw_service_time(rng, spec, "s") > 0.0
