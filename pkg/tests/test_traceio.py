import dataclasses
import json

import pytest
from hypothesis import given, strategies as st

from schedsim import (
    QueueOverflowError,
    TraceError,
    TraceRecord,
    TraceWriter,
    read_trace,
    read_trace_records,
    run_simulation,
    write_trace_records,
)
from _helpers import soc_cfg

_names = st.text(
    st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=8
)
_times = st.floats(min_value=1e-3, max_value=1e9, allow_nan=False)


@st.composite
def _records(draw):
    n = draw(st.integers(min_value=0, max_value=20))
    arrivals = sorted(draw(st.lists(_times, min_size=n, max_size=n)))
    records = []
    for i in range(n):
        service = draw(st.dictionaries(_names, _times, min_size=1, max_size=3))
        records.append(
            TraceRecord(
                id=i,
                type_name=draw(_names),
                arrival_time=arrivals[i],
                service_times=service,
                deadline=draw(st.none() | _times),
                power=draw(st.none() | st.dictionaries(_names, _times, max_size=2)),
            )
        )
    return records


@given(_records())
def test_records_round_trip(tmp_path_factory, records):
    path = str(tmp_path_factory.mktemp("trace") / "t.jsonl")
    write_trace_records(records, path)
    assert read_trace_records(path) == records


def test_file_is_one_sorted_json_object_per_line(tmp_path):
    path = str(tmp_path / "t.jsonl")
    write_trace_records(
        [TraceRecord(0, "fft", 1.5, {"cpu_core": 2.0}, deadline=9.0)], path
    )
    with open(path, encoding="utf-8") as handle:
        lines = handle.readlines()
    assert len(lines) == 1
    assert lines[0].endswith("\n")
    doc = json.loads(lines[0])
    assert list(doc) == sorted(doc)
    assert doc == {
        "arrival_time": 1.5,
        "deadline": 9.0,
        "id": 0,
        "service_times": {"cpu_core": 2.0},
        "type": "fft",
    }


def test_optional_keys_omitted_when_absent(tmp_path):
    path = str(tmp_path / "t.jsonl")
    write_trace_records([TraceRecord(0, "fft", 0.0, {"gpu": 1.0})], path)
    doc = json.loads(open(path, encoding="utf-8").read())
    assert "deadline" not in doc and "power" not in doc


def test_blank_lines_are_skipped(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text(
        '\n{"arrival_time": 1.0, "id": 0, "service_times": {"s": 2.0}, "type": "a"}\n\n',
        encoding="utf-8",
    )
    records = read_trace_records(str(path))
    assert len(records) == 1
    assert records[0].service_times == {"s": 2.0}


def test_invalid_json_reports_line_number(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text('{"id": 0, "type": "a", "arrival_time": 0, "service_times": {}}\nnot json\n')
    with pytest.raises(TraceError, match=r"t\.jsonl:2"):
        read_trace_records(str(path))


def test_missing_key_is_a_trace_error(tmp_path):
    path = tmp_path / "t.jsonl"
    path.write_text('{"id": 0, "arrival_time": 0.0, "service_times": {}}\n')
    with pytest.raises(TraceError, match="bad record"):
        read_trace_records(str(path))


def _write(tmp_path, docs):
    path = tmp_path / "t.jsonl"
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(json.dumps(doc) + "\n")
    return str(path)


def _doc(task_id, arrival, **overrides):
    doc = {
        "id": task_id,
        "type": "fft",
        "arrival_time": arrival,
        "service_times": {"cpu_core": 200.0},
    }
    doc.update(overrides)
    return doc


class TestReadTraceValidation:
    def test_duplicate_id(self, tmp_path):
        path = _write(tmp_path, [_doc(7, 1.0), _doc(7, 2.0)])
        with pytest.raises(TraceError, match="duplicate task id"):
            read_trace(path, soc_cfg())

    def test_decreasing_arrivals(self, tmp_path):
        path = _write(tmp_path, [_doc(0, 5.0), _doc(1, 4.0)])
        with pytest.raises(TraceError, match="non-decreasing"):
            read_trace(path, soc_cfg())

    def test_unknown_server_type(self, tmp_path):
        path = _write(tmp_path, [_doc(0, 1.0, service_times={"tpu": 3.0})])
        with pytest.raises(TraceError, match="unknown server type.*tpu"):
            read_trace(path, soc_cfg())

    def test_unconfigured_type_needs_service_times(self, tmp_path):
        path = _write(tmp_path, [_doc(0, 1.0, type="mystery", service_times={})])
        with pytest.raises(TraceError, match="mystery"):
            read_trace(path, soc_cfg())

    def test_non_positive_service_time(self, tmp_path):
        path = _write(tmp_path, [_doc(0, 1.0, service_times={"cpu_core": 0.0})])
        with pytest.raises(TraceError, match="non-positive"):
            read_trace(path, soc_cfg())


class TestReadTraceSemantics:
    def test_actuals_come_from_trace_means_from_config(self, tmp_path):
        cfg = soc_cfg()
        path = _write(tmp_path, [_doc(0, 1.0, service_times={"cpu_core": 123.0})])
        (task,) = read_trace(path, cfg)
        assert task.service_time_by_server == {"cpu_core": 123.0}
        # the policy-facing estimate stays the configured mean
        assert task.mean_service_time_by_server == {"cpu_core": 500.0}
        assert task.target_servers == ["cpu_core"]

    def test_empty_service_times_fall_back_to_configured_means(self, tmp_path):
        path = _write(tmp_path, [_doc(0, 1.0, service_times={})])
        (task,) = read_trace(path, soc_cfg())
        assert task.service_time_by_server == {
            "cpu_core": 500.0,
            "gpu": 100.0,
            "fft_accel": 10.0,
        }
        assert task.target_servers == ["fft_accel", "gpu", "cpu_core"]

    def test_unconfigured_type_uses_trace_values_as_means(self, tmp_path):
        path = _write(
            tmp_path,
            [_doc(0, 1.0, type="mystery", service_times={"gpu": 9.0, "cpu_core": 4.0})],
        )
        (task,) = read_trace(path, soc_cfg())
        assert task.mean_service_time_by_server == {"gpu": 9.0, "cpu_core": 4.0}
        assert task.target_servers == ["cpu_core", "gpu"]

    def test_record_deadline_and_power_override_config(self, tmp_path):
        cfg = soc_cfg()
        cfg.simulation.tasks["fft"] = dataclasses.replace(
            cfg.simulation.tasks["fft"], deadline=700.0, power={"cpu_core": 2.0}
        )
        docs = [
            _doc(0, 1.0, deadline=10.0, power={"cpu_core": 5.5}),
            _doc(1, 2.0),
        ]
        tasks = read_trace(_write(tmp_path, docs), cfg)
        assert tasks[0].deadline == 10.0
        assert tasks[0].power_by_server == {"cpu_core": 5.5}
        assert tasks[1].deadline == 700.0
        assert tasks[1].power_by_server == {"cpu_core": 2.0}


def test_replay_reproduces_probabilistic_run(tmp_path):
    trace = str(tmp_path / "run.jsonl")
    cfg = soc_cfg(max_tasks_simulated=3_000, output_trace_file=trace)
    original_records = []
    original = run_simulation(cfg, record_sink=original_records)

    replay_cfg = soc_cfg(max_tasks_simulated=3_000, input_trace_file=trace)
    assert replay_cfg.realistic_mode
    replay_records = []
    replayed = run_simulation(replay_cfg, record_sink=replay_records)

    # config echoes differ (trace file paths) but every statistic matches
    assert replayed == original
    assert replay_records == original_records
    assert replayed.to_dict()["overall"] == original.to_dict()["overall"]


def test_replay_is_policy_independent_input(tmp_path):
    # same trace scheduled by two policies: identical arrivals, different outcomes
    trace = str(tmp_path / "run.jsonl")
    run_simulation(soc_cfg(max_tasks_simulated=2_000, output_trace_file=trace))
    cfg = soc_cfg(max_tasks_simulated=2_000, input_trace_file=trace)
    r1 = run_simulation(cfg, policy="v1")
    r3 = run_simulation(cfg, policy="v3")
    assert r1.tasks_completed == r3.tasks_completed == 2_000
    assert r1.overall.mean_waiting != r3.overall.mean_waiting


def test_empty_trace_runs_to_zero_task_report(tmp_path):
    trace = tmp_path / "empty.jsonl"
    trace.write_text("")
    report = run_simulation(soc_cfg(input_trace_file=str(trace)))
    assert report.tasks_completed == 0
    assert report.sim_time == 0.0


def test_pre_gen_writes_full_trace_before_first_event(tmp_path):
    # the run aborts on queue overflow, yet the pre-generated trace is complete
    trace = str(tmp_path / "pre.jsonl")
    cfg = soc_cfg(
        max_tasks_simulated=500,
        max_queue_size=1,
        pre_gen_arrivals=True,
        output_trace_file=trace,
    )
    with pytest.raises(QueueOverflowError):
        run_simulation(cfg)
    assert len(read_trace_records(trace)) == 500


def test_streamed_trace_matches_pre_generated_trace(tmp_path):
    streamed = str(tmp_path / "streamed.jsonl")
    pre = str(tmp_path / "pre.jsonl")
    run_simulation(soc_cfg(max_tasks_simulated=400, output_trace_file=streamed))
    run_simulation(
        soc_cfg(max_tasks_simulated=400, output_trace_file=pre, pre_gen_arrivals=True)
    )
    assert open(streamed).read() == open(pre).read()


def test_relative_trace_paths_resolve_against_working_dir(tmp_path):
    cfg = soc_cfg(
        max_tasks_simulated=50,
        working_dir=str(tmp_path),
        output_trace_file="out.jsonl",
    )
    run_simulation(cfg)
    assert (tmp_path / "out.jsonl").exists()
    replay = soc_cfg(working_dir=str(tmp_path), input_trace_file="out.jsonl")
    assert run_simulation(replay).tasks_completed == 50


def test_writer_close_is_idempotent(tmp_path):
    writer = TraceWriter(str(tmp_path / "t.jsonl"))
    writer.write_record(TraceRecord(0, "a", 0.0, {"s": 1.0}))
    writer.close()
    writer.close()
