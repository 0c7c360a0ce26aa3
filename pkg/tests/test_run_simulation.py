import dataclasses
import pandas as pd
import pytest
from simoe.config import AblationFlags, Arrival, Mode, SimConfig
from simoe.errors import ConfigError
from simoe.gate import HardwareModel
from simoe.codec import feature_wire_size
from simoe.sim import FLOAT_FORMAT, comm_time, exec_time, expert_bank
from simoe.sim import run_simulation, reports_to_frame


def reference(**changes) -> SimConfig:
    return dataclasses.replace(SimConfig(), **changes)


def test_run_simulation_reference() -> None:
    report = run_simulation(reference())
    assert report.arrivals == 480
    assert report.in_flight == 0
    assert report.total_completed == report.arrivals
    assert 0 < report.completed_requests <= report.arrivals
    assert report.throughput > 0
    assert report.latency_p50 <= report.latency_p95
    assert 0.0 < report.local_fraction < 1.0
    assert 0.0 <= report.accuracy_proxy <= 1.0
    assert 0.0 < report.end_utilization <= 1.0
    assert report.trace is None and report.decisions is None


def test_run_simulation_deterministic() -> None:
    first = reports_to_frame([run_simulation(reference())])
    second = reports_to_frame([run_simulation(reference())])
    assert first.to_csv(float_format=FLOAT_FORMAT) == second.to_csv(float_format=FLOAT_FORMAT)


def test_run_simulation_cloud_only() -> None:
    report = run_simulation(reference(mode=Mode.CLOUD_ONLY, request_rate=2.0))
    assert report.local_fraction == 0.0
    assert report.end_utilization == 0.0
    assert report.bytes_transferred == report.arrivals * feature_wire_size(256, 768, 4)


def test_run_simulation_edge_only() -> None:
    report = run_simulation(reference(mode=Mode.EDGE_ONLY, request_rate=2.0))
    assert report.local_fraction == 1.0
    assert report.bytes_transferred == 0
    assert report.cloud_utilization == 0.0


def test_run_simulation_mode_dominance() -> None:
    reports = {mode: run_simulation(reference(mode=mode)) for mode in Mode}
    ours = reports[Mode.COLLABORATIVE]
    for mode in (Mode.CLOUD_ONLY, Mode.EDGE_ONLY):
        assert ours.throughput >= reports[mode].throughput
        assert ours.latency_mean <= reports[mode].latency_mean


def test_run_simulation_edge_only_ignores_link() -> None:
    latencies = {
        run_simulation(
            reference(mode=Mode.EDGE_ONLY, link_fluctuation=fluctuation)
        ).latency_mean
        for fluctuation in (0.0, 0.4)
    }
    assert len(latencies) == 1


def test_run_simulation_ablation() -> None:
    full = run_simulation(reference())
    no_gate = run_simulation(reference(ablation=AblationFlags(disable_hlggn=True)))
    no_codec = run_simulation(reference(ablation=AblationFlags(disable_poecc=True)))
    assert no_gate.latency_mean > full.latency_mean
    assert no_codec.throughput < full.throughput
    assert no_codec.latency_mean > full.latency_mean
    assert no_codec.bytes_transferred > full.bytes_transferred


def test_run_simulation_load_scalability() -> None:
    rates = (2.0, 4.0, 6.0, 8.0, 10.0)
    ours = [run_simulation(reference(request_rate=rate)) for rate in rates]
    cloud = [run_simulation(reference(request_rate=rate, mode=Mode.CLOUD_ONLY)) for rate in rates]
    throughputs = [r.throughput for r in ours]
    assert all(b >= a - 1e-9 for a, b in zip(throughputs, throughputs[1:]))
    growth = ours[-1].latency_mean / ours[0].latency_mean
    assert growth < cloud[-1].latency_mean / cloud[0].latency_mean


@pytest.mark.parametrize("fluctuation", [0.2, 0.3, 0.4])
def test_run_simulation_fluctuation_robustness(fluctuation: float) -> None:
    ours = run_simulation(reference(link_fluctuation=fluctuation))
    cloud = run_simulation(reference(link_fluctuation=fluctuation, mode=Mode.CLOUD_ONLY))
    assert ours.latency_std <= cloud.latency_std


def test_run_simulation_drain_timeout() -> None:
    report = run_simulation(reference(mode=Mode.EDGE_ONLY, drain_timeout=0.0))
    assert report.in_flight > 0
    assert report.arrivals == report.total_completed + report.in_flight


@pytest.mark.parametrize("mode", list(Mode))
def test_run_simulation_conservation(mode: Mode) -> None:
    report = run_simulation(reference(mode=mode, request_rate=2.0, duration=100.0))
    assert report.arrivals == 200
    assert report.arrivals == report.total_completed + report.in_flight
    assert report.completed_requests <= report.total_completed
    assert report.throughput == pytest.approx(2.0, rel=0.02)


def test_run_simulation_causality() -> None:
    for mode in Mode:
        trace = run_simulation(reference(mode=mode, duration=10.0, keep_trace=True)).trace
        assert (trace.depart - trace.arrival >= trace.service_time - 1e-12).all()
        assert (trace.exec_done <= trace.depart).all()
        sent = trace.dropna(subset=["transfer_done"])
        assert (sent.transfer_done >= sent.arrival).all()
        assert (sent.exec_done > sent.transfer_done).all()


def test_run_simulation_single_request_latency() -> None:
    cfg = reference(
        mode=Mode.CLOUD_ONLY,
        request_rate=2.0,
        duration=0.5,
        warmup_fraction=0.0,
        link_fluctuation=0.0,
        keep_trace=True,
    )
    report = run_simulation(cfg)
    assert report.arrivals == 1
    row = report.trace.iloc[0]
    tokens = cfg.tokens_per_request * cfg.batch_size
    transfer = comm_time(feature_wire_size(256, 768, 4), 0.0, cfg)
    flops = expert_bank(cfg)[int(row.expert)].flops_cost * tokens + row.gate_flops
    execution = exec_time(flops, cfg.cloud_flops_rate)
    assert row.transfer_done == pytest.approx(transfer)
    assert report.latency_mean == pytest.approx((transfer + execution) * 1e3)


def test_run_simulation_trace() -> None:
    report = run_simulation(reference(keep_trace=True, duration=5.0))
    assert isinstance(report.trace, pd.DataFrame)
    assert len(report.trace) == report.arrivals
    assert set(report.trace.location) <= {"End", "Cloud"}
    assert (report.trace.latency_ms > 0).all()
    on_end = report.trace[report.trace.location == "End"]
    assert (on_end.route == "End").all()
    assert report.decisions


def test_run_simulation_poisson() -> None:
    cfg = reference(arrival=Arrival.POISSON, duration=20.0)
    first = run_simulation(cfg)
    assert 100 <= first.arrivals <= 220
    assert first.arrivals == run_simulation(cfg).arrivals


def test_run_simulation_no_local_expert() -> None:
    cfg = reference(mode=Mode.EDGE_ONLY, hardware=HardwareModel(base_flops_budget=1.0))
    with pytest.raises(ConfigError) as error:
        run_simulation(cfg)
    assert error.value.field == "device"
