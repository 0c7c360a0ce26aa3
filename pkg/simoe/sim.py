# simoe/sim.py
"""Discrete-event simulation of the end-cloud MoE pipeline.

Requests arrive at the end device, are routed by the grouped gate and
run their Top-1 expert either on the end device or in the cloud, behind
a link whose rate changes every fluctuation interval.

It contains the following functions:
    - `bandwidth_at(t, cfg)` - Returns: link rate (Mbps) at time t.
    - `comm_time(nbytes, t_start, cfg)` - Returns: seconds to send nbytes from t_start.
    - `exec_time(flops, rate)` - Returns: seconds to execute flops.
    - `expert_bank(cfg)` - Returns: expert cost descriptors.
    - `arrival_times(cfg)` - Returns: request arrival times.
    - `scheduler_params(cfg)` - Returns: placement constants for the run.
    - `run_simulation(cfg)` - Returns: metrics of one run.
    - `run_sweep(base, axis, values, jobs)` - Returns: metrics of one run per value.
    - `reports_to_frame(reports)` - Returns: one table row per run.
    - `write_report_csv(frame, csv_path)` - Returns: None, writes fixed-format csv.
"""

import collections
import dataclasses
import enum
import functools
import heapq
import logging
import math
import dask
import numpy as np
import pandas as pd
import simoe.codec as codec
import simoe.gate as gt
import simoe.sched as sched
from simoe.config import Arrival, Mode, SimConfig, validate_config
from simoe.errors import ConfigError

logger = logging.getLogger(__name__)

ARRIVAL_STREAM = 0
FEATURE_STREAM = 1
BANDWIDTH_STREAM = 2
GATE_STREAM = 3
FLOAT_FORMAT = "%.6f"


class EventKind(enum.IntEnum):
    ARRIVAL = 0
    GATE_DONE = 1
    ENCODE_DONE = 2
    EPOCH = 3
    TRANSFER_DONE = 4
    EXEC_DONE = 5
    DEPART = 6


class Resource(enum.Enum):
    END = "end"
    LINK = "link"
    CLOUD = "cloud"


class SweepAxis(enum.Enum):
    REQUEST_RATE = "request_rate"
    FLUCTUATION = "link_fluctuation"
    NUM_EXPERTS = "num_experts"


@dataclasses.dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    request_id: int
    payload: object = None


@dataclasses.dataclass
class RequestState:
    """Bookkeeping of one request through the pipeline."""

    request_id: int
    arrival: float
    expert: int = -1
    reference_expert: int = -1
    gate_flops: float = 0.0
    location: sched.Location | None = None
    route: sched.Location | None = None
    payload_bytes: int = 0
    gate_done: float = math.nan
    placed: float = math.nan
    transfer_done: float = math.nan
    exec_done: float = math.nan
    depart: float = math.nan
    service_time: float = 0.0

    @property
    def latency(self) -> float:
        return self.depart - self.arrival


@dataclasses.dataclass(frozen=True)
class _Job:
    request_id: int
    done: EventKind
    flops: float
    expert: int | None = None


@dataclasses.dataclass(frozen=True, eq=False)
class MetricsReport:
    """Metrics of one run.

    Latencies are in milliseconds over requests that arrived after the
    warm-up and completed by the horizon.
    `completed_requests` counts departures inside the measured window;
    `total_completed` counts every departure, so arrivals equal
    total_completed plus in_flight.
    """

    mode: Mode
    seed: int
    num_experts: int
    num_groups: int
    request_rate: float
    link_fluctuation: float
    arrivals: int
    completed_requests: int
    total_completed: int
    in_flight: int
    throughput: float
    latency_mean: float
    latency_p50: float
    latency_p95: float
    latency_std: float
    bytes_transferred: int
    end_utilization: float
    cloud_utilization: float
    local_fraction: float
    accuracy_proxy: float
    trace: pd.DataFrame | None = None
    decisions: list[sched.PlacementDecision] | None = None

    def to_record(self) -> dict:
        """Scalar fields for one csv row."""
        return {
            "mode": self.mode.value,
            "M": self.num_experts,
            "K": self.num_groups,
            "rate": self.request_rate,
            "fluctuation": self.link_fluctuation,
            "throughput": self.throughput,
            "latency_mean": self.latency_mean,
            "latency_p50": self.latency_p50,
            "latency_p95": self.latency_p95,
            "bytes": self.bytes_transferred,
            "latency_std": self.latency_std,
            "seed": self.seed,
            "arrivals": self.arrivals,
            "completed": self.completed_requests,
            "total_completed": self.total_completed,
            "in_flight": self.in_flight,
            "end_utilization": self.end_utilization,
            "cloud_utilization": self.cloud_utilization,
            "local_fraction": self.local_fraction,
            "accuracy_proxy": self.accuracy_proxy,
        }


@functools.lru_cache(maxsize=65536)
def _window_rate(mean: float, fluctuation: float, seed: int, window: int) -> float:
    if fluctuation == 0:
        return mean
    rng = np.random.default_rng([seed, BANDWIDTH_STREAM, window])
    return float(mean * rng.uniform(1.0 - fluctuation, 1.0 + fluctuation))


def bandwidth_at(t: float, cfg: SimConfig) -> float:
    """Link rate at a time.

    The rate is constant over each fluctuation window and drawn
    uniformly in mean * [1 - fluctuation, 1 + fluctuation] from a stream
    keyed by (seed, window index).

    Args:
        t: Time (s), non-negative.
        cfg: Run configuration.

    Returns:
        Rate in Mbps.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    window = math.floor(t / cfg.fluctuation_interval)
    return _window_rate(cfg.link_mbps_mean, cfg.link_fluctuation, cfg.seed, window)


def comm_time(nbytes: int, t_start: float, cfg: SimConfig) -> float:
    """Transfer time over the piecewise-constant link.

    Args:
        nbytes: Bytes to send.
        t_start: Transfer start (s).
        cfg: Run configuration.

    Returns:
        Seconds until the last bit is sent.
    """
    if nbytes < 0:
        raise ValueError("nbytes must be non-negative")
    bits = 8.0 * nbytes
    if bits == 0:
        return 0.0
    if cfg.link_fluctuation == 0:
        return bits / (cfg.link_mbps_mean * 1e6)
    interval = cfg.fluctuation_interval
    window = math.floor(t_start / interval)
    t = t_start
    while True:
        rate = _window_rate(cfg.link_mbps_mean, cfg.link_fluctuation, cfg.seed, window) * 1e6
        window_end = (window + 1) * interval
        capacity = rate * max(window_end - t, 0.0)
        if bits <= capacity:
            return t + bits / rate - t_start
        bits -= capacity
        window += 1
        t = window_end


def exec_time(flops: float, rate: float) -> float:
    """Seconds to execute flops at rate FLOPs s^-1."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    return flops / rate


def expert_bank(cfg: SimConfig) -> list[gt.ExpertDescriptor]:
    """Expert costs of a run.

    Expert i is a feed-forward block of width expert_hidden_dim scaled
    linearly from the low to the high end of expert_cost_spread.

    Args:
        cfg: Run configuration.

    Returns:
        One descriptor per expert, FLOPs per token and resident MB.
    """
    low, high = cfg.expert_cost_spread
    unit_flops = 4.0 * cfg.feature_dim * cfg.expert_hidden_dim
    unit_mb = 2.0 * cfg.feature_dim * cfg.expert_hidden_dim * 4 / 2**20
    return [
        gt.ExpertDescriptor(index, unit_flops * scale, unit_mb * scale)
        for index, scale in enumerate(np.linspace(low, high, cfg.num_experts))
    ]


def arrival_times(cfg: SimConfig) -> np.ndarray:
    """Arrival times in [0, duration)."""
    if cfg.arrival is Arrival.DETERMINISTIC:
        count = math.ceil(cfg.duration * cfg.request_rate)
        times = np.arange(count) / cfg.request_rate
    else:
        rng = np.random.default_rng([cfg.seed, ARRIVAL_STREAM])
        gaps = rng.exponential(1.0 / cfg.request_rate, 16)
        while gaps.sum() < cfg.duration:
            gaps = np.concatenate([gaps, rng.exponential(1.0 / cfg.request_rate, gaps.size)])
        times = np.cumsum(gaps) - gaps[0]
    return times[times < cfg.duration]


def scheduler_params(cfg: SimConfig) -> sched.SchedulerParams:
    """Placement constants of a run; the link estimate is the device bandwidth."""
    return sched.SchedulerParams(
        alpha=cfg.scheduler.alpha,
        beta=cfg.scheduler.beta,
        t_end=cfg.scheduler.t_end,
        eps_priority=cfg.scheduler.eps_priority,
        end_flops_rate=gt.end_flops_rate(cfg.device),
        cloud_flops_rate=cfg.cloud_flops_rate,
        link_bandwidth=cfg.device.bandwidth * 1e6,
    )


class ExpertCache:
    """LRU residency of expert weights on the end device.

    Attributes:
        capacity_mb: Memory available to experts.
        storage_mb_per_s: Load rate on a miss.
        misses: Loads performed.
    """

    def __init__(self, capacity_mb: float, storage_mb_per_s: float):
        self.capacity_mb = capacity_mb
        self.storage_mb_per_s = storage_mb_per_s
        self.misses = 0
        self._resident: collections.OrderedDict[int, float] = collections.OrderedDict()

    def load(self, expert: gt.ExpertDescriptor) -> float:
        """Make an expert resident.

        Args:
            expert: Expert about to run.

        Returns:
            Seconds spent loading it, 0.0 on a hit.
        """
        if expert.index in self._resident:
            self._resident.move_to_end(expert.index)
            return 0.0
        self.misses += 1
        if expert.memory_cost <= self.capacity_mb:
            while sum(self._resident.values()) + expert.memory_cost > self.capacity_mb:
                self._resident.popitem(last=False)
            self._resident[expert.index] = expert.memory_cost
        return expert.memory_cost / self.storage_mb_per_s

    @property
    def resident(self) -> list[int]:
        return list(self._resident)


class EndCloudPipeline:
    """State and event handlers of one simulation run.

    The end device serves one job at a time, gate and encode jobs ahead
    of queued expert executions. The link sends one transfer at a time.
    The cloud runs up to `cloud_lanes` jobs in parallel.
    """

    def __init__(self, cfg: SimConfig):
        validate_config(cfg)
        self.cfg = cfg
        self.collaborative = cfg.mode is Mode.COLLABORATIVE
        self.use_flat_gate = self.collaborative and cfg.ablation.disable_hlggn
        self.use_codec = self.collaborative and not cfg.ablation.disable_poecc
        self.tokens = cfg.tokens_per_request * cfg.batch_size
        self.end_rate = gt.end_flops_rate(cfg.device)
        self.params = scheduler_params(cfg)
        self.experts = expert_bank(cfg)
        self.gate_params = gt.seeded_gate_params(
            [cfg.seed, GATE_STREAM],
            cfg.num_experts,
            cfg.num_groups,
            cfg.feature_dim,
            top_groups=cfg.top_groups,
        )
        self.reference_params = dataclasses.replace(
            self.gate_params, top_groups=cfg.num_groups
        )
        threshold = gt.capability_threshold(cfg.device, cfg.hardware)
        if self.use_flat_gate:
            self.local_set = {expert.index for expert in self.experts}
        else:
            self.local_set = gt.select_local_experts(
                self.experts, threshold, cfg.eps_complexity, cfg.local_cap_fraction
            )
        if cfg.mode is Mode.EDGE_ONLY and not self.local_set:
            raise ConfigError("device", "no expert fits the end device in edge_only mode")
        self.cache = ExpertCache(threshold.memory_budget, cfg.storage_mb_per_s)

        h, w, c = cfg.tokens_per_request, cfg.feature_dim, cfg.batch_size
        self.raw_bytes = codec.feature_wire_size(h, w, c)
        self.compressed_bytes = codec.compressed_wire_size(c, cfg.codec_rank)
        self.encode_flops = codec.encode_flops(h, w, cfg.codec_rank, c)
        self.decode_flops = codec.decode_flops(h, w, cfg.codec_rank, c)

        times = arrival_times(cfg)
        features = np.random.default_rng([cfg.seed, FEATURE_STREAM]).standard_normal(
            (times.size, cfg.feature_dim)
        )
        self.requests = [
            self._routed(RequestState(rid, float(t)), x)
            for rid, (t, x) in enumerate(zip(times, features))
        ]

        self.now = 0.0
        self._queue: list[tuple] = []
        self._seq = 0
        self._end_control: collections.deque[_Job] = collections.deque()
        self._end_experts: collections.deque[_Job] = collections.deque()
        self._end_current: tuple[_Job, float, float] | None = None
        self._link_queue: collections.deque[tuple[int, int]] = collections.deque()
        self._link_busy = False
        self._cloud_queue: collections.deque[_Job] = collections.deque()
        self._cloud_running: list[tuple[_Job, float, float] | None] = [None] * cfg.cloud_lanes
        self._pending: list[int] = []
        self._epoch_scheduled = False
        self.busy = {resource: [] for resource in Resource}
        self.bytes_transferred = 0
        self.decisions: list[sched.PlacementDecision] = []
        self._handlers = {
            EventKind.ARRIVAL: self._on_arrival,
            EventKind.GATE_DONE: self._on_gate_done,
            EventKind.ENCODE_DONE: self._on_encode_done,
            EventKind.EPOCH: self._on_epoch,
            EventKind.TRANSFER_DONE: self._on_transfer_done,
            EventKind.EXEC_DONE: self._on_exec_done,
            EventKind.DEPART: self._on_depart,
        }

    def _routed(self, req: RequestState, x: np.ndarray) -> RequestState:
        req.reference_expert = gt.group_gate_forward(x, self.reference_params).selected_expert
        if self.use_flat_gate:
            out = gt.flat_gate_forward(x, self.gate_params)
        else:
            out = gt.group_gate_forward(x, self.gate_params)
        macs = out.flops_used
        expert = out.selected_expert
        req.route = gt.top1_route(out, self.local_set).location
        if self.cfg.mode is Mode.EDGE_ONLY and expert not in self.local_set:
            fallback = gt.fallback_local_expert(x, self.gate_params, self.local_set)
            macs += fallback.flops_used
            expert = fallback.selected_expert
        req.expert = expert
        req.gate_flops = 2.0 * macs * self.tokens
        return req

    def _expert_flops(self, req: RequestState) -> float:
        return self.experts[req.expert].flops_cost * self.tokens

    def _push(self, time: float, kind: EventKind, request_id: int, payload=None) -> None:
        heapq.heappush(
            self._queue,
            (time, int(kind), request_id, self._seq, Event(time, kind, request_id, payload)),
        )
        self._seq += 1

    # end device
    def _end_submit(self, job: _Job) -> None:
        if job.expert is None:
            self._end_control.append(job)
        else:
            self._end_experts.append(job)
        if self._end_current is None:
            self._end_start()

    def _end_start(self) -> None:
        if self._end_control:
            job = self._end_control.popleft()
        elif self._end_experts:
            job = self._end_experts.popleft()
        else:
            return
        duration = exec_time(job.flops, self.end_rate)
        if job.expert is not None:
            duration += self.cache.load(self.experts[job.expert])
        self._end_current = (job, self.now, self.now + duration)
        self.requests[job.request_id].service_time += duration
        self.busy[Resource.END].append((self.now, self.now + duration))
        self._push(self.now + duration, job.done, job.request_id, Resource.END)

    def end_backlog(self) -> float:
        """FLOPs committed on the end device and not yet executed."""
        queued = sum(job.flops for job in self._end_control) + sum(
            job.flops for job in self._end_experts
        )
        if self._end_current is not None:
            job, start, stop = self._end_current
            if stop > start:
                queued += job.flops * max(stop - self.now, 0.0) / (stop - start)
        return queued

    def cloud_backlog(self) -> float:
        """FLOPs committed on the cloud and not yet executed."""
        queued = sum(job.flops for job in self._cloud_queue)
        for running in self._cloud_running:
            if running is not None:
                job, start, stop = running
                if stop > start:
                    queued += job.flops * max(stop - self.now, 0.0) / (stop - start)
        return queued

    # link
    def _link_submit(self, request_id: int, nbytes: int) -> None:
        self.requests[request_id].payload_bytes = nbytes
        self._link_queue.append((request_id, nbytes))
        if not self._link_busy:
            self._link_start()

    def _link_start(self) -> None:
        if not self._link_queue:
            return
        request_id, nbytes = self._link_queue.popleft()
        duration = comm_time(nbytes, self.now, self.cfg)
        self._link_busy = True
        self.bytes_transferred += nbytes
        self.requests[request_id].service_time += duration
        self.busy[Resource.LINK].append((self.now, self.now + duration))
        self._push(self.now + duration, EventKind.TRANSFER_DONE, request_id, Resource.LINK)

    # cloud
    def _cloud_submit(self, job: _Job) -> None:
        self._cloud_queue.append(job)
        self._cloud_start()

    def _cloud_start(self) -> None:
        for lane, running in enumerate(self._cloud_running):
            if running is None and self._cloud_queue:
                job = self._cloud_queue.popleft()
                duration = exec_time(job.flops, self.cfg.cloud_flops_rate)
                self._cloud_running[lane] = (job, self.now, self.now + duration)
                self.requests[job.request_id].service_time += duration
                self.busy[Resource.CLOUD].append((self.now, self.now + duration))
                self._push(self.now + duration, job.done, job.request_id, (Resource.CLOUD, lane))

    def _release(self, payload) -> None:
        if payload is Resource.END:
            self._end_current = None
            self._end_start()
        elif payload is Resource.LINK:
            self._link_busy = False
            self._link_start()
        else:
            _, lane = payload
            self._cloud_running[lane] = None
            self._cloud_start()

    # handlers
    def _on_arrival(self, event: Event) -> None:
        req = self.requests[event.request_id]
        if self.cfg.mode is Mode.CLOUD_ONLY:
            req.location = sched.Location.CLOUD
            self._link_submit(req.request_id, self.raw_bytes)
        else:
            self._end_submit(_Job(req.request_id, EventKind.GATE_DONE, req.gate_flops))

    def _on_gate_done(self, event: Event) -> None:
        self._release(event.payload)
        req = self.requests[event.request_id]
        req.gate_done = self.now
        if self.cfg.mode is Mode.EDGE_ONLY:
            self._place_end(req)
        elif not self.use_codec:
            req.location = sched.Location.CLOUD
            req.placed = self.now
            self._link_submit(req.request_id, self.raw_bytes)
        else:
            self._pending.append(req.request_id)
            if not self._epoch_scheduled:
                boundary = (math.floor(self.now / self.cfg.epoch) + 1) * self.cfg.epoch
                self._epoch_scheduled = True
                self._push(boundary, EventKind.EPOCH, -1)

    def _place_end(self, req: RequestState) -> None:
        req.location = sched.Location.END
        req.placed = self.now
        self._end_submit(
            _Job(req.request_id, EventKind.EXEC_DONE, self._expert_flops(req), req.expert)
        )

    def _on_epoch(self, event: Event) -> None:
        self._epoch_scheduled = False
        batch, self._pending = self._pending, []
        tasks = [
            sched.TaskSpec(rid, self._expert_flops(self.requests[rid]), self.compressed_bytes)
            for rid in batch
            if self.requests[rid].route is sched.Location.END
        ]
        locations = {}
        if tasks:
            decisions = sched.place_tasks(
                tasks, self.end_backlog(), self.cloud_backlog(), self.params
            )
            self.decisions.extend(decisions)
            locations = {d.task_id: d.location for d in decisions}
        logger.debug(
            f"Epoch {self.now:.3f}s: {len(batch)} requests, {len(tasks)} local candidates"
        )
        offloaded = [rid for rid in batch if locations.get(rid) is not sched.Location.END]
        for rid in offloaded:
            req = self.requests[rid]
            req.location = sched.Location.CLOUD
            req.placed = self.now
            self._end_submit(_Job(rid, EventKind.ENCODE_DONE, self.encode_flops))
        for rid in batch:
            if locations.get(rid) is sched.Location.END:
                self._place_end(self.requests[rid])

    def _on_encode_done(self, event: Event) -> None:
        self._release(event.payload)
        self._link_submit(event.request_id, self.compressed_bytes)

    def _on_transfer_done(self, event: Event) -> None:
        self._release(event.payload)
        req = self.requests[event.request_id]
        req.transfer_done = self.now
        flops = self._expert_flops(req)
        if self.cfg.mode is Mode.CLOUD_ONLY:
            flops += req.gate_flops
        elif self.use_codec:
            flops += self.decode_flops
        self._cloud_submit(_Job(req.request_id, EventKind.EXEC_DONE, flops))

    def _on_exec_done(self, event: Event) -> None:
        self._release(event.payload)
        self.requests[event.request_id].exec_done = self.now
        self._push(self.now, EventKind.DEPART, event.request_id)

    def _on_depart(self, event: Event) -> None:
        self.requests[event.request_id].depart = self.now

    def run(self) -> MetricsReport:
        """Process events until the queue drains or the horizon passes."""
        for req in self.requests:
            self._push(req.arrival, EventKind.ARRIVAL, req.request_id)
        horizon = math.inf
        if self.cfg.drain_timeout is not None:
            horizon = self.cfg.duration + self.cfg.drain_timeout
        while self._queue and self._queue[0][0] <= horizon:
            time, _, _, _, event = heapq.heappop(self._queue)
            self.now = time
            self._handlers[event.kind](event)
        report = self._report()
        logger.info(
            f"{self.cfg.mode.value} M={self.cfg.num_experts} rate={self.cfg.request_rate}: "
            f"throughput {report.throughput:.3f} req/s, "
            f"mean latency {report.latency_mean:.1f} ms"
        )
        return report

    def _utilization(self, resource: Resource, start: float, stop: float, servers: int) -> float:
        busy = sum(
            max(0.0, min(b, stop) - max(a, start)) for a, b in self.busy[resource]
        )
        return busy / (servers * (stop - start))

    def _report(self) -> MetricsReport:
        cfg = self.cfg
        warm_end = cfg.warmup_fraction * cfg.duration
        window = cfg.duration - warm_end
        done = [req for req in self.requests if not math.isnan(req.depart)]
        in_window = sum(warm_end <= req.depart <= cfg.duration for req in done)
        measured = [req for req in done if req.arrival >= warm_end]
        latencies = np.array([req.latency * 1e3 for req in measured])
        if latencies.size:
            stats = (
                float(latencies.mean()),
                float(np.percentile(latencies, 50)),
                float(np.percentile(latencies, 95)),
                float(latencies.std()),
            )
            local = float(np.mean([req.location is sched.Location.END for req in measured]))
            agreement = float(
                np.mean([req.expert == req.reference_expert for req in measured])
            )
        else:
            stats = (math.nan,) * 4
            local = agreement = math.nan
        return MetricsReport(
            mode=cfg.mode,
            seed=cfg.seed,
            num_experts=cfg.num_experts,
            num_groups=cfg.num_groups,
            request_rate=cfg.request_rate,
            link_fluctuation=cfg.link_fluctuation,
            arrivals=len(self.requests),
            completed_requests=in_window,
            total_completed=len(done),
            in_flight=len(self.requests) - len(done),
            throughput=in_window / window,
            latency_mean=stats[0],
            latency_p50=stats[1],
            latency_p95=stats[2],
            latency_std=stats[3],
            bytes_transferred=self.bytes_transferred,
            end_utilization=self._utilization(Resource.END, warm_end, cfg.duration, 1),
            cloud_utilization=self._utilization(
                Resource.CLOUD, warm_end, cfg.duration, cfg.cloud_lanes
            ),
            local_fraction=local,
            accuracy_proxy=agreement,
            trace=self._trace() if cfg.keep_trace else None,
            decisions=list(self.decisions) if cfg.keep_trace else None,
        )

    def _trace(self) -> pd.DataFrame:
        trace = pd.DataFrame([dataclasses.asdict(req) for req in self.requests])
        trace["location"] = [
            req.location.value if req.location is not None else "" for req in self.requests
        ]
        trace["route"] = [
            req.route.value if req.route is not None else "" for req in self.requests
        ]
        trace["latency_ms"] = (trace.depart - trace.arrival) * 1e3
        return trace


def run_simulation(cfg: SimConfig) -> MetricsReport:
    """Simulate one configuration.

    Args:
        cfg: Run configuration.

    Returns:
        Metrics of the run; identical configs give identical reports.
    """
    return EndCloudPipeline(cfg).run()


def run_sweep(
    base: SimConfig, axis: SweepAxis, values: list, jobs: int = 1
) -> list[MetricsReport]:
    """Run one simulation per axis value.

    Point i uses seed base.seed XOR i.

    Args:
        base: Configuration shared by every point.
        axis: Swept field.
        values: Field values.
        jobs: Parallel runs (dask processes when above 1).

    Returns:
        One report per value, in order.
    """
    cast = int if axis is SweepAxis.NUM_EXPERTS else float
    configs = [
        dataclasses.replace(base, seed=base.seed ^ index, **{axis.value: cast(value)})
        for index, value in enumerate(values)
    ]
    for cfg in configs:
        validate_config(cfg)
    if jobs > 1:
        runs = [dask.delayed(run_simulation)(cfg) for cfg in configs]
        return list(dask.compute(*runs, scheduler="processes", num_workers=jobs))
    return [run_simulation(cfg) for cfg in configs]


def reports_to_frame(reports: list[MetricsReport]) -> pd.DataFrame:
    """One row per report."""
    return pd.DataFrame([report.to_record() for report in reports])


def write_report_csv(frame: pd.DataFrame, csv_path: str) -> None:
    """Write a report table with fixed-width floats."""
    frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
