# simoe/verify.py
"""Property suite behind `simoe verify`.

Each property checks an implementation against an independent oracle
(explicit loops, LAPACK, exhaustive search, fine-step integration) or
checks an ordering between simulated deployment modes.

It contains the following functions:
    - `run_properties(name_filter, output_dir)` - Returns: one result per property.
    - `results_table(results)` - Returns: pass/fail table.
"""

import dataclasses
import logging
import math
import os
import typing
import numpy as np
import pandas as pd
import simoe.codec as codec
import simoe.gate as gt
import simoe.linalg as la
import simoe.moe as moe
import simoe.sched as sched
import simoe.sim as sim
import simoe.user as user
from simoe.config import AblationFlags, Mode, SimConfig
from simoe.errors import PropertyFailure

logger = logging.getLogger(__name__)

PropertyCheck = typing.Callable[[str | None], str]
PROPERTIES: dict[str, PropertyCheck] = {}
GAP_CSV = "brute_force_gap.csv"

# Published figures the simulated magnitudes are printed against, not checked.
PUBLISHED = {
    "mode_dominance": "throughput 2.2x (cloud) to 5.1x (edge); latency -53% to -67%",
    "ablation_directionality": (
        "no gate: latency +23%; no codec: throughput -38%, latency +45%"
    ),
}
_current = ""


@dataclasses.dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str

    @property
    def published(self) -> str:
        return PUBLISHED.get(self.name, "")


def _property(name: str) -> typing.Callable[[PropertyCheck], PropertyCheck]:
    def register(check: PropertyCheck) -> PropertyCheck:
        PROPERTIES[name] = check
        return check

    return register


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise PropertyFailure(_current, message)


@_property("matmul_oracle")
def _matmul_oracle(output_dir: str | None) -> str:
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        a = rng.normal(size=(3, 4))
        b = rng.normal(size=(4, 2))
        naive = np.zeros((3, 2))
        for i in range(3):
            for j in range(2):
                for k in range(4):
                    naive[i, j] += a[i, k] * b[k, j]
        worst = max(worst, float(np.abs(la.matmul(a, b) - naive).max()))
    _check(worst < 1e-12, f"max deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


@_property("svd_oracle")
def _svd_oracle(output_dir: str | None) -> str:
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        a = rng.normal(size=(8, 6))
        u, s, v = la.truncated_svd(a, 2)
        full = np.linalg.svd(a, compute_uv=False)
        expected = math.sqrt(float(np.sum(full[2:] ** 2)))
        error = la.frobenius_norm(a - la.low_rank(u, s, v))
        worst = max(worst, abs(error - expected) / expected)
        _check(np.abs(u.T @ u - np.eye(2)).max() < 1e-8, "U columns not orthonormal")
    _check(worst < 1e-8, f"relative error gap {worst:.3e}")
    return f"relative gap {worst:.1e}"


@_property("moe_combiner")
def _moe_combiner(output_dir: str | None) -> str:
    rng = np.random.default_rng(2)
    model = moe.seeded_model(7, 8, input_dim=16, hidden_dim=32)
    worst = 0.0
    for _ in range(20):
        x = rng.normal(size=16)
        probs = rng.dirichlet(np.ones(8))
        expected = sum(p * moe.expert_forward(e, x) for p, e in zip(probs, model.experts))
        worst = max(worst, float(np.abs(moe.moe_forward(model, x, probs) - expected).max()))
    _check(worst < 1e-10, f"max deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


@_property("gate_normalization")
def _gate_normalization(output_dir: str | None) -> str:
    rng = np.random.default_rng(3)
    for case in range(1000):
        num_experts = int(rng.choice([8, 16, 32, 64]))
        num_groups = int(rng.choice([1, 2, 4, 8]))
        params = gt.seeded_gate_params(case, num_experts, num_groups, 16, top_groups=num_groups)
        x = rng.normal(size=16)
        full = gt.group_gate_forward(x, params).probs.sum()
        _check(abs(full - 1.0) < 1e-9, f"case {case}: full-mode sum {full!r}")
        if num_groups > 1:
            partial_params = dataclasses.replace(
                params, top_groups=int(rng.integers(1, num_groups))
            )
            partial = gt.group_gate_forward(x, partial_params).probs.sum()
            _check(0.0 < partial <= 1.0 + 1e-12, f"case {case}: partial sum {partial!r}")
    return "1000 cases"


@_property("two_stage_equivalence")
def _two_stage_equivalence(output_dir: str | None) -> str:
    rng = np.random.default_rng(4)
    worst = 0.0
    for case in range(100):
        num_experts = int(rng.choice([8, 16, 32, 64]))
        params = gt.seeded_gate_params(case, num_experts, 1, 32)
        x = rng.normal(size=32)
        grouped = gt.group_gate_forward(x, params).probs
        flat = gt.flat_gate_forward(x, params).probs
        worst = max(worst, float(np.abs(grouped - flat).max()))
    _check(worst < 1e-12, f"max deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


@_property("gate_cost_reduction")
def _gate_cost_reduction(output_dir: str | None) -> str:
    params = gt.seeded_gate_params(0, 64, 4, 256, top_groups=1)
    x = np.random.default_rng(5).normal(size=256)
    with la.count_macs() as grouped:
        gt.group_gate_forward(x, params)
    with la.count_macs() as flat:
        gt.flat_gate_forward(x, params)
    _check(grouped.macs == gt.gate_flops(params, gt.GateMode.GROUPED) == 5120,
           f"grouped gate used {grouped.macs} MACs")
    _check(flat.macs == gt.gate_flops(params, gt.GateMode.FLAT) == 16384,
           f"flat gate used {flat.macs} MACs")
    return f"{flat.macs}/{grouped.macs} = {flat.macs / grouped.macs:.1f}x"


def _random_bank(rng: np.random.Generator, num_experts: int) -> list[gt.ExpertDescriptor]:
    return [
        gt.ExpertDescriptor(i, float(rng.uniform(1e6, 3e7)), float(rng.uniform(1.0, 120.0)))
        for i in range(num_experts)
    ]


def _random_profile(rng: np.random.Generator) -> gt.DeviceProfile:
    return gt.DeviceProfile(
        cpu_available=float(rng.uniform(0, 1)),
        mem_available=float(rng.uniform(0, 1024)),
        power_budget=float(rng.uniform(0, 1)),
        bandwidth=float(rng.uniform(1, 500)),
    )


@_property("local_expert_cap")
def _local_expert_cap(output_dir: str | None) -> str:
    rng = np.random.default_rng(6)
    hardware = gt.HardwareModel()
    for case in range(1000):
        num_experts = int(rng.choice([8, 16, 32, 64]))
        bank = _random_bank(rng, num_experts)
        small = _random_profile(rng)
        large = gt.DeviceProfile(
            cpu_available=float(rng.uniform(small.cpu_available, 1)),
            mem_available=small.mem_available + float(rng.uniform(0, 512)),
            power_budget=float(rng.uniform(small.power_budget, 1)),
            bandwidth=small.bandwidth + float(rng.uniform(0, 100)),
        )
        before = gt.select_local_experts(bank, gt.capability_threshold(small, hardware))
        after = gt.select_local_experts(bank, gt.capability_threshold(large, hardware))
        cap = math.ceil(round(0.4 * num_experts, 9))
        _check(len(before) <= cap and len(after) <= cap, f"case {case}: cap {cap} exceeded")
        _check(len(after) >= len(before), f"case {case}: local set shrank")
    return "1000 paired profiles"


@_property("codec_optimality")
def _codec_optimality(output_dir: str | None) -> str:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        block = codec.FeatureBlock(rng.normal(size=(1, 16, 16)))
        fitted = codec.fit_projections([block], 4)
        error = codec.reconstruction_loss(block, codec.decode(codec.encode(block, fitted), fitted))
        sigma = np.linalg.svd(block.data[0], compute_uv=False)
        optimum = float(np.sum(sigma[4:] ** 2))
        worst = max(worst, abs(error - optimum) / optimum)
    _check(worst < 1e-8, f"relative gap to optimum {worst:.3e}")
    for _ in range(20):
        left = rng.normal(size=(16, 4))
        right = rng.normal(size=(16, 4))
        block = codec.FeatureBlock((left @ right.T)[None])
        fitted = codec.fit_projections([block], 4)
        error = codec.reconstruction_loss(block, codec.decode(codec.encode(block, fitted), fitted))
        _check(error < 1e-10 * max(1.0, la.frobenius_norm(block.data[0]) ** 2),
               f"rank-4 block error {error:.3e}")
    return f"relative gap {worst:.1e}"


@_property("scheduler_rule_compliance")
def _scheduler_rule_compliance(output_dir: str | None) -> str:
    rng = np.random.default_rng(8)
    decisions_seen = 0
    for case in range(10000):
        tasks, params = sched.random_instance(rng, int(rng.integers(1, 51)))
        decisions = sched.place_tasks(tasks, params=params)
        for decision in decisions:
            _check(sched.replay_decision(decision, params) is decision.location,
                   f"instance {case}: task {decision.task_id} does not replay")
        _check(decisions[-1].load_end_after <= params.t_end,
               f"instance {case}: end load above t_end")
        decisions_seen += len(decisions)
    return f"{decisions_seen} decisions replayed"


@_property("brute_force_gap")
def _brute_force_gap(output_dir: str | None) -> str:
    settings = {"num_instances": 500, "max_tasks": 12, "seed": 9}
    report = sched.gap_report(**settings)
    _check(bool((report.optimal <= report.greedy).all()), "exhaustive optimum above greedy")
    summary = sched.summarize_gaps(report)
    if output_dir is not None:
        user.check_create_savedir(output_dir)
        report.to_csv(os.path.join(output_dir, GAP_CSV), index=False,
                      float_format=sim.FLOAT_FORMAT, lineterminator="\n")
        replay = settings | {"command": "simoe verify --filter brute_force_gap"}
        user.write_manifest(
            user.build_manifest(replay, settings["seed"], user.content_hash(replay), [GAP_CSV]),
            os.path.join(output_dir, "brute_force_gap_manifest.json"),
        )
    return f"mean {summary['mean']:.4f}, p95 {summary['p95']:.4f}"


@_property("comm_time_integration")
def _comm_time_integration(output_dir: str | None) -> str:
    cfg = SimConfig(link_fluctuation=0.4)
    step = 1e-3
    worst = 0.0
    for t_start, nbytes in ((0.3, 30_000_000), (2.95, 12_000_000), (7.0, 80_000_000)):
        remaining = 8.0 * nbytes
        k = 0
        while True:
            rate = sim.bandwidth_at(t_start + (k + 0.5) * step, cfg) * 1e6
            if rate * step >= remaining:
                elapsed = k * step + remaining / rate
                break
            remaining -= rate * step
            k += 1
        worst = max(worst, abs(elapsed - sim.comm_time(nbytes, t_start, cfg)))
    _check(worst < 1e-6, f"deviation {worst:.3e} s")
    return f"deviation {worst:.1e} s"


def _run(**changes) -> sim.MetricsReport:
    return sim.run_simulation(dataclasses.replace(SimConfig(), **changes))


@_property("mode_dominance")
def _mode_dominance(output_dir: str | None) -> str:
    gains = {Mode.CLOUD_ONLY: [], Mode.EDGE_ONLY: []}
    reductions = []
    for num_experts in (8, 16, 32, 64):
        reports = {mode: _run(mode=mode, num_experts=num_experts) for mode in Mode}
        ours = reports[Mode.COLLABORATIVE]
        others = [reports[Mode.CLOUD_ONLY], reports[Mode.EDGE_ONLY]]
        _check(ours.throughput >= max(r.throughput for r in others),
               f"M={num_experts}: collaborative throughput {ours.throughput:.3f}")
        _check(ours.latency_mean <= min(r.latency_mean for r in others),
               f"M={num_experts}: collaborative latency {ours.latency_mean:.1f} ms")
        for mode in gains:
            gains[mode].append(ours.throughput / reports[mode].throughput)
            reductions.append(1.0 - ours.latency_mean / reports[mode].latency_mean)
    spans = ", ".join(
        f"vs {mode.value} {min(g):.2f}x-{max(g):.2f}x" for mode, g in gains.items()
    )
    return (
        f"throughput {spans}; "
        f"latency -{min(reductions):.0%} to -{max(reductions):.0%}"
    )


@_property("load_scalability")
def _load_scalability(output_dir: str | None) -> str:
    rates = (2.0, 4.0, 6.0, 8.0, 10.0)
    ours = [_run(request_rate=rate) for rate in rates]
    cloud = [_run(request_rate=rate, mode=Mode.CLOUD_ONLY) for rate in rates]
    throughputs = [r.throughput for r in ours]
    _check(all(b >= a - 1e-9 for a, b in zip(throughputs, throughputs[1:])),
           f"throughput not non-decreasing: {throughputs}")
    growth = ours[-1].latency_mean / ours[0].latency_mean
    cloud_growth = cloud[-1].latency_mean / cloud[0].latency_mean
    _check(growth < cloud_growth, f"latency growth {growth:.2f} vs cloud {cloud_growth:.2f}")
    return f"latency growth {growth:.2f} vs {cloud_growth:.2f}"


@_property("fluctuation_robustness")
def _fluctuation_robustness(output_dir: str | None) -> str:
    edge = []
    for fluctuation in (0.0, 0.1, 0.2, 0.3, 0.4):
        ours = _run(link_fluctuation=fluctuation)
        edge.append(_run(link_fluctuation=fluctuation, mode=Mode.EDGE_ONLY).latency_mean)
        if fluctuation >= 0.2:
            cloud = _run(link_fluctuation=fluctuation, mode=Mode.CLOUD_ONLY)
            _check(ours.latency_std <= cloud.latency_std,
                   f"fluctuation {fluctuation}: std {ours.latency_std:.1f} ms")
    _check(max(edge) - min(edge) < 1e-9, f"edge-only latency varies: {edge}")
    return "edge-only invariant"


@_property("ablation_directionality")
def _ablation_directionality(output_dir: str | None) -> str:
    full = _run()
    no_gate = _run(ablation=AblationFlags(disable_hlggn=True))
    no_codec = _run(ablation=AblationFlags(disable_poecc=True))
    _check(no_gate.latency_mean > full.latency_mean, "disable_hlggn did not raise latency")
    _check(no_codec.throughput < full.throughput, "disable_poecc did not lower throughput")
    _check(no_codec.latency_mean > full.latency_mean, "disable_poecc did not raise latency")
    return (
        f"no gate: latency +{no_gate.latency_mean / full.latency_mean - 1:.0%}; "
        f"no codec: throughput -{1 - no_codec.throughput / full.throughput:.0%}, "
        f"latency +{no_codec.latency_mean / full.latency_mean - 1:.0%}"
    )


@_property("edge_expert_scaling")
def _edge_expert_scaling(output_dir: str | None) -> str:
    base = dataclasses.replace(SimConfig(), mode=Mode.EDGE_ONLY)
    reports = sim.run_sweep(base, sim.SweepAxis.NUM_EXPERTS, [8, 16, 32, 64])
    throughputs = [r.throughput for r in reports]
    _check(all(b <= a + 1e-9 for a, b in zip(throughputs, throughputs[1:])),
           f"edge-only throughput rises with M: {throughputs}")
    return ", ".join(f"{t:.2f}" for t in throughputs)


@_property("determinism")
def _determinism(output_dir: str | None) -> str:
    first = sim.reports_to_frame([_run()]).to_csv(float_format=sim.FLOAT_FORMAT)
    second = sim.reports_to_frame([_run()]).to_csv(float_format=sim.FLOAT_FORMAT)
    _check(first == second, "reports differ between identical runs")
    return "identical reports"


def run_properties(
    name_filter: str | None = None, output_dir: str | None = None
) -> list[PropertyResult]:
    """Run the registered properties.

    Args:
        name_filter: Only run properties whose name contains it.
        output_dir: Where report artifacts are written, None skips them.

    Returns:
        One result per property run.
    """
    global _current
    results = []
    for name, check in PROPERTIES.items():
        if name_filter and name_filter not in name:
            continue
        _current = name
        logger.info(f"Checking {name}")
        try:
            results.append(PropertyResult(name, True, check(output_dir)))
        except PropertyFailure as failure:
            results.append(PropertyResult(name, False, str(failure)))
        except Exception as error:
            logger.debug(f"{name} raised", exc_info=True)
            results.append(PropertyResult(name, False, f"{type(error).__name__}: {error}"))
    return results


def results_table(results: list[PropertyResult]) -> pd.DataFrame:
    """Pass/fail table of property results."""
    return pd.DataFrame(
        {
            "property": [r.name for r in results],
            "status": ["PASS" if r.passed else "FAIL" for r in results],
            "detail": [r.detail for r in results],
            "published": [r.published for r in results],
        }
    )
