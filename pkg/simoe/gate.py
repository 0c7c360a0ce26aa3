# simoe/gate.py
"""Hardware-aware grouped gate.

The end device keeps only the experts its current resources can hold,
and routes inputs with a two-stage gate: a global softmax over expert
groups, then a softmax inside the most probable groups only.

It contains the following functions:
    - `end_flops_rate(profile)` - Returns: effective end execution rate.
    - `capability_threshold(profile, hardware)` - Returns: compute and memory budgets.
    - `complexity_mismatch(expert, threshold)` - Returns: worst resource ratio minus one.
    - `select_local_experts(experts, threshold, eps_complexity, cap_fraction)` - Returns: local expert ids.
    - `partition_experts(num_experts, num_groups)` - Returns: contiguous group sizes.
    - `seeded_gate_params(seed, num_experts, num_groups, input_dim, top_groups, sigma)` - Returns: gate weights.
    - `group_gate_forward(x, params)` - Returns: fused two-stage gate output.
    - `flat_gate_forward(x, params)` - Returns: single softmax over all experts.
    - `fallback_local_expert(x, params, local_set)` - Returns: gate output restricted to local experts.
    - `gate_probabilities(params, x)` - Returns: fused probabilities only.
    - `top1_route(gate_output, local_set)` - Returns: expert and End/Cloud location.
    - `gate_flops(params, mode)` - Returns: multiply-accumulates of one gate pass.
    - `save_gate_params(params, npz_path)` - Returns: None, writes a fixture.
    - `load_gate_params(npz_path)` - Returns: gate weights from a fixture.
"""

import dataclasses
import enum
import math
import typing
import numpy as np
import simoe.linalg as la
from simoe.errors import ShapeError
from simoe.sched import Location

FIXTURE_VERSION = 1


@dataclasses.dataclass(frozen=True)
class DeviceProfile:
    """Real-time state of the end device.

    Attributes:
        cpu_available: Fraction of nominal compute available.
        mem_available: Free memory (MB).
        power_budget: Fraction of the power envelope available.
        bandwidth: Uplink bandwidth (Mbps).
        nominal_flops_rate: Full-speed compute rate (FLOPs s^-1).
    """

    cpu_available: float = 0.8
    mem_available: float = 512.0
    power_budget: float = 1.0
    bandwidth: float = 300.0
    nominal_flops_rate: float = 6.25e10

    def __post_init__(self):
        for field in dataclasses.fields(self):
            if getattr(self, field.name) < 0:
                raise ValueError(f"{field.name} must be non-negative")
        for name in ("cpu_available", "power_budget"):
            if getattr(self, name) > 1:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclasses.dataclass(frozen=True)
class HardwareModel:
    """Constants of the capability function.

    Attributes:
        base_flops_budget: Per-token FLOPs a fully available device can afford.
        mem_fraction: Share of free memory usable for resident experts.
    """

    base_flops_budget: float = 1.5e7
    mem_fraction: float = 0.15


@dataclasses.dataclass(frozen=True)
class CapabilityThreshold:
    compute_budget: float
    memory_budget: float


@dataclasses.dataclass(frozen=True)
class ExpertDescriptor:
    """Cost of one expert.

    Attributes:
        index: Expert id.
        flops_cost: FLOPs per token.
        memory_cost: Resident size (MB).
    """

    index: int
    flops_cost: float
    memory_cost: float

    def __post_init__(self):
        if not (self.flops_cost > 0 and self.memory_cost > 0):
            raise ValueError(f"expert {self.index}: costs must be positive")


@dataclasses.dataclass(frozen=True, eq=False)
class GroupGateParams:
    """Weights of the two-stage gate.

    Attributes:
        group_sizes: Experts per group, contiguous in expert index.
        group_weights: One (M_k x d) matrix per group.
        group_biases: One length M_k vector per group.
        global_weight: (K x d) group-level matrix.
        global_bias: Length K vector.
        top_groups: Groups evaluated in the second stage.
    """

    group_sizes: tuple[int, ...]
    group_weights: tuple[la.Matrix, ...]
    group_biases: tuple[la.Vector, ...]
    global_weight: la.Matrix
    global_bias: la.Vector
    top_groups: int = 1

    def __post_init__(self):
        num_groups = len(self.group_sizes)
        if self.global_weight.shape[0] != num_groups or self.global_bias.shape != (
            num_groups,
        ):
            raise ShapeError(
                "GroupGateParams", self.global_weight.shape, self.global_bias.shape
            )
        if len(self.group_weights) != num_groups or len(self.group_biases) != num_groups:
            raise ShapeError(
                "GroupGateParams",
                (num_groups,),
                (len(self.group_weights),),
                (len(self.group_biases),),
            )
        for size, weight, bias in zip(
            self.group_sizes, self.group_weights, self.group_biases
        ):
            if weight.shape != (size, self.input_dim) or bias.shape != (size,):
                raise ShapeError("GroupGateParams", weight.shape, bias.shape)
        if not 1 <= self.top_groups <= num_groups:
            raise ValueError(f"top_groups must lie in [1, {num_groups}]")

    @property
    def num_groups(self) -> int:
        return len(self.group_sizes)

    @property
    def num_experts(self) -> int:
        return sum(self.group_sizes)

    @property
    def input_dim(self) -> int:
        return self.global_weight.shape[1]

    @property
    def group_offsets(self) -> tuple[int, ...]:
        return tuple(int(o) for o in np.cumsum((0,) + self.group_sizes[:-1]))

    def group_of(self, expert: int) -> int:
        """Group holding an expert."""
        return int(np.searchsorted(np.cumsum(self.group_sizes), expert, side="right"))


class GateMode(enum.Enum):
    GROUPED = "grouped"
    FLAT = "flat"


@dataclasses.dataclass(frozen=True, eq=False)
class GateOutput:
    """Result of a gate pass.

    Attributes:
        probs: Per-expert probabilities, 0.0 for unevaluated groups.
        selected_expert: Top-1 expert.
        evaluated_groups: Groups whose stage-2 softmax ran, best first.
        flops_used: Multiply-accumulates performed.
    """

    probs: la.Vector
    selected_expert: int
    evaluated_groups: tuple[int, ...]
    flops_used: int


@dataclasses.dataclass(frozen=True)
class RoutingDecision:
    expert: int
    location: Location


def end_flops_rate(profile: DeviceProfile) -> float:
    """Execution rate the end device delivers under its current profile."""
    return profile.nominal_flops_rate * profile.cpu_available * min(profile.power_budget, 1.0)


def capability_threshold(
    profile: DeviceProfile, hardware: HardwareModel = HardwareModel()
) -> CapabilityThreshold:
    """Map a device profile to compute and memory budgets.

    Args:
        profile: Current device state.
        hardware: Base budget and usable memory share.

    Returns:
        compute_budget = cpu * min(power, 1) * base_flops_budget and
        memory_budget = mem_available * mem_fraction.
    """
    return CapabilityThreshold(
        compute_budget=profile.cpu_available
        * min(profile.power_budget, 1.0)
        * hardware.base_flops_budget,
        memory_budget=profile.mem_available * hardware.mem_fraction,
    )


def _ratio(cost: float, budget: float) -> float:
    if budget > 0:
        return cost / budget
    return math.inf


def complexity_mismatch(
    expert: ExpertDescriptor, threshold: CapabilityThreshold
) -> float:
    """How far an expert exceeds the device budgets.

    Args:
        expert: Expert costs.
        threshold: Device budgets.

    Returns:
        max(flops_cost / compute_budget, memory_cost / memory_budget) - 1;
        infinite when a budget is zero.
    """
    return (
        max(
            _ratio(expert.flops_cost, threshold.compute_budget),
            _ratio(expert.memory_cost, threshold.memory_budget),
        )
        - 1.0
    )


def select_local_experts(
    experts: list[ExpertDescriptor],
    threshold: CapabilityThreshold,
    eps_complexity: float = 0.0,
    cap_fraction: float = 0.4,
) -> set[int]:
    """Experts kept on the end device.

    An expert fits when its mismatch is at most eps_complexity. At most
    ceil(cap_fraction * M) of them are kept, lowest mismatch first and
    lower index on ties.

    Args:
        experts: Expert bank.
        threshold: Device budgets.
        eps_complexity: Tolerated mismatch.
        cap_fraction: Largest share of the bank kept locally.

    Returns:
        Ids of the local experts, possibly empty.
    """
    if eps_complexity < 0:
        raise ValueError("eps_complexity must be non-negative")
    if not 0 < cap_fraction <= 1:
        raise ValueError("cap_fraction must lie in (0, 1]")
    cap = math.ceil(round(cap_fraction * len(experts), 9))
    fitting = sorted(
        (mismatch, expert.index)
        for expert in experts
        if (mismatch := complexity_mismatch(expert, threshold)) <= eps_complexity
    )
    return {index for _, index in fitting[:cap]}


def partition_experts(num_experts: int, num_groups: int) -> tuple[int, ...]:
    """Contiguous, as equal as possible, group sizes."""
    if not 1 <= num_groups <= num_experts:
        raise ValueError(f"cannot split {num_experts} experts in {num_groups} groups")
    return tuple(len(chunk) for chunk in np.array_split(np.arange(num_experts), num_groups))


def seeded_gate_params(
    seed: int | typing.Sequence[int],
    num_experts: int,
    num_groups: int,
    input_dim: int,
    top_groups: int = 1,
    sigma: float = 0.02,
) -> GroupGateParams:
    """Gaussian gate weights from a seed.

    Args:
        seed: Seed or seed sequence.
        num_experts: M.
        num_groups: K.
        input_dim: d.
        top_groups: G.
        sigma: Weight standard deviation.

    Returns:
        Gate weights over a contiguous equal partition.
    """
    rng = np.random.default_rng(seed)
    sizes = partition_experts(num_experts, num_groups)
    global_weight = rng.normal(0.0, sigma, (num_groups, input_dim))
    global_bias = rng.normal(0.0, sigma, num_groups)
    weights = tuple(rng.normal(0.0, sigma, (size, input_dim)) for size in sizes)
    biases = tuple(rng.normal(0.0, sigma, size) for size in sizes)
    return GroupGateParams(sizes, weights, biases, global_weight, global_bias, top_groups)


def _check_input(x: la.Vector, params: GroupGateParams, op: str) -> la.Vector:
    x = la.as_vector(x)
    if x.size != params.input_dim:
        raise ShapeError(op, x.shape, params.global_weight.shape)
    return x


def _argmax_over(probs: la.Vector, candidates: np.ndarray) -> int:
    return int(candidates[np.argmax(probs[candidates])])


def group_gate_forward(x: la.Vector, params: GroupGateParams) -> GateOutput:
    """Two-stage grouped gate.

    Stage 1 scores the groups; stage 2 runs only inside the top_groups
    best groups (ties to the lower group id). An expert's probability is
    its group probability times its in-group probability.

    Args:
        x: Input feature (length d).
        params: Gate weights.

    Returns:
        Fused probabilities, Top-1 expert, evaluated groups and MACs used.
    """
    x = _check_input(x, params, "group_gate_forward")
    offsets = params.group_offsets
    probs = np.zeros(params.num_experts)
    evaluated_mask = np.zeros(params.num_experts, dtype=bool)
    with la.count_macs() as counter:
        p_group = la.softmax(la.matvec(params.global_weight, x) + params.global_bias)
        ranked = np.argsort(-p_group, kind="stable")[: params.top_groups]
        for group in ranked:
            start = offsets[group]
            stop = start + params.group_sizes[group]
            p_local = la.softmax(
                la.matvec(params.group_weights[group], x) + params.group_biases[group]
            )
            probs[start:stop] = p_group[group] * p_local
            evaluated_mask[start:stop] = True
    return GateOutput(
        probs=probs,
        selected_expert=_argmax_over(probs, np.flatnonzero(evaluated_mask)),
        evaluated_groups=tuple(int(g) for g in ranked),
        flops_used=counter.macs,
    )


def flat_gate_forward(x: la.Vector, params: GroupGateParams) -> GateOutput:
    """Single softmax over all experts with the stacked group weights.

    Args:
        x: Input feature (length d).
        params: Gate weights; the group-level weights are unused.

    Returns:
        Gate output over every expert.
    """
    x = _check_input(x, params, "flat_gate_forward")
    weight = np.vstack(params.group_weights)
    bias = np.concatenate(params.group_biases)
    with la.count_macs() as counter:
        probs = la.softmax(la.matvec(weight, x) + bias)
    return GateOutput(
        probs=probs,
        selected_expert=int(np.argmax(probs)),
        evaluated_groups=tuple(range(params.num_groups)),
        flops_used=counter.macs,
    )


def fallback_local_expert(
    x: la.Vector, params: GroupGateParams, local_set: set[int]
) -> GateOutput:
    """Gate restricted to the local experts.

    Evaluates every group holding a local expert and picks the most
    probable local expert (ties to the lower index).

    Args:
        x: Input feature (length d).
        params: Gate weights.
        local_set: Experts resident on the end device.

    Returns:
        Gate output whose selected expert is local.
    """
    if not local_set:
        raise ValueError("fallback routing needs at least one local expert")
    x = _check_input(x, params, "fallback_local_expert")
    allowed = np.array(sorted(local_set))
    groups = sorted({params.group_of(int(expert)) for expert in allowed})
    offsets = params.group_offsets
    probs = np.zeros(params.num_experts)
    with la.count_macs() as counter:
        p_group = la.softmax(la.matvec(params.global_weight, x) + params.global_bias)
        for group in groups:
            start = offsets[group]
            p_local = la.softmax(
                la.matvec(params.group_weights[group], x) + params.group_biases[group]
            )
            probs[start : start + params.group_sizes[group]] = p_group[group] * p_local
    return GateOutput(
        probs=probs,
        selected_expert=_argmax_over(probs, allowed),
        evaluated_groups=tuple(groups),
        flops_used=counter.macs,
    )


def gate_probabilities(params: GroupGateParams, x: la.Vector) -> la.Vector:
    return group_gate_forward(x, params).probs


def top1_route(gate_output: GateOutput, local_set: set[int]) -> RoutingDecision:
    """Run the Top-1 expert locally when it is resident, else in the cloud."""
    expert = gate_output.selected_expert
    location = Location.END if expert in local_set else Location.CLOUD
    return RoutingDecision(expert=expert, location=location)


def gate_flops(params: GroupGateParams, mode: GateMode = GateMode.GROUPED) -> int:
    """Multiply-accumulates of one gate pass.

    Args:
        params: Gate weights.
        mode: FLAT scores all M experts at once; GROUPED scores K groups
            then the top_groups largest groups (worst case).

    Returns:
        MAC count.
    """
    d = params.input_dim
    if mode is GateMode.FLAT:
        return params.num_experts * d
    return params.num_groups * d + params.top_groups * max(params.group_sizes) * d


def save_gate_params(params: GroupGateParams, npz_path: str) -> None:
    """Write gate weights as a versioned npz fixture."""
    arrays = {f"group_weight_{k}": w for k, w in enumerate(params.group_weights)}
    arrays |= {f"group_bias_{k}": b for k, b in enumerate(params.group_biases)}
    np.savez(
        npz_path,
        format_version=FIXTURE_VERSION,
        group_sizes=np.array(params.group_sizes),
        top_groups=params.top_groups,
        global_weight=params.global_weight,
        global_bias=params.global_bias,
        **arrays,
    )


def load_gate_params(npz_path: str) -> GroupGateParams:
    """Read gate weights written by `save_gate_params`."""
    with np.load(npz_path) as fixture:
        if int(fixture["format_version"]) != FIXTURE_VERSION:
            raise ValueError(f"unsupported fixture version in {npz_path}")
        sizes = tuple(int(s) for s in fixture["group_sizes"])
        return GroupGateParams(
            group_sizes=sizes,
            group_weights=tuple(fixture[f"group_weight_{k}"] for k in range(len(sizes))),
            group_biases=tuple(fixture[f"group_bias_{k}"] for k in range(len(sizes))),
            global_weight=fixture["global_weight"],
            global_bias=fixture["global_bias"],
            top_groups=int(fixture["top_groups"]),
        )
