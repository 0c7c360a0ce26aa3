# simoe/moe.py
"""Toy Mixture-of-Experts model.

A bank of two-layer ReLU experts combined by gate probabilities,
y = sum_i g_i(x) E_i(x).

It contains the following functions:
    - `expert_forward(expert, x)` - Returns: w2 relu(w1 x + b1) + b2.
    - `moe_forward(model, x, gate_probs)` - Returns: gate-weighted sum of expert outputs.
    - `top1_forward(model, x)` - Returns: output of the model's Top-1 expert.
    - `seeded_model(seed, num_experts, input_dim, hidden_dim, num_groups)` - Returns: reproducible model.
    - `save_model(model, npz_path)` - Returns: None, writes a fixture.
    - `load_model(npz_path, gate)` - Returns: model from a fixture.
"""

import dataclasses
import functools
import typing
import numpy as np
import simoe.gate as gt
import simoe.linalg as la
from simoe.errors import GateError, ShapeError

FIXTURE_VERSION = 1


@dataclasses.dataclass(frozen=True, eq=False)
class ExpertNet:
    """Feed-forward expert mapping R^d to R^d.

    Attributes:
        index: Expert id.
        w1: Hidden weights (d_hidden x d).
        b1: Hidden bias.
        w2: Output weights (d x d_hidden).
        b2: Output bias.
    """

    index: int
    w1: la.Matrix
    b1: la.Vector
    w2: la.Matrix
    b2: la.Vector

    def __post_init__(self):
        hidden, dim = self.w1.shape
        if (
            self.b1.shape != (hidden,)
            or self.w2.shape != (dim, hidden)
            or self.b2.shape != (dim,)
        ):
            raise ShapeError(f"expert {self.index}", self.w1.shape, self.w2.shape)

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]


@dataclasses.dataclass(frozen=True, eq=False)
class MoeModel:
    """Expert bank plus the gate that weights it.

    Attributes:
        experts: Experts 0..M-1.
        input_dim: d.
        gate: Callable mapping x to a length M probability vector.
    """

    experts: tuple[ExpertNet, ...]
    input_dim: int
    gate: typing.Callable[[la.Vector], la.Vector] | None = None

    def __post_init__(self):
        if not self.experts:
            raise ValueError("a model needs at least one expert")
        if any(expert.input_dim != self.input_dim for expert in self.experts):
            raise ShapeError("MoeModel", (self.input_dim,), self.experts[0].w1.shape)

    @property
    def num_experts(self) -> int:
        return len(self.experts)


def expert_forward(expert: ExpertNet, x: la.Vector) -> la.Vector:
    """Evaluate one expert.

    Args:
        expert: Expert weights.
        x: Input of length d.

    Returns:
        Output of length d.
    """
    x = la.as_vector(x)
    if x.size != expert.input_dim:
        raise ShapeError("expert_forward", expert.w1.shape, x.shape)
    hidden = np.maximum(la.matvec(expert.w1, x) + expert.b1, 0.0)
    return la.matvec(expert.w2, hidden) + expert.b2


def moe_forward(model: MoeModel, x: la.Vector, gate_probs: la.Vector) -> la.Vector:
    """Gate-weighted sum of expert outputs.

    Experts with probability 0 are not evaluated.

    Args:
        model: Expert bank.
        x: Input of length d.
        gate_probs: One probability per expert.

    Returns:
        Combined output of length d.
    """
    gate_probs = la.as_vector(gate_probs)
    if gate_probs.size != model.num_experts:
        raise ShapeError("moe_forward", gate_probs.shape, (model.num_experts,))
    if np.any(gate_probs < 0) or abs(gate_probs.sum() - 1.0) > 1e-9:
        raise GateError(
            f"gate probabilities must be non-negative and sum to 1, got {gate_probs.sum()!r}"
        )
    output = np.zeros(model.input_dim)
    for prob, expert in zip(gate_probs, model.experts):
        if prob == 0.0:
            continue
        output += prob * expert_forward(expert, x)
    return output


def top1_forward(model: MoeModel, x: la.Vector) -> la.Vector:
    """Route x to the most probable expert of the model's gate."""
    if model.gate is None:
        raise ValueError("model has no gate")
    one_hot = np.zeros(model.num_experts)
    one_hot[int(np.argmax(model.gate(x)))] = 1.0
    return moe_forward(model, x, one_hot)


def _seeded_expert(rng: np.random.Generator, index: int, dim: int, hidden: int) -> ExpertNet:
    return ExpertNet(
        index=index,
        w1=rng.normal(0.0, 1.0 / np.sqrt(dim), (hidden, dim)),
        b1=rng.normal(0.0, 0.1, hidden),
        w2=rng.normal(0.0, 1.0 / np.sqrt(hidden), (dim, hidden)),
        b2=rng.normal(0.0, 0.1, dim),
    )


def seeded_model(
    seed: int,
    num_experts: int,
    input_dim: int = 64,
    hidden_dim: int = 128,
    num_groups: int = 1,
) -> MoeModel:
    """Reproducible toy model.

    Args:
        seed: Random seed; the same seed gives identical weights.
        num_experts: M.
        input_dim: d.
        hidden_dim: d_hidden.
        num_groups: Groups of the attached gate (1 gives a flat gate).

    Returns:
        Model with a seeded grouped gate evaluating every group.
    """
    if min(num_experts, input_dim, hidden_dim) < 1:
        raise ValueError("num_experts, input_dim and hidden_dim must be positive")
    rng = np.random.default_rng(seed)
    experts = tuple(
        _seeded_expert(rng, index, input_dim, hidden_dim) for index in range(num_experts)
    )
    params = gt.seeded_gate_params(
        [seed, 1], num_experts, num_groups, input_dim, top_groups=num_groups
    )
    return MoeModel(
        experts=experts,
        input_dim=input_dim,
        gate=functools.partial(gt.gate_probabilities, params),
    )


def save_model(model: MoeModel, npz_path: str) -> None:
    """Write expert weights as a versioned npz fixture."""
    np.savez(
        npz_path,
        format_version=FIXTURE_VERSION,
        w1=np.stack([e.w1 for e in model.experts]),
        b1=np.stack([e.b1 for e in model.experts]),
        w2=np.stack([e.w2 for e in model.experts]),
        b2=np.stack([e.b2 for e in model.experts]),
    )


def load_model(
    npz_path: str, gate: typing.Callable[[la.Vector], la.Vector] | None = None
) -> MoeModel:
    """Read expert weights written by `save_model`.

    Args:
        npz_path: Fixture location.
        gate: Gate to attach; gates are stored with `gate.save_gate_params`.

    Returns:
        The stored model.
    """
    with np.load(npz_path) as fixture:
        if int(fixture["format_version"]) != FIXTURE_VERSION:
            raise ValueError(f"unsupported fixture version in {npz_path}")
        experts = tuple(
            ExpertNet(index, w1, b1, w2, b2)
            for index, (w1, b1, w2, b2) in enumerate(
                zip(fixture["w1"], fixture["b1"], fixture["w2"], fixture["b2"])
            )
        )
    return MoeModel(experts=experts, input_dim=experts[0].input_dim, gate=gate)
