import dataclasses
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from simoe.errors import ShapeError
from simoe.gate import (
    GateMode,
    seeded_gate_params,
    group_gate_forward,
    flat_gate_forward,
    fallback_local_expert,
    gate_flops,
    partition_experts,
)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    num_experts=st.sampled_from([8, 16, 32, 64]),
    num_groups=st.sampled_from([1, 2, 4, 8]),
    data=st.data(),
)
def test_group_gate_forward_distribution(
    seed: int, num_experts: int, num_groups: int, data
) -> None:
    top_groups = data.draw(st.integers(1, num_groups))
    params = seeded_gate_params(seed, num_experts, num_groups, 16, top_groups, sigma=1.0)
    x = np.random.default_rng(seed).normal(size=16)
    out = group_gate_forward(x, params)
    assert np.all(out.probs >= 0.0)
    assert len(out.evaluated_groups) == top_groups
    assert params.group_of(out.selected_expert) in out.evaluated_groups
    assert out.flops_used <= gate_flops(params)
    if top_groups == num_groups:
        assert abs(out.probs.sum() - 1.0) <= 1e-12
        assert out.selected_expert == int(np.argmax(out.probs))
    else:
        assert out.probs.sum() <= 1.0 + 1e-12


def test_group_gate_forward_single_group_equals_flat() -> None:
    params = seeded_gate_params(7, 16, 1, 12, sigma=0.5)
    x = np.linspace(-2.0, 2.0, 12)
    grouped = group_gate_forward(x, params)
    flat = flat_gate_forward(x, params)
    assert np.allclose(grouped.probs, flat.probs, atol=1e-12)
    assert grouped.selected_expert == flat.selected_expert


def test_group_gate_forward_shape_error() -> None:
    params = seeded_gate_params(0, 8, 2, 4)
    with pytest.raises(ShapeError):
        group_gate_forward(np.ones(5), params)


def test_group_gate_params_group_count() -> None:
    params = seeded_gate_params(0, 8, 2, 4)
    with pytest.raises(ShapeError):
        dataclasses.replace(params, group_weights=params.group_weights[:1])
    with pytest.raises(ShapeError):
        dataclasses.replace(params, group_biases=params.group_biases + params.group_biases)


def test_gate_flops_reduction() -> None:
    params = seeded_gate_params(0, 32, 4, 768)
    x = np.ones(768)
    assert gate_flops(params, GateMode.FLAT) == 32 * 768
    assert gate_flops(params) == 4 * 768 + 8 * 768
    assert group_gate_forward(x, params).flops_used == gate_flops(params)
    assert flat_gate_forward(x, params).flops_used == gate_flops(params, GateMode.FLAT)


def test_partition_experts() -> None:
    assert partition_experts(10, 3) == (4, 3, 3)
    with pytest.raises(ValueError):
        partition_experts(2, 3)


def test_fallback_local_expert() -> None:
    params = seeded_gate_params(4, 16, 4, 8, sigma=1.0)
    x = np.random.default_rng(4).normal(size=8)
    out = fallback_local_expert(x, params, {1, 9, 10})
    assert out.selected_expert in {1, 9, 10}
    assert out.evaluated_groups == (0, 2)
    best = max({1, 9, 10}, key=lambda e: (out.probs[e], -e))
    assert out.selected_expert == best
    with pytest.raises(ValueError):
        fallback_local_expert(x, params, set())
