import pytest
from hypothesis import given
from hypothesis import strategies as st
from simoe.gate import (
    CapabilityThreshold,
    ExpertDescriptor,
    select_local_experts,
)


def bank(costs: list[float]) -> list[ExpertDescriptor]:
    return [ExpertDescriptor(i, cost, 1.0) for i, cost in enumerate(costs)]


def test_select_local_experts_cap_and_order() -> None:
    experts = bank([5.0, 1.0, 3.0, 1.0, 50.0, 2.0, 4.0, 9.0, 8.0, 7.0])
    threshold = CapabilityThreshold(compute_budget=10.0, memory_budget=10.0)
    # nine fit, the cap keeps ceil(0.4 * 10) = 4 cheapest, lower index on ties
    assert select_local_experts(experts, threshold) == {1, 3, 5, 2}


def test_select_local_experts_eps() -> None:
    experts = bank([10.0, 11.0, 12.0])
    threshold = CapabilityThreshold(compute_budget=10.0, memory_budget=10.0)
    assert select_local_experts(experts, threshold, cap_fraction=1.0) == {0}
    assert select_local_experts(
        experts, threshold, eps_complexity=0.15, cap_fraction=1.0
    ) == {0, 1}


def test_select_local_experts_empty() -> None:
    experts = bank([10.0, 20.0])
    threshold = CapabilityThreshold(compute_budget=0.0, memory_budget=10.0)
    assert select_local_experts(experts, threshold) == set()


def test_select_local_experts_invalid() -> None:
    threshold = CapabilityThreshold(1.0, 1.0)
    with pytest.raises(ValueError):
        select_local_experts(bank([1.0]), threshold, eps_complexity=-0.1)
    with pytest.raises(ValueError):
        select_local_experts(bank([1.0]), threshold, cap_fraction=0.0)


@given(
    costs=st.lists(st.floats(0.1, 100.0), min_size=1, max_size=40),
    low=st.floats(0.0, 100.0),
    extra=st.floats(0.0, 100.0),
)
def test_select_local_experts_monotone(costs: list[float], low: float, extra: float) -> None:
    experts = bank(costs)
    small = select_local_experts(experts, CapabilityThreshold(low, 10.0))
    large = select_local_experts(experts, CapabilityThreshold(low + extra, 10.0))
    assert len(small) <= len(large)
    assert all(experts[i].flops_cost <= low * (1 + 1e-12) for i in small)
