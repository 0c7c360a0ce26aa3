import math
import pytest
from simoe.gate import (
    DeviceProfile,
    HardwareModel,
    ExpertDescriptor,
    CapabilityThreshold,
    capability_threshold,
    complexity_mismatch,
    end_flops_rate,
)


def test_capability_threshold_reference_device() -> None:
    threshold = capability_threshold(DeviceProfile())
    assert threshold.compute_budget == pytest.approx(1.2e7)
    assert threshold.memory_budget == pytest.approx(76.8)
    assert end_flops_rate(DeviceProfile()) == pytest.approx(5e10)


def test_capability_threshold_custom_hardware() -> None:
    profile = DeviceProfile(cpu_available=0.5, mem_available=100.0, power_budget=0.5)
    threshold = capability_threshold(profile, HardwareModel(1e6, 0.5))
    assert threshold.compute_budget == pytest.approx(2.5e5)
    assert threshold.memory_budget == pytest.approx(50.0)


def test_device_profile_validation() -> None:
    with pytest.raises(ValueError):
        DeviceProfile(cpu_available=1.5)
    with pytest.raises(ValueError):
        DeviceProfile(mem_available=-1.0)


def test_complexity_mismatch() -> None:
    threshold = CapabilityThreshold(compute_budget=100.0, memory_budget=10.0)
    assert complexity_mismatch(ExpertDescriptor(0, 50.0, 10.0), threshold) == 0.0
    assert complexity_mismatch(ExpertDescriptor(1, 200.0, 1.0), threshold) == 1.0
    zero = CapabilityThreshold(compute_budget=0.0, memory_budget=10.0)
    assert math.isinf(complexity_mismatch(ExpertDescriptor(2, 1.0, 1.0), zero))
