import dataclasses
import pytest
from simoe.config import Mode, SimConfig, validate_config
from simoe.errors import ConfigError
from simoe.gate import DeviceProfile


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"num_experts": 12}, "num_experts"),
        ({"request_rate": 3.0}, "request_rate"),
        ({"link_fluctuation": 0.25}, "link_fluctuation"),
        ({"num_groups": 64}, "num_groups"),
        ({"top_groups": 5}, "top_groups"),
        ({"codec_rank": 0}, "codec_rank"),
        ({"duration": 0.0}, "duration"),
        ({"warmup_fraction": 1.0}, "warmup_fraction"),
        ({"expert_cost_spread": (2.0, 1.0)}, "expert_cost_spread"),
        ({"device": DeviceProfile(cpu_available=0.0)}, "device"),
    ],
)
def test_validate_config_rejects(changes: dict, field: str) -> None:
    with pytest.raises(ConfigError) as error:
        validate_config(dataclasses.replace(SimConfig(), **changes))
    assert error.value.field == field


def test_validate_config_allow_override() -> None:
    cfg = dataclasses.replace(
        SimConfig(), num_experts=12, request_rate=3.0, link_fluctuation=0.25, allow_override=True
    )
    validate_config(cfg)


def test_validate_config_cloud_only_without_end_compute() -> None:
    cfg = dataclasses.replace(
        SimConfig(), mode=Mode.CLOUD_ONLY, device=DeviceProfile(cpu_available=0.0)
    )
    validate_config(cfg)
