import numpy as np
from simoe.gate import GateOutput, top1_route, seeded_gate_params, save_gate_params, load_gate_params, group_gate_forward
from simoe.sched import Location


def test_top1_route() -> None:
    out = GateOutput(probs=np.array([0.1, 0.7, 0.2]), selected_expert=1,
                     evaluated_groups=(0,), flops_used=3)
    assert top1_route(out, {1, 2}).location is Location.END
    assert top1_route(out, {0}).location is Location.CLOUD
    assert top1_route(out, set()).expert == 1


def test_save_gate_params(tmp_path) -> None:
    params = seeded_gate_params([3, 1], 12, 3, 5, top_groups=2)
    fixture = str(tmp_path / "gate.npz")
    save_gate_params(params, fixture)
    loaded = load_gate_params(fixture)
    assert loaded.group_sizes == (4, 4, 4)
    assert loaded.top_groups == 2
    x = np.arange(5.0)
    assert np.array_equal(group_gate_forward(x, loaded).probs,
                          group_gate_forward(x, params).probs)
