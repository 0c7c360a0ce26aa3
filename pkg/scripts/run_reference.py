"""
This is an example on how to use simoe
to simulate the reference configuration in every deployment mode
"""

import simoe.config as cf
import simoe.sim as sim
from simoe.simoe import Experiment


if __name__ == "__main__":
    config_path = "../configs/reference.yaml"

    reports = []
    for mode in cf.Mode:
        cfg = cf.load_config(config_path, overrides=[f"mode={mode.value}"])
        experiment = Experiment(cfg, name=f"reference_{mode.value}")
        print(experiment)
        experiment.to_csv(f"../results/{experiment.name}")
        reports.append(experiment.run())

    table = sim.reports_to_frame(reports)
    print(table[["mode", "throughput", "latency_mean", "latency_p95", "bytes"]])
