"""
This is an example on how to use simoe
to sweep the offered load and compare throughput and latency per mode
"""

from simoe.simoe import ExperimentMatrix


if __name__ == "__main__":
    matrix = ExperimentMatrix.from_file("../configs/modes_rates.yaml")
    print(matrix)
    results = matrix.run(jobs=4).isel(seed=0)

    print("Throughput (req/s)")
    print(results.throughput.to_pandas().round(2))
    print("Mean latency (ms)")
    print(results.latency_mean.to_pandas().round(1))

    matrix.to_csv("../results", jobs=4)
