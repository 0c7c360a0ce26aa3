# simoe/simoe.py
"""SIMOE: SImulated Mixture-of-Experts end-cloud pipeline.

SIMOE simulates Mixture-of-Experts inference split between an end device
and the cloud, and reports throughput and latency of each deployment mode.

This modules defined the classes used by simoe to run experiments:
    - `Experiment` - Class to run one simulation and save its report.
    - `ExperimentMatrix` - Class to run the cartesian product of configuration axes.
"""

import copy
import itertools
import logging
import math
import os
import dask
import pandas as pd
import xarray as xr
import yaml
import simoe.config as cf
import simoe.sched as sched
import simoe.sim as sim
import simoe.user as user
from simoe.errors import ConfigError

logger = logging.getLogger(__name__)


class Experiment:
    """One simulation run.

    Attributes:
        name: Name of the experiment.
        config: Run configuration.
    """

    def __init__(self, config: cf.SimConfig, name: str = "experiment"):
        """Create the Experiment object.

        Args:
            config: Validated run configuration.
            name: Name of the experiment.
        """
        self.name = name
        self.config = config
        self._report: sim.MetricsReport | None = None

    def __str__(self):
        """Print summary of Experiment attributes.

        Returns:
            Print name, mode, experts, load and link of the run.
        """
        cfg = self.config
        return (
            f"Experiment: {self.name}\n"
            f"Mode: {cfg.mode.value}\n"
            f"Experts: {cfg.num_experts} in {cfg.num_groups} groups\n"
            f"Request rate: {cfg.request_rate} req/s for {cfg.duration} s\n"
            f"Link: {cfg.link_mbps_mean} Mbps +/- {cfg.link_fluctuation:.0%}\n"
        )

    def run(self) -> sim.MetricsReport:
        """Simulate the run once and keep its report."""
        if self._report is None:
            self._report = sim.run_simulation(self.config)
        return self._report

    def report(self) -> pd.DataFrame:
        """Metrics as a one-row table."""
        return sim.reports_to_frame([self.run()])

    def manifest(self, outputs: list[str]) -> dict:
        return user.build_manifest(
            cf.config_to_dict(self.config),
            self.config.seed,
            cf.config_hash(self.config),
            outputs,
        )

    def to_csv(self, path: str = "../results") -> list[str]:
        """Save report, manifest and, when kept, the trace and decisions.

        Args:
            path: Directory to save the files.

        Returns:
            Paths of the written files.
        """
        user.check_create_savedir(path)
        report = self.run()
        written = {"report.csv": self.report()}
        if report.trace is not None:
            written["trace.csv"] = report.trace
        for file_name, frame in written.items():
            sim.write_report_csv(frame, os.path.join(path, file_name))
        if report.decisions is not None:
            sched.write_decisions(report.decisions, os.path.join(path, "decisions.csv"))
            written["decisions.csv"] = None
        manifest_path = os.path.join(path, "manifest.json")
        user.write_manifest(self.manifest(list(written)), manifest_path)
        return [os.path.join(path, name) for name in written] + [manifest_path]


class ExperimentMatrix:
    """Cartesian product of configuration axes and seeds.

    Attributes:
        name: Name of the matrix.
        base: Raw base configuration.
        axes: Dotted config paths and their values.
        seeds: Seeds run at every point.
        max_runs: Largest number of runs accepted.
    """

    def __init__(
        self,
        base: dict,
        axes: dict[str, list],
        seeds: list[int],
        max_runs: int = 500,
        name: str = "matrix",
    ):
        """Create the ExperimentMatrix object.

        Args:
            base: Raw base configuration mapping.
            axes: Keys are dotted config paths, values the swept values.
            seeds: Seeds run at every point.
            max_runs: Largest number of runs accepted.
            name: Name of the matrix.
        """
        if not seeds:
            raise ConfigError("seeds", "at least one seed is needed")
        if not isinstance(axes, dict):
            raise ConfigError("axes", "must map config paths to lists of values")
        for axis, values in axes.items():
            if axis == "seed":
                raise ConfigError("axes.seed", "sweep seeds with the seeds list")
            if not isinstance(values, list):
                raise ConfigError(f"axes.{axis}", "must be a list of values")
            if not values or len(set(map(str, values))) != len(values):
                raise ConfigError(f"axes.{axis}", "values must be non-empty and distinct")
        runs = math.prod(len(values) for values in axes.values()) * len(seeds)
        if runs > max_runs:
            raise ConfigError(
                "max_runs", f"matrix has {runs} runs, above the cap of {max_runs}"
            )
        self.name = name
        self.base = base
        self.axes = axes
        self.seeds = list(seeds)
        self.max_runs = max_runs

    @classmethod
    def from_file(cls, matrix_path: str) -> "ExperimentMatrix":
        """Read a matrix file or the manifest of a previous sweep.

        The YAML file holds `base` (config path relative to the matrix
        file, or an inline mapping), `axes`, optional `seeds` (default:
        the base seed), optional `max_runs` and optional `name`. A sweep
        manifest carries the same keys under `config` and its seeds
        under `seed`.

        Args:
            matrix_path: Location of the matrix file.

        Returns:
            The experiment matrix.
        """
        with open(matrix_path) as matrix_file:
            try:
                matrix = yaml.safe_load(matrix_file)
            except yaml.YAMLError as error:
                raise ConfigError("matrix", f"cannot parse {matrix_path}") from error
        if isinstance(matrix, dict) and isinstance(matrix.get("config"), dict):
            matrix = matrix["config"] | {"seeds": matrix.get("seed")}
        if not isinstance(matrix, dict) or "base" not in matrix or "axes" not in matrix:
            raise ConfigError("matrix", "needs base and axes")
        if isinstance(matrix["base"], dict):
            base = matrix["base"]
        else:
            base_path = os.path.join(os.path.dirname(matrix_path), str(matrix["base"]))
            base = cf.read_config_dict(base_path)
        seeds = matrix.get("seeds") or [base.get("seed", 42)]
        if not isinstance(seeds, list):
            seeds = [seeds]
        return cls(
            base=base,
            axes=matrix["axes"],
            seeds=seeds,
            max_runs=matrix.get("max_runs", 500),
            name=matrix.get("name", os.path.splitext(os.path.basename(matrix_path))[0]),
        )

    def __str__(self):
        axes = ", ".join(f"{axis} ({len(values)})" for axis, values in self.axes.items())
        return (
            f"Matrix: {self.name}\n"
            f"Axes: {axes}\n"
            f"Seeds: {self.seeds}\n"
            f"Runs: {len(self.points())}\n"
        )

    def points(self) -> list[dict]:
        """Axis values and seed of every run, in product order."""
        return [
            dict(zip(self.axes, values)) | {"seed": seed}
            for values in itertools.product(*self.axes.values())
            for seed in self.seeds
        ]

    def configs(self) -> list[cf.SimConfig]:
        """Validated configuration of every run."""
        configs = []
        for point in self.points():
            data = copy.deepcopy(self.base)
            for key, value in point.items():
                cf.set_field(data, key, value)
            configs.append(cf.config_from_dict(data))
        return configs

    def matrix_hash(self) -> str:
        return user.content_hash({"base": self.base, "axes": self.axes, "seeds": self.seeds})

    def report(self, jobs: int = 1) -> pd.DataFrame:
        """Run every point and tabulate the metrics.

        Args:
            jobs: Parallel runs (dask processes when above 1).

        Returns:
            One row per run, sorted by axes then seed.
        """
        configs = self.configs()
        logger.info(f"Running {len(configs)} simulations of {self.name}")
        if jobs > 1:
            runs = [dask.delayed(sim.run_simulation)(cfg) for cfg in configs]
            reports = dask.compute(*runs, scheduler="processes", num_workers=jobs)
        else:
            reports = [sim.run_simulation(cfg) for cfg in configs]
        rows = [
            report.to_record() | {axis: point[axis] for axis in self.axes}
            for report, point in zip(reports, self.points())
        ]
        keys = list(self.axes) + ["seed"]
        frame = pd.DataFrame(rows)
        frame = frame[keys + [col for col in frame.columns if col not in keys]]
        return frame.sort_values(by=keys, kind="stable").reset_index(drop=True)

    def run(self, jobs: int = 1) -> xr.Dataset:
        """Run every point.

        Returns:
            Metrics with one dimension per axis plus seed.
        """
        keys = list(self.axes) + ["seed"]
        return self.report(jobs).set_index(keys).to_xarray()

    def to_csv(self, path: str = "../results", jobs: int = 1) -> list[str]:
        """Save the aggregated csv and its manifest.

        Args:
            path: Directory to save the files.
            jobs: Parallel runs.

        Returns:
            Paths of the written files.
        """
        user.check_create_savedir(path)
        csv_name = f"{self.name}.csv"
        sim.write_report_csv(self.report(jobs), os.path.join(path, csv_name))
        manifest_path = os.path.join(path, f"{self.name}_manifest.json")
        matrix = {
            "name": self.name,
            "base": self.base,
            "axes": self.axes,
            "max_runs": self.max_runs,
        }
        user.write_manifest(
            user.build_manifest(matrix, self.seeds, self.matrix_hash(), [csv_name]),
            manifest_path,
        )
        return [os.path.join(path, csv_name), manifest_path]
