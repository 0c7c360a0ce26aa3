# simoe/sched.py
"""Route-aware End/Cloud task placement.

Tasks are ranked by a priority that grows with compute cost and shrinks
with the time needed to ship their features, then placed greedily on the
end device while it has capacity and the priority clears a threshold.
An exhaustive search over every placement serves as the optimality oracle.

It contains the following functions:
    - `comm_seconds(task, params)` - Returns: transfer time of an offloaded task.
    - `task_priority(task, params)` - Returns: P = C / (Comm + eps).
    - `end_predicate(load_end, compute_cost, priority, params)` - Returns: if a task may run on the end.
    - `replay_decision(decision, params)` - Returns: location recomputed from recorded inputs.
    - `place_tasks(tasks, initial_load_end, initial_load_cloud, params)` - Returns: greedy decisions.
    - `task_cost(task, location, params)` - Returns: weighted time of one task.
    - `objective(decisions, tasks, params)` - Returns: weighted total time.
    - `brute_force_optimal(tasks, params, max_n)` - Returns: optimal decisions and objective.
    - `random_instance(rng, num_tasks)` - Returns: tasks and params of a generated workload.
    - `gap_report(num_instances, max_tasks, seed)` - Returns: greedy vs optimal table.
    - `summarize_gaps(report)` - Returns: mean and p95 of greedy/optimal.
    - `read_instance(instance_path)` - Returns: tasks and params from a YAML file.
    - `write_decisions(decisions, csv_path)` - Returns: decisions as a table, saved to csv.
"""

import dataclasses
import enum
import logging
import math
import numpy as np
import pandas as pd
import yaml

logger = logging.getLogger(__name__)


class Location(enum.Enum):
    END = "End"
    CLOUD = "Cloud"


@dataclasses.dataclass(frozen=True)
class TaskSpec:
    """One schedulable task.

    Attributes:
        id: Task id.
        compute_cost: FLOPs.
        comm_cost: Bytes to send if offloaded.
    """

    id: int
    compute_cost: float
    comm_cost: float

    def __post_init__(self):
        if not self.compute_cost > 0:
            raise ValueError(f"task {self.id}: compute_cost must be positive")
        if self.comm_cost < 0:
            raise ValueError(f"task {self.id}: comm_cost must be non-negative")


@dataclasses.dataclass(frozen=True)
class SchedulerParams:
    """Scheduler constants.

    Attributes:
        alpha: Weight of execution time against communication time.
        beta: Minimum priority for End placement.
        t_end: End capacity in FLOPs per scheduling window.
        eps_priority: Guard added to the communication time.
        end_flops_rate: End execution rate (FLOPs s^-1).
        cloud_flops_rate: Cloud execution rate (FLOPs s^-1).
        link_bandwidth: Link rate (bits s^-1).
    """

    alpha: float = 0.5
    beta: float = 1.0
    t_end: float = 1.2e10
    eps_priority: float = 1e-6
    end_flops_rate: float = 5.0e10
    cloud_flops_rate: float = 1.0e12
    link_bandwidth: float = 300e6

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if not self.eps_priority > 0:
            raise ValueError("eps_priority must be positive")
        for name in ("end_flops_rate", "cloud_flops_rate", "link_bandwidth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclasses.dataclass(frozen=True)
class PlacementDecision:
    """Outcome of one greedy step, with the inputs of its predicate.

    Attributes:
        task_id: Task id.
        location: End or Cloud.
        priority: Task priority.
        compute_cost: Task FLOPs.
        load_end_before: End load when the task was visited.
        load_end_after: End load after placement.
        load_cloud_after: Cloud load after placement.
    """

    task_id: int
    location: Location
    priority: float
    compute_cost: float
    load_end_before: float
    load_end_after: float
    load_cloud_after: float


def comm_seconds(task: TaskSpec, params: SchedulerParams) -> float:
    """Transfer time of a task's bytes over the nominal link."""
    return 8.0 * task.comm_cost / params.link_bandwidth


def task_priority(task: TaskSpec, params: SchedulerParams) -> float:
    """Priority of a task.

    Args:
        task: Task to rank.
        params: Scheduler constants.

    Returns:
        compute_cost / (comm_seconds + eps_priority).
    """
    return task.compute_cost / (comm_seconds(task, params) + params.eps_priority)


def end_predicate(
    load_end: float, compute_cost: float, priority: float, params: SchedulerParams
) -> bool:
    """End placement rule: capacity left and priority above beta."""
    return load_end + compute_cost <= params.t_end and priority >= params.beta


def replay_decision(decision: PlacementDecision, params: SchedulerParams) -> Location:
    """Recompute a decision's location from what it recorded."""
    if end_predicate(
        decision.load_end_before, decision.compute_cost, decision.priority, params
    ):
        return Location.END
    return Location.CLOUD


def place_tasks(
    tasks: list[TaskSpec],
    initial_load_end: float = 0.0,
    initial_load_cloud: float = 0.0,
    params: SchedulerParams = SchedulerParams(),
) -> list[PlacementDecision]:
    """Greedy End/Cloud placement.

    Tasks are visited by descending priority (ties to the lower id).
    A task goes to the end device when the end load plus its cost fits
    in t_end and its priority is at least beta.

    Args:
        tasks: Tasks to place.
        initial_load_end: FLOPs already committed on the end.
        initial_load_cloud: FLOPs already committed on the cloud.
        params: Scheduler constants.

    Returns:
        Decisions in visit order.
    """
    if not tasks:
        raise ValueError("place_tasks needs at least one task")
    ranked = sorted(
        ((task_priority(task, params), task) for task in tasks),
        key=lambda item: (-item[0], item[1].id),
    )
    load_end = initial_load_end
    load_cloud = initial_load_cloud
    decisions = []
    for priority, task in ranked:
        before = load_end
        if end_predicate(load_end, task.compute_cost, priority, params):
            location = Location.END
            load_end += task.compute_cost
        else:
            location = Location.CLOUD
            load_cloud += task.compute_cost
        decisions.append(
            PlacementDecision(
                task_id=task.id,
                location=location,
                priority=priority,
                compute_cost=task.compute_cost,
                load_end_before=before,
                load_end_after=load_end,
                load_cloud_after=load_cloud,
            )
        )
    return decisions


def task_cost(task: TaskSpec, location: Location, params: SchedulerParams) -> float:
    """Weighted execution plus communication time of one task.

    Args:
        task: Task.
        location: Where it runs.
        params: Scheduler constants.

    Returns:
        alpha * exec_time + (1 - alpha) * comm_time, comm_time is 0 on the end.
    """
    if location is Location.END:
        return params.alpha * task.compute_cost / params.end_flops_rate
    return params.alpha * task.compute_cost / params.cloud_flops_rate + (
        1.0 - params.alpha
    ) * comm_seconds(task, params)


def objective(
    decisions: list[PlacementDecision], tasks: list[TaskSpec], params: SchedulerParams
) -> float:
    """Weighted total time of a placement.

    Args:
        decisions: One decision per task.
        tasks: Tasks of the instance.
        params: Scheduler constants.

    Returns:
        Sum of `task_cost` over the tasks.
    """
    by_id = {task.id: task for task in tasks}
    placed = [decision.task_id for decision in decisions]
    if sorted(placed) != sorted(by_id) or len(by_id) != len(tasks):
        raise ValueError("decisions must cover every task exactly once")
    return math.fsum(
        task_cost(by_id[decision.task_id], decision.location, params)
        for decision in decisions
    )


def _decisions_for(
    tasks: list[TaskSpec], on_end: np.ndarray, params: SchedulerParams
) -> list[PlacementDecision]:
    load_end = 0.0
    load_cloud = 0.0
    decisions = []
    for task, end in zip(tasks, on_end):
        before = load_end
        if end:
            load_end += task.compute_cost
        else:
            load_cloud += task.compute_cost
        decisions.append(
            PlacementDecision(
                task_id=task.id,
                location=Location.END if end else Location.CLOUD,
                priority=task_priority(task, params),
                compute_cost=task.compute_cost,
                load_end_before=before,
                load_end_after=load_end,
                load_cloud_after=load_cloud,
            )
        )
    return decisions


def brute_force_optimal(
    tasks: list[TaskSpec], params: SchedulerParams, max_n: int = 16
) -> tuple[list[PlacementDecision], float]:
    """Exhaustive search of the minimum-objective placement.

    Every End subset whose load fits in t_end is feasible. Ties go to the
    lexicographically smallest set of End task ids.

    Args:
        tasks: Tasks of the instance.
        params: Scheduler constants.
        max_n: Largest instance accepted.

    Returns:
        Optimal decisions (in task order) and their objective.
    """
    num_tasks = len(tasks)
    if num_tasks > max_n:
        raise ValueError(f"{num_tasks} tasks exceed the exhaustive limit of {max_n}")
    compute = np.array([task.compute_cost for task in tasks], dtype=np.float64)
    end_terms = np.array([task_cost(t, Location.END, params) for t in tasks])
    cloud_terms = np.array([task_cost(t, Location.CLOUD, params) for t in tasks])

    masks = (np.arange(2**num_tasks)[:, None] >> np.arange(num_tasks)) & 1
    masks = masks.astype(bool)
    values = np.where(masks, end_terms, cloud_terms).sum(axis=1)
    values[masks.astype(np.float64) @ compute > params.t_end] = np.inf

    best = values.min()
    candidates = np.flatnonzero(values <= best + abs(best) * 1e-9)
    best_key = None
    for index in candidates:
        decisions = _decisions_for(tasks, masks[index], params)
        value = objective(decisions, tasks, params)
        end_set = tuple(sorted(t.id for t, end in zip(tasks, masks[index]) if end))
        if best_key is None or (value, end_set) < best_key[:2]:
            best_key = (value, end_set, decisions)
    return best_key[2], best_key[0]


def random_instance(
    rng: np.random.Generator, num_tasks: int
) -> tuple[list[TaskSpec], SchedulerParams]:
    """Generate a random scheduling workload.

    T_end is sized to 30% of the total compute and beta to a random
    low quantile of the priorities, so both branches of the rule fire.

    Args:
        rng: Random generator.
        num_tasks: Number of tasks.

    Returns:
        Tasks and scheduler params.
    """
    compute = rng.uniform(1e8, 1e10, num_tasks)
    comm = rng.uniform(1e4, 5e6, num_tasks)
    tasks = [TaskSpec(i, float(c), float(b)) for i, (c, b) in enumerate(zip(compute, comm))]
    params = SchedulerParams(
        alpha=float(rng.uniform(0.0, 1.0)), t_end=0.3 * float(compute.sum())
    )
    priorities = [task_priority(task, params) for task in tasks]
    beta = float(np.quantile(priorities, rng.uniform(0.0, 0.5)))
    return tasks, dataclasses.replace(params, beta=beta)


def gap_report(
    num_instances: int = 500, max_tasks: int = 12, seed: int = 0
) -> pd.DataFrame:
    """Compare greedy placement against the exhaustive optimum.

    Args:
        num_instances: Number of random instances.
        max_tasks: Largest instance size (sizes drawn in 1..max_tasks).
        seed: Generator seed.

    Returns:
        One row per instance: n, greedy, optimal, ratio.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(num_instances):
        num_tasks = int(rng.integers(1, max_tasks + 1))
        tasks, params = random_instance(rng, num_tasks)
        greedy = objective(place_tasks(tasks, params=params), tasks, params)
        _, optimal = brute_force_optimal(tasks, params)
        rows.append(
            {"n": num_tasks, "greedy": greedy, "optimal": optimal,
             "ratio": greedy / optimal if optimal > 0 else 1.0}
        )
    return pd.DataFrame(rows)


def summarize_gaps(report: pd.DataFrame) -> dict:
    """Mean and 95th percentile of greedy/optimal ratios."""
    return {
        "mean": float(report.ratio.mean()),
        "p95": float(np.percentile(report.ratio, 95)),
    }


def read_instance(instance_path: str) -> tuple[list[TaskSpec], SchedulerParams]:
    """Read a scheduling instance.

    The YAML file holds a `scheduler` mapping with SchedulerParams
    fields and a `tasks` list of {id, compute_cost, comm_cost}.

    Args:
        instance_path: Location of the file.

    Returns:
        Tasks and scheduler params.
    """
    with open(instance_path) as instance_file:
        instance = yaml.safe_load(instance_file)
    params = SchedulerParams(**instance.get("scheduler", {}))
    tasks = [
        TaskSpec(int(t["id"]), float(t["compute_cost"]), float(t["comm_cost"]))
        for t in instance["tasks"]
    ]
    return tasks, params


def write_decisions(
    decisions: list[PlacementDecision], csv_path: str | None = None
) -> pd.DataFrame:
    """Decision dump.

    Args:
        decisions: Placement decisions.
        csv_path: If given, where the csv is written.

    Returns:
        Table with id, location, priority and load_end_after.
    """
    table = pd.DataFrame(
        {
            "id": [d.task_id for d in decisions],
            "location": [d.location.value for d in decisions],
            "priority": [d.priority for d in decisions],
            "load_end_after": [d.load_end_after for d in decisions],
        }
    )
    if csv_path is not None:
        table.to_csv(csv_path, index=False)
        logger.info(f"Decisions saved in {csv_path}")
    return table
