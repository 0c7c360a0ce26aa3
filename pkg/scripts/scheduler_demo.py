"""
This is an example on how to use simoe
to compare greedy End/Cloud placement against the exhaustive optimum
"""

import simoe.sched as sched
import simoe.user as user


if __name__ == "__main__":
    tasks, params = sched.read_instance("../tests/test_data/instance.yaml")
    greedy = sched.place_tasks(tasks, params=params)
    optimal, best = sched.brute_force_optimal(tasks, params)
    print(sched.write_decisions(greedy))
    print(f"greedy objective {sched.objective(greedy, tasks, params):.4f} s")
    print(f"optimal objective {best:.4f} s, End tasks "
          f"{[d.task_id for d in optimal if d.location is sched.Location.END]}")

    report = sched.gap_report(num_instances=200, max_tasks=10)
    user.check_create_savedir("../results")
    report.to_csv("../results/gap_report.csv", index=False)
    print(report.groupby("n").ratio.describe())
    print(sched.summarize_gaps(report))
