"""Write a trace and report, then rebuild the report from the CSV alone."""

import json
import random
import tempfile
from pathlib import Path

from fpa_sim import SimulationConfig, compute_stats, read_trace, run, write_trace
from fpa_sim.checks import check_trace, violation_count
from fpa_sim.stats import write_report
from fpa_sim.workload import random_program

graph = random_program(random.Random(3), 20, io_prob=0.2, yield_prob=0.2, prio_prob=0.3)
config = SimulationConfig()
stats, trace = run(graph, config)

with tempfile.TemporaryDirectory() as tmp:
    csv_path, json_path = Path(tmp) / "run.csv", Path(tmp) / "run.json"
    write_trace(trace, csv_path)
    write_report(stats.to_report(), json_path)
    print("".join(csv_path.read_text().splitlines(keepends=True)[:8]), end="")
    print(f"... {len(trace)} rows\n")
    rebuilt = compute_stats(read_trace(csv_path), config).to_report()
    emitted = json.loads(json_path.read_text())
    print("report rebuilt from CSV matches:", emitted == json.loads(json.dumps(rebuilt)))

print("invariant violations:", violation_count(check_trace(trace, graph, config)))
print("makespan", stats.makespan, "throughput", round(stats.throughput, 3))
print("utilization", [round(u, 2) for u in stats.per_fpu_utilization])
