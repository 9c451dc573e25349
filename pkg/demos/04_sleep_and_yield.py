"""An I/O function sleeping while compute proceeds, and a long job yielding to a short one."""

from fpa_sim import FunctionKind, SimulationConfig, parse_program, run

config = SimulationConfig(fpus=((FunctionKind.ARITHMETIC, 1), (FunctionKind.IO, 1)))
graph = parse_program(
    """
fn read   kind=io    cost=2 iowait=6
fn crunch kind=arith cost=8 yield=3
fn quick  kind=arith cost=2
fn use    kind=arith cost=1 after=read
"""
)
stats, trace = run(graph, config)
for r in trace:
    if r.event in ("dispatch", "yield", "sleep", "wake", "complete", "integrate"):
        unit = "" if r.fpu is None else f" fpu{r.fpu}"
        print(f"t={r.cycle:>3}  {r.event:<9} {r.name:<7}{unit:<6} {r.detail}")

print(f"\nmakespan {stats.makespan}, peak parallelism {stats.peak_parallelism}")
for fs in stats.per_function:
    print(f"  {fs.fid}: waited {fs.wait}, turnaround {fs.turnaround}")
