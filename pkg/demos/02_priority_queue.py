"""Drive the multilevel queue by hand.

Higher levels are served first, FIFO within a level, and a function whose
kind has no free unit does not hold up the others.
"""

from fpa_sim import FunctionKind, MultilevelPriorityQueue, decode, parse_program
from fpa_sim.funpiler import FunctionState

graph = parse_program(
    """
fn a1 kind=arith cost=3 prio=1
fn a2 kind=arith cost=3 prio=1
fn hot kind=arith cost=3 prio=5
fn d1 kind=dsp cost=3 prio=7
fn s1 kind=string cost=3 prio=0
"""
)
queue = MultilevelPriorityQueue(levels=8)
for inst, _ in decode(graph, 8):
    inst.transition(FunctionState.READY, 0)
    queue.enqueue(inst, 0)

for level in range(queue.num_levels - 1, -1, -1):
    if queue.level_contents(level):
        print(f"L{level}: " + " ".join(f.name for f in queue.level_contents(level)))

# one arith unit and one string unit free; the DSP unit is busy
free = [(0, FunctionKind.ARITHMETIC), (3, FunctionKind.STRING)]
picked = queue.dispatch(free, now=0)
print("\ndispatched at t=0:", ", ".join(f"{f.name}->fpu{u}" for f, u in picked))
print("still queued:", ", ".join(f.name for lvl in range(queue.num_levels) for f in queue.level_contents(lvl)))
