"""Decode a small program and show the function IDs it is routed by.

Each kind has its own counter, so the third arithmetic function is A3 no
matter how many DSP or graphics functions sit between them.
"""

from fpa_sim import decode, parse_program, route

PROGRAM = """
fn load   kind=io       cost=2 iowait=4
fn fft    kind=dsp      cost=6 after=load
fn gain   kind=arith    cost=2 after=load
fn mix    kind=arith    cost=3 after=fft,gain
fn plot   kind=graphics cost=5 after=mix
fn title  kind=string   cost=1
fn total  kind=arith    cost=1 after=mix
fn flush  kind=system   cost=1 after=plot,total
"""

graph = parse_program(PROGRAM)
print(f"{'name':<7}{'fid':<5}{'routed to':<11}{'decoded at':<11}{'priority'}")
for inst, cycle in decode(graph, decode_width=3):
    prio = inst.priority
    print(f"{inst.name:<7}{str(inst.fid):<5}{route(inst.fid).token:<11}{cycle:<11}L{prio.level} {prio.mutability.value}")

print("\nsystem functions default to the top level and are pinned there;")
print("everything else starts at level 1 and may be moved.")
