"""Equal-work tasks: the flow-based solver is exact.

Four unit tasks, three processors.  Two tasks can only run on P2, one only on
P1, and the last on P1 or P3.  The busiest processor must carry two tasks, but
the fourth task should go to the idle P3, not pile up on P1.
"""

import numpy as np

from rpsched import bs_algo, brute_force_opt, ecsemrpp, energy, load_vector, make_instance

inst = make_instance([1, 1, 1, 1], [{1}, {1}, {0}, {0, 2}], m=3, C=1.0, alpha=3.0)

res = bs_algo(inst)
print(f"smallest possible maximum load: {res.l_star} tasks ({res.flow_calls} max-flow calls)")

a = ecsemrpp(inst)
print("assignment (1-based):", [p + 1 for p in a.proc_of])
print("loads:", load_vector(inst, a))
print(f"energy: {energy(inst, a):g}  (brute force: {energy(inst, brute_force_opt(inst)):g})")

# the same schedule is optimal for every convex power law
for alpha in (1.5, 2.0, 3.0):
    other = inst.replace(alpha=alpha)
    assert np.isclose(energy(other, ecsemrpp(other)), energy(other, brute_force_opt(other)))
print("optimal for alpha in 1.5, 2, 3")
