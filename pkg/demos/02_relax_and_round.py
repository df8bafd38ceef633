"""Arbitrary works: solve the convex relaxation, then round it.

The relaxation lets a task's cycles be split among its eligible processors.
Rounding cancels cycles in the support graph and then gives every split task
to a single child processor, so no processor gains more than one task.
"""

import numpy as np

from rpsched import (
    approximation_bound,
    brute_force_opt,
    energy,
    fdr,
    lfj,
    lfm,
    load_vector,
    make_instance,
    max_eligibility,
    smax_guarantee,
    solve_relaxation,
)

works = [7, 3, 5, 2, 6, 4]
elig = [{0, 1}, {1, 2}, {0, 2}, {2}, {0, 1, 2}, {1}]
inst = make_instance(works, elig, C=2.0, alpha=2.0)

x, rep = solve_relaxation(inst)
np.set_printoptions(precision=3, suppress=True)
print("fractional shares (rows are processors):")
print(x.x)
print("fractional loads:", x.loads(inst), f" energy {rep.objective:.3f}")

a, trace, _ = fdr(inst)
print(f"\ncycles cancelled: {trace.cycles_broken}, tasks already whole: {trace.phase1_fixed}")
print("split tasks matched (task, processor):", [(j + 1, i + 1) for j, i in trace.matched])
print("rounded loads:", load_vector(inst, a))

opt = energy(inst, brute_force_opt(inst))
bound = approximation_bound(inst.alpha, max_eligibility(inst))
print(f"\nenergy  frac {rep.objective:.3f}  fdr {energy(inst, a):.3f}  opt {opt:.3f}")
print(f"        lfj {energy(inst, lfj(inst)):.3f}  lfm {energy(inst, lfm(inst)):.3f}")
print(f"fdr / opt = {energy(inst, a) / opt:.3f} (worst case {bound:.3f})")

# a speed cap at the guarantee never trips after rounding
capped = inst.replace(s_max=smax_guarantee(inst) / inst.C)
print(f"\ns_max = {capped.s_max:.2f}: violations {fdr(capped)[1].capacity_violations}")
