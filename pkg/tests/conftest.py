import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from rpsched import Assignment, make_instance
from rpsched.harness import GenParams, generate


def all_assignments(inst):
    """Every eligible assignment, by plain itertools enumeration."""
    for combo in itertools.product(*inst.eligible_lists()):
        yield Assignment(combo)


def loads_of(inst, proc_of):
    out = np.zeros(inst.m)
    for j, p in enumerate(proc_of):
        out[p] += inst.tasks[j].work
    return out


def brute_energy(inst):
    """Minimum energy over all assignments, evaluated straight from the formula."""
    best = np.inf
    for a in all_assignments(inst):
        L = loads_of(inst, a.proc_of)
        best = min(best, sum(v**inst.alpha for v in L) / inst.C ** (inst.alpha - 1))
    return best


def small_instances(count, uniform, seed0=0, alphas=(2.0,), w_hi=20):
    """Seeded instances with m <= 3, n <= 6 mixing random and nested eligibility."""
    out = []
    for k in range(count):
        rng = np.random.default_rng([seed0, k])
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 7))
        hi = 1 if uniform else w_hi
        kind = "random" if k % 2 == 0 else "inclusive"
        alpha = alphas[k % len(alphas)]
        C = float(rng.choice([0.5, 1.0, 2.0]))
        out.append(generate(GenParams(m, n, 1, hi, kind, seed=seed0 * 100003 + k, alpha=alpha, C=C)))
    return out


@st.composite
def instances(draw, max_m=3, max_n=6, uniform=False, alpha=None):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    if uniform:
        w = draw(st.integers(1, 5))
        works = [w] * n
    else:
        works = draw(st.lists(st.integers(1, 30), min_size=n, max_size=n))
    elig = [draw(st.sets(st.integers(0, m - 1), min_size=1)) for _ in range(n)]
    a = alpha if alpha is not None else draw(st.sampled_from([1.5, 2.0, 3.0]))
    C = draw(st.sampled_from([0.5, 1.0, 3.0]))
    return make_instance(works, elig, m=m, C=C, alpha=a)


@pytest.fixture
def three_task():
    """Two processors; J1 only on P1, J2 on both, J3 only on P2 (unit works)."""
    return make_instance([1, 1, 1], [{0}, {0, 1}, {1}])
