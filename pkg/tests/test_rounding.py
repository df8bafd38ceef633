import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpsched import (
    FractionalAssignment,
    SupportGraph,
    approximation_bound,
    break_cycles,
    brute_force_opt,
    build_support_graph,
    check_feasibility,
    energy,
    fdr,
    load_vector,
    make_instance,
    max_eligibility,
    round_forest,
    smax_guarantee,
)
from rpsched.core import SchedulingError

from .conftest import brute_energy, instances


def frac(inst, rows):
    return FractionalAssignment(np.array(rows, dtype=float))


def random_fractional(inst, seed):
    rng = np.random.default_rng(seed)
    x = np.zeros((inst.m, inst.n))
    for j, t in enumerate(inst.tasks):
        elig = sorted(t.eligible)
        x[elig, j] = rng.dirichlet(np.ones(len(elig)))
    return FractionalAssignment(x)


def test_support_of_integral_x():
    inst = make_instance([1, 2, 3], [{0, 1}] * 3)
    g = build_support_graph(inst, frac(inst, [[1, 0, 1], [0, 1, 0]]))
    assert sorted(g.weight) == [(0, 0), (0, 2), (1, 1)]
    assert g.is_forest()


def test_support_weights():
    inst = make_instance([2], [{0, 1}])
    g = build_support_graph(inst, frac(inst, [[0.5], [0.5]]))
    assert g.weight == {(0, 0): 1.0, (1, 0): 1.0}


def test_two_split_tasks_make_a_cycle():
    inst = make_instance([1, 1], [{0, 1}] * 2)
    g = build_support_graph(inst, frac(inst, [[0.5, 0.5], [0.5, 0.5]]))
    assert len(g.find_cycle()) == 4


def test_break_even_four_cycle():
    inst = make_instance([1, 1], [{0, 1}] * 2)
    g = build_support_graph(inst, frac(inst, [[0.5, 0.5], [0.5, 0.5]]))
    steps = []
    out = break_cycles(g, steps)
    assert [s[0] for s in steps] == [0.5]
    assert sorted(out.weight.values()) == [1.0, 1.0]
    assert {i for i, _ in out.weight} == {0, 1}
    np.testing.assert_array_equal(out.processor_totals(), [1, 1])


def test_break_uneven_four_cycle():
    # cycle P1-J1-P2-J2: weights .75, .25, .75, .25; both .25 edges hit zero
    inst = make_instance([1, 1], [{0, 1}] * 2)
    g = build_support_graph(inst, frac(inst, [[0.75, 0.25], [0.25, 0.75]]))
    steps = []
    out = break_cycles(g, steps)
    assert len(steps) == 1 and steps[0][0] == 0.25
    assert steps[0][2] < steps[0][1]
    assert out.weight == {(0, 0): 1.0, (1, 1): 1.0}


def test_break_removes_single_edge():
    inst = make_instance([1, 1], [{0, 1}] * 2)
    g = build_support_graph(inst, frac(inst, [[0.75, 0.5], [0.25, 0.5]]))
    steps = []
    out = break_cycles(g, steps)
    assert steps == [(0.25, 4, 3)]
    assert out.weight == {(0, 0): 1.0, (0, 1): 0.25, (1, 1): 0.75}
    np.testing.assert_array_equal(out.processor_totals(), g.processor_totals())


def test_forest_untouched():
    inst = make_instance([1, 1], [{0, 1}, {1}])
    g = build_support_graph(inst, frac(inst, [[0.5, 0], [0.5, 1]]))
    assert break_cycles(g).weight == g.weight


@settings(max_examples=150)
@given(instances(max_m=4, max_n=7), st.integers(0, 2**32 - 1))
def test_cycle_breaking_conserves(inst, seed):
    g = build_support_graph(inst, random_fractional(inst, seed))
    steps = []
    out = break_cycles(g, steps)
    assert out.is_forest()
    np.testing.assert_allclose(out.processor_totals(), g.processor_totals(), rtol=0, atol=1e-9)
    np.testing.assert_allclose(out.task_totals(), inst.works, rtol=0, atol=1e-9)
    assert all(after < before for _, before, after in steps)
    assert all(eps > 0 for eps, _, _ in steps)


def test_round_picks_lighter_child():
    # J1, J2 fixed on P1 (3 cycles) and P2 (1 cycle); J3 (w=2) split evenly
    inst = make_instance([3, 1, 2], [{0}, {1}, {0, 1}])
    x = frac(inst, [[1, 0, 0.5], [0, 1, 0.5]])
    a, trace = round_forest(inst, build_support_graph(inst, x), x)
    assert trace.matched == [(2, 1)]
    assert load_vector(inst, a)[1] == 3
    assert trace.phase1_fixed == 2 and trace.max_fractional_w == 2


def test_round_all_integral():
    inst = make_instance([1, 2], [{0, 1}] * 2)
    x = frac(inst, [[0, 1], [1, 0]])
    a, trace = round_forest(inst, build_support_graph(inst, x))
    assert a.proc_of == (1, 0)
    assert trace.matched == [] and trace.phase1_fixed == 2


def test_round_star_tie_breaks_low():
    inst = make_instance([5, 2, 2, 3], [{0}, {1}, {2}, {0, 1, 2}])
    x = frac(inst, [[1, 0, 0, 0.2], [0, 1, 0, 0.4], [0, 0, 1, 0.4]])
    a, trace = round_forest(inst, build_support_graph(inst, x))
    assert trace.matched == [(3, 1)]


def test_round_rejects_dangling_fraction():
    g = SupportGraph(2, np.array([2.0]), {(0, 0): 1.0})
    with pytest.raises(SchedulingError):
        round_forest(make_instance([2], [{0, 1}]), g)


def test_round_rejects_cycle():
    inst = make_instance([1, 1], [{0, 1}] * 2)
    g = build_support_graph(inst, frac(inst, [[0.5, 0.5], [0.5, 0.5]]))
    with pytest.raises(SchedulingError):
        round_forest(inst, g)


@settings(max_examples=150)
@given(instances(max_m=4, max_n=7), st.integers(0, 2**32 - 1))
def test_matching_phase_properties(inst, seed):
    x = random_fractional(inst, seed)
    forest = break_cycles(build_support_graph(inst, x))
    a, trace = round_forest(inst, forest)
    assert check_feasibility(inst.replace(s_max=float("inf")), a) == []
    matched_tasks = [j for j, _ in trace.matched]
    matched_procs = [i for _, i in trace.matched]
    assert len(set(matched_tasks)) == len(matched_tasks) == inst.n - trace.phase1_fixed
    assert len(set(matched_procs)) == len(matched_procs)
    final = load_vector(inst, a)
    assert np.all(final < np.array(trace.phase2_start_loads) + trace.max_fractional_w + 1e-9)


def test_fdr_uniform_example(three_task):
    a, trace, rep = fdr(three_task)
    assert energy(three_task, a) == pytest.approx(5)


def test_fdr_single_processor():
    inst = make_instance([4, 1, 2], [{0}] * 3)
    a, _, rep = fdr(inst)
    assert a.proc_of == (0, 0, 0)
    assert energy(inst, a) == pytest.approx(rep.objective)


def test_fdr_two_processors_five_tasks():
    rng = np.random.default_rng(7)
    for _ in range(20):
        inst = make_instance(rng.integers(1, 100, 5), [{0, 1}] * 5)
        a, _, _ = fdr(inst)
        # OPT by direct enumeration over 2**5 splits
        opt = brute_energy(inst)
        assert energy(inst, a) / opt <= 3.5


@settings(max_examples=150, deadline=None)
@given(instances())
def test_fdr_bound_and_guarantees(inst):
    a, trace, rep = fdr(inst)
    bound = approximation_bound(inst.alpha, max_eligibility(inst))
    e = energy(inst, a)
    assert e <= bound * energy(inst, brute_force_opt(inst)) * (1 + 1e-9)
    if not trace.matched:
        assert e == pytest.approx(rep.objective, rel=1e-9)


def test_bound_is_against_integral_optimum_not_relaxation():
    # one unit task spread over three processors: the relaxation is p**(alpha-1) cheaper
    inst = make_instance([1], [{0, 1, 2}], alpha=3.0)
    a, _, rep = fdr(inst)
    bound = approximation_bound(3.0, 3)
    assert energy(inst, a) / rep.objective == pytest.approx(9) and 9 > bound
    assert energy(inst, a) == energy(inst, brute_force_opt(inst))


def test_fdr_flags_cap_violation():
    # the fractional optimum fits under the cap but no integral schedule does
    inst = make_instance([2, 2, 2], [{0, 1}] * 3, s_max=3.5)
    a, trace, _ = fdr(inst)
    assert [v.index for v in trace.capacity_violations] == [int(np.argmax(load_vector(inst, a)))]


def test_smax_guarantee_examples():
    assert smax_guarantee(make_instance([2, 2], [{0}, {0, 1}])) == 5
    assert smax_guarantee(make_instance([7], [{0}])) == 14
    assert smax_guarantee(make_instance([1] * 6, [{0, 1, 2}] * 6)) == pytest.approx(6 / 3 + 1)


@settings(max_examples=150, deadline=None)
@given(instances(max_m=5, max_n=9))
def test_guarantee_keeps_rounding_feasible(inst):
    inst = inst.replace(s_max=smax_guarantee(inst) / inst.C)
    a, trace, _ = fdr(inst)
    assert trace.capacity_violations == []
