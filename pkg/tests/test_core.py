import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpsched import (
    Assignment,
    InvalidAssignmentError,
    Task,
    Instance,
    check_feasibility,
    energy,
    energy_of_loads,
    load_vector,
    make_instance,
    speeds,
    validate_instance,
)

from .conftest import instances


def test_validate_ok():
    assert validate_instance(make_instance([1], [{0}], m=2)) == []


def test_validate_empty_eligibility():
    errs = validate_instance(make_instance([1], [set()], m=2))
    assert any("empty eligibility set" in e for e in errs)


def test_validate_alpha():
    errs = validate_instance(make_instance([1], [{0}], m=1, alpha=1.0))
    assert any("alpha must exceed 1" in e for e in errs)


def test_validate_collects_everything():
    inst = Instance(2, (Task(-1.0, frozenset()), Task(2.0, frozenset({5}))), C=0.0, alpha=0.5)
    errs = validate_instance(inst)
    assert len(errs) == 5


@pytest.mark.parametrize("works, procs, expected", [
    ([4, 4], (0, 1), (4, 4)),
    ([4, 4], (0, 0), (8, 0)),
    ([3, 1, 2], (0, 1, 0), (5, 1)),
])
def test_load_vector(works, procs, expected):
    inst = make_instance(works, [{0, 1}] * len(works))
    np.testing.assert_array_equal(load_vector(inst, Assignment(procs)), expected)


def test_load_vector_rejects_ineligible():
    inst = make_instance([1, 1], [{0}, {0, 1}])
    with pytest.raises(InvalidAssignmentError):
        load_vector(inst, Assignment((1, 0)))


@pytest.mark.parametrize("loads, C, alpha, expected", [
    ((4, 4), 2, 2, 16),
    ((8, 0), 2, 2, 32),
    ((2, 1), 1, 2, 5),
])
def test_energy_of_loads(loads, C, alpha, expected):
    assert energy_of_loads(loads, C, alpha) == pytest.approx(expected)


def test_energy_from_assignment():
    inst = make_instance([4, 4], [{0, 1}, {0, 1}], C=2)
    assert energy(inst, Assignment((0, 1))) == 16
    assert energy(inst, Assignment((0, 0))) == 32


def test_feasibility():
    inst = make_instance([4, 4], [{0, 1}, {0, 1}], C=2, s_max=3)
    assert check_feasibility(inst, Assignment((0, 1))) == []
    (v,) = check_feasibility(inst, Assignment((0, 0)))
    assert (v.kind, v.index) == ("capacity", 0)


def test_feasibility_eligibility_and_completeness():
    inst = make_instance([1, 1], [{0}, {0, 1}])
    kinds = {(v.kind, v.index) for v in check_feasibility(inst, Assignment((1, 0)))}
    assert ("eligibility", 0) in kinds
    kinds = {v.kind for v in check_feasibility(inst, Assignment((0,)))}
    assert kinds == {"completeness"}


def test_feasibility_tolerance():
    inst = make_instance([3], [{0}], C=1, s_max=3 - 1e-12)
    assert check_feasibility(inst, Assignment((0,))) == []


def test_speeds():
    inst = make_instance([4, 4], [{0, 1}] * 2, C=2)
    np.testing.assert_array_equal(speeds(inst, Assignment((0, 1))), (2, 2))
    inst = make_instance([2, 1], [{0, 1}] * 2, C=1)
    np.testing.assert_array_equal(speeds(inst, Assignment((0, 1))), (2, 1))
    inst = make_instance([2], [{0, 1}], C=1)
    assert speeds(inst, Assignment((0,)))[1] == 0


@given(instances(), st.randoms(use_true_random=False))
def test_energy_invariant_under_processor_relabelling(inst, rnd):
    perm = list(range(inst.m))
    rnd.shuffle(perm)
    moved = make_instance(inst.works, [{perm[i] for i in t.eligible} for t in inst.tasks],
                          m=inst.m, C=inst.C, alpha=inst.alpha)
    a = Assignment(tuple(min(t.eligible) for t in inst.tasks))
    b = Assignment(tuple(perm[p] for p in a.proc_of))
    assert energy(moved, b) == pytest.approx(energy(inst, a), rel=1e-12)


@given(st.floats(0, 1e4), st.floats(0, 1e4), st.sampled_from([1.5, 2.0, 3.0]))
def test_equal_split_minimises_energy(a, b, alpha):
    mid = (a + b) / 2
    assert energy_of_loads((a, b), 1.0, alpha) >= energy_of_loads((mid, mid), 1.0, alpha) * (1 - 1e-12)


@given(instances(), st.floats(0.1, 10))
def test_deadline_scaling(inst, k):
    a = Assignment(tuple(min(t.eligible) for t in inst.tasks))
    scaled = inst.replace(C=inst.C * k)
    assert energy(scaled, a) == pytest.approx(energy(inst, a) * k ** (1 - inst.alpha), rel=1e-12)


@settings(max_examples=50)
@given(instances())
def test_loads_conserve_work(inst):
    a = Assignment(tuple(max(t.eligible) for t in inst.tasks))
    assert math.isclose(load_vector(inst, a).sum(), inst.works.sum(), rel_tol=1e-12)
