"""Instance and assignment model, energy evaluation and feasibility checks.

Processors and tasks are indexed from 0 internally.  A processor running a
load of ``L`` cycles under a common deadline ``C`` runs at the single speed
``L / C`` and finishes exactly at ``C``, so its energy is
``C * (L / C) ** alpha = L ** alpha / C ** (alpha - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: absolute slack on the ``load <= s_max * C`` comparison
CAPACITY_TOL = 1e-9


class SchedulingError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(SchedulingError, ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InvalidAssignmentError(SchedulingError, ValueError):
    pass


class InfeasibleError(SchedulingError):
    """No schedule respects the speed cap.

    ``processors`` holds the (0-based) bottleneck processors when known.
    """

    def __init__(self, message: str, processors: Iterable[int] = ()):
        self.processors = sorted(processors)
        super().__init__(message)


@dataclass(frozen=True)
class Task:
    work: float
    eligible: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "eligible", frozenset(int(i) for i in self.eligible))


@dataclass(frozen=True)
class Instance:
    m: int
    tasks: tuple[Task, ...]
    C: float = 1.0
    s_max: float = math.inf
    alpha: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def works(self) -> np.ndarray:
        return np.array([t.work for t in self.tasks], dtype=float)

    @property
    def capacity(self) -> float:
        """Cycles a processor can execute before the deadline, ``s_max * C``."""
        return self.s_max * self.C

    def eligible_lists(self) -> list[list[int]]:
        return [sorted(t.eligible) for t in self.tasks]

    def replace(self, **changes) -> "Instance":
        fields = dict(m=self.m, tasks=self.tasks, C=self.C, s_max=self.s_max, alpha=self.alpha)
        fields.update(changes)
        return Instance(**fields)


def make_instance(works, eligible, m=None, C=1.0, s_max=math.inf, alpha=2.0) -> Instance:
    """Build an instance from parallel lists of works and 0-based eligibility sets."""
    eligible = [frozenset(e) for e in eligible]
    if len(works) != len(eligible):
        raise ValueError("works and eligible must have equal length")
    if m is None:
        m = 1 + max((max(e) for e in eligible if e), default=0)
    tasks = tuple(Task(float(w), e) for w, e in zip(works, eligible))
    return Instance(int(m), tasks, float(C), float(s_max), float(alpha))


@dataclass(frozen=True)
class Assignment:
    """Integral task -> processor map; ``proc_of[j]`` is the processor of task j."""

    proc_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "proc_of", tuple(int(p) for p in self.proc_of))

    def __len__(self):
        return len(self.proc_of)

    def __getitem__(self, j):
        return self.proc_of[j]

    def tasks_on(self, i: int) -> list[int]:
        return [j for j, p in enumerate(self.proc_of) if p == i]


@dataclass(frozen=True)
class Violation:
    kind: str  # "completeness" | "eligibility" | "capacity"
    index: int  # task index for completeness/eligibility, processor index for capacity
    message: str = field(compare=False)


def validate_instance(inst: Instance) -> list[str]:
    """Return every invariant violation of ``inst``; an empty list means valid."""
    errors = []
    if not isinstance(inst.m, (int, np.integer)) or inst.m < 1:
        errors.append(f"m must be a positive integer, got {inst.m!r}")
    if inst.n < 1:
        errors.append("instance has no tasks")
    if not inst.C > 0:
        errors.append(f"deadline C must be positive, got {inst.C!r}")
    if not inst.s_max > 0:
        errors.append(f"s_max must be positive, got {inst.s_max!r}")
    if not inst.alpha > 1:
        errors.append(f"alpha must exceed 1, got {inst.alpha!r}")
    for j, task in enumerate(inst.tasks):
        if not (task.work > 0 and math.isfinite(task.work)):
            errors.append(f"task {j}: work must be positive, got {task.work!r}")
        if not task.eligible:
            errors.append(f"task {j}: empty eligibility set")
        bad = sorted(i for i in task.eligible if not 0 <= i < inst.m)
        if bad:
            errors.append(f"task {j}: processor index out of range {bad}")
    return errors


def require_valid(inst: Instance) -> None:
    errors = validate_instance(inst)
    if errors:
        raise InvalidInstanceError(errors)


def _check_assignment(inst: Instance, a: Assignment) -> None:
    if len(a) != inst.n:
        raise InvalidAssignmentError(f"assignment covers {len(a)} tasks, instance has {inst.n}")
    for j, (p, task) in enumerate(zip(a.proc_of, inst.tasks)):
        if p not in task.eligible:
            raise InvalidAssignmentError(f"task {j} assigned to ineligible processor {p}")


def load_vector(inst: Instance, a: Assignment) -> np.ndarray:
    """Total cycles assigned to each processor."""
    _check_assignment(inst, a)
    loads = np.zeros(inst.m)
    np.add.at(loads, np.asarray(a.proc_of, dtype=int), inst.works)
    return loads


def energy_of_loads(loads, C: float, alpha: float) -> float:
    loads = np.asarray(loads, dtype=float)
    return float(np.sum(loads**alpha) / C ** (alpha - 1))


def energy(inst: Instance, a: Assignment) -> float:
    return energy_of_loads(load_vector(inst, a), inst.C, inst.alpha)


def speeds(inst: Instance, a: Assignment) -> np.ndarray:
    return load_vector(inst, a) / inst.C


def check_feasibility(inst: Instance, a: Assignment) -> list[Violation]:
    """List every violated constraint; an empty list means the schedule is feasible."""
    out = []
    proc_of = list(a.proc_of)
    if len(proc_of) != inst.n:
        out.append(Violation("completeness", min(len(proc_of), inst.n),
                             f"assignment covers {len(proc_of)} of {inst.n} tasks"))
    loads = np.zeros(inst.m)
    for j, task in enumerate(inst.tasks[: len(proc_of)]):
        p = proc_of[j]
        if p not in task.eligible:
            out.append(Violation("eligibility", j, f"task {j} on processor {p}, eligible {sorted(task.eligible)}"))
        if 0 <= p < inst.m:
            loads[p] += task.work
    cap = inst.capacity
    for i, load in enumerate(loads):
        if load > cap + CAPACITY_TOL:
            out.append(Violation("capacity", i, f"processor {i} load {load:g} exceeds s_max*C = {cap:g}"))
    return out


def max_eligibility(inst: Instance) -> int:
    """Largest eligibility-set size over all tasks."""
    return max(len(t.eligible) for t in inst.tasks)


def approximation_bound(alpha: float, p: int) -> float:
    """Worst-case energy ratio of relaxation + dependent rounding."""
    return 2 ** (alpha - 1) * (2 - 1 / p**alpha)
