"""Instance, assignment and trace files.

Instances are JSON documents (read through the YAML composer so that field
errors can report a line number)::

    {"m": 2, "C": 1.0, "s_max": 10.0, "alpha": 2.0,
     "tasks": [{"w": 3, "eligible": [1]}, {"w": 1, "eligible": [1, 2]}]}

Processor and task indices in files are 1-based.  ``s_max`` may be
``null`` for an uncapped speed.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np
import yaml

from .core import Assignment, Instance, SchedulingError, Task, energy_of_loads, load_vector


class ParseError(SchedulingError, ValueError):
    def __init__(self, message: str, field: str = "", line: int | None = None):
        self.field = field
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}" if field else message + where)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "m": inst.m,
        "C": inst.C,
        "s_max": inst.s_max if math.isfinite(inst.s_max) else None,
        "alpha": inst.alpha,
        "tasks": [
            {"w": t.work if not float(t.work).is_integer() else int(t.work),
             "eligible": [i + 1 for i in sorted(t.eligible)]}
            for t in inst.tasks
        ],
    }


def write_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(inst), fh, indent=1)
        fh.write("\n")


def _mapping(node, field):
    if not isinstance(node, yaml.MappingNode):
        raise ParseError("expected a mapping", field, node.start_mark.line + 1)
    return {k.value: v for k, v in node.value}


def _number(node, field, kind=float, allow_null=False):
    line = node.start_mark.line + 1
    if not isinstance(node, yaml.ScalarNode):
        raise ParseError("expected a number", field, line)
    if allow_null and node.value in ("null", "~", ""):
        return None
    try:
        value = kind(node.value)
        if kind is int and str(value) != node.value.strip():
            raise ValueError
    except ValueError:
        raise ParseError(f"not a valid {kind.__name__}: {node.value!r}", field, line) from None
    return value


def parse_instance_text(text: str) -> Instance:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(f"malformed document: {getattr(exc, 'problem', exc)}", "",
                         mark.line + 1 if mark else None) from None
    if root is None:
        raise ParseError("empty document")
    top = _mapping(root, "<root>")
    for key in ("m", "C", "s_max", "alpha", "tasks"):
        if key not in top:
            raise ParseError("missing field", key, root.start_mark.line + 1)

    m = _number(top["m"], "m", int)
    if m < 1:
        raise ParseError("must be a positive integer", "m", top["m"].start_mark.line + 1)
    C = _number(top["C"], "C")
    s_max = _number(top["s_max"], "s_max", allow_null=True)
    alpha = _number(top["alpha"], "alpha")
    for name, value in (("C", C), ("s_max", s_max), ("alpha", alpha)):
        if value is not None and not math.isfinite(value):
            raise ParseError("must be finite", name, top[name].start_mark.line + 1)

    tasks_node = top["tasks"]
    if not isinstance(tasks_node, yaml.SequenceNode):
        raise ParseError("expected a list", "tasks", tasks_node.start_mark.line + 1)
    tasks = []
    for k, tnode in enumerate(tasks_node.value):
        where = f"tasks[{k + 1}]"
        t = _mapping(tnode, where)
        for key in ("w", "eligible"):
            if key not in t:
                raise ParseError("missing field", f"{where}.{key}", tnode.start_mark.line + 1)
        w = _number(t["w"], f"{where}.w")
        enode = t["eligible"]
        if not isinstance(enode, yaml.SequenceNode):
            raise ParseError("expected a list", f"{where}.eligible", enode.start_mark.line + 1)
        elig = []
        for inode in enode.value:
            i = _number(inode, f"{where}.eligible", int)
            if not 1 <= i <= m:
                raise ParseError(f"processor index {i} out of range 1..{m}", f"{where}.eligible",
                                 inode.start_mark.line + 1)
            elig.append(i - 1)
        tasks.append(Task(w, frozenset(elig)))
    return Instance(m, tuple(tasks), C, math.inf if s_max is None else s_max, alpha)


def parse_instance(path) -> Instance:
    with open(path) as fh:
        text = fh.read()
    try:
        return parse_instance_text(text)
    except ParseError as exc:
        raise ParseError(f"{os.fspath(path)}: {exc}") from None


def assignment_to_dict(inst: Instance, a: Assignment) -> dict:
    loads = load_vector(inst, a)
    return {
        "assignment": [{"task": j + 1, "processor": p + 1} for j, p in enumerate(a.proc_of)],
        "loads": loads.tolist(),
        "speeds": (loads / inst.C).tolist(),
        "energy": energy_of_loads(loads, inst.C, inst.alpha),
    }


def fractional_to_dict(inst: Instance, x) -> dict:
    loads = x.loads(inst)
    return {
        "assignment": [{"task": j + 1, "processor": i + 1, "x": v} for i, j, v in
                       sorted(x.entries(), key=lambda e: (e[1], e[0]))],
        "loads": np.asarray(loads).tolist(),
        "speeds": (np.asarray(loads) / inst.C).tolist(),
        "energy": x.objective(inst),
    }
