"""Random instance generators and the benchmark runner."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import BudgetExceededError, OracleBudget, brute_force_opt, lfj, lfm
from .core import Instance, energy, make_instance
from .relax import solve_relaxation
from .rounding import fdr, smax_guarantee
from .uniform import ecsemrpp, is_uniform

log = logging.getLogger(__name__)

ALGOS = ("frac", "opt", "fdr", "lfj", "lfm", "lfm_seq", "ecsemrpp")
CSV_HEADER = ["cell", "algo", "energy", "ratio", "base", "runtime_ms", "seed"]


@dataclass(frozen=True)
class GenParams:
    m: int
    n: int
    w_lo: int = 1
    w_hi: int = 10000
    eligibility: str = "random"  # or "inclusive"
    seed: int = 0
    alpha: float = 2.0
    C: float = 1.0
    s_max: float | None = None  # None: just enough for rounding to stay feasible

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be at least 1")
        if self.w_lo < 1 or self.w_hi < self.w_lo:
            raise ValueError("need 1 <= w_lo <= w_hi")
        if self.eligibility not in ("random", "inclusive"):
            raise ValueError(f"unknown eligibility kind {self.eligibility!r}")


def _finish(p: GenParams, works, elig) -> Instance:
    inst = make_instance(works, elig, m=p.m, C=p.C, alpha=p.alpha)
    s_max = p.s_max if p.s_max is not None else smax_guarantee(inst) / p.C
    return inst.replace(s_max=s_max)


def gen_random(p: GenParams) -> Instance:
    """Uniform integer works; each eligibility set has a uniform size, then a uniform subset."""
    rng = np.random.default_rng(p.seed)
    works = rng.integers(p.w_lo, p.w_hi + 1, size=p.n)
    elig = []
    for _ in range(p.n):
        size = rng.integers(1, p.m + 1)
        elig.append(frozenset(int(i) for i in rng.choice(p.m, size=size, replace=False)))
    return _finish(p, works, elig)


def gen_inclusive(p: GenParams) -> Instance:
    """Nested eligibility sets: every task gets a random-length prefix of one processor permutation."""
    rng = np.random.default_rng(p.seed)
    works = rng.integers(p.w_lo, p.w_hi + 1, size=p.n)
    chain = rng.permutation(p.m)
    lengths = rng.integers(1, p.m + 1, size=p.n)
    elig = [frozenset(int(i) for i in chain[:k]) for k in lengths]
    return _finish(p, works, elig)


def generate(p: GenParams) -> Instance:
    return gen_random(p) if p.eligibility == "random" else gen_inclusive(p)


def instance_seed(seed: int, rng_index: int, repeat: int) -> int:
    """Per-instance seed derived from the run seed, the cell's RNG index and the repeat number."""
    return int(np.random.SeedSequence([seed, rng_index, repeat]).generate_state(1)[0])


@dataclass(frozen=True)
class BenchRow:
    cell: str
    algo: str
    energy: float
    ratio: float
    base: str  # "opt" or "frac"
    runtime_ms: float
    seed: int


@dataclass
class BenchReport:
    cell: str
    params: GenParams
    rows: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def algos(self) -> list[str]:
        return list(dict.fromkeys(r.algo for r in self.rows))

    def energies(self, algo: str) -> np.ndarray:
        return np.array([r.energy for r in self.rows if r.algo == algo])

    def ratios(self, algo: str) -> np.ndarray:
        return np.array([r.ratio for r in self.rows if r.algo == algo])

    def mean_energy(self, algo: str) -> float:
        return float(self.energies(algo).mean())

    def mean_ratio(self, algo: str) -> float:
        return float(self.ratios(algo).mean())

    def mean_runtime_ms(self, algo: str) -> float:
        return float(np.mean([r.runtime_ms for r in self.rows if r.algo == algo]))


def _solve_energy(algo, inst, budget, tol):
    if algo == "frac":
        return solve_relaxation(inst, tol)[1].objective
    if algo == "opt":
        return energy(inst, brute_force_opt(inst, budget))
    if algo == "fdr":
        return energy(inst, fdr(inst, tol)[0])
    if algo == "lfj":
        return energy(inst, lfj(inst))
    if algo == "lfm":
        return energy(inst, lfm(inst))
    if algo == "lfm_seq":
        return energy(inst, lfm(inst, turns="sequential"))
    if algo == "ecsemrpp":
        return energy(inst, ecsemrpp(inst))
    raise ValueError(f"unknown algorithm {algo!r}")


def run_bench(p: GenParams, algos=("frac", "opt", "fdr", "lfj", "lfm"), repeats: int = 1,
              budget: OracleBudget = OracleBudget(), cell: str = "", rng_index: int = 0,
              timing: bool = True, tol: float = 1e-7) -> BenchReport:
    """Run every algorithm on ``repeats`` seeded instances of one cell.

    Ratios are normalised by the integral optimum of the same instance when
    the oracle fits in ``budget``, otherwise by the fractional optimum (and a
    flag is recorded).  With ``timing=False`` runtimes are written as 0 so
    reports are byte-reproducible.
    """
    unknown = set(algos) - set(ALGOS)
    if unknown:
        raise ValueError(f"unknown algorithms {sorted(unknown)}")
    algos = [a for a in ALGOS if a in set(algos)]
    report = BenchReport(cell or f"m={p.m},n={p.n}", p)
    for r in range(repeats):
        seed = instance_seed(p.seed, rng_index, r)
        inst = generate(replace(p, seed=seed))
        results = {}
        for algo in algos:
            if algo == "ecsemrpp" and not is_uniform(inst):
                report.flags.append(f"seed {seed}: ecsemrpp skipped, works are not uniform")
                continue
            t0 = time.perf_counter()
            try:
                value = _solve_energy(algo, inst, budget, tol)
            except BudgetExceededError:
                report.flags.append(f"seed {seed}: oracle budget exceeded, normalised by frac")
                continue
            results[algo] = (value, (time.perf_counter() - t0) * 1e3 if timing else 0.0)
        if "opt" in results:
            base_kind, base = "opt", results["opt"][0]
        else:
            base_kind = "frac"
            base = results["frac"][0] if "frac" in results else solve_relaxation(inst, tol)[1].objective
        for algo, (value, ms) in results.items():
            report.rows.append(BenchRow(report.cell, algo, value, value / base, base_kind, ms, seed))
    return report


def sweep_cells(kind: str, p: GenParams, values):
    """Yield ``(label, params, rng_index)`` for each cell of a sweep.

    Cells of a deadline sweep share their instances (same RNG index) and
    differ only in ``C``.
    """
    for k, v in enumerate(values):
        if kind == "C":
            yield f"C={p.C * float(v):g}", replace(p, C=p.C * float(v)), 0
        elif kind == "eta":
            n = max(1, int(round(float(v) * p.m)))
            yield f"eta={float(v):g}", replace(p, n=n), k
        elif kind == "eligibility":
            yield f"eligibility={v}", replace(p, eligibility=str(v)), k
        else:
            raise ValueError(f"unknown sweep {kind!r}")


def run_sweep(kind: str, p: GenParams, values, algos=("frac", "opt", "fdr", "lfj", "lfm"),
              repeats: int = 1, budget: OracleBudget = OracleBudget(), timing: bool = True,
              tol: float = 1e-7) -> list[BenchReport]:
    return [run_bench(cp, algos, repeats, budget, cell=label, rng_index=idx, timing=timing, tol=tol)
            for label, cp, idx in sweep_cells(kind, p, values)]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


def write_report(reports, path) -> None:
    """Write one CSV row per (cell, algorithm, repeat)."""
    if isinstance(reports, BenchReport):
        reports = [reports]
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for rep in reports:
                for row in rep.rows:
                    w.writerow([_fmt(getattr(row, col)) for col in CSV_HEADER])
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
