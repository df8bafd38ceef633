"""Compare all algorithms while the shared deadline grows.

Energies scale as C**(1-alpha), so the ratio columns stay put across the
cells; the absolute energies shrink.  Writes sweep.csv next to this script.
"""

from pathlib import Path

from rpsched import GenParams, run_sweep, write_report

params = GenParams(m=4, n=9, w_lo=1, w_hi=100, seed=11, alpha=2.0)
reports = run_sweep("C", params, [1, 2, 4], repeats=5, timing=False)

for rep in reports:
    cols = "  ".join(f"{algo}={rep.mean_ratio(algo):.3f}" for algo in rep.algos())
    print(f"{rep.cell:<6} mean energy fdr={rep.mean_energy('fdr'):10.1f}   ratios {cols}")

out = Path(__file__).with_name("sweep.csv")
write_report(reports, out)
print(f"wrote {out}")
