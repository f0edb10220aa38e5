"""Recompute the four benchmark eigenvalue tables and diff them against the
stored reference values.

Writes one CSV per table and prints a per-table summary line.  Exits nonzero
if any recomputed eigenvalue drifts beyond the acceptance tolerance.
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from rectmorley.cli import solve_problem
from rectmorley.reference import (BENCHMARK_CONFIG, BENCHMARK_IDS,
                                  BENCHMARK_N, BENCHMARK_VALUES,
                                  exact_eigenvalues)

REL_TOL = 1e-3


@dataclass
class TableRunConfig:
    table_ids: tuple = BENCHMARK_IDS
    solver: str = "auto"
    out_dir: Path = field(default_factory=lambda: Path("results"))


def run_table(table_id: int, config: TableRunConfig):
    dim, bc = BENCHMARK_CONFIG[table_id]
    exact = exact_eigenvalues(dim) if bc == "simply-supported" else None
    rows = []
    worst = 0.0
    for n in BENCHMARK_N[table_id]:
        _, result = solve_problem(dim, n, bc, solver=config.solver)
        stored = BENCHMARK_VALUES[table_id][n]
        for i, (lam, ref) in enumerate(zip(result.eigenvalues, stored)):
            rel = abs(lam - ref) / abs(ref)
            worst = max(worst, rel)
            rows.append({
                "n": n,
                "index": i + 1,
                "eigenvalue": float(lam),
                "reference": ref,
                "rel_diff": float(rel),
                "exact": float(exact[i]) if exact is not None else "",
            })
    return rows, worst


def write_csv(path: Path, rows):
    cols = ("n", "index", "eigenvalue", "reference", "rel_diff", "exact")
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(",".join(cols) + "\n")
        for row in rows:
            stream.write(",".join(str(row[c]) for c in cols) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--table", type=int, action="append", choices=BENCHMARK_IDS,
                        help="table id, repeatable; default all four")
    parser.add_argument("--solver", choices=("auto", "dense", "shift-invert"),
                        default="auto")
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    args = parser.parse_args(argv)

    config = TableRunConfig(
        table_ids=tuple(args.table) if args.table else BENCHMARK_IDS,
        solver=args.solver,
        out_dir=args.out_dir,
    )
    config.out_dir.mkdir(parents=True, exist_ok=True)

    failures = 0
    for table_id in config.table_ids:
        rows, worst = run_table(table_id, config)
        path = config.out_dir / f"table{table_id}.csv"
        write_csv(path, rows)
        ok = worst < REL_TOL
        failures += 0 if ok else 1
        dim, bc = BENCHMARK_CONFIG[table_id]
        print(f"table {table_id} (dim={dim}, {bc}): max rel diff {worst:.2e} "
              f"{'ok' if ok else 'DRIFTED'} -> {path}")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
