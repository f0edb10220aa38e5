"""Command line driver: solve, reproduce benchmark tables, rates, verify.

Exit codes: 0 success, 1 solver failure, 2 verification failure, 3 bad
arguments.  The only environment variable honored is RECTMORLEY_THREADS,
which caps the BLAS/OpenMP thread pools before the numeric stack loads.
Output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_VERIFICATION_FAILURE = 2
EXIT_BAD_ARGS = 3

THREADS_ENV = "RECTMORLEY_THREADS"

DEFAULT_K = 6


class UsageError(Exception):
    """Configuration problem detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGS, f"{self.prog}: error: {message}\n")


def _configure_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return
    try:
        count = int(raw)
        if count < 1:
            raise ValueError
    except ValueError:
        raise UsageError(
            f"{THREADS_ENV} must be a positive integer, got {raw!r}"
        ) from None
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(count)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rectmorley",
        description="Biharmonic eigenvalue computations with rectangular "
                    "Morley elements on the unit box.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="compute the smallest eigenvalues")
    solve.add_argument("--dim", type=int, choices=(2, 3), default=2)
    solve.add_argument("--n", type=int, action="append", required=True,
                       metavar="N", help="cells per axis (repeatable)")
    solve.add_argument("--bc", choices=("clamped", "simply-supported"),
                       default="clamped")
    solve.add_argument("--k", type=int, default=DEFAULT_K)
    solve.add_argument("--solver", choices=("auto", "dense", "shift-invert"),
                       default="auto")
    solve.add_argument("--format", choices=("text", "csv", "json"), default="text")
    solve.add_argument("--out", metavar="PATH")

    table = sub.add_parser("table", help="reproduce a benchmark eigenvalue table")
    table.add_argument("table_id", type=int, choices=(1, 2, 3, 4))
    table.add_argument("--n", type=int, action="append", metavar="N",
                       help="override the refinement ladder (repeatable)")
    table.add_argument("--solver", choices=("auto", "dense", "shift-invert"),
                       default="auto")
    table.add_argument("--format", choices=("text", "csv", "json"), default="text")
    table.add_argument("--out", metavar="PATH")

    rates = sub.add_parser("rates", help="observed convergence orders")
    rates.add_argument("--dim", type=int, choices=(2, 3), default=2)
    rates.add_argument("--n", type=int, action="append", required=True,
                       metavar="N", help="cells per axis (repeatable, need >= 2)")
    rates.add_argument("--bc", choices=("clamped", "simply-supported"),
                       default="simply-supported")
    rates.add_argument("--k", type=int, default=DEFAULT_K)
    rates.add_argument("--solver", choices=("auto", "dense", "shift-invert"),
                       default="auto")
    rates.add_argument("--richardson", action="store_true",
                       help="allow problems without closed-form eigenvalues by "
                            "extrapolating a reference from the two finest meshes")
    rates.add_argument("--format", choices=("text", "csv", "json"), default="text")
    rates.add_argument("--out", metavar="PATH")

    verify = sub.add_parser("verify", help="run structural verification suites")
    verify.add_argument("suite", choices=("bubbles", "lemma2d", "lemma3d",
                                          "commuting", "identity37", "all"))
    verify.add_argument("--seed", type=int, default=None,
                        help="seed for the randomized identity suites")
    verify.add_argument("--quad-order", type=int, default=8)
    verify.add_argument("--format", choices=("text", "json"), default="text")
    verify.add_argument("--out", metavar="PATH")

    return parser


# ---------------------------------------------------------------------------
# shared solving helpers
# ---------------------------------------------------------------------------

def solve_problem(dim: int, n: int, bc: str, k: int = DEFAULT_K,
                  solver: str = "auto"):
    """Assemble and solve one configuration; returns (dofmap, EigenResult)."""
    from .assembly import assemble, build_dof_map
    from .eigensolve import solve_smallest
    from .element import build_reference_element
    from .mesh import build_mesh

    mesh = build_mesh(dim, n)
    dofmap = build_dof_map(mesh, bc)
    if not 1 <= k <= dofmap.num_free:
        raise UsageError(
            f"k={k} out of range for this mesh ({dofmap.num_free} free DOFs)"
        )
    element = build_reference_element(dim)
    a_mat, m_mat = assemble(mesh, dofmap, element)
    # The clamped stiffness matrix is definite, so the origin is a safe
    # shift; simply supported runs shift below the spectrum instead.
    sigma = 0.0 if bc == "clamped" else -1.0
    result = solve_smallest(a_mat, m_mat, k, method=solver, sigma=sigma)
    return dofmap, result


def _check_3d_scale(dim: int, n_values):
    from .reference import MAX_CELLS_3D

    if dim == 3:
        too_big = [n for n in n_values if n > MAX_CELLS_3D]
        if too_big:
            raise UsageError(
                f"3D runs with n > {MAX_CELLS_3D} cells per axis are rejected "
                f"(requested {too_big}); the 3D ladder stops at n={MAX_CELLS_3D}"
            )


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as stream:
            stream.write(text if text.endswith("\n") else text + "\n")
        print(f"wrote {out_path}")
    else:
        print(text)


def _json_dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    _check_3d_scale(args.dim, args.n)
    runs = []
    for n in args.n:
        if n < 1:
            raise UsageError(f"cell count must be positive, got {n}")
        dofmap, result = solve_problem(args.dim, n, args.bc, args.k, args.solver)
        runs.append((n, dofmap.num_free, result))

    if args.format == "json":
        payload = {
            "command": "solve",
            "dim": args.dim,
            "bc": args.bc,
            "k": args.k,
            "runs": [
                {"n": n, "order": order, **result.to_json_dict()}
                for n, order, result in runs
            ],
        }
        _emit(_json_dumps(payload), args.out)
    elif args.format == "csv":
        lines = ["n,index,eigenvalue,residual,method"]
        for n, _, result in runs:
            for i, lam in enumerate(result.eigenvalues):
                lines.append(
                    f"{n},{i + 1},{lam!r},{result.residuals[i]!r},{result.method}"
                )
        _emit("\n".join(lines), args.out)
    else:
        lines = [f"# solve dim={args.dim} bc={args.bc} k={args.k}"]
        for n, order, result in runs:
            status = "yes" if result.converged else "NO"
            lines.append(
                f"# n={n} order={order} method={result.method} converged={status}"
            )
            for i, lam in enumerate(result.eigenvalues):
                lines.append(
                    f"{n:>6} {i + 1:>4} {lam:>16.4f} {result.residuals[i]:>12.2e}"
                )
        _emit("\n".join(lines), args.out)

    if any(not result.converged for _, _, result in runs):
        print("solver did not converge on at least one run", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def _cmd_table(args) -> int:
    from .reference import (BENCHMARK_CONFIG, BENCHMARK_N, BENCHMARK_VALUES,
                            exact_eigenvalues)

    dim, bc = BENCHMARK_CONFIG[args.table_id]
    ladder = tuple(args.n) if args.n else BENCHMARK_N[args.table_id]
    if len(set(ladder)) != len(ladder) or list(ladder) != sorted(ladder):
        raise UsageError(f"cell counts must be strictly increasing, got {list(ladder)}")
    _check_3d_scale(dim, ladder)

    exact = exact_eigenvalues(dim) if bc == "simply-supported" else None
    stored = BENCHMARK_VALUES[args.table_id]

    rows = []
    converged = True
    prev_vals = None
    prev_n = None
    for n in ladder:
        _, result = solve_problem(dim, n, bc, DEFAULT_K, args.solver)
        converged = converged and result.converged
        for i, lam in enumerate(result.eigenvalues):
            ref = stored[n][i] if n in stored else None
            row = {
                "n": n,
                "index": i + 1,
                "eigenvalue": float(lam),
                "reference": ref,
                "rel_diff": float(abs(lam - ref) / abs(ref)) if ref is not None else None,
                "exact": float(exact[i]) if exact is not None else None,
                "error": float(exact[i] - lam) if exact is not None else None,
                "rate": None,
                "monotone": None if prev_vals is None else bool(lam >= prev_vals[i]),
            }
            if exact is not None and prev_vals is not None:
                from .reference import observed_rate

                row["rate"] = observed_rate(
                    exact[i] - prev_vals[i], exact[i] - lam, prev_n, n
                )
            rows.append(row)
        prev_vals = result.eigenvalues
        prev_n = n

    if args.format == "json":
        payload = {
            "command": "table",
            "table": args.table_id,
            "dim": dim,
            "bc": bc,
            "n_values": list(ladder),
            "rows": rows,
        }
        _emit(_json_dumps(payload), args.out)
    elif args.format == "csv":
        cols = ("n", "index", "eigenvalue", "reference", "rel_diff", "exact",
                "error", "rate", "monotone")
        lines = [",".join(cols)]
        for row in rows:
            cells = []
            for col in cols:
                val = row[col]
                cells.append("" if val is None else
                             (str(int(val)) if col in ("n", "index") else
                              ("yes" if val is True else "no" if val is False else repr(val))))
            lines.append(",".join(cells))
        _emit("\n".join(lines), args.out)
    else:
        lines = [
            f"# benchmark table {args.table_id}: dim={dim} bc={bc}",
            f"{'n':>6} {'idx':>4} {'eigenvalue':>14} {'reference':>14} "
            f"{'exact':>14} {'rate':>10} {'mono':>5}",
        ]
        for row in rows:
            ref = f"{row['reference']:.4f}" if row["reference"] is not None else "---"
            exa = f"{row['exact']:.4f}" if row["exact"] is not None else "---"
            rate = f"{row['rate']:.6f}" if row["rate"] is not None else "---"
            mono = "---" if row["monotone"] is None else ("yes" if row["monotone"] else "NO")
            lines.append(
                f"{row['n']:>6} {row['index']:>4} {row['eigenvalue']:>14.4f} "
                f"{ref:>14} {exa:>14} {rate:>10} {mono:>5}"
            )
        _emit("\n".join(lines), args.out)

    return EXIT_OK if converged else EXIT_SOLVER_FAILURE


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------

def _cmd_rates(args) -> int:
    from .reference import exact_eigenvalues, observed_rates, richardson_reference

    n_values = sorted(set(args.n))
    if len(n_values) < 2:
        raise UsageError("rates need at least two distinct cell counts")
    _check_3d_scale(args.dim, n_values)

    if args.bc == "clamped" and not args.richardson:
        raise UsageError(
            "no closed-form eigenvalues for the clamped problem; pass "
            "--richardson to measure rates against an extrapolated reference"
        )

    values = []
    converged = True
    for n in n_values:
        _, result = solve_problem(args.dim, n, args.bc, args.k, args.solver)
        converged = converged and result.converged
        values.append([float(v) for v in result.eigenvalues])

    per_index = list(zip(*values))
    if args.bc == "simply-supported":
        refs = [float(v) for v in exact_eigenvalues(args.dim)[: args.k]]
        ref_kind = "exact"
    else:
        refs = [richardson_reference(list(seq), n_values) for seq in per_index]
        ref_kind = "extrapolated"

    entries = []
    for i, seq in enumerate(per_index):
        entries.append({
            "index": i + 1,
            "reference": refs[i],
            "reference_kind": ref_kind,
            "eigenvalues": list(seq),
            "rates": observed_rates(list(seq), refs[i], n_values),
        })

    if args.format == "json":
        payload = {
            "command": "rates",
            "dim": args.dim,
            "bc": args.bc,
            "n_values": list(n_values),
            "entries": entries,
        }
        _emit(_json_dumps(payload), args.out)
    elif args.format == "csv":
        lines = ["index,reference,reference_kind,step,rate"]
        for entry in entries:
            for step, rate in enumerate(entry["rates"]):
                lines.append(
                    f"{entry['index']},{entry['reference']!r},{entry['reference_kind']},"
                    f"{n_values[step]}->{n_values[step + 1]},{rate!r}"
                )
        _emit("\n".join(lines), args.out)
    else:
        steps = " ".join(
            f"r({n_values[k]}->{n_values[k + 1]})" for k in range(len(n_values) - 1)
        )
        lines = [
            f"# observed orders dim={args.dim} bc={args.bc} "
            f"reference={ref_kind} n={','.join(map(str, n_values))}",
            f"{'idx':>4} {'reference':>14}  {steps}",
        ]
        for entry in entries:
            rates_txt = " ".join(f"{r:>10.6f}" for r in entry["rates"])
            lines.append(f"{entry['index']:>4} {entry['reference']:>14.4f}  {rates_txt}")
        _emit("\n".join(lines), args.out)

    return EXIT_OK if converged else EXIT_SOLVER_FAILURE


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def run_eigen_identity_suite(n_values=(4, 8), quad_order: int = 8):
    """Four-term eigenvalue error identity on the coarsest simply supported meshes.

    Uses the first eigenpair (simple eigenvalue, no cluster ambiguity) and
    checks the identity residual and its invariance under flipping the sign
    of the discrete eigenvector.
    """
    from .assembly import (FemField, assemble, build_dof_map,
                           eigen_error_identity_terms)
    from .element import build_reference_element
    from .eigensolve import smallest_k_dense
    from .functions import sine_eigenvalue, unit_box_eigenfunction
    from .mesh import build_mesh
    from .operators import VerificationReport, equality_record

    report = VerificationReport("eigenvalue-error-identity")
    element = build_reference_element(2)
    modes = (1, 1)
    u = unit_box_eigenfunction(modes)
    lam = sine_eigenvalue(modes)
    for n in n_values:
        mesh = build_mesh(2, n)
        dofmap = build_dof_map(mesh, "simply-supported")
        a_mat, m_mat = assemble(mesh, dofmap, element)
        result = smallest_k_dense(a_mat, m_mat, 1)
        lam_h = float(result.eigenvalues[0])
        u_h = FemField(dofmap, result.eigenvectors[:, 0])
        tol = 1e-6 * lam

        terms = eigen_error_identity_terms(lam, u, lam_h, u_h, mesh, dofmap,
                                           element, A=a_mat, M=m_mat,
                                           quad_order=quad_order)
        report.records.append(equality_record(
            f"2d-ss/n={n}/residual", terms.residual, 0.0, tol,
            note=f"lam_gap={terms.lam_gap:.6f} t1={terms.t1:.6f} t2={terms.t2:.6f} "
                 f"t3={terms.t3:.6f} t4={terms.t4:.6f}",
        ))
        flipped = FemField(dofmap, -result.eigenvectors[:, 0])
        terms_flip = eigen_error_identity_terms(lam, u, lam_h, flipped, mesh,
                                                dofmap, element, A=a_mat, M=m_mat,
                                                quad_order=quad_order)
        report.records.append(equality_record(
            f"2d-ss/n={n}/sign-flip-residual", terms_flip.residual, 0.0, tol,
            note="identity must not depend on the eigenvector sign",
        ))
    return report


def _cmd_verify(args) -> int:
    from .operators import (DEFAULT_SEED, run_bubble_suite, run_commuting_suite,
                            run_refined_identity_suite)

    seed = DEFAULT_SEED if args.seed is None else args.seed
    suites = []
    wanted = args.suite
    if wanted in ("bubbles", "all"):
        suites.append(run_bubble_suite())
    if wanted in ("lemma2d", "all"):
        suites.append(run_refined_identity_suite(2, seed=seed))
    if wanted in ("lemma3d", "all"):
        suites.append(run_refined_identity_suite(3, seed=seed))
    if wanted in ("commuting", "all"):
        suites.append(run_commuting_suite())
    if wanted in ("identity37", "all"):
        suites.append(run_eigen_identity_suite(quad_order=args.quad_order))

    if args.format == "json":
        payload = {
            "command": "verify",
            "suite": wanted,
            "passed": all(rep.passed for rep in suites),
            "reports": [rep.to_json_dict() for rep in suites],
        }
        _emit(_json_dumps(payload), args.out)
    else:
        blocks = [rep.to_text() for rep in suites]
        overall = "PASS" if all(rep.passed for rep in suites) else "FAIL"
        _emit("\n\n".join(blocks) + f"\n\noverall: {overall}", args.out)

    return EXIT_OK if all(rep.passed for rep in suites) else EXIT_VERIFICATION_FAILURE


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "solve": _cmd_solve,
    "table": _cmd_table,
    "rates": _cmd_rates,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    try:
        _configure_threads()
    except UsageError as exc:
        print(f"rectmorley: error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rectmorley: error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except (ValueError, ArithmeticError) as exc:
        print(f"rectmorley: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())
