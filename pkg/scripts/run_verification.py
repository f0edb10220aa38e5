"""Run every structural verification suite and dump one combined JSON report.

Covers the bubble annihilation checks, the cellwise interpolation identity in
2D and 3D, the moment-projection commuting property, and the four-term
eigenvalue error identity.  Exits nonzero if any asserted check fails
(documented deviations do not count as failures).
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from rectmorley.cli import run_eigen_identity_suite
from rectmorley.operators import (DEFAULT_SEED, run_bubble_suite,
                                  run_commuting_suite,
                                  run_refined_identity_suite)


@dataclass
class VerificationConfig:
    seed: int = DEFAULT_SEED
    n_pairs: int = 200
    quad_order: int = 8
    out: Path | None = None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--pairs", type=int, default=200,
                        help="random (u, v) pairs per identity suite")
    parser.add_argument("--quad-order", type=int, default=8)
    parser.add_argument("--out", type=Path, default=None,
                        help="write the JSON report here instead of stdout")
    args = parser.parse_args(argv)
    config = VerificationConfig(args.seed, args.pairs, args.quad_order, args.out)

    reports = [
        run_bubble_suite(),
        run_refined_identity_suite(2, n_pairs=config.n_pairs, seed=config.seed),
        run_refined_identity_suite(3, n_pairs=config.n_pairs, seed=config.seed),
        run_commuting_suite(),
        run_eigen_identity_suite(quad_order=config.quad_order),
    ]

    for report in reports:
        print(report.to_text())
        print()

    passed = all(report.passed for report in reports)
    payload = {
        "passed": passed,
        "seed": config.seed,
        "reports": [report.to_json_dict() for report in reports],
    }
    if config.out is not None:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        config.out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
        print(f"wrote {config.out}")

    print(f"overall: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 2


if __name__ == "__main__":
    sys.exit(main())
