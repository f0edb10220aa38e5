"""Measure canonical-interpolation convergence orders on refining meshes.

Probes three inputs with known behavior: the first box eigenfunction (generic
orders 3, 2, 1 in the L2, H1, H2 broken norms), a mixed cubic whose constant
mixed third derivative makes those orders sharp, and a pure quartic whose
missing mixed third derivatives buy one extra order in every norm.
"""

import argparse
import sys
from dataclasses import dataclass, field

from rectmorley.functions import PolynomialFunction, unit_box_eigenfunction
from rectmorley.operators import interpolation_convergence_probe
from rectmorley.polynomial import Polynomial


@dataclass
class ProbeCase:
    name: str
    func: object
    expected: dict


@dataclass
class ProbeConfig:
    dim: int = 2
    n_values: tuple = (4, 8, 16)
    tolerance: float = 0.3
    cases: list = field(default_factory=list)


def default_cases(dim: int):
    sine = unit_box_eigenfunction((1,) * dim)
    mixed_exps = tuple([2, 1] + [0] * (dim - 2))
    quartic_exps = tuple([4] + [0] * (dim - 1))
    return [
        ProbeCase("sine eigenfunction", sine, {0: 3.0, 1: 2.0, 2: 1.0}),
        ProbeCase(
            "mixed cubic x0^2 x1",
            PolynomialFunction(Polynomial.monomial(dim, mixed_exps)),
            {0: 3.0, 1: 2.0, 2: 1.0},
        ),
        ProbeCase(
            "pure quartic x0^4",
            PolynomialFunction(Polynomial.monomial(dim, quartic_exps)),
            {0: 4.0, 1: 3.0, 2: 2.0},
        ),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dim", type=int, choices=(2, 3), default=2)
    parser.add_argument("--n", type=int, action="append",
                        help="cell counts per axis, repeatable; default 4 8 16")
    parser.add_argument("--tolerance", type=float, default=0.3,
                        help="allowed deviation from the expected order")
    args = parser.parse_args(argv)

    config = ProbeConfig(
        dim=args.dim,
        n_values=tuple(args.n) if args.n else ((4, 8, 16) if args.dim == 2 else (2, 4, 8)),
        tolerance=args.tolerance,
    )
    config.cases = default_cases(config.dim)

    failures = 0
    print(f"# interpolation convergence, dim={config.dim}, "
          f"n={','.join(map(str, config.n_values))}")
    print(f"{'case':<24} {'norm':>5} {'observed':>10} {'expected':>10} {'ok':>4}")
    for case in config.cases:
        probe = interpolation_convergence_probe(case.func, config.dim, config.n_values)
        for l in (0, 1, 2):
            got = probe.orders[l]
            want = case.expected[l]
            ok = abs(got - want) < config.tolerance
            failures += 0 if ok else 1
            label = {0: "L2", 1: "H1", 2: "H2"}[l]
            print(f"{case.name:<24} {label:>5} {got:>10.3f} {want:>10.1f} "
                  f"{'yes' if ok else 'NO':>4}")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
