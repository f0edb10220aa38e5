"""Interpolation operators, bubble functions, and their verification suites.

Everything here lives on the reference cell [-1, 1]^dim unless stated
otherwise.  The canonical interpolation matches the element's degrees of
freedom; the moment projection matches integral moments of derivatives up
to fourth order.  Verification suites package the identities these
operators satisfy (and the documented deviations from the published bubble
table) into structured pass/fail records.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .element import ReferenceElement, build_reference_element
from .polynomial import Polynomial
from .quadrature import facet_rule, tensor_rule

DEFAULT_QUAD_ORDER = 8
DEFAULT_SEED = 1729


# ---------------------------------------------------------------------------
# bubble functions
# ---------------------------------------------------------------------------

def _phi_bubble(dim: int, i: int, j: int) -> Polynomial:
    # xi_i^2 xi_j - (4/3) xi_j + (1/3) xi_j^3
    xi = Polynomial.variable(dim, i)
    xj = Polynomial.variable(dim, j)
    return xi * xi * xj - (4.0 / 3.0) * xj + (1.0 / 3.0) * xj ** 3


def _psi_bubble(dim: int, i: int) -> Polynomial:
    # (xi_i^2 - 1)^2
    xi = Polynomial.variable(dim, i)
    return (xi * xi - 1.0) ** 2


def _p_bubble(dim: int, i: int, j: int) -> Polynomial:
    # xi_i^2 xi_j^2 - (xi_i^2 + xi_j^2 + 1) / 3
    xi2 = Polynomial.variable(dim, i) ** 2
    xj2 = Polynomial.variable(dim, j) ** 2
    return xi2 * xj2 - (1.0 / 3.0) * (xi2 + xj2 + 1.0)


def _p_bubble_published(dim: int, i: int, j: int) -> Polynomial:
    # xi_i^2 + xi_j^2 - xi_i^3/3 - xi_j^3/3 - 1/3; kept for deviation reports,
    # this form does not vanish at the corners.
    xi = Polynomial.variable(dim, i)
    xj = Polynomial.variable(dim, j)
    return xi ** 2 + xj ** 2 - (1.0 / 3.0) * xi ** 3 - (1.0 / 3.0) * xj ** 3 - 1.0 / 3.0


def _q_bubble(dim: int, i: int, j: int) -> Polynomial:
    # xi_i^3 xi_j - xi_i xi_j
    xi = Polynomial.variable(dim, i)
    xj = Polynomial.variable(dim, j)
    return xi ** 3 * xj - xi * xj


@dataclass(frozen=True)
class BubbleSet:
    """Error bubbles of the canonical interpolation, keyed by axis indices.

    All of phi, psi, p, q annihilate every degree of freedom of the element.
    p_published keeps the form from the printed bubble table, which fails the
    corner conditions; it is retained only so verification reports can show
    the deviation.
    """

    dim: int
    phi: dict
    psi: dict
    p: dict
    q: dict
    p_published: dict

    def corrected_items(self):
        for (i, j), poly in sorted(self.phi.items()):
            yield f"phi({i},{j})", poly
        for i, poly in sorted(self.psi.items()):
            yield f"psi({i})", poly
        for (i, j), poly in sorted(self.p.items()):
            yield f"p({i},{j})", poly
        for (i, j), poly in sorted(self.q.items()):
            yield f"q({i},{j})", poly

    @property
    def count(self) -> int:
        return len(self.phi) + len(self.psi) + len(self.p) + len(self.q)


def build_bubbles(dim: int) -> BubbleSet:
    """The 7 (2D) or 18 (3D) interpolation-error bubbles."""
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim!r}")
    ordered = [(i, j) for i in range(dim) for j in range(dim) if i != j]
    unordered = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
    return BubbleSet(
        dim=dim,
        phi={(i, j): _phi_bubble(dim, i, j) for i, j in ordered},
        psi={i: _psi_bubble(dim, i) for i in range(dim)},
        p={(i, j): _p_bubble(dim, i, j) for i, j in unordered},
        q={(i, j): _q_bubble(dim, i, j) for i, j in ordered},
        p_published={(i, j): _p_bubble_published(dim, i, j) for i, j in unordered},
    )


# ---------------------------------------------------------------------------
# canonical (degree-of-freedom) interpolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterpolationResult:
    """Outcome of canonical interpolation on one cell.

    coefficients are the reference degrees of freedom of the (pulled back)
    input; interpolant is expressed in reference coordinates.  error is the
    exact residual for polynomial input and None for analytic input.
    """

    coefficients: np.ndarray
    interpolant: Polynomial
    error: Polynomial | None = None
    warnings: tuple = ()


def interpolation_dofs(element: ReferenceElement, f, center, h: float,
                       quad_order: int = DEFAULT_QUAD_ORDER):
    """Reference DOF values of the pullback of an analytic function.

    Vertex DOFs are point values at mapped corners; facet DOFs are outward
    mean normal derivatives of the pullback, i.e. h times the physical facet
    mean of the matching gradient component.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (element.dim,):
        raise ValueError(f"center must have shape ({element.dim},)")
    if h <= 0:
        raise ValueError(f"half-width must be positive, got {h!r}")
    warnings = ()
    if quad_order < DEFAULT_QUAD_ORDER:
        warnings = (
            f"facet quadrature order {quad_order} is below the configured "
            f"default {DEFAULT_QUAD_ORDER}; facet means of non-polynomial "
            "integrands may be inexact",
        )
    coeffs = np.empty(element.ndof)
    for i, dof in enumerate(element.dofs):
        if dof.kind == "vertex-value":
            coeffs[i] = f.value(center + h * np.asarray(dof.point))
        else:
            rule = facet_rule(element.dim, dof.axis, dof.side, quad_order)
            phys = center + h * rule.points
            comp = f.gradient(phys)[:, dof.axis]
            mean = comp @ rule.weights / 2.0 ** (element.dim - 1)
            coeffs[i] = dof.normal_sign * h * mean
    return coeffs, warnings


def canonical_interpolate(element: ReferenceElement, f, *, center=None, h=None,
                          quad_order: int = DEFAULT_QUAD_ORDER) -> InterpolationResult:
    """Interpolate into the shape space by matching all degrees of freedom.

    Polynomial input is treated in reference coordinates and handled exactly.
    Analytic input (objects with value/gradient) needs the cell geometry
    (center, h); facet means then use Gauss quadrature of the stated order.
    """
    if isinstance(f, Polynomial):
        if f.dim != element.dim:
            raise ValueError("dimension mismatch")
        coeffs = np.array([dof.apply(f) for dof in element.dofs])
        warnings = ()
    else:
        if center is None or h is None:
            raise ValueError("analytic input needs the cell geometry (center, h)")
        coeffs, warnings = interpolation_dofs(element, f, center, h, quad_order)

    interpolant = Polynomial.zero(element.dim)
    for c, phi in zip(coeffs, element.basis):
        if c != 0.0:
            interpolant = interpolant + c * phi
    error = f - interpolant if isinstance(f, Polynomial) else None
    return InterpolationResult(coeffs, interpolant, error, warnings)


# ---------------------------------------------------------------------------
# moment projection onto quartics
# ---------------------------------------------------------------------------

def multi_indices_up_to(dim: int, degree: int):
    """All exponent tuples with total degree <= degree, sorted by (degree, exps)."""
    out = [
        alpha
        for alpha in itertools.product(range(degree + 1), repeat=dim)
        if sum(alpha) <= degree
    ]
    out.sort(key=lambda a: (sum(a), a))
    return out


def moment_project(f: Polynomial) -> Polynomial:
    """Projection onto quartics matching every derivative moment up to order 4.

    The projection P satisfies int_box d^alpha (P - f) = 0 for all |alpha| <= 4.
    """
    dim = f.dim
    alphas = multi_indices_up_to(dim, 4)
    monos = alphas  # the same index set spans the quartic target space
    size = len(alphas)
    system = np.empty((size, size))
    rhs = np.empty(size)
    for r, alpha in enumerate(alphas):
        rhs[r] = f.diff_multi(alpha).integrate_box()
        for c, exps in enumerate(monos):
            system[r, c] = Polynomial.monomial(dim, exps).diff_multi(alpha).integrate_box()
    # The moment matrix is square and nonsingular for this pairing; a failure
    # here means the index bookkeeping broke, not bad input.
    sol = np.linalg.solve(system, rhs)
    return Polynomial(dim, {exps: sol[c] for c, exps in enumerate(monos) if sol[c] != 0.0})


def commuting_discrepancy(f: Polynomial) -> float:
    """Max over |alpha| = 4 of |d^alpha P(f) - mean(d^alpha f)|.

    Fourth derivatives of the projection are constants, so projecting then
    differentiating should reproduce the mean of the derivative exactly.
    """
    proj = moment_project(f)
    worst = 0.0
    for alpha in multi_indices_up_to(f.dim, 4):
        if sum(alpha) != 4:
            continue
        lhs = proj.diff_multi(alpha).coefficient((0,) * f.dim)
        rhs = f.diff_multi(alpha).box_mean()
        worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# interpolation error structure on quartics
# ---------------------------------------------------------------------------

def taylor_error_leading_term(element: ReferenceElement, f: Polynomial) -> Polynomial:
    """Exact interpolation error of a quartic, for comparison against bubbles."""
    if f.degree() > 4:
        raise ValueError("leading-term analysis requires degree <= 4")
    return canonical_interpolate(element, f).error


def bubble_expansion(bubbles: BubbleSet, f: Polynomial) -> Polynomial:
    """Interpolation error predicted by the bubble table for a quartic input.

    In reference coordinates the error of a quartic f decomposes as
        sum_{i != j} mean(f_iij)/2 * phi_ij  + sum_i f_iiii/24 * psi_i
      + sum_{i < j} f_iijj/4 * p_ij          + sum_{i != j} f_iiij/6 * q_ij
    with constant fourth derivatives.  In 3D the decomposition does not cover
    the mixed quartics xi_i^2 xi_j xi_k; callers probing those monomials will
    see the residual.
    """
    if f.dim != bubbles.dim:
        raise ValueError("dimension mismatch")
    if f.degree() > 4:
        raise ValueError("bubble expansion requires degree <= 4")
    out = Polynomial.zero(f.dim)
    for (i, j), poly in bubbles.phi.items():
        coeff = f.diff(i, 2).diff(j, 1).box_mean() / 2.0
        out = out + coeff * poly
    for i, poly in bubbles.psi.items():
        coeff = f.diff(i, 4).box_mean() / 24.0
        out = out + coeff * poly
    for (i, j), poly in bubbles.p.items():
        coeff = f.diff(i, 2).diff(j, 2).box_mean() / 4.0
        out = out + coeff * poly
    for (i, j), poly in bubbles.q.items():
        coeff = f.diff(i, 3).diff(j, 1).box_mean() / 6.0
        out = out + coeff * poly
    return out


def refined_identity_check(element: ReferenceElement, u: Polynomial, v: Polynomial,
                           h: float = 1.0):
    """Both sides of the refined interpolation identity on one cell.

    Left side: broken Hessian inner product of the interpolation error of u
    against v.  Right side: (h^2/3) sum_{i != j} int u_ijj v_iii in physical
    scaling.  For quartic u and shape-space v the two agree in 2D; in 3D the
    identity holds once the mixed quartics xi_i^2 xi_j xi_k are excluded.
    Returns (lhs, rhs), both carrying the physical factor h^(dim-4).
    """
    dim = element.dim
    if u.dim != dim or v.dim != dim:
        raise ValueError("dimension mismatch")
    if h <= 0:
        raise ValueError(f"half-width must be positive, got {h!r}")
    err = canonical_interpolate(element, u).error
    scale = float(h) ** (dim - 4)
    lhs = 0.0
    for a in range(dim):
        for b in range(dim):
            lhs += (err.diff(a).diff(b) * v.diff(a).diff(b)).integrate_box()
    rhs = 0.0
    for i in range(dim):
        for j in range(dim):
            if i == j:
                continue
            rhs += (u.diff(i, 1).diff(j, 2) * v.diff(i, 3)).integrate_box()
    return scale * lhs, scale * rhs / 3.0


# ---------------------------------------------------------------------------
# global interpolation convergence probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceProbe:
    """Broken-seminorm interpolation errors across mesh refinements."""

    n_values: tuple
    h_values: np.ndarray
    errors: dict
    orders: dict


def interpolation_convergence_probe(f, dim: int, n_values, orders=(0, 1, 2),
                                    quad_order: int = DEFAULT_QUAD_ORDER,
                                    domain=None) -> ConvergenceProbe:
    """Measure cellwise interpolation errors of an analytic function.

    For seminorm order l the error is the broken H^l seminorm of f minus its
    cellwise canonical interpolant; observed orders are least-squares slopes
    in log h.  Interpolation is purely local, so no boundary conditions enter.
    """
    from .mesh import build_mesh  # local import keeps module dependencies one-way

    element = build_reference_element(dim)
    rule = tensor_rule(dim, quad_order)
    if any(l not in (0, 1, 2) for l in orders):
        raise ValueError("seminorm orders must be in {0, 1, 2}")

    deriv_alphas = {
        0: [tuple([0] * dim)],
        1: [tuple(1 if a == ax else 0 for a in range(dim)) for ax in range(dim)],
        2: [
            tuple((a == ax) + (a == bx) for a in range(dim))
            for ax in range(dim)
            for bx in range(dim)
        ],
    }
    tables = {
        l: [element.eval_basis(alpha, rule.points) for alpha in deriv_alphas[l]]
        for l in orders
    }

    errors = {l: [] for l in orders}
    h_values = []
    for n in n_values:
        mesh = build_mesh(dim, n, domain)
        h = mesh.half_width
        h_values.append(h)
        acc = {l: 0.0 for l in orders}
        for e in range(mesh.num_elements):
            center, _ = mesh.element_geometry(e)
            coeffs, _ = interpolation_dofs(element, f, center, h, quad_order)
            phys = center + h * rule.points
            for l in orders:
                if l == 0:
                    exact = [f.value(phys)]
                elif l == 1:
                    grad = f.gradient(phys)
                    exact = [grad[:, a] for a in range(dim)]
                else:
                    hess = f.hessian(phys)
                    exact = [
                        hess[:, a, b] for a in range(dim) for b in range(dim)
                    ]
                cell = 0.0
                for table, target in zip(tables[l], exact):
                    diff = target - (table @ coeffs) / h ** l
                    cell += diff * diff @ rule.weights
                acc[l] += cell * h ** dim
        for l in orders:
            errors[l].append(math.sqrt(acc[l]))

    h_arr = np.array(h_values)
    err_arrays = {l: np.array(vals) for l, vals in errors.items()}
    slopes = {}
    for l, vals in err_arrays.items():
        if len(vals) >= 2 and np.all(vals > 0):
            slopes[l] = float(np.polyfit(np.log(h_arr), np.log(vals), 1)[0])
        else:
            slopes[l] = float("nan")
    return ConvergenceProbe(tuple(n_values), h_arr, err_arrays, slopes)


# ---------------------------------------------------------------------------
# verification records and suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRecord:
    """One verified equality (or documented deviation) with its tolerance."""

    name: str
    lhs: float
    rhs: float
    tol: float
    passed: bool
    deviation: bool = False
    note: str = ""

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)


def equality_record(name, lhs, rhs, tol, note="") -> CheckRecord:
    return CheckRecord(name, float(lhs), float(rhs), tol,
                       passed=bool(abs(lhs - rhs) <= tol), note=note)


def deviation_record(name, lhs, rhs, tol, note="") -> CheckRecord:
    """A record that passes when the published claim demonstrably fails."""
    return CheckRecord(name, float(lhs), float(rhs), tol,
                       passed=bool(abs(lhs - rhs) > tol), deviation=True, note=note)


@dataclass
class VerificationReport:
    suite: str
    records: list = field(default_factory=list)
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def extend(self, records):
        self.records.extend(records)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "name": r.name,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "abs_diff": r.abs_diff,
                    "tol": r.tol,
                    "passed": r.passed,
                    "deviation": r.deviation,
                    "note": r.note,
                }
                for r in self.records
            ],
        }

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}" + (f" (seed={self.seed})" if self.seed is not None else "")]
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            kind = " deviation" if r.deviation else ""
            lines.append(
                f"[{status}]{kind} {r.name}: lhs={r.lhs:.12g} rhs={r.rhs:.12g} "
                f"|diff|={r.abs_diff:.3e} tol={r.tol:.1e}"
                + (f"  ({r.note})" if r.note else "")
            )
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _max_dof_value(element: ReferenceElement, poly: Polynomial) -> float:
    return max(abs(element.apply_dof(i, poly)) for i in range(element.ndof))


def run_bubble_suite(dims=(2, 3)) -> VerificationReport:
    """Every corrected bubble annihilates every DOF; the published p does not."""
    report = VerificationReport("bubbles")
    for dim in dims:
        element = build_reference_element(dim)
        bubbles = build_bubbles(dim)
        expected = 7 if dim == 2 else 18
        report.records.append(
            equality_record(f"{dim}d/count", bubbles.count, expected, 0.0)
        )
        for name, poly in bubbles.corrected_items():
            report.records.append(
                equality_record(
                    f"{dim}d/{name}/max-dof", _max_dof_value(element, poly), 0.0, 1e-12
                )
            )
        for (i, j), poly in sorted(bubbles.p_published.items()):
            report.records.append(
                deviation_record(
                    f"{dim}d/p-published({i},{j})/max-dof",
                    _max_dof_value(element, poly),
                    0.0,
                    1e-12,
                    note="published p does not vanish at corners; corrected "
                         "form xi_i^2 xi_j^2 - (xi_i^2 + xi_j^2 + 1)/3 is used",
                )
            )
    return report


def run_commuting_suite(dims=(2, 3), max_degree: int = 6) -> VerificationReport:
    """Projection then fourth derivative equals the averaged fourth derivative."""
    report = VerificationReport("commuting")
    for dim in dims:
        for degree in range(max_degree + 1):
            worst = 0.0
            for alpha in multi_indices_up_to(dim, max_degree):
                if sum(alpha) != degree:
                    continue
                worst = max(worst, commuting_discrepancy(Polynomial.monomial(dim, alpha)))
            report.records.append(
                equality_record(f"{dim}d/degree-{degree}/max-monomial", worst, 0.0, 1e-12)
            )
    return report


def _random_polynomial(dim, alphas, rng) -> Polynomial:
    coeffs = rng.uniform(-1.0, 1.0, size=len(alphas))
    return Polynomial(dim, dict(zip(alphas, coeffs)))


def run_refined_identity_suite(dim: int, n_pairs: int = 200,
                               seed: int = DEFAULT_SEED) -> VerificationReport:
    """Randomized cellwise check of the refined interpolation identity.

    Quartic u against shape-space v on cells of random half-width.  In 3D the
    u samples exclude the mixed quartics xi_i^2 xi_j xi_k, where the identity
    genuinely fails; the documented counterexample is reported as a deviation.
    """
    element = build_reference_element(dim)
    report = VerificationReport(f"refined-identity-{dim}d", seed=seed)
    rng = np.random.default_rng(seed)

    u_alphas = multi_indices_up_to(dim, 4)
    if dim == 3:
        excluded = {a for a in u_alphas if sorted(a) == [1, 1, 2]}
        u_alphas = [a for a in u_alphas if a not in excluded]
    v_alphas = list(element.monomials)

    worst = 0.0
    for _ in range(n_pairs):
        u = _random_polynomial(dim, u_alphas, rng)
        v = _random_polynomial(dim, v_alphas, rng)
        h = rng.uniform(0.1, 1.0)
        lhs, rhs = refined_identity_check(element, u, v, h)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    report.records.append(
        equality_record(
            f"{dim}d/random-pairs/max-scaled-residual", worst, 0.0, 1e-10,
            note=f"{n_pairs} pairs, residual scaled by 1 + |lhs|",
        )
    )

    if dim == 2:
        u = Polynomial(2, {(1, 2): 1.0})  # xi1 * xi2^2
        v = Polynomial(2, {(3, 0): 1.0})  # xi1^3
        lhs, rhs = refined_identity_check(element, u, v, h=1.0)
        report.records.append(
            equality_record("2d/worked-case/lhs-value", lhs, 16.0, 1e-10)
        )
        report.records.append(
            equality_record("2d/worked-case/identity", lhs, rhs, 1e-10)
        )
    else:
        u = Polynomial(3, {(2, 1, 1): 1.0})  # xi1^2 xi2 xi3
        v = Polynomial(3, {(0, 1, 1): 1.0})  # xi2 xi3
        lhs, rhs = refined_identity_check(element, u, v, h=1.0)
        report.records.append(
            equality_record(
                "3d/excluded-family/lhs-value", lhs, -32.0 / 3.0, 1e-10,
                note="interpolation error of xi1^2 xi2 xi3 is (xi1^2 - 1) xi2 xi3",
            )
        )
        report.records.append(
            deviation_record(
                "3d/excluded-family/identity-gap", lhs, rhs, 1.0,
                note="identity omits the mixed quartics xi_i^2 xi_j xi_k; "
                     "right side vanishes while the left side does not",
            )
        )
    return report
