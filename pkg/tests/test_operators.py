import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectmorley.element import build_reference_element
from rectmorley.functions import PolynomialFunction, unit_box_eigenfunction
from rectmorley.operators import (VerificationReport, build_bubbles,
                                  bubble_expansion, canonical_interpolate,
                                  commuting_discrepancy, deviation_record,
                                  equality_record,
                                  interpolation_convergence_probe,
                                  interpolation_dofs, moment_project,
                                  multi_indices_up_to, refined_identity_check,
                                  run_bubble_suite, run_commuting_suite,
                                  run_refined_identity_suite,
                                  taylor_error_leading_term)
from rectmorley.polynomial import Polynomial
from rectmorley.quadrature import facet_rule, tensor_rule


def random_quartic(dim, rng):
    alphas = multi_indices_up_to(dim, 4)
    coeffs = rng.uniform(-1.0, 1.0, size=len(alphas))
    return Polynomial(dim, dict(zip(alphas, coeffs)))


# ---------------------------------------------------------------------------
# canonical interpolation
# ---------------------------------------------------------------------------

def test_interpolant_of_mixed_cubic_has_closed_form(ref2):
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    u = x * y ** 2
    result = canonical_interpolate(ref2, u)
    expected = (4.0 / 3.0) * x - (1.0 / 3.0) * x ** 3
    assert result.interpolant.almost_equal(expected, tol=1e-12)
    # The error is exactly the phi bubble with the squared axis first.
    bubbles = build_bubbles(2)
    assert result.error.almost_equal(bubbles.phi[(1, 0)], tol=1e-12)


def test_interpolant_of_mixed_quartic_3d(ref3):
    u = Polynomial.monomial(3, (2, 1, 1))
    result = canonical_interpolate(ref3, u)
    expected = Polynomial.monomial(3, (0, 1, 1))
    assert result.interpolant.almost_equal(expected, tol=1e-12)
    err = result.error
    lhs = Polynomial.monomial(3, (2, 1, 1)) - Polynomial.monomial(3, (0, 1, 1))
    assert err.almost_equal(lhs, tol=1e-12)


def oracle_interpolate(element, f):
    """Solve the DOF matching system directly from quadrature, bypassing the
    precomputed nodal basis."""
    ndof = element.ndof
    vander = np.empty((ndof, ndof))
    data = np.empty(ndof)
    for i, dof in enumerate(element.dofs):
        if dof.axis is None:
            pt = np.array(dof.point)
            data[i] = float(f(pt))
            for j, exps in enumerate(element.monomials):
                vander[i, j] = float(Polynomial.monomial(element.dim, exps)(pt))
        else:
            rule = facet_rule(element.dim, dof.axis, dof.side, 6)
            area = rule.weights.sum()

            def mean_normal(poly):
                vals = poly.diff(dof.axis)(rule.points)
                return dof.normal_sign * float(vals @ rule.weights) / area

            data[i] = mean_normal(f)
            for j, exps in enumerate(element.monomials):
                vander[i, j] = mean_normal(Polynomial.monomial(element.dim, exps))
    sol = np.linalg.solve(vander, data)
    return Polynomial(element.dim, dict(zip(element.monomials, sol)))


@pytest.mark.parametrize("dim", [2, 3])
def test_interpolation_matches_independent_quadrature_solve(dim):
    element = build_reference_element(dim)
    rng = np.random.default_rng(11 + dim)
    for _ in range(3):
        f = random_quartic(dim, rng)
        ours = canonical_interpolate(element, f).interpolant
        theirs = oracle_interpolate(element, f)
        assert ours.almost_equal(theirs, tol=1e-10)


def test_analytic_and_exact_paths_agree(ref2):
    poly = Polynomial(2, {(0, 0): 0.5, (1, 2): 1.0, (3, 0): -2.0, (2, 2): 0.25})
    exact = canonical_interpolate(ref2, poly)
    analytic = canonical_interpolate(
        ref2, PolynomialFunction(poly), center=np.zeros(2), h=1.0
    )
    assert analytic.coefficients == pytest.approx(exact.coefficients, abs=1e-12)
    assert analytic.error is None


def test_low_quadrature_order_warns(ref2):
    f = PolynomialFunction(Polynomial.monomial(2, (2, 2)))
    coeffs, warnings = interpolation_dofs(ref2, f, np.zeros(2), 1.0, quad_order=2)
    assert len(warnings) == 1
    assert "quadrature" in warnings[0]
    assert coeffs.shape == (8,)


def test_interpolation_rejects_bad_geometry(ref2):
    f = PolynomialFunction(Polynomial.monomial(2, (2, 0)))
    with pytest.raises(ValueError):
        canonical_interpolate(ref2, f)
    with pytest.raises(ValueError):
        interpolation_dofs(ref2, f, np.zeros(3), 1.0)
    with pytest.raises(ValueError):
        interpolation_dofs(ref2, f, np.zeros(2), -1.0)


@settings(max_examples=40, deadline=None)
@given(
    data=st.lists(
        st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
        min_size=15,
        max_size=15,
    )
)
def test_error_has_vanishing_dofs_and_projection_is_idempotent(data, ref2):
    alphas = multi_indices_up_to(2, 4)
    f = Polynomial(2, dict(zip(alphas, data)))
    result = canonical_interpolate(ref2, f)
    for i in range(ref2.ndof):
        assert abs(ref2.apply_dof(i, result.error)) < 1e-9
    again = canonical_interpolate(ref2, result.interpolant)
    assert again.interpolant.almost_equal(result.interpolant, tol=1e-9)
    assert again.error.max_abs_coeff() < 1e-9


# ---------------------------------------------------------------------------
# moment projection
# ---------------------------------------------------------------------------

def test_multi_index_enumeration():
    quartics_2d = multi_indices_up_to(2, 4)
    assert len(quartics_2d) == 15
    assert quartics_2d[0] == (0, 0)
    assert sorted(quartics_2d) == sorted(set(quartics_2d))
    assert all(sum(a) <= 4 for a in quartics_2d)
    assert len(multi_indices_up_to(3, 4)) == 35


@pytest.mark.parametrize("dim", [2, 3])
def test_moment_projection_fixes_quartics(dim):
    rng = np.random.default_rng(5 + dim)
    f = random_quartic(dim, rng)
    assert moment_project(f).almost_equal(f, tol=1e-10)


def test_moment_projection_of_fifth_power():
    # Matching all derivative moments up to order four sends xi^5 to
    # (10/3) xi^3 - (7/3) xi.
    f = Polynomial.monomial(2, (5, 0))
    proj = moment_project(f)
    x = Polynomial.variable(2, 0)
    assert proj.almost_equal((10.0 / 3.0) * x ** 3 - (7.0 / 3.0) * x, tol=1e-10)


def test_moment_projection_matches_all_low_order_moments():
    rng = np.random.default_rng(23)
    alphas = multi_indices_up_to(2, 6)
    f = Polynomial(2, dict(zip(alphas, rng.uniform(-1, 1, size=len(alphas)))))
    proj = moment_project(f)
    assert proj.degree() <= 4
    for alpha in multi_indices_up_to(2, 4):
        gap = (proj - f).diff_multi(alpha).integrate_box()
        assert abs(gap) < 1e-10


@pytest.mark.parametrize("dim", [2, 3])
def test_commuting_discrepancy_vanishes_through_degree_six(dim):
    for alpha in multi_indices_up_to(dim, 6):
        assert commuting_discrepancy(Polynomial.monomial(dim, alpha)) < 1e-12


# ---------------------------------------------------------------------------
# bubbles
# ---------------------------------------------------------------------------

def test_bubble_counts():
    assert build_bubbles(2).count == 7
    assert build_bubbles(3).count == 18
    with pytest.raises(ValueError):
        build_bubbles(4)


@pytest.mark.parametrize("dim", [2, 3])
def test_all_corrected_bubbles_annihilate_every_dof(dim):
    element = build_reference_element(dim)
    bubbles = build_bubbles(dim)
    for name, poly in bubbles.corrected_items():
        for i in range(element.ndof):
            assert abs(element.apply_dof(i, poly)) < 1e-12, name


def test_published_p_fails_at_corners():
    bubbles = build_bubbles(2)
    published = bubbles.p_published[(0, 1)]
    corner = np.array([1.0, 1.0])
    assert published(corner) == pytest.approx(1.0)
    # The corrected form does vanish there and at every other corner.
    corrected = bubbles.p[(0, 1)]
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            assert corrected(np.array([sx, sy])) == pytest.approx(0.0, abs=1e-14)


def test_corrected_p_has_same_key_derivatives_as_its_role():
    # The role of p in the error expansion pins d^2/dxi_j^2 = 2 xi_i^2 - 2/3
    # and the mixed derivative 4 xi_i xi_j.
    p = build_bubbles(2).p[(0, 1)]
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert p.diff(1, 2).almost_equal(2.0 * x ** 2 - Polynomial.constant(2, 2.0 / 3.0))
    assert p.diff_multi((1, 1)).almost_equal(4.0 * x * y)


# ---------------------------------------------------------------------------
# error expansion on quartics
# ---------------------------------------------------------------------------

def test_bubble_expansion_reproduces_error_for_all_2d_quartics(ref2):
    bubbles = build_bubbles(2)
    for alpha in multi_indices_up_to(2, 4):
        f = Polynomial.monomial(2, alpha)
        exact = taylor_error_leading_term(ref2, f)
        predicted = bubble_expansion(bubbles, f)
        assert (exact - predicted).max_abs_coeff() < 1e-12, alpha


def test_bubble_expansion_covers_3d_except_mixed_family(ref3):
    bubbles = build_bubbles(3)
    for alpha in multi_indices_up_to(3, 4):
        f = Polynomial.monomial(3, alpha)
        exact = taylor_error_leading_term(ref3, f)
        predicted = bubble_expansion(bubbles, f)
        gap = (exact - predicted).max_abs_coeff()
        if sorted(alpha) == [1, 1, 2]:
            assert gap > 0.5, alpha
        else:
            assert gap < 1e-12, alpha


def test_mixed_family_error_is_the_tensor_bubble(ref3):
    f = Polynomial.monomial(3, (2, 1, 1))
    err = taylor_error_leading_term(ref3, f)
    x = Polynomial.variable(3, 0)
    y = Polynomial.variable(3, 1)
    z = Polynomial.variable(3, 2)
    assert err.almost_equal((x * x - 1.0) * y * z, tol=1e-12)
    assert bubble_expansion(build_bubbles(3), f).max_abs_coeff() < 1e-12


def test_expansion_rejects_high_degree(ref2):
    f = Polynomial.monomial(2, (5, 0))
    with pytest.raises(ValueError):
        taylor_error_leading_term(ref2, f)
    with pytest.raises(ValueError):
        bubble_expansion(build_bubbles(2), f)


# ---------------------------------------------------------------------------
# refined identity
# ---------------------------------------------------------------------------

def test_refined_identity_worked_case(ref2):
    u = Polynomial.monomial(2, (1, 2))
    v = Polynomial.monomial(2, (3, 0))
    lhs, rhs = refined_identity_check(ref2, u, v, h=1.0)
    assert lhs == pytest.approx(16.0, abs=1e-12)
    assert rhs == pytest.approx(16.0, abs=1e-12)


def test_refined_identity_left_side_matches_quadrature(ref2):
    u = Polynomial.monomial(2, (1, 2))
    v = Polynomial.monomial(2, (3, 0))
    lhs, _ = refined_identity_check(ref2, u, v, h=1.0)
    err = canonical_interpolate(ref2, u).error
    rule = tensor_rule(2, 5)
    quad = 0.0
    for a in range(2):
        for b in range(2):
            vals = err.diff(a).diff(b)(rule.points) * v.diff(a).diff(b)(rule.points)
            quad += float(vals @ rule.weights)
    assert lhs == pytest.approx(quad, abs=1e-12)


def test_refined_identity_scales_like_h_to_dim_minus_four(ref2, ref3):
    rng = np.random.default_rng(9)
    for element in (ref2, ref3):
        dim = element.dim
        u = random_quartic(dim, rng)
        v = Polynomial.monomial(dim, element.monomials[-1])
        base_lhs, base_rhs = refined_identity_check(element, u, v, h=1.0)
        lhs, rhs = refined_identity_check(element, u, v, h=0.5)
        factor = 0.5 ** (dim - 4)
        assert lhs == pytest.approx(factor * base_lhs, rel=1e-12, abs=1e-12)
        assert rhs == pytest.approx(factor * base_rhs, rel=1e-12, abs=1e-12)


def test_refined_identity_trivial_for_shape_space_input(ref2):
    rng = np.random.default_rng(2)
    for _ in range(3):
        u = Polynomial(
            2,
            dict(zip(ref2.monomials, rng.uniform(-1, 1, size=ref2.ndof))),
        )
        v = Polynomial.monomial(2, (3, 0))
        lhs, rhs = refined_identity_check(ref2, u, v, h=0.7)
        assert abs(lhs) < 1e-10
        assert abs(rhs) < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    ucoeffs=st.lists(
        st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
        min_size=15,
        max_size=15,
    ),
    vindex=st.integers(min_value=0, max_value=7),
    h=st.floats(min_value=0.05, max_value=2.0),
)
def test_refined_identity_holds_for_random_2d_pairs(ucoeffs, vindex, h, ref2):
    u = Polynomial(2, dict(zip(multi_indices_up_to(2, 4), ucoeffs)))
    v = Polynomial.monomial(2, ref2.monomials[vindex])
    lhs, rhs = refined_identity_check(ref2, u, v, h=h)
    assert abs(lhs - rhs) < 1e-9 * (1.0 + abs(lhs))


# ---------------------------------------------------------------------------
# convergence probes
# ---------------------------------------------------------------------------

def test_probe_orders_for_smooth_eigenfunction():
    probe = interpolation_convergence_probe(
        unit_box_eigenfunction((1, 1)), 2, (4, 8, 16)
    )
    assert abs(probe.orders[0] - 3.0) < 0.3
    assert abs(probe.orders[1] - 2.0) < 0.3
    assert abs(probe.orders[2] - 1.0) < 0.3
    for l in (0, 1, 2):
        assert np.all(np.diff(probe.errors[l]) < 0)


def test_probe_superconverges_on_pure_quartic():
    # x^4 has no mixed third derivatives, so the h^3 bubble terms drop out and
    # the per-cell error is exactly h^4 psi; each seminorm gains one extra
    # order over the generic bound 3 - l.
    f = PolynomialFunction(Polynomial.monomial(2, (4, 0)))
    probe = interpolation_convergence_probe(f, 2, (2, 4, 8))
    for l in (0, 1, 2):
        assert probe.orders[l] > 3.0 - l - 0.1  # generic bound
        assert abs(probe.orders[l] - (4.0 - l)) < 0.1  # observed gain


def test_probe_is_sharp_on_mixed_cubic():
    # x^2 y has a constant mixed third derivative, activating the h^3 term.
    f = PolynomialFunction(Polynomial.monomial(2, (2, 1)))
    probe = interpolation_convergence_probe(f, 2, (2, 4, 8))
    for l in (0, 1, 2):
        assert abs(probe.orders[l] - (3.0 - l)) < 0.1


def test_probe_reproduces_shape_space_functions_to_rounding():
    f = PolynomialFunction(
        Polynomial(2, {(2, 0): 1.0, (1, 1): -0.5, (0, 1): 2.0, (0, 0): 0.25})
    )
    probe = interpolation_convergence_probe(f, 2, (2, 4))
    for l in (0, 1, 2):
        assert np.all(probe.errors[l] < 1e-12)


def test_probe_3d_machinery():
    f = PolynomialFunction(Polynomial.monomial(3, (2, 1, 0)))
    probe = interpolation_convergence_probe(f, 3, (2, 4), orders=(0, 2))
    assert abs(probe.orders[0] - 3.0) < 0.2
    assert abs(probe.orders[2] - 1.0) < 0.2


def test_probe_rejects_bad_orders():
    f = PolynomialFunction(Polynomial.monomial(2, (4, 0)))
    with pytest.raises(ValueError):
        interpolation_convergence_probe(f, 2, (2, 4), orders=(0, 3))


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

def test_bubble_suite_passes_and_serializes():
    report = run_bubble_suite()
    assert report.passed
    payload = report.to_json_dict()
    json.dumps(payload)
    assert payload["suite"] == "bubbles"
    assert payload["passed"] is True
    names = [r["name"] for r in payload["checks"]]
    assert "2d/count" in names
    deviations = [r for r in payload["checks"] if r["deviation"]]
    assert len(deviations) == 1 + 3  # one published p in 2D, three in 3D
    text = report.to_text()
    assert "PASS" in text and "FAIL" not in text.replace("result: PASS", "")


def test_commuting_suite_passes():
    report = run_commuting_suite()
    assert report.passed
    assert len(report.records) == 14


@pytest.mark.parametrize("dim", [2, 3])
def test_refined_identity_suite_passes(dim):
    report = run_refined_identity_suite(dim, n_pairs=40, seed=99)
    assert report.passed
    json.dumps(report.to_json_dict())


def test_refined_identity_suite_is_deterministic():
    a = run_refined_identity_suite(2, n_pairs=25, seed=1729)
    b = run_refined_identity_suite(2, n_pairs=25, seed=1729)
    assert a.to_json_dict() == b.to_json_dict()


def test_check_records_from_numpy_scalars_serialize():
    # comparisons of np.float64 yield np.bool_, which json refuses
    eq = equality_record("eq", np.float64(1.0), np.float64(1.0 + 1e-15), 1e-12)
    dev = deviation_record("dev", np.float64(2.0), np.float64(0.0), 1e-12)
    for rec in (eq, dev):
        assert type(rec.passed) is bool
        assert type(rec.lhs) is float and type(rec.rhs) is float
    assert eq.passed and dev.passed
    json.dumps(VerificationReport("s", [eq, dev]).to_json_dict())
