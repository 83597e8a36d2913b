"""Conserved/dissipated quantities, Noether symmetries, sampling reports.

The running example is the particle with H = p^2/2 - kappa*z (kappa = 2):
  - k  = z - p^2/(2 kappa)        is dissipated  (X_H k = kappa k),
  - g  = exp(-kappa t) k          is conserved,
  - f2 = (p - kappa q)/sqrt(2 kappa) is conserved,
and H itself is dissipated (X_H H = -H dH/dz for autonomous H).
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from cocontact.dynamics import ScalarField, integrate
from cocontact.geometry import PhasePoint, TangentVector, eta
from cocontact.quantities import (
    DEFAULT_BOX,
    NotApplicable,
    QuantityReport,
    SkipPoint,
    bracket_characterization_residual,
    conservation_residual,
    conserved_drift,
    cumulative_quadratic_integral,
    dissipated_drift,
    dissipation_residual,
    flow_derivative,
    lie_bracket_fd,
    noether_symmetry,
    product_quotient_check,
    sample_box,
    sample_report,
    symmetry_residual,
)

KAPPA = 2.0
H_KAPPA = ScalarField.from_expression("p1^2/2 - kappa*z", params={"kappa": KAPPA})
F_DISS = ScalarField.from_expression("z - p1^2/(2*kappa)", params={"kappa": KAPPA})
G_CONS = ScalarField.from_expression(
    "exp(-kappa*t)*(z - p1^2/(2*kappa))", params={"kappa": KAPPA})
F2_CONS = ScalarField.from_expression(
    "(p1 - kappa*q1)/sqrt(2*kappa)", params={"kappa": KAPPA})

FD_SYMMETRY_TOL = 1e-5  # Lie brackets are finite-differenced
DRIFT_TOL_CONSERVED = 1e-6
DRIFT_TOL_DISSIPATED = 1e-5


def grid_points(count=60, seed=5):
    return sample_box(1, count=count, seed=seed)


class TestFlowDerivative:
    def test_matches_directional_difference(self):
        """Central difference of f along the straight line in the X_H
        direction agrees with the assembled derivative to O(h^2)."""
        from cocontact.dynamics import hamiltonian_vector_field

        f = ScalarField.from_expression("sin(q1)*p1 + z^2/4")
        for x in grid_points(30):
            v = hamiltonian_vector_field(H_KAPPA, x)
            h = 1e-6
            fd = (f.value(x.shifted(v, h)) - f.value(x.shifted(v, -h))) / (2 * h)
            assert abs(flow_derivative(f, H_KAPPA, x) - fd) < 1e-7 * max(
                1.0, abs(fd))

    def test_conserved_quantities_have_zero_flow_derivative(self):
        for x in grid_points(60):
            assert abs(conservation_residual(G_CONS, H_KAPPA, x)) < 1e-12
            assert abs(conservation_residual(F2_CONS, H_KAPPA, x)) < 1e-12


class TestDissipation:
    def test_known_dissipated_quantities(self):
        for x in grid_points(60):
            assert abs(dissipation_residual(F_DISS, H_KAPPA, x)) < 1e-12
            # an autonomous Hamiltonian dissipates itself
            assert abs(dissipation_residual(H_KAPPA, H_KAPPA, x)) < 1e-12

    def test_conserved_quantity_is_not_dissipated(self):
        x = PhasePoint(0.5, (1.0,), (1.0,), 1.0)
        assert abs(dissipation_residual(G_CONS, H_KAPPA, x)) > 1e-3

    def test_bracket_characterization_agrees(self):
        """The sharp/d(eta) route must reproduce the direct residual; the two
        assemblies share no code beyond the gradient pass."""
        f = ScalarField.from_expression("q1*p1 + exp(z/5) - t^2")
        Hs = [
            H_KAPPA,
            ScalarField.from_expression("p1^2/2 + q1^2/2 + z/5"),
            ScalarField.from_expression("cos(q1)*p1 + t*z"),
        ]
        for H in Hs:
            for x in grid_points(40):
                a = dissipation_residual(f, H, x)
                b = bracket_characterization_residual(f, H, x)
                assert abs(a - b) < 1e-10 * max(1.0, abs(a))

    @given(st.floats(0.1, 2.0), st.floats(-2, 2), st.floats(-2, 2),
           st.floats(-2, 2))
    @settings(max_examples=50, deadline=None)
    def test_characterization_identity_random_points(self, t, q, p, z):
        x = PhasePoint(t, (q,), (p,), z)
        f = ScalarField.from_expression("p1^2*q1 - z*t")
        H = ScalarField.from_expression("p1^2/2 + sin(q1) + z/3")
        a = dissipation_residual(f, H, x)
        b = bracket_characterization_residual(f, H, x)
        assert abs(a - b) < 1e-9 * max(1.0, abs(a))


class TestNoether:
    def test_generator_recovered(self):
        """-eta(Y) rebuilds the generating function: the z-component of Y is
        p.f_p - f and eta subtracts p.f_p again, so only the one rounding in
        that cancellation separates the two."""
        Y = noether_symmetry(F_DISS)
        for x in grid_points(60):
            assert abs(-eta(x, Y(x)) - F_DISS.value(x)) < 1e-10

    def test_dissipated_generator_gives_symmetry(self):
        Y = noether_symmetry(F_DISS)
        for x in grid_points(25, seed=7):
            eta_res, tau_res = symmetry_residual(Y, H_KAPPA, x)
            assert eta_res < FD_SYMMETRY_TOL
            assert tau_res == 0.0

    def test_hamiltonian_itself_generates_symmetry(self):
        Y = noether_symmetry(H_KAPPA)
        for x in grid_points(25, seed=8):
            eta_res, tau_res = symmetry_residual(Y, H_KAPPA, x)
            assert eta_res < FD_SYMMETRY_TOL
            assert tau_res == 0.0

    def test_conserved_generator_fails_symmetry(self):
        """Conservation is the wrong condition: the symmetry correspondence
        pairs with dissipated quantities, and a merely conserved generator
        leaves a visible eta-residual."""
        Y = noether_symmetry(G_CONS)
        x = PhasePoint(0.3, (0.8,), (1.2,), 0.9)
        eta_res, _ = symmetry_residual(Y, H_KAPPA, x)
        assert eta_res > 0.1


class TestInvolution:
    def test_conserved_pair_of_autonomous_hamiltonian(self):
        """f2 and f2^2 are time-independent first integrals of the kappa
        particle; H-weighted they are in involution.  The t-dependent
        conserved G is excluded: the bracket cannot see d/dt."""
        from cocontact.quantities import involution_residual

        for x in grid_points(40, seed=9):
            r = involution_residual(F2_CONS, F2_CONS * F2_CONS, H_KAPPA, x)
            assert abs(r) < 1e-8 * max(1.0, abs(H_KAPPA.value(x)) ** 2)

    def test_explicit_time_in_integral_breaks_involution(self):
        from cocontact.quantities import involution_residual

        worst = max(
            abs(involution_residual(G_CONS, F2_CONS, H_KAPPA, x))
            for x in grid_points(40, seed=9))
        assert worst > 1e-2

    def test_time_dependent_hamiltonian_rejected(self):
        from cocontact.quantities import involution_residual

        H = ScalarField.from_expression("p1^2/2 + t*q1")
        with pytest.raises(NotApplicable):
            involution_residual(G_CONS, F2_CONS, H,
                                PhasePoint(0.5, (1.0,), (1.0,), 0.0))


class TestProductQuotient:
    def test_quotient_conserved_product_dissipated(self):
        for x in grid_points(60, seed=10):
            try:
                quotient_res, product_res = product_quotient_check(
                    H_KAPPA, F_DISS, G_CONS, H_KAPPA, x)
            except SkipPoint:
                continue
            assert abs(quotient_res) < 1e-10
            assert abs(product_res) < 1e-10

    def test_skip_point_on_small_denominator(self):
        # z - p^2/4 = 0 at (z, p) = (1, 2)
        x = PhasePoint(0.0, (0.5,), (2.0,), 1.0)
        with pytest.raises(SkipPoint):
            product_quotient_check(H_KAPPA, F_DISS, G_CONS, H_KAPPA, x)


class TestSampling:
    def test_sample_box_is_deterministic(self):
        a = sample_box(2, count=50, seed=3)
        b = sample_box(2, count=50, seed=3)
        assert a == b
        c = sample_box(2, count=50, seed=4)
        assert a != c

    def test_sample_box_respects_bounds(self):
        box = ((0.0, 1.0), (-3.0, -1.0), (2.0, 5.0), (0.5, 0.6))
        for x in sample_box(2, count=100, seed=0, box=box):
            assert 0.0 <= x.t <= 1.0
            assert all(-3.0 <= qi <= -1.0 for qi in x.q)
            assert all(2.0 <= pi <= 5.0 for pi in x.p)
            assert 0.5 <= x.z <= 0.6

    def test_default_box_bounds(self):
        for x in sample_box(1, count=100, seed=0):
            assert DEFAULT_BOX[0][0] <= x.t <= DEFAULT_BOX[0][1]
            assert DEFAULT_BOX[1][0] <= x.q[0] <= DEFAULT_BOX[1][1]

    def test_sample_report_reduces_and_counts_skips(self):
        points = sample_box(1, count=20, seed=0)

        def residual(x):
            if x.q[0] > 1.0:
                raise SkipPoint("out of scope")
            return (0.5 * x.t, -0.25)

        rep = sample_report("demo", residual, points, tolerance=2.0)
        assert rep.count + rep.skipped == 20
        assert rep.skipped > 0
        assert rep.verdict is True
        assert rep.max <= 1.0

    def test_sample_report_failing_verdict(self):
        points = sample_box(1, count=5, seed=0)
        rep = sample_report("demo", lambda x: 1.0, points, tolerance=0.5)
        assert rep.verdict is False
        assert rep.max == 1.0 and rep.mean == 1.0

    def test_report_from_empty_residual_list(self):
        rep = QuantityReport.from_residuals("none", [], 1e-6)
        assert rep.count == 0 and rep.max == 0.0 and rep.verdict is True


@pytest.fixture(scope="module")
def kappa_trajectory():
    x0 = PhasePoint(0.0, (1.0,), (KAPPA,), 1.0 + KAPPA / 2)
    return integrate(H_KAPPA, x0, t_end=1.0, scheme="rk4", h=1e-3)


class TestDriftAlongFlow:

    def test_conserved_drift_small(self, kappa_trajectory):
        assert conserved_drift(G_CONS, kappa_trajectory) < DRIFT_TOL_CONSERVED
        assert conserved_drift(F2_CONS, kappa_trajectory) < DRIFT_TOL_CONSERVED

    def test_dissipated_drift_small(self, kappa_trajectory):
        assert dissipated_drift(
            F_DISS, H_KAPPA, kappa_trajectory) < DRIFT_TOL_DISSIPATED

    def test_undissipated_quantity_drifts(self, kappa_trajectory):
        # q1 alone would be a bad witness: on this leaf p = kappa q, so q
        # itself happens to satisfy the dissipation ODE.  q1 + 1 does not.
        shifted = ScalarField.from_expression("q1 + 1", n=1)
        assert dissipated_drift(shifted, H_KAPPA, kappa_trajectory) > 1e-2


class TestNumericalHelpers:
    def test_cumulative_integral_exact_for_quadratics(self):
        ts = [0.0, 0.1, 0.25, 0.4, 0.7, 1.0]
        vals = [3.0 * t * t - 2.0 * t + 1.0 for t in ts]
        got = cumulative_quadratic_integral(ts, vals)
        for t, g in zip(ts, got):
            exact = t ** 3 - t ** 2 + t
            assert abs(g - exact) < 1e-14

    def test_cumulative_integral_of_sine(self):
        ts = [0.02 * k for k in range(51)]
        vals = [math.sin(t) for t in ts]
        got = cumulative_quadratic_integral(ts, vals)
        assert abs(got[-1] - (1.0 - math.cos(1.0))) < 1e-9

    def test_two_sample_trapezoid_fallback(self):
        got = cumulative_quadratic_integral([0.0, 1.0], [1.0, 3.0])
        assert got == [0.0, 2.0]

    def test_lie_bracket_fd_linear_fields(self):
        """[Y, X] for Y = p d/dq, X = q d/dp is -q d/dq + p d/dp."""
        from cocontact.dynamics import VectorField

        Y = VectorField(
            lambda x: TangentVector(0.0, (x.p[0],), (0.0,), 0.0), 1, "Y")
        X = VectorField(
            lambda x: TangentVector(0.0, (0.0,), (x.q[0],), 0.0), 1, "X")
        x = PhasePoint(0.0, (0.7,), (1.3,), 0.2)
        br = lie_bracket_fd(Y, X, x)
        assert abs(br.dq[0] - (-x.q[0])) < 1e-6
        assert abs(br.dp[0] - x.p[0]) < 1e-6
        assert abs(br.dt) < 1e-9 and abs(br.dz) < 1e-9
