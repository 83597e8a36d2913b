"""Hamilton-Jacobi theory: sections, residuals, reconstruction, coisotropy.

Two independent detectors exist for the action-independent equation — the
scalar residual of the generating function and the vector gamma-relatedness
residual — and the tests exercise the identity connecting them (the vector
block is minus the q-gradient of the scalar residual).  For the
action-dependent equation the corresponding pair differs by a contraction of
the coisotropy matrix, which is checked explicitly on a non-coisotropic
counterexample.
"""

import math

import numpy as np
import pytest

from cocontact.dynamics import ScalarField, integrate
from cocontact.expressions import ExprNameError
from cocontact.geometry import PhasePoint
from cocontact.hamilton_jacobi import (
    CompleteSolution,
    GeneratingFunction,
    SectionT,
    SectionTZ,
    action_identity_check,
    autonomous_hj_residual,
    coisotropy_residual,
    extract_conserved,
    gamma_relatedness_residual_T,
    gamma_relatedness_residual_TZ,
    generating_of,
    grid_T,
    grid_TZ,
    hj_dependent_residual,
    hj_independent_residual,
    jet_t,
    legendrian_residual,
    lifted_fidelity,
    projected_field_T,
    reconstruct_T,
    separable_split_residual,
    sup_mean,
)
from cocontact.systems import build_system

KAPPA = 2.0
H_KAPPA = ScalarField.from_expression("p1^2/2 - kappa*z", params={"kappa": KAPPA})
H_FREE = ScalarField.from_expression("p1^2/2")

SOLUTION_GRID_TOL = 1e-10   # exact-jet solutions over the default grid
FD_JET_TOL = 1e-6           # sections whose jets come from differencing


def kappa_section(lam=0.0):
    spec = build_system("free_particle_autonomous", self_test=False)
    return spec.solutions[0].section((lam,))


class TestJets:
    def test_zero_generating_function(self):
        S = GeneratingFunction.from_expression("0", n=1)
        x = jet_t(S, 0.7, (1.3,))
        assert (x.t, x.q, x.p, x.z) == (0.7, (1.3,), (0.0,), 0.0)

    def test_parabola_jet(self):
        S = GeneratingFunction.from_expression("q1^2/2", n=1)
        x = jet_t(S, 0.0, (1.5,))
        assert x.p == (1.5,)
        assert x.z == 1.125

    def test_registered_section_jet_point(self):
        S = generating_of(kappa_section(lam=0.0))
        x = jet_t(S, 0.0, (1.0,))
        assert abs(x.p[0] - 2.0) < 1e-14
        assert abs(x.z - 2.0) < 1e-14

    def test_jet_values_match_value(self):
        S = GeneratingFunction.from_expression("sin(q1)*t + q1^3", n=1)
        v, St, Sq = S.jet(0.4, (0.9,))
        assert v == S.value(0.4, (0.9,))
        assert abs(St - math.sin(0.9)) < 1e-15
        assert abs(Sq[0] - (0.4 * math.cos(0.9) + 3 * 0.81)) < 1e-13


class TestLegendrian:
    def test_jet_sections_are_legendrian(self):
        S = GeneratingFunction.from_expression("exp(q1)*t - q1^2", n=1)
        sec = SectionT.from_generating(S)
        for t, q in grid_T(nt=5, nq=5):
            assert np.max(np.abs(legendrian_residual(sec, t, q))) < 1e-9

    def test_mismatched_gamma_measures_the_gap(self):
        sec = SectionT.from_expressions(("q1",), "0", n=1)
        r = legendrian_residual(sec, 0.0, (1.7,))
        assert r[0] == 1.7

    def test_gradient_pair_has_zero_gap(self):
        sec = SectionT.from_expressions(("q1",), "q1^2/2", n=1)
        for t, q in grid_T(nt=3, nq=7):
            assert abs(legendrian_residual(sec, t, q)[0]) < 1e-14


class TestIndependentResidual:
    def test_registered_solution_on_grid(self):
        sec = kappa_section(lam=0.3)
        S = generating_of(sec)
        residuals = [hj_independent_residual(S, H_KAPPA, t, q)
                     for t, q in grid_T()]
        sup, _ = sup_mean(residuals)
        assert sup < SOLUTION_GRID_TOL

    def test_zero_function_free_hamiltonian(self):
        S = GeneratingFunction.from_expression("0", n=1)
        assert hj_independent_residual(S, H_FREE, 1.0, (0.5,)) == 0.0

    def test_explicit_solution_expression(self):
        # S = e^{2t} + q^2 solves S_t + (S_q)^2/2 - 2 S = 0 for kappa = 2
        S = GeneratingFunction.from_expression("exp(2*t) + q1^2", n=1)
        worst = max(abs(hj_independent_residual(S, H_KAPPA, t, q))
                    for t, q in grid_T(nt=10, nq=10))
        assert worst < 1e-11

    def test_non_solution_is_flagged(self):
        S = GeneratingFunction.from_expression("q1*t", n=1)
        r = hj_independent_residual(S, H_KAPPA, 0.0, (1.0,))
        assert abs(r) > 0.5  # residual = q + t^2 q^2/2 - 2 q t |_(0,1) = 1


class TestRelatednessT:
    def test_registered_solution_vanishes(self):
        sec = kappa_section(lam=-0.4)
        worst = 0.0
        for t, q in grid_T(nt=10, nq=10):
            b1, b2 = gamma_relatedness_residual_T(sec, H_KAPPA, t, q)
            worst = max(worst, float(np.max(np.abs(b1))), abs(b2))
        assert worst < 1e-12

    def test_zero_section_free_particle(self):
        sec = SectionT.from_expressions(("0",), "0", n=1)
        b1, b2 = gamma_relatedness_residual_T(sec, H_FREE, 0.3, (0.8,))
        assert np.max(np.abs(b1)) == 0.0 and b2 == 0.0

    def test_constant_momentum_section_energy_defect(self):
        """gamma = 1, S = 0 under H = p^2/2: the first block vanishes but the
        action block sees gamma.H_p - H = 1 - 1/2."""
        sec = SectionT.from_expressions(("1",), "0", n=1)
        b1, b2 = gamma_relatedness_residual_T(sec, H_FREE, 0.0, (0.0,))
        assert np.max(np.abs(b1)) == 0.0
        assert b2 == 0.5

    def test_block_is_gradient_of_scalar_residual(self):
        """For gamma = dS/dq the vector block equals -d/dq of the scalar
        residual, whether or not S solves the equation."""
        S = GeneratingFunction.from_expression("sin(q1)*t + q1^2/4", n=1)
        sec = SectionT.from_generating(S)
        H = ScalarField.from_expression("p1^2/2 + cos(q1) + z/3")
        h = 1e-5
        for t, q in [(0.2, (0.7,)), (1.1, (-0.4,)), (1.9, (1.6,))]:
            b1, _ = gamma_relatedness_residual_T(sec, H, t, q)
            plus = hj_independent_residual(S, H, t, (q[0] + h,))
            minus = hj_independent_residual(S, H, t, (q[0] - h,))
            fd = (plus - minus) / (2 * h)
            assert abs(b1[0] + fd) < FD_JET_TOL


class TestProjectedDynamics:
    def test_projected_velocity_on_kappa_leaf(self):
        lam = 0.7
        sec = kappa_section(lam)
        dt, dq = projected_field_T(sec, H_KAPPA, 0.5, (1.2,))
        assert dt == 1.0
        expect = KAPPA * 1.2 + math.sqrt(2 * KAPPA) * lam
        assert abs(dq[0] - expect) < 1e-14

    def test_reconstruct_fixed_point_branch(self):
        """With lam = 1 the leaf has a stationary base point q* = -sqrt(2/k):
        the lifted curve keeps q, p frozen while z rides e^{kappa t}."""
        spec = build_system("free_particle_autonomous", self_test=False)
        lam = 1.0
        q_star = -math.sqrt(2.0 / KAPPA) * lam
        traj = reconstruct_T(spec.solutions[0], spec.H, lam=(lam,),
                             q0=(q_star,), t_end=1.0)
        for x in traj.samples:
            assert abs(x.q[0] - q_star) < 1e-12
            assert abs(x.p[0]) < 1e-12
            assert abs(x.z - math.exp(KAPPA * x.t)) < 1e-9

    def test_reconstruct_matches_closed_orbit(self):
        spec = build_system("free_particle_autonomous", self_test=False)
        lam = (0.25,)
        traj = reconstruct_T(spec.solutions[0], spec.H, lam=lam,
                             q0=(1.0,), t_end=1.0)
        orbit = spec.closed_orbit(lam, 1.0 + math.sqrt(2 / KAPPA) * 0.25)
        # c parameterizes the e^{kappa t} coefficient: q(0) = c - sqrt(2/k) l
        worst = 0.0
        for x in traj.samples:
            ref = orbit(x.t)
            worst = max(worst, abs(x.q[0] - ref.q[0]),
                        abs(x.p[0] - ref.p[0]), abs(x.z - ref.z))
        assert worst < 1e-9

    def test_reconstruct_rejects_tz_solutions(self):
        spec = build_system("falling_particle", self_test=False)
        with pytest.raises(ValueError):
            reconstruct_T(spec.solutions[0], spec.H, lam=(0.0,))

    def test_lifted_fidelity_of_reconstruction(self):
        sec = kappa_section(lam=0.1)
        traj = reconstruct_T(sec, H_KAPPA, q0=(0.5,), t_end=1.0)
        assert lifted_fidelity(sec, H_KAPPA, traj) < 1e-10

    def test_lifted_fidelity_flags_non_solution(self):
        sec = SectionT.from_expressions(("1",), "0", n=1)
        traj = reconstruct_T(sec, H_FREE, q0=(0.0,), t_end=0.5)
        assert lifted_fidelity(sec, H_FREE, traj) > 0.1


class TestActionIdentity:
    def test_along_reconstructed_kappa_curve(self):
        sec = kappa_section(lam=0.0)
        traj = reconstruct_T(sec, H_KAPPA, q0=(1.0,), t_end=1.0)
        S = generating_of(sec)
        assert action_identity_check(S, H_KAPPA, traj) < 1e-9

    def test_rest_curve_with_decaying_generating_function(self):
        """H = z has H_p = 0, so the base point rests while S = e^{-t} decays
        at exactly the accumulated-action rate -H = -e^{-t}."""
        H = ScalarField.from_expression("z", n=1)
        S = GeneratingFunction.from_expression("exp(-t)", n=1)
        sec = SectionT.from_generating(S)
        traj = reconstruct_T(sec, H, q0=(0.3,), t_end=2.0)
        assert action_identity_check(S, H, traj) < 1e-12


class TestCompleteSolutions:
    def test_extract_conserved_is_constant_on_flow(self):
        spec = build_system("free_particle_tm", self_test=False)
        sol = spec.solutions[0]
        x0 = PhasePoint(0.0, (1.0,), (2.0,), 2.0)
        traj = integrate(spec.H, x0, t_end=1.0, scheme="rk4", h=1e-3)
        for i in range(sol.lam_dim):
            fld = extract_conserved(sol, i)
            v0 = fld.value(traj.samples[0])
            drift = max(abs(fld.value(x) - v0) for x in traj.samples)
            assert drift < 1e-8 * max(1.0, abs(v0))

    def test_extract_conserved_index_errors(self):
        spec = build_system("free_particle_tm", self_test=False)
        with pytest.raises(IndexError):
            extract_conserved(spec.solutions[0], 2)

    def test_extract_conserved_requires_inverse(self):
        bare = CompleteSolution("T", 1, 1, lambda lam: None)
        with pytest.raises(ValueError):
            extract_conserved(bare, 0)


class TestCoisotropy:
    def test_scalar_sections_are_exactly_coisotropic(self):
        sec = SectionTZ.from_expressions(("sin(q1)*z + t^2",), n=1)
        R = coisotropy_residual(sec, 0.5, (0.7,), 1.1)
        assert R.shape == (1, 1) and R[0, 0] == 0.0

    def test_shear_counterexample(self):
        sec = SectionTZ.from_expressions(("q2", "0"), n=2)
        R = coisotropy_residual(sec, 0.0, (0.3, -0.8), 0.5)
        assert R[0, 1] == 1.0 and R[1, 0] == -1.0

    def test_gradient_sections_are_coisotropic(self):
        # gamma = dW/dq for W = q1^2 q2 + sin(q1) q2^2 (no z-dependence)
        sec = SectionTZ.from_expressions(
            ("2*q1*q2 + cos(q1)*q2^2", "q1^2 + 2*sin(q1)*q2"), n=2)
        for t, q, z in grid_TZ(n=2, nt=4, nq=4, nz=2):
            R = coisotropy_residual(sec, t, q, z)
            assert np.max(np.abs(R)) < 1e-10

    def test_residual_exactly_antisymmetric(self):
        sec = SectionTZ.from_expressions(
            ("z*(2*q1 + q2)", "z*q1"), n=2)
        R = coisotropy_residual(sec, 0.3, (0.9, -0.4), 0.6)
        assert np.array_equal(R, -R.T)


class TestDependentResidual:
    def test_falling_particle_solution_on_grid(self):
        spec = build_system("falling_particle", self_test=False)
        sec = spec.solutions[0].section((0.5,))
        worst = max(
            float(np.max(np.abs(hj_dependent_residual(sec, spec.H, t, q, z))))
            for t, q, z in grid_TZ(nt=10, nq=10, nz=3))
        assert worst < 1e-9

    def test_agrees_with_relatedness_for_scalar_sections(self):
        """n = 1 sections are automatically coisotropic, so the two residual
        assemblies must coincide."""
        sec = SectionTZ.from_expressions(("sin(q1)*z + t^2",), n=1)
        H = ScalarField.from_expression("p1^2/2 + q1*z - t")
        for t, q, z in grid_TZ(nt=5, nq=5, nz=3):
            E = hj_dependent_residual(sec, H, t, q, z)
            G = gamma_relatedness_residual_TZ(sec, H, t, q, z)
            scale = max(1.0, float(np.max(np.abs(E))))
            assert np.max(np.abs(E - G)) < 1e-12 * scale

    def test_agreement_on_coisotropic_surface(self):
        sec = SectionTZ.from_expressions(
            ("2*q1*q2 + cos(q1)*q2^2", "q1^2 + 2*sin(q1)*q2"), n=2)
        H = ScalarField.from_expression("p1^2/2 + p2^2/2 + q1*q2 + 3*z/10")
        for t, q, z in grid_TZ(n=2, nt=3, nq=4, nz=2):
            E = hj_dependent_residual(sec, H, t, q, z)
            G = gamma_relatedness_residual_TZ(sec, H, t, q, z)
            scale = max(1.0, float(np.max(np.abs(E))))
            assert np.max(np.abs(E - G)) < 1e-10 * scale

    def test_non_coisotropic_warning_and_defect(self):
        """On a non-coisotropic image the two assemblies split by exactly
        -R @ H_p, and the residual warns about the broken premise."""
        sec = SectionTZ.from_expressions(("q2", "0"), n=2)
        H = ScalarField.from_expression("p1^2/2 + p2^2/2 + q1*q2 + 3*z/10")
        t, q, z = 0.4, (0.8, -0.3), 0.9
        with pytest.warns(UserWarning, match="not coisotropic"):
            E = hj_dependent_residual(sec, H, t, q, z)
        E2 = hj_dependent_residual(sec, H, t, q, z, check_coisotropy=False)
        assert np.array_equal(E, E2)
        G = gamma_relatedness_residual_TZ(sec, H, t, q, z)
        R = coisotropy_residual(sec, t, q, z)
        x = sec.point(t, q, z)
        Hp = np.array(H.grad(x).ap)
        assert np.max(np.abs((E - G) + R @ Hp)) < 1e-13


class TestAutonomousAndSeparable:
    def test_autonomous_parabola_solution(self):
        lam = 0.6
        f = lambda q: (math.sqrt(KAPPA / 2) * q[0] + lam) ** 2
        for qv in np.linspace(-2, 2, 30):
            assert abs(autonomous_hj_residual(f, H_KAPPA, (qv,))) < 1e-12

    def test_zero_function_residual_is_hamiltonian_offset(self):
        assert autonomous_hj_residual(lambda q: 0.0, H_FREE, (1.0,)) == 0.0
        H1 = ScalarField.from_expression("p1^2/2 + 1")
        assert autonomous_hj_residual(lambda q: 0.0, H1, (1.0,)) == 1.0

    def test_registered_separable_split(self):
        spec = build_system("free_particle_autonomous", self_test=False)
        alpha, beta = spec.separable((0.3,))
        worst = max(abs(separable_split_residual(alpha, beta, spec.H, t, q))
                    for t, q in grid_T(nt=8, nq=8))
        assert worst < 1e-10

    def test_manual_affine_split(self):
        alpha = lambda q: q[0]
        beta = lambda t: -t / 2.0
        for t, q in grid_T(nt=4, nq=4):
            assert abs(separable_split_residual(alpha, beta, H_FREE, t, q)) == 0.0


class TestGridsAndGuards:
    def test_grid_shapes(self):
        assert len(grid_T(nt=7, nq=9)) == 63
        assert len(grid_T(n=2, nt=3, nq=4)) == 3 * 16
        assert len(grid_TZ(nt=3, nq=4, nz=5)) == 60
        t, q = grid_T(n=2, nt=2, nq=2)[0]
        assert isinstance(q, tuple) and len(q) == 2

    def test_generating_function_rejects_momenta(self):
        with pytest.raises(ExprNameError):
            GeneratingFunction.from_expression("p1", n=1)
        with pytest.raises(ExprNameError):
            GeneratingFunction.from_expression("z + q1", n=1)

    def test_section_t_rejects_momenta_and_z(self):
        with pytest.raises(ExprNameError):
            SectionT.from_expressions(("p1",), "q1", n=1)
        with pytest.raises(ExprNameError):
            SectionT.from_expressions(("q1",), "z", n=1)

    def test_section_tz_rejects_momenta_allows_z(self):
        with pytest.raises(ExprNameError):
            SectionTZ.from_expressions(("p1 + z",), n=1)
        SectionTZ.from_expressions(("z*q1",), n=1)  # must not raise
