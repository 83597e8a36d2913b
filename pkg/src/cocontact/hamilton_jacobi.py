"""Hamilton-Jacobi theory on extended phase space, in both formulations.

*Action-independent* approach: a section (t, q) -> (t, q, gamma(t,q), S(t,q))
of the projection to R x Q.  Its image has Legendrian t-slices exactly when
gamma = dS/dq, and the projected dynamics is gamma-related to X_H exactly
when S solves H o j1_t S + dS/dt = 0.  Complete solutions foliate phase space
by leaves Im Phi_lambda and their inverse coordinates are conserved.

*Action-dependent* approach: a section (t, q, z) -> (t, q, gamma(t,q,z), z)
of the projection to R x Q x R.  Coisotropy of the image is the symmetric-
derivative condition below, and on coisotropic sections the Hamilton-Jacobi
residual agrees with gamma-relatedness of the projected field.

All section derivatives run through the dual-number engine, so sections may
contain cached quadratures; generating-function sections fall back to central
differences only for the second derivatives of S.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .duals import Dual, dual_phase
from .dynamics import (
    ScalarField,
    Trajectory,
    hamiltonian_vector_field,
    integrate_dopri45,
    integrate_rk4,
)
from .geometry import PhasePoint


def _seed_args(values, width_offset=0):
    """Seed a flat list of scalars as duals with one tangent slot each."""
    width = len(values) + width_offset
    return [Dual.seed(v, i, width) for i, v in enumerate(values)], width


def _check_base_coords(ast, what: str, allow_z: bool) -> None:
    """Sections of the base projections cannot read fiber coordinates."""
    from . import expressions

    kinds = expressions.used_coord_kinds(ast)
    banned = {"p"} if allow_z else {"p", "z"}
    hit = sorted(kinds & banned)
    if hit:
        allowed = "(t, q, z)" if allow_z else "(t, q)"
        raise expressions.ExprNameError(
            f"{what} depend on {allowed} only; found {', '.join(hit)}", 0
        )


# -- generating functions ----------------------------------------------------------


class GeneratingFunction:
    """A scalar S(t, q) with exact first derivatives via duals.

    Wraps a callable ``fn(t, q_tuple)`` accepting floats or duals.
    """

    def __init__(self, fn: Callable, n: int, label: str = ""):
        self.fn = fn
        self.n = n
        self.label = label

    @classmethod
    def from_expression(cls, source, n: int, params=None) -> "GeneratingFunction":
        from . import expressions

        ast = expressions.parse(source, n) if isinstance(source, str) else source
        _check_base_coords(ast, "generating functions", allow_z=False)
        bound = dict(params or {})

        def fn(t, q):
            return expressions._eval(ast, t, q, None, None, bound)

        label = source if isinstance(source, str) else expressions.unparse(ast)
        return cls(fn, n, label)

    def value(self, t: float, q) -> float:
        r = self.fn(t, tuple(q))
        return r.v if isinstance(r, Dual) else float(r)

    def jet(self, t: float, q):
        """(S, dS/dt, dS/dq) in one dual pass."""
        seeds, _ = _seed_args([t, *q])
        r = self.fn(seeds[0], tuple(seeds[1:]))
        if isinstance(r, Dual):
            return r.v, r.e[0], tuple(r.e[1:])
        return float(r), 0.0, (0.0,) * self.n


def jet_t(S: GeneratingFunction, t: float, q) -> PhasePoint:
    """The 1-jet of S at fixed time: (t, q, dS/dq, S)."""
    value, _, Sq = S.jet(t, q)
    return PhasePoint(float(t), tuple(float(v) for v in q), Sq, value)


def generating_of(sec: "SectionT") -> GeneratingFunction:
    """The scalar part of a section, repackaged as a generating function."""
    return GeneratingFunction(sec.S_fn, sec.n, label=sec.label)


# -- sections of the two projections -------------------------------------------------


class SectionT:
    """Section of the projection to R x Q: (t,q) -> (t, q, gamma(t,q), S(t,q)).

    gamma_fn returns an n-tuple and S_fn a scalar; both must accept duals.
    """

    def __init__(self, n: int, gamma_fn: Callable, S_fn: Callable, label: str = ""):
        self.n = n
        self.gamma_fn = gamma_fn
        self.S_fn = S_fn
        self.label = label

    @classmethod
    def from_generating(cls, S: GeneratingFunction) -> "SectionT":
        """The jet section gamma = dS/dq of a generating function.

        First derivatives of gamma are then second derivatives of S, obtained
        by central differences of the exact dual gradient (step ~ 6e-6 scaled),
        so gamma-jets of jet sections carry ~1e-9 absolute noise.
        """
        sec = cls(S.n, None, S.fn, label=f"jet[{S.label}]")
        sec._generating = S

        def gamma_fn(t, q):
            if isinstance(t, Dual) or any(isinstance(v, Dual) for v in q):
                raise TypeError("jet sections differentiate gamma by finite differences")
            return S.jet(t, q)[2]

        sec.gamma_fn = gamma_fn
        return sec

    @classmethod
    def from_expressions(cls, gamma_sources, S_source, n: int, params=None) -> "SectionT":
        from . import expressions

        bound = dict(params or {})
        gammas = [expressions.parse(s, n) for s in gamma_sources]
        S_ast = expressions.parse(S_source, n)
        for ast in (*gammas, S_ast):
            _check_base_coords(ast, "time-configuration sections", allow_z=False)

        def gamma_fn(t, q):
            return tuple(expressions._eval(g, t, q, None, None, bound) for g in gammas)

        def S_fn(t, q):
            return expressions._eval(S_ast, t, q, None, None, bound)

        return cls(n, gamma_fn, S_fn, label=f"({', '.join(gamma_sources)}; {S_source})")

    def point(self, t: float, q) -> PhasePoint:
        q = tuple(float(v) for v in q)
        gam = self.gamma_fn(t, q)
        return PhasePoint(float(t), q, tuple(float(v) for v in gam), self.S_value(t, q))

    def S_value(self, t: float, q) -> float:
        r = self.S_fn(t, tuple(q))
        return r.v if isinstance(r, Dual) else float(r)

    def S_jet(self, t: float, q):
        seeds, _ = _seed_args([t, *q])
        r = self.S_fn(seeds[0], tuple(seeds[1:]))
        if isinstance(r, Dual):
            return r.v, r.e[0], tuple(r.e[1:])
        return float(r), 0.0, (0.0,) * self.n

    def gamma_jet(self, t: float, q):
        """(gamma, dgamma/dt, dgamma/dq) with dgamma/dq[i][j] = d gamma_i / d q_j."""
        if getattr(self, "_generating", None) is not None:
            return self._fd_gamma_jet(t, q)
        seeds, _ = _seed_args([t, *q])
        gam = self.gamma_fn(seeds[0], tuple(seeds[1:]))
        vals, dts, dqs = [], [], []
        for comp in gam:
            if isinstance(comp, Dual):
                vals.append(comp.v)
                dts.append(comp.e[0])
                dqs.append(tuple(comp.e[1:]))
            else:
                vals.append(float(comp))
                dts.append(0.0)
                dqs.append((0.0,) * self.n)
        return tuple(vals), tuple(dts), tuple(dqs)

    def _fd_gamma_jet(self, t: float, q):
        S = self._generating
        gam = S.jet(t, q)[2]
        h = 6e-6

        def grad_at(tt, qq):
            return S.jet(tt, qq)[2]

        ht = h * max(1.0, abs(t))
        gp = grad_at(t + ht, q)
        gm = grad_at(t - ht, q)
        dts = tuple((a - b) / (2.0 * ht) for a, b in zip(gp, gm))
        dqs_cols = []
        for j in range(self.n):
            hq = h * max(1.0, abs(q[j]))
            qp = list(q)
            qm = list(q)
            qp[j] += hq
            qm[j] -= hq
            a = grad_at(t, tuple(qp))
            b = grad_at(t, tuple(qm))
            dqs_cols.append(tuple((u - v) / (2.0 * hq) for u, v in zip(a, b)))
        dqs = tuple(tuple(dqs_cols[j][i] for j in range(self.n)) for i in range(self.n))
        return gam, dts, dqs


class SectionTZ:
    """Section of the projection to R x Q x R: (t,q,z) -> (t, q, gamma(t,q,z), z)."""

    def __init__(self, n: int, gamma_fn: Callable, label: str = ""):
        self.n = n
        self.gamma_fn = gamma_fn
        self.label = label

    @classmethod
    def from_expressions(cls, gamma_sources, n: int, params=None) -> "SectionTZ":
        from . import expressions

        bound = dict(params or {})
        gammas = [expressions.parse(s, n) for s in gamma_sources]
        for ast in gammas:
            _check_base_coords(ast, "action-level sections", allow_z=True)

        def gamma_fn(t, q, z):
            return tuple(expressions._eval(g, t, q, None, z, bound) for g in gammas)

        return cls(n, gamma_fn, label=", ".join(gamma_sources))

    def point(self, t: float, q, z: float) -> PhasePoint:
        q = tuple(float(v) for v in q)
        gam = self.gamma_fn(t, q, z)
        return PhasePoint(float(t), q, tuple(float(v) for v in gam), float(z))

    def gamma_jet(self, t: float, q, z: float):
        """(gamma, dgamma/dt, dgamma/dq (n x n), dgamma/dz)."""
        seeds, _ = _seed_args([t, *q, z])
        gam = self.gamma_fn(seeds[0], tuple(seeds[1 : 1 + self.n]), seeds[-1])
        vals, dts, dqs, dzs = [], [], [], []
        for comp in gam:
            if isinstance(comp, Dual):
                vals.append(comp.v)
                dts.append(comp.e[0])
                dqs.append(tuple(comp.e[1 : 1 + self.n]))
                dzs.append(comp.e[-1])
            else:
                vals.append(float(comp))
                dts.append(0.0)
                dqs.append((0.0,) * self.n)
                dzs.append(0.0)
        return tuple(vals), tuple(dts), tuple(dqs), tuple(dzs)


# -- complete solutions ---------------------------------------------------------------


@dataclass
class CompleteSolution:
    """A lambda-parameterized family of sections foliating phase space.

    ``section(lam)`` returns a SectionT or SectionTZ; ``inverse`` (optional)
    maps a phase point back to the lambda coordinates of its leaf and must
    accept duals so the recovered constants behave as scalar fields.  The
    autonomous variant may also supply ``time_recovery``.
    """

    approach: str  # "T" | "TZ"
    n: int
    lam_dim: int
    section: Callable
    inverse: Optional[Callable] = None
    time_recovery: Optional[Callable] = None
    label: str = ""


def extract_conserved(sol: CompleteSolution, i: int) -> ScalarField:
    """The i-th inverse coordinate of a complete solution, as a scalar field."""
    if sol.inverse is None:
        raise ValueError("complete solution has no inverse map")
    if not 0 <= i < sol.lam_dim:
        raise IndexError(f"lambda index {i} outside 0..{sol.lam_dim - 1}")
    inv = sol.inverse
    return ScalarField.from_callable(
        lambda t, q, p, z: inv(t, q, p, z)[i], sol.n, f"{sol.label}.lambda[{i}]"
    )


# -- residuals: action-independent approach ------------------------------------------


def legendrian_residual(sec: SectionT, t: float, q):
    """gamma_i - dS/dq_i componentwise; zero iff the t-slice is Legendrian."""
    gam = sec.gamma_fn(t, tuple(q)) if sec.gamma_fn else None
    gam = tuple(v.v if isinstance(v, Dual) else float(v) for v in gam)
    _, _, Sq = sec.S_jet(t, q)
    return np.array([a - b for a, b in zip(gam, Sq)])


def hj_independent_residual(S: GeneratingFunction, H: ScalarField, t: float, q) -> float:
    """H evaluated on the 1-jet of S, plus dS/dt."""
    value, St, Sq = S.jet(t, q)
    x = PhasePoint(float(t), tuple(float(v) for v in q), Sq, value)
    return H.value(x) + St


def gamma_relatedness_residual_T(sec: SectionT, H: ScalarField, t: float, q):
    """Residuals of the two relatedness families for a SectionT.

    Block 1 (n components):  -(H_q + gamma_i H_z) - (dgamma_i/dt + sum_j
    dgamma_i/dq_j H_p_j); block 2 (scalar): (gamma . H_p - H) - (dS/dt +
    dS/dq . H_p).  Everything is evaluated on the section.
    """
    q = tuple(float(v) for v in q)
    gam, gam_t, gam_q = sec.gamma_jet(t, q)
    Sv, St, Sq = sec.S_jet(t, q)
    x = PhasePoint(float(t), q, gam, Sv)
    Hv, Hg = H.value_grad(x)
    block1 = np.array(
        [
            -(Hg.aq[i] + gam[i] * Hg.az)
            - (gam_t[i] + sum(gam_q[i][j] * Hg.ap[j] for j in range(sec.n)))
            for i in range(sec.n)
        ]
    )
    block2 = (sum(g * hp for g, hp in zip(gam, Hg.ap)) - Hv) - (
        St + sum(sq * hp for sq, hp in zip(Sq, Hg.ap))
    )
    return block1, block2


def projected_field_T(sec: SectionT, H: ScalarField, t: float, q):
    """Base velocity (1, H_p evaluated on the section) of the projected dynamics."""
    x = sec.point(t, q)
    return 1.0, H.grad(x).ap


def reconstruct_T(
    sol_or_sec,
    H: ScalarField,
    lam=None,
    t0: float = 0.0,
    q0=(0.0,),
    t_end: float = 1.0,
    scheme: str = "rk4",
    h: float = 1e-3,
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> Trajectory:
    """Integrate the projected dynamics on a leaf, then lift through the section.

    The base ODE is dq/dt = H_p on the section image; each base sample is
    lifted to (t, q, gamma, S).  The stored derivatives are X_H at the lifted
    points, which is the lifted curve's tangent exactly when the section is a
    Hamilton-Jacobi solution.
    """
    if isinstance(sol_or_sec, CompleteSolution):
        if sol_or_sec.approach != "T":
            raise ValueError("reconstruct_T needs an action-independent solution")
        sec = sol_or_sec.section(lam if lam is not None else (0.0,) * sol_or_sec.lam_dim)
    else:
        sec = sol_or_sec
    n = sec.n

    def rhs(t, y):
        x = sec.point(t, tuple(y))
        return list(H.grad(x).ap)

    q0 = [float(v) for v in q0]
    if scheme == "rk4":
        ts, ys, _, steps = integrate_rk4(rhs, t0, q0, t_end, h)
        accepted, rejected = steps, 0
        meta = {"h": h, "reconstructed": True}
    elif scheme == "adaptive":
        ts, ys, _, accepted, rejected = integrate_dopri45(rhs, t0, q0, t_end, rtol, atol)
        meta = {"rtol": rtol, "atol": atol, "reconstructed": True}
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    samples = [sec.point(t, tuple(y)) for t, y in zip(ts, ys)]
    derivs = []
    for x in samples:
        v = hamiltonian_vector_field(H, x)
        derivs.append((v.dq, v.dp, v.dz))
    return Trajectory(n, scheme, samples, derivs, accepted, rejected, meta)


def lifted_fidelity(sec: SectionT, H: ScalarField, traj: Trajectory) -> float:
    """Sup over samples of the relatedness residuals along a lifted trajectory.

    Zero (to integrator order) exactly when the lifted curve satisfies the
    full equations of motion.
    """
    sup = 0.0
    for x in traj.samples:
        block1, block2 = gamma_relatedness_residual_T(sec, H, x.t, x.q)
        sup = max(sup, float(np.max(np.abs(block1))), abs(block2))
    return sup


def action_identity_check(S: GeneratingFunction, H: ScalarField, traj: Trajectory) -> float:
    """max_t | S(t, sigma(t)) - S(t0, sigma(t0)) - action[t0..t] | along a curve.

    For a reconstructed curve of a Hamilton-Jacobi solution the generating
    function advances exactly by the accumulated action.
    """
    from .dynamics import action_increments

    increments = action_increments(H, traj)
    s0 = S.value(traj.samples[0].t, traj.samples[0].q)
    acc = 0.0
    worst = 0.0
    for k, x in enumerate(traj.samples):
        if k > 0:
            acc += increments[k - 1]
        worst = max(worst, abs(S.value(x.t, x.q) - s0 - acc))
    return worst


# -- residuals: action-dependent approach ---------------------------------------------


def coisotropy_residual(sec: SectionTZ, t: float, q, z: float) -> np.ndarray:
    """Antisymmetric n x n matrix R_ij; zero iff the image is coisotropic at the point.

    R_ij = (dgamma_i/dq_j + gamma_j dgamma_i/dz) - (dgamma_j/dq_i + gamma_i dgamma_j/dz).
    """
    gam, _, gam_q, gam_z = sec.gamma_jet(t, tuple(q), z)
    n = sec.n
    A = np.array(
        [[gam_q[i][j] + gam[j] * gam_z[i] for j in range(n)] for i in range(n)]
    )
    return A - A.T


COISOTROPY_WARN_TOL = 1e-6


def hj_dependent_residual(sec: SectionTZ, H: ScalarField, t: float, q, z: float,
                          check_coisotropy: bool = True) -> np.ndarray:
    """The action-dependent Hamilton-Jacobi residual (n components).

    E_i = H_q_i + sum_j H_p_j dgamma_j/dq_i
        + gamma_i (sum_j H_p_j dgamma_j/dz + H_z)
        + dgamma_i/dt - H dgamma_i/dz,
    evaluated on the section.  Warns when the point is visibly non-coisotropic,
    since the equivalence with gamma-relatedness assumes coisotropy.
    """
    q = tuple(float(v) for v in q)
    gam, gam_t, gam_q, gam_z = sec.gamma_jet(t, q, z)
    if check_coisotropy and sec.n > 1:
        R = coisotropy_residual(sec, t, q, z)
        supR = float(np.max(np.abs(R)))
        if supR > COISOTROPY_WARN_TOL:
            warnings.warn(
                f"section image not coisotropic at (t={t}, q={q}, z={z}): "
                f"sup residual {supR:.3e}",
                stacklevel=2,
            )
    x = PhasePoint(float(t), q, gam, float(z))
    Hv, Hg = H.value_grad(x)
    n = sec.n
    out = []
    for i in range(n):
        e = Hg.aq[i]
        e += sum(Hg.ap[j] * gam_q[j][i] for j in range(n))
        e += gam[i] * (sum(Hg.ap[j] * gam_z[j] for j in range(n)) + Hg.az)
        e += gam_t[i]
        e -= Hv * gam_z[i]
        out.append(e)
    return np.array(out)


def gamma_relatedness_residual_TZ(sec: SectionTZ, H: ScalarField, t: float, q,
                                  z: float) -> np.ndarray:
    """gamma-relatedness residual of the projected field for a SectionTZ.

    G_i = H_q_i + gamma_i H_z + dgamma_i/dt + sum_j H_p_j dgamma_i/dq_j
        + dgamma_i/dz (gamma . H_p - H).
    Agrees with :func:`hj_dependent_residual` wherever the section is
    coisotropic (they differ by a contraction of the coisotropy matrix).
    """
    q = tuple(float(v) for v in q)
    gam, gam_t, gam_q, gam_z = sec.gamma_jet(t, q, z)
    x = PhasePoint(float(t), q, gam, float(z))
    Hv, Hg = H.value_grad(x)
    n = sec.n
    zdot = sum(g * hp for g, hp in zip(gam, Hg.ap)) - Hv
    out = []
    for i in range(n):
        g = Hg.aq[i] + gam[i] * Hg.az + gam_t[i]
        g += sum(Hg.ap[j] * gam_q[i][j] for j in range(n))
        g += gam_z[i] * zdot
        out.append(g)
    return np.array(out)


# -- autonomous and separable variants -------------------------------------------------


def autonomous_hj_residual(f: Callable, H: ScalarField, q) -> float:
    """H evaluated on the Legendrian section (q, df/dq, f) of T*Q x R.

    ``f`` is a dual-capable callable of the q-tuple.  The Hamiltonian is
    queried at t = 0, which is only meaningful for autonomous H.
    """
    q = tuple(float(v) for v in q)
    seeds, _ = _seed_args(list(q))
    r = f(tuple(seeds))
    if isinstance(r, Dual):
        fv, fq = r.v, r.e
    else:
        fv, fq = float(r), (0.0,) * len(q)
    return H.value(PhasePoint(0.0, q, tuple(fq), fv))


def separable_split_residual(alpha: Callable, beta: Callable, H: ScalarField,
                             t: float, q) -> float:
    """Residual of the separated equation H(t, q, da/dq, a+b) + db/dt.

    ``alpha`` maps the q-tuple, ``beta`` maps t; S = alpha + beta.
    """
    q = tuple(float(v) for v in q)
    seeds, _ = _seed_args(list(q))
    ra = alpha(tuple(seeds))
    if isinstance(ra, Dual):
        av, aq = ra.v, ra.e
    else:
        av, aq = float(ra), (0.0,) * len(q)
    tb = Dual.seed(t, 0, 1)
    rb = beta(tb)
    if isinstance(rb, Dual):
        bv, bdot = rb.v, rb.e[0]
    else:
        bv, bdot = float(rb), 0.0
    x = PhasePoint(float(t), q, tuple(aq), av + bv)
    return H.value(x) + bdot


# -- grids ------------------------------------------------------------------------------


def grid_T(n: int = 1, t_range=(0.0, 2.0), q_range=(-2.0, 2.0), nt: int = 50, nq: int = 50):
    """Regular (t, q) grid; q axes share the range and count."""
    ts = np.linspace(*t_range, nt)
    qs = np.linspace(*q_range, nq)
    if n == 1:
        return [(t, (qv,)) for t in ts for qv in qs]
    grids = np.meshgrid(*([qs] * n), indexing="ij")
    q_tuples = list(zip(*(g.ravel() for g in grids)))
    return [(t, tuple(qt)) for t in ts for qt in q_tuples]


def grid_TZ(n: int = 1, t_range=(0.0, 2.0), q_range=(-2.0, 2.0), z_range=(-2.0, 2.0),
            nt: int = 50, nq: int = 50, nz: int = 5):
    """Regular (t, q, z) grid; z gets a coarse default count."""
    zs = np.linspace(*z_range, nz)
    return [(t, q, zv) for (t, q) in grid_T(n, t_range, q_range, nt, nq) for zv in zs]


def sup_mean(values) -> tuple:
    arr = np.abs(np.asarray(list(values), dtype=float))
    if arr.size == 0:
        return 0.0, 0.0
    return float(arr.max()), float(arr.mean())
