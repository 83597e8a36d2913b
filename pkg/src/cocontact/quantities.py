"""Classification of conserved and dissipated quantities, and Noether symmetries.

A quantity f is *dissipated* when it decays at the universal rate dH/dz along
the flow, X_H f = -(dH/dz) f, and *conserved* when X_H f = 0.  The dissipation
condition has an equivalent bracket form, computed here through the musical
isomorphisms so the two sides are genuinely independent computations.  Each
dissipated quantity also generates an infinitesimal dynamical symmetry
Y = X_f - R_t with -eta(Y) = f, checked by finite-difference Lie brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ScalarField, VectorField, hamiltonian_vector_field
from .geometry import PhasePoint, TangentVector, deta, eta, reeb_t, sharp, tau


class SkipPoint(Exception):
    """A sample point fails a hypothesis (e.g. vanishing denominator)."""


class NotApplicable(Exception):
    """An operation's precondition fails at the given point."""


@dataclass
class QuantityReport:
    """Residual statistics of a quantity check over a sample set."""

    kind: str
    max: float
    mean: float
    tolerance: float
    verdict: bool
    count: int
    skipped: int = 0

    @classmethod
    def from_residuals(cls, kind, residuals, tolerance, skipped=0):
        vals = [abs(r) for r in residuals]
        mx = max(vals) if vals else 0.0
        mean = sum(vals) / len(vals) if vals else 0.0
        return cls(kind, mx, mean, tolerance, mx <= tolerance, len(vals), skipped)


# -- pointwise residuals ---------------------------------------------------------


def flow_derivative(f: ScalarField, H: ScalarField, x: PhasePoint) -> float:
    """X_H f at x, assembled from the two gradients."""
    fv, fg = f.value_grad(x)
    Hv, Hg = H.value_grad(x)
    acc = fg.at
    for i in range(x.n):
        acc += Hg.ap[i] * fg.aq[i]
        acc -= (Hg.aq[i] + x.p[i] * Hg.az) * fg.ap[i]
    acc += (sum(pi * hpi for pi, hpi in zip(x.p, Hg.ap)) - Hv) * fg.az
    return acc


def dissipation_residual(f: ScalarField, H: ScalarField, x: PhasePoint) -> float:
    """X_H f + (dH/dz) f; zero iff f is dissipated at x."""
    return flow_derivative(f, H, x) + H.grad(x).az * f.value(x)


def conservation_residual(g: ScalarField, H: ScalarField, x: PhasePoint) -> float:
    """X_H g; zero iff g is conserved at x."""
    return flow_derivative(g, H, x)


def bracket_characterization_residual(f: ScalarField, H: ScalarField, x: PhasePoint) -> float:
    """The bracket form of the dissipation condition, via the sharp map.

    Computed as  d(eta)(sharp df, sharp dH) + f dH/dz - H df/dz + df/dt,
    which never assembles X_H and therefore cross-checks
    :func:`dissipation_residual` through an independent route.  The two agree
    identically and both vanish exactly when f is dissipated.
    """
    fv, fg = f.value_grad(x)
    Hv, Hg = H.value_grad(x)
    w = deta(sharp(x, fg), sharp(x, Hg))
    return w + fv * Hg.az - Hv * fg.az + fg.at


# -- Noether symmetries ------------------------------------------------------------


def noether_symmetry(f: ScalarField) -> VectorField:
    """The infinitesimal symmetry generated by f: Y = X_f - R_t.

    Components (0, f_p, -(f_q + p f_z), p.f_p - f); the generator is
    recovered by f = -eta(Y) up to one rounding in the p.f_p cancellation.
    """

    def Y(x: PhasePoint) -> TangentVector:
        v = hamiltonian_vector_field(f, x)
        return TangentVector(0.0, v.dq, v.dp, v.dz)

    return VectorField(Y, f.n, f"noether[{f.label}]")


def _jvp(field, x: PhasePoint, v: TangentVector, h: float) -> TangentVector:
    """Directional derivative of a vector field by central differences."""
    plus = field(x.shifted(v, h))
    minus = field(x.shifted(v, -h))
    return (plus - minus) * (0.5 / h)


def lie_bracket_fd(Y, X, x: PhasePoint, step: float = 1e-5) -> TangentVector:
    """[Y, X](x) = (dX) Y(x) - (dY) X(x) by central finite differences."""
    h = step * max(1.0, x.norm())
    out = _jvp(X, x, Y(x), h) - _jvp(Y, x, X(x), h)
    for c in out.coords():
        if not math.isfinite(c):
            raise ValueError("non-finite difference quotient in Lie bracket")
    return out


def symmetry_residual(Y, H: ScalarField, x: PhasePoint):
    """(|eta([Y, X_H])|, |tau(Y)|) at x.

    Both vanish for an infinitesimal dynamical symmetry; the Lie bracket is
    finite-differenced, so expect agreement at the 1e-5 level, not machine
    precision.
    """
    X = lambda pt: hamiltonian_vector_field(H, pt)
    br = lie_bracket_fd(Y, X, x)
    return abs(eta(x, br)), abs(tau(Y(x)))


# -- products, quotients, involution ------------------------------------------------

DENOMINATOR_FLOOR = 1e-8


def product_quotient_check(f1: ScalarField, f2: ScalarField, g: ScalarField,
                           H: ScalarField, x: PhasePoint):
    """(conservation residual of f1/f2, dissipation residual of f1*g) at x.

    Quotients of dissipated quantities are conserved; a dissipated quantity
    times a conserved one stays dissipated.  Points where |f2| < 1e-8 raise
    SkipPoint so samplers can count them.
    """
    f1v, f1g = f1.value_grad(x)
    f2v, f2g = f2.value_grad(x)
    if abs(f2v) < DENOMINATOR_FLOOR:
        raise SkipPoint(f"|f2| = {abs(f2v):.3e} below the quotient floor")
    gv = g.value(x)
    Xf1 = flow_derivative(f1, H, x)
    Xf2 = flow_derivative(f2, H, x)
    Xg = flow_derivative(g, H, x)
    Hz = H.grad(x).az
    quotient_res = (Xf1 * f2v - f1v * Xf2) / (f2v * f2v)
    product_res = Xf1 * gv + f1v * Xg + Hz * f1v * gv
    return quotient_res, product_res


TIME_INDEPENDENCE_TOL = 1e-10


def involution_residual(f_i: ScalarField, f_j: ScalarField, H: ScalarField,
                        x: PhasePoint) -> float:
    """{H f_i, H f_j} at x, for time-independent conserved f_i, f_j of an
    autonomous H.

    Raises NotApplicable when dH/dt is not numerically zero at x, since the
    involution statement needs a time-independent Hamiltonian.  The f_i must
    not carry explicit time either: the bracket cannot see d/dt, so a
    t-dependent first integral breaks the premise silently.
    """
    from .geometry import jacobi_bracket

    Hv, Hg = H.value_grad(x)
    if abs(Hg.at) > TIME_INDEPENDENCE_TOL * max(1.0, abs(Hv)):
        raise NotApplicable(f"dH/dt = {Hg.at!r} is not zero at {x}")
    return jacobi_bracket(H * f_i, H * f_j, x)


# -- sampling ------------------------------------------------------------------------

DEFAULT_BOX = ((0.0, 2.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0))

_PRIME_CACHE = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def _primes(count: int):
    while len(_PRIME_CACHE) < count:
        c = _PRIME_CACHE[-1] + 2
        while any(c % p == 0 for p in _PRIME_CACHE if p * p <= c):
            c += 2
        _PRIME_CACHE.append(c)
    return _PRIME_CACHE[:count]


def _radical_inverse(i: int, base: int) -> float:
    inv = 0.0
    scale = 1.0 / base
    while i:
        inv += (i % base) * scale
        i //= base
        scale /= base
    return inv


def sample_box(n: int, count: int = 200, seed: int = 0, box=None):
    """Quasi-random phase points: a Halton set with a seeded random shift.

    The box is ((tmin,tmax), (qmin,qmax), (pmin,pmax), (zmin,zmax)); q/p
    bounds apply to every component.  The shift (Cranley-Patterson) makes the
    set seed-reproducible while keeping the low-discrepancy structure.
    """
    t_b, q_b, p_b, z_b = box or DEFAULT_BOX
    dim = 2 * n + 2
    primes = _primes(dim)
    shift = np.random.default_rng(seed).uniform(0.0, 1.0, size=dim)
    points = []
    for i in range(count):
        u = [( _radical_inverse(i + 1, primes[j]) + shift[j]) % 1.0 for j in range(dim)]
        t = t_b[0] + (t_b[1] - t_b[0]) * u[0]
        q = tuple(q_b[0] + (q_b[1] - q_b[0]) * u[1 + k] for k in range(n))
        p = tuple(p_b[0] + (p_b[1] - p_b[0]) * u[1 + n + k] for k in range(n))
        z = z_b[0] + (z_b[1] - z_b[0]) * u[2 * n + 1]
        points.append(PhasePoint(t, q, p, z))
    return points


def sample_report(kind: str, residual_fn, points, tolerance: float) -> QuantityReport:
    """Evaluate a pointwise residual over samples, reducing to max/mean.

    residual_fn may return a scalar or an iterable of components (reduced by
    max |.|), and may raise SkipPoint to drop a sample.
    """
    residuals = []
    skipped = 0
    for x in points:
        try:
            r = residual_fn(x)
        except SkipPoint:
            skipped += 1
            continue
        if np.iterable(r):
            arr = np.asarray(r, dtype=float).ravel()
            residuals.append(float(np.max(np.abs(arr))) if arr.size else 0.0)
        else:
            residuals.append(abs(float(r)))
    return QuantityReport.from_residuals(kind, residuals, tolerance, skipped)


# -- trajectory-level checks -----------------------------------------------------------


def conserved_drift(g: ScalarField, traj) -> float:
    """Relative drift of g along a trajectory: sup |g(x_t) - g(x_0)| / max(1, |g(x_0)|)."""
    g0 = g.value(traj.samples[0])
    sup = max(abs(g.value(x) - g0) for x in traj.samples)
    return sup / max(1.0, abs(g0))


def _simpson_split(t0, t1, t2, r0, r1, r2):
    """Integrals of the quadratic through three samples over each sub-panel.

    Handles nonuniform spacing (adaptive trajectories); reduces to the
    classical 5/12, 8/12, -1/12 composite weights on a uniform grid.
    """
    h1 = t1 - t0
    h2 = t2 - t1
    big = h1 + h2
    seg01 = (
        h1 * (3.0 * big - h1) / (6.0 * big) * r0
        + h1 * (3.0 * big - 2.0 * h1) / (6.0 * h2) * r1
        - h1 ** 3 / (6.0 * big * h2) * r2
    )
    total = big / 6.0 * (
        (2.0 - h2 / h1) * r0 + big * big / (h1 * h2) * r1 + (2.0 - h1 / h2) * r2
    )
    return seg01, total - seg01


def cumulative_quadratic_integral(ts, values):
    """Cumulative integral of sampled values by piecewise-quadratic panels."""
    m = len(ts)
    integral = [0.0] * m
    if m == 2:
        integral[1] = 0.5 * (ts[1] - ts[0]) * (values[0] + values[1])
        return integral
    k = 0
    while k + 2 < m:
        seg01, seg12 = _simpson_split(
            ts[k], ts[k + 1], ts[k + 2], values[k], values[k + 1], values[k + 2]
        )
        integral[k + 1] = integral[k] + seg01
        integral[k + 2] = integral[k + 1] + seg12
        k += 2
    if k + 1 < m:
        # odd tail: reuse the quadratic through the previous sample
        _, seg12 = _simpson_split(
            ts[k - 1], ts[k], ts[k + 1], values[k - 1], values[k], values[k + 1]
        )
        integral[k + 1] = integral[k] + seg12
    return integral


def dissipated_drift(f: ScalarField, H: ScalarField, traj) -> float:
    """Relative drift of f(x_t) * exp(int dH/dz dt) along a trajectory.

    The compensated product is constant when f is dissipated, since the
    decay rate dH/dz is universal.
    """
    rate = [H.grad(x).az for x in traj.samples]
    integral = cumulative_quadratic_integral(traj.ts, rate)
    u0 = f.value(traj.samples[0])
    sup = 0.0
    for x, s in zip(traj.samples, integral):
        sup = max(sup, abs(f.value(x) * math.exp(s) - u0))
    return sup / max(1.0, abs(u0))
