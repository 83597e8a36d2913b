"""Cocontact Hamiltonian dynamics: vector field assembly and flow integration.

For a Hamiltonian H(t, q, p, z) the equations of motion on extended phase
space are

    dq/dt =  dH/dp
    dp/dt = -(dH/dq + p dH/dz)
    dz/dt =  p . dH/dp - H
    dt/dt =  1   (time is advanced exactly, never integrated)

so the Hamiltonian vector field is X_H = d/dt + H_p d/dq - (H_q + p H_z) d/dp
+ (p.H_p - H) d/dz, which satisfies tau(X_H) = 1 and eta(X_H) = -H pointwise.
Two integrators are provided: a fixed-step classical RK4 and an adaptive
Dormand-Prince 5(4) pair with PI-free step control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import expressions
from .duals import Dual, dual_phase
from .geometry import Covector, PhasePoint, TangentVector


class IntegrationError(RuntimeError):
    """Integration could not continue; carries the last good time."""

    def __init__(self, message: str, last_t: float):
        super().__init__(f"{message} (last good t = {last_t!r})")
        self.last_t = last_t


# -- scalar fields ---------------------------------------------------------------


class ScalarField:
    """A scalar function on extended phase space with exact first derivatives.

    Wraps either a parsed expression or a plain callable ``fn(t, q, p, z)``
    that accepts floats or dual numbers in every slot (q and p are tuples).
    Fields support +, -, *, / so conserved/dissipated quantities can be
    combined without leaving the exact-derivative world.
    """

    def __init__(self, fn, n: int, label: str = ""):
        self.fn = fn
        self.n = n
        self.label = label

    @classmethod
    def from_expression(cls, source, n: int = None, params=None) -> "ScalarField":
        """Build a field from source text or an already-parsed AST.

        When n is omitted it is inferred from the largest q/p index used
        (at least 1).
        """
        if isinstance(source, str):
            if n is None:
                n = max(1, expressions.max_index(expressions.parse(source, 1_000_000)))
            ast = expressions.parse(source, n)
            label = source
        else:
            ast = source
            if n is None:
                n = max(1, expressions.max_index(ast))
            label = expressions.unparse(ast)
        missing = expressions.collect_params(ast) - set(params or {})
        if missing:
            raise expressions.UnboundParameterError(
                f"unbound parameters: {', '.join(sorted(missing))}"
            )
        return cls(expressions.make_phase_callable(ast, params), n, label)

    @classmethod
    def from_callable(cls, fn, n: int, label: str = "") -> "ScalarField":
        return cls(fn, n, label)

    @classmethod
    def constant(cls, value: float, n: int) -> "ScalarField":
        return cls(lambda t, q, p, z: value, n, repr(value))

    def value(self, x: PhasePoint) -> float:
        r = self.fn(x.t, x.q, x.p, x.z)
        return r.v if isinstance(r, Dual) else float(r)

    def value_grad(self, x: PhasePoint):
        """(value, gradient covector) in one dual pass."""
        T, Q, P, Z = dual_phase(x.t, x.q, x.p, x.z)
        r = self.fn(T, Q, P, Z)
        if isinstance(r, Dual):
            return r.v, Covector.from_partials(r.e, x.n)
        return float(r), Covector.zero(x.n)

    def grad(self, x: PhasePoint) -> Covector:
        return self.value_grad(x)[1]

    # -- algebra -------------------------------------------------------------

    def _combine(self, other, op, sym):
        if isinstance(other, ScalarField):
            if other.n != self.n:
                raise ValueError("cannot combine fields of different dimension")
            f, g = self.fn, other.fn
            return ScalarField(
                lambda t, q, p, z: op(f(t, q, p, z), g(t, q, p, z)),
                self.n,
                f"({self.label}){sym}({other.label})",
            )
        c = float(other)
        f = self.fn
        return ScalarField(lambda t, q, p, z: op(f(t, q, p, z), c), self.n,
                           f"({self.label}){sym}{c!r}")

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, "+")

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, "-")

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b, "*")

    def __truediv__(self, other):
        return self._combine(other, lambda a, b: a / b, "/")

    def __rmul__(self, other):
        return self._combine(other, lambda a, b: b * a, "*")

    def __neg__(self):
        f = self.fn
        return ScalarField(lambda t, q, p, z: -f(t, q, p, z), self.n, f"-({self.label})")


class VectorField:
    """A tangent-vector-valued map on extended phase space."""

    def __init__(self, fn, n: int, label: str = ""):
        self.fn = fn
        self.n = n
        self.label = label

    def __call__(self, x: PhasePoint) -> TangentVector:
        return self.fn(x)


# -- the Hamiltonian vector field ---------------------------------------------


def hamiltonian_vector_field(H: ScalarField, x: PhasePoint) -> TangentVector:
    """X_H at x; tau(X_H) = 1 and eta(X_H) = -H hold by construction."""
    Hv, g = H.value_grad(x)
    dq = g.ap
    dp = tuple(-(gq + pi * g.az) for gq, pi in zip(g.aq, x.p))
    dz = sum(pi * hpi for pi, hpi in zip(x.p, g.ap)) - Hv
    return TangentVector(1.0, dq, dp, dz)


def as_vector_field(H: ScalarField) -> VectorField:
    return VectorField(lambda x: hamiltonian_vector_field(H, x), H.n, f"X[{H.label}]")


# -- trajectories ----------------------------------------------------------------


@dataclass
class Trajectory:
    """Time-ordered samples of an integrated flow.

    ``derivs[k]`` stores (dq, dp, dz) of the state derivative at sample k,
    which the quadrature of the action and the dense-output Hermite midpoints
    both reuse.
    """

    n: int
    scheme: str
    samples: list  # list[PhasePoint]
    derivs: list  # list[(dq tuple, dp tuple, dz float)]
    accepted: int
    rejected: int
    meta: dict = field(default_factory=dict)

    @property
    def ts(self):
        return [s.t for s in self.samples]

    def __len__(self):
        return len(self.samples)

    def endpoint(self) -> PhasePoint:
        return self.samples[-1]


def _state_to_point(t: float, y, n: int) -> PhasePoint:
    return PhasePoint(t, tuple(y[:n]), tuple(y[n : 2 * n]), y[2 * n])


def _point_to_state(x: PhasePoint):
    return [*x.q, *x.p, x.z]


def make_rhs(H: ScalarField):
    """State derivative (q', p', z') as a function of (t, y) for integrators."""
    n = H.n

    def rhs(t, y):
        v = hamiltonian_vector_field(H, _state_to_point(t, y, n))
        return [*v.dq, *v.dp, v.dz]

    return rhs


def _check_finite(t, y):
    for c in y:
        if not math.isfinite(c):
            raise IntegrationError("non-finite state encountered", t)


# -- fixed-step RK4 ----------------------------------------------------------------


def _rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, [yi + 0.5 * h * ki for yi, ki in zip(y, k1)])
    k3 = rhs(t + 0.5 * h, [yi + 0.5 * h * ki for yi, ki in zip(y, k2)])
    k4 = rhs(t + h, [yi + h * ki for yi, ki in zip(y, k3)])
    y1 = [
        yi + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    ]
    return y1, k1


def integrate_rk4(rhs, t0: float, y0, t_end: float, h: float):
    """Classical RK4 with exactly indexed times t_k = t0 + k*h.

    A final short step lands exactly on t_end when the span is not an
    integer number of steps.  Returns (ts, ys, dys, steps).
    """
    if h <= 0.0:
        raise ValueError("step size must be positive")
    span = t_end - t0
    n_full = int(math.floor(span / h + 1e-9))
    ts = [t0]
    ys = [list(y0)]
    dys = []
    y = list(y0)
    t = t0
    for k in range(n_full):
        y, k1 = _rk4_step(rhs, t, y, h)
        dys.append(k1)
        t = t0 + (k + 1) * h  # exact time indexing, no accumulation drift
        _check_finite(t, y)
        ts.append(t)
        ys.append(y)
    if t_end - t > 1e-12 * max(1.0, abs(t_end)):
        y, k1 = _rk4_step(rhs, t, y, t_end - t)
        dys.append(k1)
        t = t_end
        _check_finite(t, y)
        ts.append(t)
        ys.append(y)
    else:
        ts[-1] = t_end
    dys.append(rhs(t_end, ys[-1]))
    return ts, ys, dys, n_full


# -- adaptive Dormand-Prince 5(4) ---------------------------------------------------

_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
_DP_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_DP_B4 = (
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
)

H_MIN = 1e-12
H_MAX = 0.1


def integrate_dopri45(rhs, t0: float, y0, t_end: float, rtol: float, atol: float):
    """Embedded 5(4) pair with scaled-RMS error control.

    Step sizes are clamped to [1e-12, 0.1]; a shrink below the floor raises
    IntegrationError with the last good time.  Returns
    (ts, ys, dys, accepted, rejected).
    """
    if rtol <= 0.0 or atol <= 0.0:
        raise ValueError("tolerances must be positive")
    t = t0
    y = list(y0)
    ts = [t0]
    ys = [list(y0)]
    dys = [rhs(t0, y0)]
    accepted = 0
    rejected = 0
    h = min(H_MAX, max(H_MIN, (t_end - t0) / 100.0))
    m = len(y)
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        h_try = min(h, t_end - t)
        # The pair is FSAL: the last stage of an accepted step is the state
        # derivative at the new point, already stored in dys[-1]; after a
        # rejection the point has not moved, so it is still valid.
        ks = [dys[-1]]
        for s in range(1, 7):
            ya = [
                yi + h_try * sum(_DP_A[s][j] * ks[j][i] for j in range(s))
                for i, yi in enumerate(y)
            ]
            ks.append(rhs(t + _DP_C[s] * h_try, ya))
        y5 = [yi + h_try * sum(_DP_B5[j] * ks[j][i] for j in range(7)) for i, yi in enumerate(y)]
        y4 = [yi + h_try * sum(_DP_B4[j] * ks[j][i] for j in range(7)) for i, yi in enumerate(y)]
        err = 0.0
        for i in range(m):
            sc = atol + rtol * max(abs(y[i]), abs(y5[i]))
            d = (y5[i] - y4[i]) / sc
            err += d * d
        err = math.sqrt(err / m)
        if err <= 1.0:
            t = t + h_try
            y = y5
            _check_finite(t, y)
            ts.append(t)
            ys.append(list(y))
            dys.append(ks[6])
            accepted += 1
        else:
            rejected += 1
            if h_try <= H_MIN * (1.0 + 1e-9):
                raise IntegrationError("adaptive step size underflow", t)
        factor = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        factor = min(5.0, max(0.2, factor))
        h = min(H_MAX, max(H_MIN, h_try * factor))
        if accepted + rejected > 10_000_000:
            raise IntegrationError("step budget exhausted", t)
    ts[-1] = t_end
    return ts, ys, dys, accepted, rejected


# -- public integrate ---------------------------------------------------------------


def integrate(
    H: ScalarField,
    x0: PhasePoint,
    t_end: float,
    scheme: str = "rk4",
    h: float = 1e-3,
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> Trajectory:
    """Integrate the cocontact Hamilton equations from x0 up to t_end.

    scheme is "rk4" (fixed step h) or "adaptive" (Dormand-Prince 5(4) with
    rtol/atol).  The first sample is x0 exactly; t advances with unit rate.
    """
    if t_end <= x0.t:
        raise ValueError("t_end must exceed the initial time")
    if H.n != x0.n:
        raise ValueError("Hamiltonian dimension does not match the initial point")
    rhs = make_rhs(H)
    n = H.n
    y0 = _point_to_state(x0)
    if scheme == "rk4":
        ts, ys, dys, steps = integrate_rk4(rhs, x0.t, y0, t_end, h)
        accepted, rejected = steps, 0
        meta = {"h": h}
    elif scheme == "adaptive":
        ts, ys, dys, accepted, rejected = integrate_dopri45(rhs, x0.t, y0, t_end, rtol, atol)
        meta = {"rtol": rtol, "atol": atol}
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    samples = [x0] + [_state_to_point(t, y, n) for t, y in zip(ts[1:], ys[1:])]
    derivs = [(tuple(d[:n]), tuple(d[n : 2 * n]), d[2 * n]) for d in dys]
    return Trajectory(n, scheme, samples, derivs, accepted, rejected, meta)


# -- action quadrature ---------------------------------------------------------------


def _hermite_midpoint(y0, y1, d0, d1, h):
    """Cubic Hermite value at the interval midpoint."""
    return [
        0.5 * (a + b) + 0.125 * h * (da - db)
        for a, b, da, db in zip(y0, y1, d0, d1)
    ]


def action_increments(H: ScalarField, traj: Trajectory):
    """Per-interval Simpson quadrature of the action integrand p.q' - H.

    The midpoint state comes from a cubic Hermite using the stored
    derivatives; the midpoint integrand re-evaluates H there, which makes
    each panel exact for the interpolating cubic.
    """
    n = traj.n
    out = []

    def integrand_at(x: PhasePoint):
        Hv, g = H.value_grad(x)
        qdot = g.ap
        return sum(pi * qi for pi, qi in zip(x.p, qdot)) - Hv

    def integrand_sample(k):
        x = traj.samples[k]
        dq, _, _ = traj.derivs[k]
        return sum(pi * qi for pi, qi in zip(x.p, dq)) - H.value(x)

    g_prev = integrand_sample(0)
    for k in range(len(traj) - 1):
        x0, x1 = traj.samples[k], traj.samples[k + 1]
        h = x1.t - x0.t
        d0 = [*traj.derivs[k][0], *traj.derivs[k][1], traj.derivs[k][2]]
        d1 = [*traj.derivs[k + 1][0], *traj.derivs[k + 1][1], traj.derivs[k + 1][2]]
        y0 = _point_to_state(x0)
        y1 = _point_to_state(x1)
        ym = _hermite_midpoint(y0, y1, d0, d1, h)
        xm = _state_to_point(x0.t + 0.5 * h, ym, n)
        gm = integrand_at(xm)
        g_next = integrand_sample(k + 1)
        out.append(h / 6.0 * (g_prev + 4.0 * gm + g_next))
        g_prev = g_next
    return out


def herglotz_action(H: ScalarField, traj: Trajectory) -> float:
    """The action integral of p.q' - H along a trajectory.

    Along solutions z' = p.q' - H, so for an integrated trajectory the action
    equals z(T) - z(0) within the integration tolerance.
    """
    if len(traj) < 3:
        raise ValueError("need at least 3 samples to quadrature the action")
    return math.fsum(action_increments(H, traj))
