"""Built-in example systems with closed-form solutions and cached quadratures.

Four one-dimensional dissipative systems are provided by name, each with its
Hamiltonian, its known conserved and dissipated quantities, and a complete
Hamilton-Jacobi solution (action-independent for the free particles,
action-dependent for the falling particle and the oscillator):

* ``free_particle_tm``          -- H = p^2/2m(t) - (kappa/m(t)) z
* ``free_particle_autonomous``  -- H = p^2/2 - kappa z
* ``falling_particle``          -- H = p^2/2m(t) + m(t) g q + (friction/m(t)) z
* ``damped_oscillator``         -- H = p^2/2m + (k/2) q^2 - q F(t) + (friction/m) z

Mass laws are restricted to m(t) = m0 or m0 + a t and forcing to 0, F0, or
F0 sin(omega t), so every integral in the registered quantities has a
closed-form oracle while still flowing through the quadrature cache.

Several quantities involve running integrals such as int_1^t friction/m(s) ds.
These are evaluated through :class:`QuadratureCache`, an adaptive-Simpson
integrator that memoizes every requested endpoint, so repeated residual
sweeps over a grid amortize to one refinement per new abscissa.  Caches
accept dual numbers: the value comes from the table and the tangent from the
integrand itself, which is exactly the derivative of the integral.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .duals import Dual, chx, dexp, dsin, shc, value_of
from .dynamics import ScalarField
from .geometry import PhasePoint
from .hamilton_jacobi import CompleteSolution, SectionT, SectionTZ
from .quantities import conservation_residual, dissipation_residual, sample_box


class UnknownSystemError(ValueError):
    """Requested system name is not registered."""


class UnknownParameterError(ValueError):
    """A parameter key (or selector value) is not recognised by the system."""


class MissingParameterError(ValueError):
    """A parameter required by the chosen law variant was not supplied."""


class NonPositiveMassError(ValueError):
    """The mass law is not strictly positive where it was evaluated."""


class QuadratureError(RuntimeError):
    """Adaptive refinement exceeded the panel budget without converging."""


class SelfTestError(RuntimeError):
    """A registered quantity failed its residual check at build time."""


# -- cached adaptive quadrature --------------------------------------------------------

DEFAULT_QUAD_TOL = 1e-12
DEFAULT_PANEL_BUDGET = 2**20


class QuadratureCache:
    """Memoized one-dimensional integral t -> int_limit^t integrand(s) ds.

    Every queried endpoint becomes a knot; later queries integrate only from
    the nearest existing knot, and re-querying a knot returns the stored
    value bit-for-bit.  Lookups of existing knots are lock-free; refinement
    is serialized under a mutex, and knots are inserted atomically, so
    concurrent readers never observe a partial state.  Queries left of the
    lower limit return the (negative) oriented integral.
    """

    def __init__(self, integrand: Callable[[float], float], limit: float = 1.0,
                 tol: float = DEFAULT_QUAD_TOL, max_panels: int = DEFAULT_PANEL_BUDGET,
                 label: str = ""):
        self.integrand = integrand
        self.limit = float(limit)
        self.tol = float(tol)
        self.max_panels = int(max_panels)
        self.label = label
        self._knots = {self.limit: 0.0}
        self._lock = threading.Lock()

    def value(self, t: float) -> float:
        t = float(t)
        hit = self._knots.get(t)
        if hit is not None:
            return hit
        with self._lock:
            hit = self._knots.get(t)
            if hit is not None:
                return hit
            base = min(self._knots, key=lambda k: abs(k - t))
            val = self._knots[base] + self._refine(base, t)
            self._knots[t] = val
            return val

    def __call__(self, t):
        if isinstance(t, Dual):
            # fundamental theorem of calculus: d/dt of the integral is the integrand
            rate = float(self.integrand(t.v))
            return Dual(self.value(t.v), tuple(rate * e for e in t.e))
        return self.value(t)

    @property
    def knots(self) -> dict:
        """Snapshot of the knot table (t -> cached integral value)."""
        return dict(self._knots)

    def _refine(self, a: float, b: float) -> float:
        """Adaptive Simpson on the oriented interval [a, b].

        The Simpson rule is signed through its (b - a) factor, so b < a
        yields the reversed-orientation integral with no special casing.
        Each accepted panel contributes its Richardson-corrected estimate
        (error ~ |S2 - S1|/15, driven below a halved per-level tolerance).
        """
        if b == a:
            return 0.0
        f = self.integrand
        panels = 0
        total = 0.0
        m = 0.5 * (a + b)
        stack = [(a, m, b, f(a), f(m), f(b), self.tol)]
        while stack:
            x0, xm, x1, f0, fm, f1, eps = stack.pop()
            whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1)
            lm = 0.5 * (x0 + xm)
            rm = 0.5 * (xm + x1)
            flm = f(lm)
            frm = f(rm)
            left = (xm - x0) / 6.0 * (f0 + 4.0 * flm + fm)
            right = (x1 - xm) / 6.0 * (fm + 4.0 * frm + f1)
            delta = left + right - whole
            if abs(delta) <= 15.0 * eps:
                total += left + right + delta / 15.0
                continue
            panels += 1
            if panels > self.max_panels:
                raise QuadratureError(
                    f"quadrature{' ' + self.label if self.label else ''} on "
                    f"[{a}, {b}] exceeded {self.max_panels} panels"
                )
            stack.append((x0, lm, xm, f0, flm, fm, 0.5 * eps))
            stack.append((xm, rm, x1, fm, frm, f1, 0.5 * eps))
        return total


def quadrature(cache: QuadratureCache, t: float) -> float:
    """Cached integral of the cache's integrand from its lower limit to t."""
    return cache.value(float(t))


# -- parameter handling ------------------------------------------------------------------

MASS_LAWS = ("constant", "linear")
FORCING_LAWS = ("zero", "constant", "sin")


def _merge_params(name: str, defaults: dict, params: Optional[dict]) -> dict:
    merged = dict(defaults)
    for key, val in (params or {}).items():
        if key not in defaults:
            raise UnknownParameterError(
                f"{name}: unknown parameter {key!r} (accepted: {', '.join(sorted(defaults))})"
            )
        merged[key] = val
    return merged


def _require(name: str, merged: dict, key: str, because: str) -> float:
    if merged.get(key) is None:
        raise MissingParameterError(f"{name}: parameter {key!r} required {because}")
    return float(merged[key])


def _mass_law(name: str, merged: dict) -> Callable:
    """Dual-capable m(t), strictly positive wherever evaluated."""
    law = merged["mass_law"]
    m0 = _require(name, merged, "m0", "for the mass law")
    if law == "constant":
        def raw(t):
            return m0 + 0.0 * t  # keeps dual tangents flowing for uniform code paths
        knee = m0
    elif law == "linear":
        a = _require(name, merged, "a", "by mass_law='linear'")

        def raw(t):
            return m0 + a * t
        knee = min(m0, m0 + 2.0 * a)
    else:
        raise UnknownParameterError(
            f"{name}: mass_law must be one of {MASS_LAWS}, got {law!r}"
        )
    if knee <= 0.0:
        raise NonPositiveMassError(
            f"{name}: mass law {law!r} is non-positive on the default window [0, 2]"
        )

    def m(t):
        out = raw(t)
        if value_of(out) <= 0.0:
            raise NonPositiveMassError(
                f"{name}: mass non-positive at t = {value_of(t)}"
            )
        return out

    return m


def _forcing_law(name: str, merged: dict) -> tuple:
    """Dual-capable F(t) plus a flag for time dependence."""
    law = merged["forcing"]
    if law == "zero":
        return (lambda t: 0.0 * t), False
    if law == "constant":
        F0 = _require(name, merged, "F0", "by forcing='constant'")
        return (lambda t: F0 + 0.0 * t), False
    if law == "sin":
        F0 = _require(name, merged, "F0", "by forcing='sin'")
        omega = _require(name, merged, "omega", "by forcing='sin'")
        return (lambda t: F0 * dsin(omega * t)), True
    raise UnknownParameterError(
        f"{name}: forcing must be one of {FORCING_LAWS}, got {law!r}"
    )


# -- system container ---------------------------------------------------------------------


@dataclass(frozen=True)
class SystemSpec:
    """A named system: Hamiltonian, known quantities, and complete solutions.

    ``quantities`` maps a short name to (field, kind) with kind in
    {"conserved", "dissipated"}; every entry passes its residual check on
    the default sample box at build time unless the self-test is skipped.
    ``closed_orbit`` (when present) maps (lam, c) to a callable t ->
    PhasePoint tracing an exact flow line on the leaf lam; ``separable``
    maps lam to an (alpha(q), beta(t)) additive split of the generating
    function.  ``caches`` exposes the quadrature caches behind the
    registered formulas, keyed by the symbol used in their definitions.
    """

    name: str
    n: int
    params: dict
    H: ScalarField
    quantities: dict
    solutions: tuple
    closed_orbit: Optional[Callable] = None
    separable: Optional[Callable] = None
    caches: dict = field(default_factory=dict)
    notes: str = ""


# -- the four built-ins --------------------------------------------------------------------


def _build_free_particle_tm(merged: dict) -> SystemSpec:
    """Free particle whose mass changes in time, with friction proportional to z."""
    name = "free_particle_tm"
    kappa = _require(name, merged, "kappa", "")
    if kappa <= 0:
        raise UnknownParameterError(f"{name}: kappa must be positive")
    m = _mass_law(name, merged)
    rt_half = math.sqrt(kappa / 2.0)
    rt_two = math.sqrt(2.0 * kappa)

    def H_fn(t, q, p, z):
        mt = m(t)
        return p[0] * p[0] / (2.0 * mt) - (kappa / mt) * z

    H = ScalarField.from_callable(H_fn, 1, "p1^2/(2 m(t)) - (kappa/m(t)) z")

    # running integral of 1/m from 0; the kappa-scaled shift from 1 gives the
    # exponent of the leaf flow map
    C = QuadratureCache(lambda s: 1.0 / value_of(m(s)), limit=0.0, label="C")

    def f1_fn(t, q, p, z):
        return dexp(-kappa * C(t)) * (z - p[0] * p[0] / (2.0 * kappa))

    def f2_fn(t, q, p, z):
        return (p[0] - kappa * q[0]) / rt_two

    f1 = ScalarField.from_callable(f1_fn, 1, "exp(-kappa C(t)) (z - p^2/2kappa)")
    f2 = ScalarField.from_callable(f2_fn, 1, "(p - kappa q)/sqrt(2 kappa)")

    def section(lam):
        l1, l2 = (float(v) for v in lam)

        def gamma_fn(t, q):
            return (kappa * q[0] + rt_two * l2,)

        def S_fn(t, q):
            return l1 * dexp(kappa * C(t)) + (rt_half * q[0] + l2) ** 2

        return SectionT(1, gamma_fn, S_fn, label=f"{name} lam=({l1}, {l2})")

    def inverse(t, q, p, z):
        return (f1_fn(t, q, p, z), f2_fn(t, q, p, z))

    sol = CompleteSolution("T", 1, 2, section, inverse=inverse, label=name)

    def closed_orbit(lam, c):
        """Exact flow line on leaf lam; c is the position at t = 1."""
        l1, l2 = (float(v) for v in lam)
        c = float(c)

        def at(t):
            t = float(t)
            growth = math.exp(kappa * (C.value(t) - C.value(1.0)))
            qv = c * growth + l2 * math.sqrt(2.0 / kappa) * (growth - 1.0)
            pv = kappa * qv + rt_two * l2
            zv = l1 * math.exp(kappa * C.value(t)) + (rt_half * qv + l2) ** 2
            return PhasePoint(t, (qv,), (pv,), zv)

        return at

    def separable(lam):
        l1, l2 = (float(v) for v in lam)

        def alpha(q):
            return (rt_half * q[0] + l2) ** 2

        def beta(t):
            return l1 * dexp(kappa * C(t))

        return alpha, beta

    return SystemSpec(
        name, 1, merged, H,
        {"f1": (f1, "conserved"), "f2": (f2, "conserved")},
        (sol,), closed_orbit, separable, {"C": C},
        notes="z-linear friction with time-dependent mass; leafwise exponential flow",
    )


def _build_free_particle_autonomous(merged: dict) -> SystemSpec:
    """Free particle with friction proportional to z and constant unit mass."""
    name = "free_particle_autonomous"
    kappa = _require(name, merged, "kappa", "")
    if kappa <= 0:
        raise UnknownParameterError(f"{name}: kappa must be positive")
    rt_half = math.sqrt(kappa / 2.0)
    rt_two = math.sqrt(2.0 * kappa)

    H = ScalarField.from_expression("p1^2/2 - kappa*z", params={"kappa": kappa})

    def f1_fn(t, q, p, z):
        return (p[0] - kappa * q[0]) / rt_two

    f1 = ScalarField.from_callable(f1_fn, 1, "(p - kappa q)/sqrt(2 kappa)")

    def section(lam):
        (l,) = (float(v) for v in lam)

        def gamma_fn(t, q):
            return (kappa * q[0] + rt_two * l,)

        def S_fn(t, q):
            return dexp(kappa * t) + (rt_half * q[0] + l) ** 2

        return SectionT(1, gamma_fn, S_fn, label=f"{name} lam={l}")

    def inverse(t, q, p, z):
        return (f1_fn(t, q, p, z),)

    def time_recovery(x: PhasePoint) -> float:
        """Invert z = e^{kappa t} + p^2/2kappa along the leaves."""
        arg = x.z - x.p[0] * x.p[0] / (2.0 * kappa)
        if arg <= 0.0:
            raise ValueError(f"time recovery undefined: z - p^2/2kappa = {arg} <= 0")
        return math.log(arg) / kappa

    sol = CompleteSolution("T", 1, 1, section, inverse=inverse,
                           time_recovery=time_recovery, label=name)

    def closed_orbit(lam, c):
        """Exact flow line; c is the coefficient of e^{kappa t} in q(t)."""
        (l,) = (float(v) for v in lam)
        c = float(c)

        def at(t):
            t = float(t)
            grow = math.exp(kappa * t)
            qv = c * grow - math.sqrt(2.0 / kappa) * l
            pv = kappa * c * grow
            zv = grow + (rt_half * qv + l) ** 2
            return PhasePoint(t, (qv,), (pv,), zv)

        return at

    def separable(lam):
        (l,) = (float(v) for v in lam)

        def alpha(q):
            return (rt_half * q[0] + l) ** 2

        def beta(t):
            return dexp(kappa * t)

        return alpha, beta

    return SystemSpec(
        name, 1, merged, H,
        {"f1": (f1, "conserved"), "energy": (H, "dissipated")},
        (sol,), closed_orbit, separable, {},
        notes="autonomous variant; energy decays along the flow at rate kappa",
    )


def _build_falling_particle(merged: dict) -> SystemSpec:
    """Particle falling under gravity with z-linear friction."""
    name = "falling_particle"
    g = _require(name, merged, "g", "")
    friction = _require(name, merged, "friction", "")
    m = _mass_law(name, merged)

    def H_fn(t, q, p, z):
        mt = m(t)
        return p[0] * p[0] / (2.0 * mt) + mt * g * q[0] + (friction / mt) * z

    H = ScalarField.from_callable(
        H_fn, 1, "p1^2/(2 m(t)) + m(t) g q1 + (friction/m(t)) z"
    )

    A = QuadratureCache(lambda s: friction / value_of(m(s)), limit=1.0, label="A")
    B = QuadratureCache(lambda s: math.exp(A.value(s)) * value_of(m(s)),
                        limit=1.0, label="B")

    def f_fn(t, q, p, z):
        return dexp(A(t)) * p[0] + g * B(t)

    def k_fn(t, q, p, z):
        return p[0] + g * dexp(-A(t)) * B(t)

    f_field = ScalarField.from_callable(f_fn, 1, "exp(A(t)) p + g B(t)")
    k_field = ScalarField.from_callable(k_fn, 1, "p + g exp(-A(t)) B(t)")

    def section(lam):
        (l,) = (float(v) for v in lam)

        def gamma_fn(t, q, z):
            return (dexp(-A(t)) * (l - g * B(t)),)

        return SectionTZ(1, gamma_fn, label=f"{name} lam={l}")

    def inverse(t, q, p, z):
        return (f_fn(t, q, p, z),)

    sol = CompleteSolution("TZ", 1, 1, section, inverse=inverse, label=name)

    quantities = {"f": (f_field, "conserved"), "k": (k_field, "dissipated")}
    if merged["mass_law"] == "constant":
        quantities["energy"] = (H, "dissipated")

    return SystemSpec(
        name, 1, merged, H, quantities, (sol,), None, None, {"A": A, "B": B},
        notes="momentum-like quantities built from nested running integrals",
    )


def _build_damped_oscillator(merged: dict) -> SystemSpec:
    """Harmonic oscillator with linear damping and optional external forcing."""
    name = "damped_oscillator"
    m0 = _require(name, merged, "m0", "")
    if m0 <= 0:
        raise NonPositiveMassError(f"{name}: m0 must be positive")
    k = _require(name, merged, "k", "")
    friction = _require(name, merged, "friction", "")
    F, time_dependent_forcing = _forcing_law(name, merged)

    delta = friction * friction - 4.0 * k * m0  # discriminant: damping regime
    half = 0.5 / m0  # argument scale t/2m in all trig-like factors

    def H_fn(t, q, p, z):
        return (p[0] * p[0] / (2.0 * m0) + 0.5 * k * q[0] * q[0]
                - q[0] * F(t) + (friction / m0) * z)

    H = ScalarField.from_callable(
        H_fn, 1, "p1^2/2m + (k/2) q1^2 - q1 F(t) + (friction/m) z"
    )

    def forcing_integrand(s: float) -> float:
        x = s * half
        return (value_of(F(s)) * math.exp(friction * s * half)
                * (chx(delta, x) + friction * shc(delta, x)))

    I = QuadratureCache(forcing_integrand, limit=1.0, label="I")

    def g_fn(t, q, p, z):
        x = t * half
        return (dexp(friction * t * half)
                * (shc(delta, x) * (2.0 * k * m0 * q[0] + friction * p[0])
                   + p[0] * chx(delta, x))
                - I(t))

    def f_fn(t, q, p, z):
        return dexp(-friction * t / m0) * g_fn(t, q, p, z)

    g_field = ScalarField.from_callable(
        g_fn, 1, "exp(friction t/2m) [shc (2km q + friction p) + p chx] - I(t)"
    )
    f_field = ScalarField.from_callable(f_fn, 1, "exp(-friction t/m) g")

    def section(lam):
        (l,) = (float(v) for v in lam)

        def gamma_fn(t, q, z):
            x = t * half
            s = shc(delta, x)
            c = chx(delta, x)
            den = friction * s + c
            if abs(value_of(den)) < 1e-12:
                raise ValueError(
                    f"{name}: leaf section singular at t = {value_of(t)} "
                    "(zero of friction*shc + chx)"
                )
            num = I(t) + l - 2.0 * k * m0 * q[0] * dexp(friction * t * half) * s
            return (dexp(-friction * t * half) * num / den,)

        return SectionTZ(1, gamma_fn, label=f"{name} lam={l}")

    def inverse(t, q, p, z):
        return (g_fn(t, q, p, z),)

    sol = CompleteSolution("TZ", 1, 1, section, inverse=inverse, label=name)

    quantities = {"g": (g_field, "conserved"), "f": (f_field, "dissipated")}
    if not time_dependent_forcing:
        quantities["energy"] = (H, "dissipated")

    return SystemSpec(
        name, 1, merged, H, quantities, (sol,), None, None, {"I": I},
        notes="damping discriminant friction^2 - 4km selects the oscillation regime",
    )


# -- registry -------------------------------------------------------------------------------

_DEFAULTS = {
    "free_particle_tm": {
        "kappa": 2.0, "mass_law": "linear", "m0": 1.0, "a": 1.0,
    },
    "free_particle_autonomous": {
        "kappa": 2.0,
    },
    "falling_particle": {
        "mass_law": "constant", "m0": 1.0, "a": None, "g": 9.8, "friction": 0.5,
    },
    "damped_oscillator": {
        "m0": 1.0, "k": 1.0, "friction": 0.2,
        "forcing": "zero", "F0": None, "omega": None,
    },
}

_BUILDERS = {
    "free_particle_tm": _build_free_particle_tm,
    "free_particle_autonomous": _build_free_particle_autonomous,
    "falling_particle": _build_falling_particle,
    "damped_oscillator": _build_damped_oscillator,
}

SYSTEM_NAMES = tuple(sorted(_BUILDERS))

SELF_TEST_TOL = 1e-6
SELF_TEST_COUNT = 200


def registry_self_test(spec: SystemSpec, tol: float = SELF_TEST_TOL,
                       count: int = SELF_TEST_COUNT) -> dict:
    """Check every registered quantity's residual on the default sample box.

    Returns {name: sup residual}; raises SelfTestError on any failure.
    """
    points = sample_box(spec.n, count=count, seed=0)
    report = {}
    for qname, (fld, kind) in spec.quantities.items():
        if kind == "conserved":
            residual = conservation_residual
        elif kind == "dissipated":
            residual = dissipation_residual
        else:
            raise SelfTestError(f"{spec.name}.{qname}: unknown kind {kind!r}")
        sup = max(abs(residual(fld, spec.H, x)) for x in points)
        if not sup < tol:
            raise SelfTestError(
                f"{spec.name}.{qname} ({kind}): residual {sup:.3e} >= {tol:.1e}"
            )
        report[qname] = sup
    return report


def build_system(name: str, params: Optional[dict] = None, *,
                 self_test: bool = True) -> SystemSpec:
    """Construct a named built-in system, optionally verifying its registry.

    ``params`` overrides the system's defaults; unknown keys are rejected,
    and law selectors may make further keys mandatory (e.g. ``a`` for
    mass_law='linear', ``F0``/``omega`` for nonzero forcing).  With
    ``self_test`` (the default) every registered conserved and dissipated
    quantity is residual-checked at 200 sample points before the
    ``SystemSpec`` is returned.
    """
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownSystemError(
            f"unknown system {name!r}; available: {', '.join(SYSTEM_NAMES)}"
        ) from None
    merged = _merge_params(name, _DEFAULTS[name], params)
    spec = builder(merged)
    if self_test:
        registry_self_test(spec)
    return spec
