"""Canonical cocontact structure on extended phase space, in Darboux coordinates.

Extended phase space is R x T*Q x R with coordinates (t, q^i, p_i, z); the
structure is the pair of one-forms

    tau = dt,        eta = dz - p_i dq^i,        d(eta) = dq^i ^ dp_i.

Everything in this module is a pure function of its arguments: the two Reeb
fields, the musical isomorphisms flat/sharp built from (tau, eta, d eta), the
bivector map induced on one-forms, and the Jacobi bracket of scalar fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DimensionMismatch(ValueError):
    """A vector/covector does not match the dimension of its base point."""


def _as_tuple(x) -> tuple:
    return tuple(float(v) for v in x)


@dataclass(frozen=True)
class PhasePoint:
    """A point (t, q^1..q^n, p_1..p_n, z) of extended phase space."""

    t: float
    q: tuple
    p: tuple
    z: float

    @property
    def n(self) -> int:
        return len(self.q)

    @classmethod
    def of(cls, t, q, p, z) -> "PhasePoint":
        q = _as_tuple(q)
        p = _as_tuple(p)
        if len(q) != len(p):
            raise DimensionMismatch(f"len(q)={len(q)} != len(p)={len(p)}")
        pt = cls(float(t), q, p, float(z))
        for c in pt.coords():
            if not math.isfinite(c):
                raise ValueError(f"non-finite phase point {pt}")
        return pt

    def coords(self) -> tuple:
        """Flatten to (t, q..., p..., z)."""
        return (self.t, *self.q, *self.p, self.z)

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coords()))

    def shifted(self, v: "TangentVector", h: float) -> "PhasePoint":
        """The point x + h*v (coordinate-wise; used for finite differencing)."""
        return PhasePoint(
            self.t + h * v.dt,
            tuple(a + h * b for a, b in zip(self.q, v.dq)),
            tuple(a + h * b for a, b in zip(self.p, v.dp)),
            self.z + h * v.dz,
        )


@dataclass(frozen=True)
class TangentVector:
    """Components (dt, dq^i, dp_i, dz) of a tangent vector."""

    dt: float
    dq: tuple
    dp: tuple
    dz: float

    @property
    def n(self) -> int:
        return len(self.dq)

    def coords(self) -> tuple:
        return (self.dt, *self.dq, *self.dp, self.dz)

    def __add__(self, o: "TangentVector") -> "TangentVector":
        return TangentVector(
            self.dt + o.dt,
            tuple(a + b for a, b in zip(self.dq, o.dq)),
            tuple(a + b for a, b in zip(self.dp, o.dp)),
            self.dz + o.dz,
        )

    def __sub__(self, o: "TangentVector") -> "TangentVector":
        return self + (-1.0) * o

    def __mul__(self, s: float) -> "TangentVector":
        return TangentVector(
            s * self.dt,
            tuple(s * a for a in self.dq),
            tuple(s * a for a in self.dp),
            s * self.dz,
        )

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(abs(c) for c in self.coords())


@dataclass(frozen=True)
class Covector:
    """Components (a_t, a_q dq^i, a_p dp_i, a_z dz) of a one-form value."""

    at: float
    aq: tuple
    ap: tuple
    az: float

    @property
    def n(self) -> int:
        return len(self.aq)

    def coords(self) -> tuple:
        return (self.at, *self.aq, *self.ap, self.az)

    @classmethod
    def from_partials(cls, partials, n: int) -> "Covector":
        """Split a flat tuple of 2n+2 partials back into (t, q, p, z) blocks."""
        return cls(
            partials[0],
            tuple(partials[1 : n + 1]),
            tuple(partials[n + 1 : 2 * n + 1]),
            partials[2 * n + 1],
        )

    @classmethod
    def zero(cls, n: int) -> "Covector":
        return cls(0.0, (0.0,) * n, (0.0,) * n, 0.0)


def _check_dims(x: PhasePoint, other) -> None:
    if x.n != other.n:
        raise DimensionMismatch(f"dimension {other.n} does not match base point dimension {x.n}")


# -- structure forms and Reeb fields ------------------------------------------


def tau(v: TangentVector) -> float:
    """tau = dt paired with v."""
    return v.dt


def eta(x: PhasePoint, v: TangentVector) -> float:
    """eta = dz - p_i dq^i paired with v at x."""
    _check_dims(x, v)
    return v.dz - sum(pi * dqi for pi, dqi in zip(x.p, v.dq))


def reeb_t(n: int) -> TangentVector:
    """Time Reeb field: d/dt."""
    return TangentVector(1.0, (0.0,) * n, (0.0,) * n, 0.0)


def reeb_z(n: int) -> TangentVector:
    """Contact Reeb field: d/dz."""
    return TangentVector(0.0, (0.0,) * n, (0.0,) * n, 1.0)


def pairing(alpha: Covector, v: TangentVector) -> float:
    """Natural pairing <alpha, v>."""
    if alpha.n != v.n:
        raise DimensionMismatch("covector/vector dimension mismatch")
    return (
        alpha.at * v.dt
        + sum(a * b for a, b in zip(alpha.aq, v.dq))
        + sum(a * b for a, b in zip(alpha.ap, v.dp))
        + alpha.az * v.dz
    )


def deta(u: TangentVector, v: TangentVector) -> float:
    """d(eta) = dq^i ^ dp_i evaluated on a pair of tangent vectors."""
    if u.n != v.n:
        raise DimensionMismatch("vector dimension mismatch")
    return sum(uq * vp - up * vq for uq, up, vq, vp in zip(u.dq, u.dp, v.dq, v.dp))


# -- musical isomorphisms ------------------------------------------------------


def flat(x: PhasePoint, v: TangentVector) -> Covector:
    """flat(v) = tau(v) tau + i_v d(eta) + eta(v) eta.

    Sends R_t to tau and R_z to eta; a linear isomorphism at every point.
    """
    _check_dims(x, v)
    ev = eta(x, v)
    return Covector(
        at=v.dt,
        aq=tuple(-dpi - ev * pi for dpi, pi in zip(v.dp, x.p)),
        ap=v.dq,
        az=ev,
    )


def sharp(x: PhasePoint, alpha: Covector) -> TangentVector:
    """Closed-form inverse of flat in Darboux coordinates."""
    _check_dims(x, alpha)
    return TangentVector(
        dt=alpha.at,
        dq=alpha.ap,
        dp=tuple(-aqi - alpha.az * pi for aqi, pi in zip(alpha.aq, x.p)),
        dz=alpha.az + sum(pi * api for pi, api in zip(x.p, alpha.ap)),
    )


def lambda_hat(x: PhasePoint, alpha: Covector) -> TangentVector:
    """Bivector map on one-forms: sharp(alpha) minus its Reeb components.

    lambda_hat(alpha) = sharp(alpha) - alpha(R_z) R_z - alpha(R_t) R_t, so the
    kernel is spanned by tau and eta.
    """
    _check_dims(x, alpha)
    return TangentVector(
        dt=0.0,
        dq=alpha.ap,
        dp=tuple(-aqi - alpha.az * pi for aqi, pi in zip(alpha.aq, x.p)),
        dz=sum(pi * api for pi, api in zip(x.p, alpha.ap)),
    )


# -- Jacobi bracket ------------------------------------------------------------


def jacobi_bracket(f, g, x: PhasePoint) -> float:
    """Jacobi bracket {f, g} at x.

    In Darboux coordinates:

        {f, g} = sum_i (f_q g_p - g_q f_p)
               - sum_i p_i (f_p g_z - g_p f_z)
               - f g_z + g f_z

    which reproduces the coordinate bracket table {q^i, p_j} = delta_ij,
    {q^i, q^j} = {p_i, p_j} = 0, {q^i, z} = -q^i, {p_i, z} = -2 p_i.
    f and g are scalar fields (anything exposing ``value_grad(x)``).
    """
    fv, fg = f.value_grad(x)
    gv, gg = g.value_grad(x)
    acc = 0.0
    for i in range(x.n):
        acc += fg.aq[i] * gg.ap[i] - gg.aq[i] * fg.ap[i]
        acc -= x.p[i] * (fg.ap[i] * gg.az - gg.ap[i] * fg.az)
    acc += -fv * gg.az + gv * fg.az
    return acc
