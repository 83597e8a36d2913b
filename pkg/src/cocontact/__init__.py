"""Time-dependent contact Hamiltonian mechanics in Darboux coordinates.

The phase space is R x T*Q x R with coordinates (t, q, p, z): time, the
configuration/momentum pair, and the accumulated action z.  Dynamics is
generated by a Hamiltonian H(t, q, p, z) through

    dq/dt =  dH/dp,
    dp/dt = -(dH/dq + p dH/dz),
    dz/dt =  p . dH/dp - H,

which reduces to classical mechanics when H is z-independent and to contact
(dissipative) mechanics when H is t-independent.  The package provides:

* ``geometry``        -- the tau/eta one-forms, flat/sharp isomorphism, Reeb
                         fields, and the Jacobi bracket in coordinates
* ``expressions``     -- a small expression language in t, q1.., p1.., z
* ``duals``           -- forward-mode dual numbers behind all derivatives
* ``dynamics``        -- scalar/vector fields, RK4 and adaptive integrators,
                         and the action functional along trajectories
* ``quantities``      -- conserved/dissipated residuals, Noether symmetries,
                         involution and bracket identities, sample boxes
* ``hamilton_jacobi`` -- both Hamilton-Jacobi formulations: generating
                         functions S(t,q) with Legendrian jet sections, and
                         action-dependent sections gamma(t,q,z) with the
                         coisotropy condition; leafwise reconstruction
* ``systems``         -- four built-in dissipative systems with closed-form
                         complete solutions and cached quadratures
* ``cli``             -- the ``cocontact`` command-line front end
"""

from .dynamics import (
    IntegrationError,
    ScalarField,
    Trajectory,
    VectorField,
    as_vector_field,
    hamiltonian_vector_field,
    herglotz_action,
    integrate,
)
from .geometry import (
    Covector,
    DimensionMismatch,
    PhasePoint,
    TangentVector,
    eta,
    flat,
    jacobi_bracket,
    lambda_hat,
    reeb_t,
    reeb_z,
    sharp,
    tau,
)
from .hamilton_jacobi import (
    CompleteSolution,
    GeneratingFunction,
    SectionT,
    SectionTZ,
    autonomous_hj_residual,
    coisotropy_residual,
    extract_conserved,
    gamma_relatedness_residual_T,
    gamma_relatedness_residual_TZ,
    generating_of,
    hj_dependent_residual,
    hj_independent_residual,
    jet_t,
    legendrian_residual,
    reconstruct_T,
)
from .quantities import (
    QuantityReport,
    conservation_residual,
    dissipation_residual,
    noether_symmetry,
    sample_box,
    symmetry_residual,
)
from .systems import (
    QuadratureCache,
    SystemSpec,
    build_system,
    quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "CompleteSolution",
    "Covector",
    "DimensionMismatch",
    "GeneratingFunction",
    "IntegrationError",
    "PhasePoint",
    "QuadratureCache",
    "QuantityReport",
    "ScalarField",
    "SectionT",
    "SectionTZ",
    "SystemSpec",
    "TangentVector",
    "Trajectory",
    "VectorField",
    "as_vector_field",
    "autonomous_hj_residual",
    "build_system",
    "coisotropy_residual",
    "conservation_residual",
    "dissipation_residual",
    "eta",
    "extract_conserved",
    "flat",
    "gamma_relatedness_residual_T",
    "gamma_relatedness_residual_TZ",
    "generating_of",
    "hamiltonian_vector_field",
    "herglotz_action",
    "hj_dependent_residual",
    "hj_independent_residual",
    "integrate",
    "jacobi_bracket",
    "jet_t",
    "lambda_hat",
    "legendrian_residual",
    "noether_symmetry",
    "quadrature",
    "reconstruct_T",
    "reeb_t",
    "reeb_z",
    "sample_box",
    "sharp",
    "symmetry_residual",
    "tau",
]
