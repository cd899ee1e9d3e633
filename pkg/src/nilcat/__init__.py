"""Horizontal minimal catenoids and helicoids in the Heisenberg group and
their CMC 1/2 sister annuli in H2 x R: numerical construction, residual
verification and mesh export."""

from .catenoid import (
    CatenoidModel,
    build_catenoid,
    gauss_curvature_K,
    graph_patch,
    immersion_point,
    limit_deviation,
    mesh_catenoid,
    period_closure_residual,
    remarkable_curves,
    section_curve,
    waist_extent,
)
from .cmc import (
    CmcAnnulusModel,
    CmcFieldSample,
    ConjugateProfile,
    H2xRPoint,
    annulus_point,
    build_cmc_annulus,
    halfplane_curve,
    hstar_field,
    mean_curvature_h2xr,
    reflect_and_mesh,
)
from .errors import (
    BracketError,
    DegeneracyError,
    DomainError,
    NilcatError,
    RangeError,
    ResolutionError,
    TransversalityError,
)
from .helicoid import HelicoidModel, build_helicoid, helicoid_point, \
    mesh_helicoid, ruling_residual
from .meshes import Mesh, euler_characteristic, read_obj, read_ply, \
    write_mesh
from .nil3 import (
    FrameVector,
    GaussValue,
    GraphJet,
    Nil3Point,
    ResidualReport,
    from_y,
    gauss_map,
    gauss_map_and_residuals,
    graph_pde_residual,
    mean_curvature_nil3,
    metric_and_connection,
    to_y,
)
from .period import (
    PeriodIntegrals,
    L_integral,
    appendix_I_decomposition,
    find_theta_tilde,
)
from .profile import (
    AnnulusParams,
    Profile,
    ProfileValues,
    identity_residuals,
    quartic_P,
    solve_profile,
    theta_plus,
)
from .verify import run_verification

__all__ = [
    "AnnulusParams",
    "BracketError",
    "CatenoidModel",
    "CmcAnnulusModel",
    "CmcFieldSample",
    "ConjugateProfile",
    "DegeneracyError",
    "DomainError",
    "FrameVector",
    "GaussValue",
    "GraphJet",
    "H2xRPoint",
    "HelicoidModel",
    "L_integral",
    "Mesh",
    "Nil3Point",
    "NilcatError",
    "PeriodIntegrals",
    "Profile",
    "ProfileValues",
    "RangeError",
    "ResidualReport",
    "ResolutionError",
    "TransversalityError",
    "annulus_point",
    "appendix_I_decomposition",
    "build_catenoid",
    "build_cmc_annulus",
    "build_helicoid",
    "euler_characteristic",
    "find_theta_tilde",
    "from_y",
    "gauss_curvature_K",
    "gauss_map",
    "gauss_map_and_residuals",
    "graph_patch",
    "graph_pde_residual",
    "halfplane_curve",
    "helicoid_point",
    "hstar_field",
    "identity_residuals",
    "immersion_point",
    "limit_deviation",
    "mean_curvature_h2xr",
    "mean_curvature_nil3",
    "mesh_catenoid",
    "mesh_helicoid",
    "metric_and_connection",
    "period_closure_residual",
    "quartic_P",
    "read_obj",
    "read_ply",
    "reflect_and_mesh",
    "remarkable_curves",
    "ruling_residual",
    "run_verification",
    "section_curve",
    "solve_profile",
    "theta_plus",
    "to_y",
    "waist_extent",
    "write_mesh",
]

__version__ = "0.1.0"
