//! Micropolar thin-film lubrication solver with wall slip.
//!
//! The library models pressure-driven flow of a micropolar fluid through a
//! thin gap of slowly varying height under a Navier slip condition at the
//! lower wall. It provides:
//!
//! * closed-form transverse velocity and microrotation profiles for the
//!   three slip regimes (perfect slip, partial slip with coefficient
//!   `lambda`, and no slip), together with depth-averaged mobilities
//!   ([`closed_form`]);
//! * an independent finite-difference boundary-value solver for the same
//!   transverse problem, used to adjudicate the closed forms ([`oracle`]);
//! * a bilinear finite-element solver for the generalized Reynolds pressure
//!   equation on a rectangular domain with natural (zero-flux) boundary
//!   conditions and an h-weighted zero-mean gauge ([`reynolds`]);
//! * 3-D field reconstruction, discrepancy reporting, and CSV/VTK export
//!   ([`postprocess`]);
//! * a self-verification suite of executable numerical checks ([`verify`]).
//!
//! Module map:
//!
//! * [`model`] — parameters, slip regimes, geometry, forcing fields.
//! * [`closed_form`] — transverse profiles, depth averages, mobilities
//!   (both the quadrature-backed probe route and the independently printed
//!   coefficient route, which disagree for partial slip; see
//!   [`postprocess::discrepancy_report`]).
//! * [`oracle`] — banded-LU finite-difference adjudicator with Richardson
//!   extrapolation and convergence-order estimation.
//! * [`reynolds`] — mesh, assembly, deflated conjugate-gradient solve,
//!   flux diagnostics.
//! * [`postprocess`] — 3-D reconstruction and export.
//! * [`verify`] — acceptance criteria as executable checks.
//! * [`hyp`] — cancellation-free hyperbolic kernels shared by the formulas.

pub mod closed_form;
pub mod error;
pub mod hyp;
pub mod model;
pub mod oracle;
pub mod postprocess;
pub mod reynolds;
pub mod verify;

pub use closed_form::{
    average_velocity, coeffs_noslip, coeffs_partial, coeffs_perfect, microrotation_profile,
    mobility_coeffs_printed, mobility_phi, probe_mobility, velocity_profile, MobilityResponse,
    NoSlipCoefficients, PartialSlipCoefficients, PerfectSlipCoefficients,
};
pub use error::{Error, Result};
pub use model::{
    compute_k, perp, regime_from_gamma, BilinearGrid, BodyForces, FilmGeometry, FluidParams,
    HeightField, PlanarField, SlipRegime,
};
pub use oracle::{
    convergence_order, energy_residual, richardson_average, richardson_profile, solve_reduced_bvp,
    TransverseGrid, TransverseProfile,
};
pub use postprocess::{
    discrepancy_report, export::write_csv, export::write_vtk, reconstruct_3d, DiscrepancyReport,
    DiscrepancySample, Field3D,
};
pub use reynolds::{
    assemble, build_mobility_field, FluxField, MeanWeight, MobilityField, MobilitySource,
    ReynoldsSystem, SolveStats, SolverOptions,
};
pub use verify::{run_all, CriterionResult, VerifyLevel};
