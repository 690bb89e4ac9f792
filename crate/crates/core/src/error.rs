//! Error taxonomy shared by every solver layer.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the solver stack.
///
/// Parameter validation problems carry the offending field so front ends can
/// point at the exact configuration entry; numerical failures carry the
/// diagnostics needed to reproduce them.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar input violated its domain constraint (e.g. the coupling
    /// number must lie strictly inside (0, 1)).
    #[error("invalid parameter `{name}`: got {value}, require {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Mesh construction rejected the requested resolution or extents.
    #[error("invalid mesh: {reason}")]
    InvalidMesh { reason: String },

    /// The film height violated its declared bounds at a mesh node.
    #[error(
        "film height {h} at node ({x}, {y}) outside declared bounds [{h_min}, {h_max}]"
    )]
    HeightOutOfBounds {
        x: f64,
        y: f64,
        h: f64,
        h_min: f64,
        h_max: f64,
    },

    /// The 2x2 transverse coefficient system is numerically singular:
    /// |det Q| < 1e-14 * ||Q||_F^2. Reported, never silently patched.
    #[error(
        "singular transverse coefficient system: |det| = {det:.3e} below \
         threshold {threshold:.3e} (h = {h}, 1/lambda = {inv_lambda})"
    )]
    SingularCoefficientSystem {
        det: f64,
        threshold: f64,
        h: f64,
        inv_lambda: f64,
    },

    /// The two unit-vector mobility probes disagreed. The transverse system
    /// is component-decoupled, so this always signals an implementation bug.
    #[error(
        "anisotropic mobility probe: axis responses differ by {gap:.3e} \
         (tolerance {tol:.3e})"
    )]
    AnisotropyDetected { gap: f64, tol: f64 },

    /// The banded discretization of the transverse boundary-value problem
    /// lost invertibility. Coercivity guarantees this cannot happen for
    /// valid parameters; occurrence signals a bug.
    #[error("singular discrete transverse system at elimination column {column}")]
    SingularDiscreteSystem { column: usize },

    /// A grid-refinement study produced non-decreasing errors.
    #[error(
        "non-monotone grid convergence: successive sup-norm differences {diffs:?} \
         do not decrease"
    )]
    NonMonotoneConvergence { diffs: Vec<f64> },

    /// The combined mobility coefficient was not strictly positive at a
    /// quadrature point, so the pressure equation loses ellipticity there.
    #[error(
        "non-positive mobility M = {m:.6e} at ({x}, {y}) with h = {h} \
         (coefficient route: {route})"
    )]
    NonPositiveMobility {
        x: f64,
        y: f64,
        h: f64,
        m: f64,
        route: &'static str,
    },

    /// The pressure solver failed to reach the requested residual.
    #[error(
        "pressure solver diverged: relative residual {residual:.3e} after \
         {iterations} iterations (target {target:.3e})"
    )]
    SolverDivergence {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    /// Filesystem failure while exporting results; carries the path.
    #[error("export to `{path}` failed: {source}")]
    Export {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
