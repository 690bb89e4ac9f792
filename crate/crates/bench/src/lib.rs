//! Benchmark-only crate; see `benches/solver.rs`. Shared fixtures for the
//! benchmarks live here.

use std::sync::Arc;

use micro_reynolds::{BodyForces, FilmGeometry, FluidParams, HeightField, PlanarField};

/// Standard fluid parameters used across benchmarks.
pub fn params() -> FluidParams {
    FluidParams::new(0.5, 0.75).expect("valid parameters")
}

/// Sinusoidal-bump film on the unit square.
pub fn geometry() -> FilmGeometry {
    FilmGeometry::new(
        1.0,
        1.0,
        HeightField::SinusoidalBump { base: 1.0, amplitude: 0.3, fx: 1.0, fy: 1.0 },
        0.5,
        2.0,
    )
    .expect("valid geometry")
}

/// Smooth in-plane force with a constant couple.
pub fn forces() -> BodyForces {
    BodyForces::new(
        PlanarField::Custom(Arc::new(|x: f64, y: f64| {
            [(2.0 * std::f64::consts::PI * y).sin(), (2.0 * std::f64::consts::PI * x).cos()]
        })),
        PlanarField::Constant([0.3, -0.4]),
    )
}
