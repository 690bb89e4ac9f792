//! 3D field reconstruction from a solved planar pressure, and the
//! route-comparison discrepancy report.

pub mod export;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{self, printed};
use crate::error::{Error, Result};
use crate::model::{BodyForces, FilmGeometry, FluidParams, SlipRegime};
use crate::oracle;
use crate::reynolds::mesh::ReynoldsMesh;

/// Point-cloud 3D fields on a structured grid: planar mesh nodes times `nz`
/// transverse layers. Points are ordered x-fastest, then y, then z (the
/// layer index is slowest), matching legacy VTK structured-grid ordering.
///
/// Layer `iz` of a planar node sits at `z3 = h(x, y) * iz / (nz - 1)`, so
/// the grid follows the film surface.
#[derive(Clone, Debug)]
pub struct Field3D {
    /// Node counts: `(nx + 1, ny + 1, nz)`.
    pub dims: [usize; 3],
    pub points: Vec<[f64; 3]>,
    pub velocity: Vec<[f64; 3]>,
    pub microrotation: Vec<[f64; 3]>,
    /// Planar pressure replicated across layers.
    pub pressure: Vec<f64>,
}

/// Planar pressure gradient at mesh nodes: second-order central differences
/// inside, one-sided second-order stencils `(-3 p0 + 4 p1 - p2) / (2 d)` on
/// the boundary.
fn nodal_pressure_gradient(mesh: &ReynoldsMesh, p: &[f64]) -> Vec<[f64; 2]> {
    let nx = mesh.nx();
    let ny = mesh.ny();
    let (dx, dy) = (mesh.dx(), mesh.dy());
    let at = |ix: usize, iy: usize| p[mesh.node_index(ix, iy)];
    let mut grad = vec![[0.0; 2]; mesh.node_count()];
    for iy in 0..=ny {
        for ix in 0..=nx {
            let gx = if ix == 0 {
                (-3.0 * at(0, iy) + 4.0 * at(1, iy) - at(2, iy)) / (2.0 * dx)
            } else if ix == nx {
                (3.0 * at(nx, iy) - 4.0 * at(nx - 1, iy) + at(nx - 2, iy)) / (2.0 * dx)
            } else {
                (at(ix + 1, iy) - at(ix - 1, iy)) / (2.0 * dx)
            };
            let gy = if iy == 0 {
                (-3.0 * at(ix, 0) + 4.0 * at(ix, 1) - at(ix, 2)) / (2.0 * dy)
            } else if iy == ny {
                (3.0 * at(ix, ny) - 4.0 * at(ix, ny - 1) + at(ix, ny - 2)) / (2.0 * dy)
            } else {
                (at(ix, iy + 1) - at(ix, iy - 1)) / (2.0 * dy)
            };
            grad[mesh.node_index(ix, iy)] = [gx, gy];
        }
    }
    grad
}

/// Reconstructs velocity and microrotation through the film depth at every
/// planar node of the pressure mesh, on `nz >= 2` surface-following layers.
///
/// Wall values that the boundary conditions pin to zero (both fields on the
/// top wall, microrotation on the bottom wall, velocity on a no-slip bottom
/// wall) are written as exact zeros rather than evaluated.
pub fn reconstruct_3d(
    mesh: &ReynoldsMesh,
    geometry: &FilmGeometry,
    params: &FluidParams,
    regime: SlipRegime,
    forces: &BodyForces,
    pressure: &[f64],
    nz: usize,
) -> Result<Field3D> {
    if nz < 2 {
        return Err(Error::InvalidMesh {
            reason: format!("3D reconstruction needs at least 2 layers, got {nz}"),
        });
    }
    if pressure.len() != mesh.node_count() {
        return Err(Error::InvalidMesh {
            reason: format!(
                "pressure vector has {} entries for a mesh with {} nodes",
                pressure.len(),
                mesh.node_count()
            ),
        });
    }
    regime.validate()?;
    let grad = nodal_pressure_gradient(mesh, pressure);
    let nn = mesh.node_count();

    struct Column {
        point: [f64; 2],
        h: f64,
        u: Vec<[f64; 2]>,
        w: Vec<[f64; 2]>,
    }

    // One transverse column per planar node, evaluated in parallel; the
    // ordered collect keeps the result deterministic regardless of thread
    // scheduling.
    let columns: Vec<Column> = (0..nn)
        .into_par_iter()
        .map(|i| -> Result<Column> {
            let (x, y) = mesh.node_xy(i);
            let h = geometry.h_at_checked(x, y)?;
            let fv = forces.f.eval(x, y);
            let gv = forces.g.eval(x, y);
            // Combined drive for the transverse problem.
            let drive = [grad[i][0] - fv[0], grad[i][1] - fv[1]];
            let mut u = Vec::with_capacity(nz);
            let mut w = Vec::with_capacity(nz);
            for iz in 0..nz {
                let bottom = iz == 0;
                let top = iz == nz - 1;
                let z3 = h * iz as f64 / (nz - 1) as f64;
                let uv = if top || (bottom && matches!(regime, SlipRegime::NoSlip)) {
                    [0.0; 2]
                } else {
                    closed_form::velocity_profile(regime, h, params, drive, gv, z3)?
                };
                let wv = if top || bottom {
                    [0.0; 2]
                } else {
                    closed_form::microrotation_profile(regime, h, params, drive, gv, z3)?
                };
                u.push(uv);
                w.push(wv);
            }
            Ok(Column { point: [x, y], h, u, w })
        })
        .collect::<Result<Vec<_>>>()?;

    let total = nn * nz;
    let mut out = Field3D {
        dims: [mesh.nx() + 1, mesh.ny() + 1, nz],
        points: Vec::with_capacity(total),
        velocity: Vec::with_capacity(total),
        microrotation: Vec::with_capacity(total),
        pressure: Vec::with_capacity(total),
    };
    for iz in 0..nz {
        for (i, col) in columns.iter().enumerate() {
            let z3 = col.h * iz as f64 / (nz - 1) as f64;
            out.points.push([col.point[0], col.point[1], z3]);
            out.velocity.push([col.u[iz][0], col.u[iz][1], 0.0]);
            out.microrotation.push([col.w[iz][0], col.w[iz][1], 0.0]);
            out.pressure.push(pressure[i]);
        }
    }
    Ok(out)
}

/// One sampled comparison point of the discrepancy report.
#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancySample {
    pub x: f64,
    pub y: f64,
    pub h: f64,
    /// Largest explicit-vs-solve coefficient gap (relative to the solve).
    pub coeff_gap: f64,
    /// Relative gap in the pressure mobility, explicit vs probe.
    pub mobility_gap_m: f64,
    /// Relative gap in the couple mobility, explicit vs probe.
    pub mobility_gap_g: f64,
    /// Sup-norm gap of closed-form profiles against the Richardson-
    /// extrapolated finite-difference oracle at unit forcing.
    pub profile_vs_oracle: f64,
    /// Shared denominator of the explicit partial-slip coefficients
    /// (absent for other regimes).
    pub printed_denominator: Option<f64>,
    /// The explicit denominator is small relative to the film height, so
    /// the explicit values are unreliable at this point.
    pub ill_conditioned: bool,
}

/// Route-comparison report: quantifies, at seeded random planar points, how
/// far the explicit-expression route sits from the validated solve route,
/// and how far the closed-form profiles sit from the independent oracle.
#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub regime: String,
    pub sample_count: usize,
    pub seed: u64,
    pub max_coeff_gap: f64,
    pub max_mobility_gap_m: f64,
    pub max_mobility_gap_g: f64,
    pub max_profile_vs_oracle: f64,
    pub ill_conditioned_samples: usize,
    pub samples: Vec<DiscrepancySample>,
}

/// Relative threshold below which the explicit partial-slip denominator is
/// flagged as ill-conditioned.
const DENOMINATOR_FLAG_FACTOR: f64 = 0.05;

fn rel_gap(reference: f64, other: f64) -> f64 {
    let gap = (reference - other).abs() / reference.abs().max(1e-30);
    if gap.is_nan() {
        f64::INFINITY
    } else {
        gap
    }
}

/// Builds the discrepancy report for one regime over a geometry.
///
/// Oracle comparisons use unit pressure-gradient and couple forcing
/// (`F = (1, 0)`, `g' = (0, 1)`) on a Richardson-extrapolated grid, so the
/// reported profile gaps are discretization-limited at roughly `1e-9`.
pub fn discrepancy_report(
    geometry: &FilmGeometry,
    params: &FluidParams,
    regime: SlipRegime,
    sample_count: usize,
    seed: u64,
) -> Result<DiscrepancyReport> {
    regime.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DiscrepancyReport {
        regime: regime.label().to_string(),
        sample_count,
        seed,
        max_coeff_gap: 0.0,
        max_mobility_gap_m: 0.0,
        max_mobility_gap_g: 0.0,
        max_profile_vs_oracle: 0.0,
        ill_conditioned_samples: 0,
        samples: Vec::with_capacity(sample_count),
    };
    let f_probe = [1.0, 0.0];
    let g_probe = [0.0, 1.0];

    for _ in 0..sample_count {
        let x = rng.gen_range(0.0..geometry.lx());
        let y = rng.gen_range(0.0..geometry.ly());
        let h = geometry.h_at_checked(x, y)?;

        let (coeff_gap, printed_denominator) = match regime {
            SlipRegime::Partial { lambda } => {
                let c = closed_form::coeffs_partial(h, params, lambda)?;
                let x_arg = params.k() * h;
                let den = params.two_n2_over_k() * (0.5 * x_arg).tanh() - h
                    + params.one_minus_n2() / lambda;
                (c.printed_rel_gap, Some(den))
            }
            SlipRegime::Perfect => (closed_form::coeffs_perfect(h, params)?.printed_rel_gap, None),
            // The explicit no-slip coefficients are exact (they are the
            // solve route); the mobility gap below still cross-checks the
            // two mobility evaluations.
            SlipRegime::NoSlip => (0.0, None),
        };

        let probe = closed_form::probe_mobility(regime, h, params)?;
        let (pm, pg) = printed::combined_mobility(regime, h, params);
        let mobility_gap_m = rel_gap(probe.m, pm);
        let mobility_gap_g = rel_gap(probe.g, pg);

        let grid = oracle::TransverseGrid::new(99, h)?;
        let oracle_profile =
            oracle::richardson_profile(regime, &grid, params, f_probe, g_probe)?;
        let mut profile_gap: f64 = 0.0;
        for (j, &z) in oracle_profile.z.iter().enumerate() {
            let u = closed_form::velocity_profile(regime, h, params, f_probe, g_probe, z)?;
            let w = closed_form::microrotation_profile(regime, h, params, f_probe, g_probe, z)?;
            for c in 0..2 {
                profile_gap = profile_gap.max((u[c] - oracle_profile.u[j][c]).abs());
                profile_gap = profile_gap.max((w[c] - oracle_profile.w[j][c]).abs());
            }
        }

        let ill_conditioned = printed_denominator
            .map(|d| d.abs() < DENOMINATOR_FLAG_FACTOR * h)
            .unwrap_or(false);
        if ill_conditioned {
            report.ill_conditioned_samples += 1;
        }
        report.max_coeff_gap = report.max_coeff_gap.max(coeff_gap);
        report.max_mobility_gap_m = report.max_mobility_gap_m.max(mobility_gap_m);
        report.max_mobility_gap_g = report.max_mobility_gap_g.max(mobility_gap_g);
        report.max_profile_vs_oracle = report.max_profile_vs_oracle.max(profile_gap);
        report.samples.push(DiscrepancySample {
            x,
            y,
            h,
            coeff_gap,
            mobility_gap_m,
            mobility_gap_g,
            profile_vs_oracle: profile_gap,
            printed_denominator,
            ill_conditioned,
        });
    }
    Ok(report)
}
