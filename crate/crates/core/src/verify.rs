//! Self-verification suite: executable checks of the solver's numerical
//! guarantees, shared by the CLI `verify` command and the acceptance tests.
//!
//! Each criterion runs the relevant machinery end to end and reports a
//! pass/fail with the measured quantities. `Quick` uses smaller grids with
//! correspondingly looser mesh-convergence tolerances; analytic identities
//! keep the same tolerances at both levels.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{self, mobility_phi, probe_mobility};
use crate::error::Result;
use crate::model::{BodyForces, FilmGeometry, FluidParams, HeightField, PlanarField, SlipRegime};
use crate::oracle::{self, TransverseGrid};
use crate::reynolds::{self, MobilitySource, SolverOptions};

/// Verification depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Reduced grids; suitable for a pre-commit smoke run.
    Quick,
    /// Full grid sizes backing the stated tolerances.
    Full,
}

/// Outcome of one verification criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub elapsed_ms: f64,
    /// Measured quantities (or the error that aborted the check).
    pub detail: String,
}

fn run(
    id: usize,
    name: &'static str,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok((passed, detail)) => (passed, detail),
        Err(e) => (false, format!("aborted: {e}")),
    };
    CriterionResult { id, name, passed, elapsed_ms: start.elapsed().as_secs_f64() * 1e3, detail }
}

fn standard_params() -> FluidParams {
    FluidParams::new(0.5, 0.75).expect("standard parameters are valid")
}

/// Sup-norm gap between closed-form profiles and the Richardson-
/// extrapolated oracle at the oracle's coarse nodes.
fn closed_vs_oracle_sup(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
    base_n: usize,
) -> Result<f64> {
    let grid = TransverseGrid::new(base_n, h)?;
    let extrapolated = oracle::richardson_profile(regime, &grid, params, f_vec, g_vec)?;
    let mut sup: f64 = 0.0;
    for (j, &z) in extrapolated.z.iter().enumerate() {
        let u = closed_form::velocity_profile(regime, h, params, f_vec, g_vec, z)?;
        let w = closed_form::microrotation_profile(regime, h, params, f_vec, g_vec, z)?;
        for c in 0..2 {
            sup = sup.max((u[c] - extrapolated.u[j][c]).abs());
            sup = sup.max((w[c] - extrapolated.w[j][c]).abs());
        }
    }
    Ok(sup)
}

fn criterion_transverse(
    id: usize,
    name: &'static str,
    regime: SlipRegime,
    base_n: usize,
) -> CriterionResult {
    run(id, name, || {
        let params = standard_params();
        let sup = closed_vs_oracle_sup(regime, 1.0, &params, [1.0, 0.0], [0.0, 1.0], base_n)?;
        Ok((sup <= 1e-6, format!("sup |closed - oracle| = {sup:.3e} (tol 1e-6)")))
    })
}

fn criterion_perfect_wall(base_n: usize) -> CriterionResult {
    run(2, "perfect slip: oracle agreement and shear-free wall", || {
        let params = standard_params();
        let f_vec = [1.0, 0.0];
        let g_vec = [0.0, 1.0];
        let sup =
            closed_vs_oracle_sup(SlipRegime::Perfect, 1.0, &params, f_vec, g_vec, base_n)?;
        // Centered difference of the closed-form profile straddling the
        // wall (the formulas are entire, so z < 0 is evaluable).
        let delta = 1e-6;
        let up = closed_form::velocity_profile(SlipRegime::Perfect, 1.0, &params, f_vec, g_vec, delta)?;
        let um =
            closed_form::velocity_profile(SlipRegime::Perfect, 1.0, &params, f_vec, g_vec, -delta)?;
        let du = ((up[0] - um[0]) / (2.0 * delta)).abs().max(((up[1] - um[1]) / (2.0 * delta)).abs());
        let ok = sup <= 1e-6 && du <= 1e-5;
        Ok((ok, format!("sup = {sup:.3e} (tol 1e-6), |u'(0)| = {du:.3e} (tol 1e-5)")))
    })
}

fn criterion_partial_robin(base_n: usize) -> CriterionResult {
    run(3, "partial slip: Robin wall condition and oracle agreement", || {
        let params = standard_params();
        let f_vec: [f64; 2] = [1.0, 0.0];
        let g_vec: [f64; 2] = [0.0, 1.0];
        let f_norm = (f_vec[0] * f_vec[0] + f_vec[1] * f_vec[1]).sqrt();
        let mut worst_sup: f64 = 0.0;
        let mut worst_robin: f64 = 0.0;
        for lambda in [0.1, 1.0, 10.0] {
            let regime = SlipRegime::Partial { lambda };
            worst_sup = worst_sup
                .max(closed_vs_oracle_sup(regime, 1.0, &params, f_vec, g_vec, base_n)?);
            // Robin residual of the oracle solution with its own one-sided
            // wall stencil.
            let grid = TransverseGrid::new(base_n, 1.0)?;
            let sol = oracle::solve_reduced_bvp(regime, &grid, &params, f_vec, g_vec)?;
            let d = grid.delta();
            for c in 0..2 {
                let du = (-3.0 * sol.u[0][c] + 4.0 * sol.u[1][c] - sol.u[2][c]) / (2.0 * d);
                worst_robin = worst_robin.max((du - lambda * sol.u[0][c]).abs());
            }
        }
        let ok = worst_sup <= 1e-6 && worst_robin <= 1e-5 * f_norm;
        Ok((
            ok,
            format!(
                "sup = {worst_sup:.3e} (tol 1e-6), Robin residual = {worst_robin:.3e} \
                 (tol 1e-5)"
            ),
        ))
    })
}

fn criterion_collapse_rate() -> CriterionResult {
    run(4, "partial-to-no-slip mobility collapse is first order", || {
        let params = standard_params();
        let m_ns = probe_mobility(SlipRegime::NoSlip, 1.0, &params)?.m;
        let gap = |lambda: f64| -> Result<f64> {
            Ok((probe_mobility(SlipRegime::Partial { lambda }, 1.0, &params)?.m - m_ns).abs())
        };
        let g3 = gap(1e3)?;
        let g4 = gap(1e4)?;
        let ratio = g3 / g4;
        Ok((
            (8.0..=12.0).contains(&ratio),
            format!("gap(1e3)/gap(1e4) = {ratio:.4} (window [8, 12])"),
        ))
    })
}

fn criterion_classical_limit() -> CriterionResult {
    run(5, "vanishing coupling recovers the classical mobility", || {
        let params = FluidParams::new(1e-4, 1.0)?;
        let phi_gap = (mobility_phi(1.0, &params) - 1.0 / 12.0).abs();
        let m = probe_mobility(SlipRegime::NoSlip, 1.0, &params)?.m;
        let m_gap = (m * params.one_minus_n2() - 1.0 / 12.0).abs();
        let ok = phi_gap <= 1e-6 && m_gap <= 1e-5;
        Ok((
            ok,
            format!("|Phi - 1/12| = {phi_gap:.3e} (tol 1e-6), |M (1-N^2)/h^3 - 1/12| = {m_gap:.3e} (tol 1e-5)"),
        ))
    })
}

fn criterion_noslip_couple_average(draws: usize, base_n: usize) -> CriterionResult {
    run(6, "no-slip depth-averaged flux ignores the couple", || {
        let params = standard_params();
        let mut rng = ChaCha8Rng::seed_from_u64(608);
        let grid = TransverseGrid::new(base_n, 1.0)?;
        let mut worst_cf: f64 = 0.0;
        let mut worst_or: f64 = 0.0;
        for _ in 0..draws {
            let g_vec = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let cf = closed_form::average_velocity(SlipRegime::NoSlip, 1.0, &params, [0.0; 2], g_vec)?;
            worst_cf = worst_cf.max(cf[0].abs()).max(cf[1].abs());
            let or = oracle::richardson_average(SlipRegime::NoSlip, &grid, &params, [0.0; 2], g_vec)?;
            worst_or = worst_or.max(or[0].abs()).max(or[1].abs());
        }
        let ok = worst_cf <= 1e-7 && worst_or <= 1e-7;
        Ok((
            ok,
            format!(
                "max |U'| closed form = {worst_cf:.3e}, oracle = {worst_or:.3e} \
                 (tol 1e-7, {draws} draws)"
            ),
        ))
    })
}

fn criterion_oracle_order(base_n: usize) -> CriterionResult {
    run(7, "oracle discretization is second order", || {
        let params = standard_params();
        let mut details = Vec::new();
        let mut ok = true;
        for regime in [
            SlipRegime::NoSlip,
            SlipRegime::Perfect,
            SlipRegime::Partial { lambda: 1.0 },
        ] {
            let order = oracle::convergence_order(
                regime,
                &params,
                1.0,
                [1.0, 0.0],
                [0.0, 1.0],
                base_n,
                3,
            )?;
            ok &= (1.9..=2.1).contains(&order);
            details.push(format!("{} {order:.3}", regime.label()));
        }
        Ok((ok, format!("orders: {} (window [1.9, 2.1])", details.join(", "))))
    })
}

/// Manufactured pressure: with `f' = grad q` and no couple, the exact
/// pressure is `q` regardless of the mobility field.
fn manufactured_error(regime: SlipRegime, cells: usize) -> Result<f64> {
    use std::f64::consts::PI;
    let params = standard_params();
    let geometry = FilmGeometry::new(
        1.0,
        1.0,
        HeightField::SinusoidalBump { base: 1.0, amplitude: 0.3, fx: 1.0, fy: 1.0 },
        0.5,
        2.0,
    )?;
    let q = |x: f64, y: f64| (PI * x).cos() * (PI * y).cos();
    let forces = BodyForces::new(
        PlanarField::Custom(std::sync::Arc::new(move |x: f64, y: f64| {
            [-PI * (PI * x).sin() * (PI * y).cos(), -PI * (PI * x).cos() * (PI * y).sin()]
        })),
        PlanarField::Zero,
    );
    let sys = reynolds::assemble(
        &geometry,
        cells,
        cells,
        &params,
        regime,
        &forces,
        MobilitySource::Probe,
    )?;
    let (p, _) = sys.solve_pressure(&SolverOptions::default())?;

    // L2 error in the quotient space (modulo constants) at Gauss points.
    let mesh = sys.mesh();
    let jac = 0.25 * mesh.dx() * mesh.dy();
    let mut diffs = Vec::with_capacity(mesh.cell_count() * 4);
    for cy in 0..mesh.ny() {
        for cx in 0..mesh.nx() {
            let nodes = mesh.cell_nodes(cx, cy);
            for &(xi, eta) in crate::reynolds::mesh::GAUSS_POINTS.iter() {
                let sh = crate::reynolds::mesh::shape(xi, eta);
                let ph: f64 = (0..4).map(|a| sh[a] * p[nodes[a]]).sum();
                let (x, y) = mesh.cell_point(cx, cy, xi, eta);
                diffs.push(ph - q(x, y));
            }
        }
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let err2: f64 = diffs.iter().map(|d| (d - mean) * (d - mean) * jac).sum();
    Ok(err2.sqrt())
}

fn criterion_manufactured(level: VerifyLevel) -> CriterionResult {
    let (meshes, ratio_window, abs_tol) = match level {
        VerifyLevel::Full => ([16usize, 32, 64], (3.6, 4.4), 5e-4),
        VerifyLevel::Quick => ([8, 16, 32], (3.4, 4.6), 2e-3),
    };
    run(8, "manufactured pressure converges at second order", || {
        let mut ok = true;
        let mut details = Vec::new();
        for regime in [
            SlipRegime::NoSlip,
            SlipRegime::Partial { lambda: 1.0 },
            SlipRegime::Perfect,
        ] {
            let errs: Vec<f64> = meshes
                .iter()
                .map(|&n| manufactured_error(regime, n))
                .collect::<Result<_>>()?;
            let r1 = errs[0] / errs[1];
            let r2 = errs[1] / errs[2];
            let fine = errs[2];
            ok &= (ratio_window.0..=ratio_window.1).contains(&r1)
                && (ratio_window.0..=ratio_window.1).contains(&r2)
                && fine <= abs_tol;
            details.push(format!(
                "{}: ratios {r1:.2}/{r2:.2}, err({}) = {fine:.2e}",
                regime.label(),
                meshes[2]
            ));
        }
        Ok((
            ok,
            format!(
                "{} (window [{}, {}], abs tol {abs_tol:.0e})",
                details.join("; "),
                ratio_window.0,
                ratio_window.1
            ),
        ))
    })
}

fn representative_system(cells: usize) -> Result<(reynolds::ReynoldsSystem, Vec<f64>)> {
    use std::f64::consts::PI;
    let params = standard_params();
    let geometry = FilmGeometry::new(
        1.0,
        1.0,
        HeightField::SinusoidalBump { base: 1.0, amplitude: 0.3, fx: 1.0, fy: 1.0 },
        0.5,
        2.0,
    )?;
    let forces = BodyForces::new(
        PlanarField::Custom(std::sync::Arc::new(move |x: f64, y: f64| {
            [(2.0 * PI * y).sin(), (2.0 * PI * x).cos()]
        })),
        PlanarField::Constant([0.3, -0.4]),
    );
    let sys = reynolds::assemble(
        &geometry,
        cells,
        cells,
        &params,
        SlipRegime::Partial { lambda: 1.0 },
        &forces,
        MobilitySource::Probe,
    )?;
    let (p, _) = sys.solve_pressure(&SolverOptions::default())?;
    Ok((sys, p))
}

fn criterion_conservation(cells: usize) -> CriterionResult {
    run(9, "discrete conservation and zero-mean constraint", || {
        let (sys, p) = representative_system(cells)?;
        let flux = sys.flux_field(&p);
        let flux_ok = flux.boundary_flux_weak.abs() <= 1e-8 * flux.flux_norm.max(1e-300);
        let c = sys.mass_vector();
        let cnorm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pnorm = p.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let cp: f64 = c.iter().zip(&p).map(|(ci, pi)| ci * pi).sum();
        let mean_ok = cp.abs() <= 1e-10 * cnorm * pnorm;
        Ok((
            flux_ok && mean_ok,
            format!(
                "|net boundary flux| = {:.3e} vs 1e-8 ||U'|| = {:.3e}; |c^T p| = {:.3e} \
                 vs 1e-10 ||c|| ||p|| = {:.3e}",
                flux.boundary_flux_weak.abs(),
                1e-8 * flux.flux_norm,
                cp.abs(),
                1e-10 * cnorm * pnorm
            ),
        ))
    })
}

fn criterion_noslip_pressure_couple(cells: usize) -> CriterionResult {
    run(10, "no-slip pressure ignores the couple field", || {
        use std::f64::consts::PI;
        let params = standard_params();
        let geometry = FilmGeometry::new(
            1.0,
            1.0,
            HeightField::SinusoidalBump { base: 1.0, amplitude: 0.3, fx: 1.0, fy: 1.0 },
            0.5,
            2.0,
        )?;
        let f = |x: f64, y: f64| [(2.0 * PI * y).sin(), (2.0 * PI * x).cos()];
        let solve = |g_field: PlanarField| -> Result<Vec<f64>> {
            let forces =
                BodyForces::new(PlanarField::Custom(std::sync::Arc::new(f)), g_field);
            let sys = reynolds::assemble(
                &geometry,
                cells,
                cells,
                &params,
                SlipRegime::NoSlip,
                &forces,
                MobilitySource::Probe,
            )?;
            Ok(sys.solve_pressure(&SolverOptions::default())?.0)
        };
        let p_without = solve(PlanarField::Zero)?;
        let p_with = solve(PlanarField::Custom(std::sync::Arc::new(|x: f64, y: f64| {
            [x * x - y, x + 2.0 * y]
        })))?;
        let scale = p_without.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let diff = p_with
            .iter()
            .zip(&p_without)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let rel = diff / scale;
        Ok((rel <= 1e-9, format!("relative pressure shift = {rel:.3e} (tol 1e-9)")))
    })
}

/// Runs verification criteria 1-10 (the numerical-guarantee suite; the
/// deterministic-export criterion is exercised at the CLI layer where files
/// are produced).
pub fn run_all(level: VerifyLevel) -> Vec<CriterionResult> {
    let (oracle_n, robin_n, avg_draws, avg_n, order_n, cons_cells) = match level {
        VerifyLevel::Full => (2000, 2000, 20, 200, 99, 32),
        VerifyLevel::Quick => (400, 400, 5, 99, 49, 16),
    };
    vec![
        criterion_transverse(
            1,
            "no-slip transverse closed form matches the oracle",
            SlipRegime::NoSlip,
            oracle_n,
        ),
        criterion_perfect_wall(oracle_n),
        criterion_partial_robin(robin_n),
        criterion_collapse_rate(),
        criterion_classical_limit(),
        criterion_noslip_couple_average(avg_draws, avg_n),
        criterion_oracle_order(order_n),
        criterion_manufactured(level),
        criterion_conservation(cons_cells),
        criterion_noslip_pressure_couple(cons_cells),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_level_passes_everything() {
        let results = run_all(VerifyLevel::Quick);
        assert_eq!(results.len(), 10);
        for r in &results {
            assert!(r.passed, "criterion {} ({}) failed: {}", r.id, r.name, r.detail);
        }
        // IDs are 1..=10 in order.
        for (i, r) in results.iter().enumerate() {
            assert_eq!(r.id, i + 1);
        }
    }

    #[test]
    #[ignore = "full-size grids; exercised by the acceptance suite"]
    fn full_level_passes_everything() {
        for r in run_all(VerifyLevel::Full) {
            assert!(r.passed, "criterion {} ({}) failed: {}", r.id, r.name, r.detail);
            eprintln!("[{:>6.0} ms] {} {}", r.elapsed_ms, r.name, r.detail);
        }
    }
}
