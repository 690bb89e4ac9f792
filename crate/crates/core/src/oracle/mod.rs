//! Independent finite-difference oracle for the transverse boundary-value
//! problem.
//!
//! This module never calls into [`crate::closed_form`]; it discretizes the
//! coupled velocity/microrotation system directly on a uniform grid with
//! second-order central differences and solves the resulting banded system
//! with partial pivoting. It exists to adjudicate the closed-form route:
//! agreement is checked in the integration tests and the acceptance suite.
//!
//! The two scalar pairs are assembled literally, including the flipped
//! coupling sign of the `(u2, w1)` pair, so the component symmetry of the
//! continuous problem is verified at the discrete level rather than assumed.

pub mod banded;

use crate::error::{Error, Result};
use crate::model::{FluidParams, SlipRegime};
use banded::BandMatrix;

/// Minimum number of interior nodes for a meaningful second-order solve.
const MIN_INTERIOR: usize = 9;

/// Uniform transverse grid: nodes `z_j = j * delta`, `delta = h / (n + 1)`,
/// `j = 0 ..= n + 1` (`n` interior nodes plus both walls).
#[derive(Clone, Copy, Debug)]
pub struct TransverseGrid {
    n_interior: usize,
    h: f64,
}

impl TransverseGrid {
    pub fn new(n_interior: usize, h: f64) -> Result<Self> {
        if n_interior < MIN_INTERIOR {
            return Err(Error::InvalidMesh {
                reason: format!("need at least {MIN_INTERIOR} interior nodes, got {n_interior}"),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter { name: "h", value: h, constraint: "h > 0" });
        }
        Ok(Self { n_interior, h })
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn delta(&self) -> f64 {
        self.h / (self.n_interior + 1) as f64
    }

    /// Total node count `n + 2`.
    pub fn node_count(&self) -> usize {
        self.n_interior + 2
    }

    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.delta()
    }

    /// Grid with halved spacing whose nodes contain this grid's nodes
    /// (`n -> 2n + 1`).
    pub fn refined(&self) -> Self {
        Self { n_interior: 2 * self.n_interior + 1, h: self.h }
    }
}

/// Discrete transverse solution on a [`TransverseGrid`]: planar velocity and
/// microrotation at every node.
#[derive(Clone, Debug)]
pub struct TransverseProfile {
    pub z: Vec<f64>,
    pub u: Vec<[f64; 2]>,
    pub w: Vec<[f64; 2]>,
}

/// One scalar pair `(u, w)` with coupling sign `sigma`:
///
/// ```text
/// -u'' + sigma 2N^2 w'            = -p
/// -Rc w'' + 4N^2 w - sigma 2N^2 u' =  g
/// ```
///
/// Unknowns interleave as `[u_0, w_0, u_1, w_1, ...]`; bandwidths `kl = 3`,
/// `ku = 4` cover the couplings plus the one-sided wall-derivative row.
fn assemble_pair(
    regime: SlipRegime,
    grid: &TransverseGrid,
    params: &FluidParams,
    sigma: f64,
    p: f64,
    g: f64,
) -> (BandMatrix, Vec<f64>) {
    let n = grid.n_interior;
    let size = 2 * (n + 2);
    let delta = grid.delta();
    let n2 = params.n() * params.n();
    let rc = params.rc();
    let inv_d2 = 1.0 / (delta * delta);
    let half_inv_d = 0.5 / delta;
    let mut a = BandMatrix::new(size, 3, 4);
    let mut rhs = vec![0.0; size];

    let iu = |j: usize| 2 * j;
    let iw = |j: usize| 2 * j + 1;

    // Bottom wall. Velocity row depends on the slip regime; microrotation
    // always vanishes on the wall.
    match regime {
        SlipRegime::NoSlip => a.add(iu(0), iu(0), 1.0),
        SlipRegime::Perfect => {
            // One-sided second-order derivative: (-3u_0 + 4u_1 - u_2)/(2d) = 0.
            a.add(iu(0), iu(0), -3.0 * half_inv_d);
            a.add(iu(0), iu(1), 4.0 * half_inv_d);
            a.add(iu(0), iu(2), -half_inv_d);
        }
        SlipRegime::Partial { lambda } => {
            // Robin condition u'(0) = lambda u(0), same derivative stencil.
            a.add(iu(0), iu(0), -3.0 * half_inv_d - lambda);
            a.add(iu(0), iu(1), 4.0 * half_inv_d);
            a.add(iu(0), iu(2), -half_inv_d);
        }
    }
    a.add(iw(0), iw(0), 1.0);

    // Interior second-order stencils.
    for j in 1..=n {
        let (ru, rw) = (iu(j), iw(j));
        a.add(ru, iu(j - 1), -inv_d2);
        a.add(ru, iu(j), 2.0 * inv_d2);
        a.add(ru, iu(j + 1), -inv_d2);
        a.add(ru, iw(j - 1), -sigma * 2.0 * n2 * half_inv_d);
        a.add(ru, iw(j + 1), sigma * 2.0 * n2 * half_inv_d);
        rhs[ru] = -p;

        a.add(rw, iw(j - 1), -rc * inv_d2);
        a.add(rw, iw(j), 2.0 * rc * inv_d2 + 4.0 * n2);
        a.add(rw, iw(j + 1), -rc * inv_d2);
        a.add(rw, iu(j - 1), sigma * 2.0 * n2 * half_inv_d);
        a.add(rw, iu(j + 1), -sigma * 2.0 * n2 * half_inv_d);
        rhs[rw] = g;
    }

    // Top wall: both fields vanish.
    a.add(iu(n + 1), iu(n + 1), 1.0);
    a.add(iw(n + 1), iw(n + 1), 1.0);

    (a, rhs)
}

fn solve_pair(
    regime: SlipRegime,
    grid: &TransverseGrid,
    params: &FluidParams,
    sigma: f64,
    p: f64,
    g: f64,
) -> Result<Vec<f64>> {
    let (a, rhs) = assemble_pair(regime, grid, params, sigma, p, g);
    Ok(a.factor()?.solve(&rhs))
}

/// Solves the full transverse system for planar forcing `f_vec` (combined
/// drive `grad p - f'`) and couple `g_vec`, pair by pair:
/// `(u1, w2)` with `sigma = +1` under `(f_vec[0], g_vec[1])` and `(u2, w1)`
/// with `sigma = -1` under `(f_vec[1], g_vec[0])`.
pub fn solve_reduced_bvp(
    regime: SlipRegime,
    grid: &TransverseGrid,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
) -> Result<TransverseProfile> {
    regime.validate()?;
    let xa = solve_pair(regime, grid, params, 1.0, f_vec[0], g_vec[1])?;
    let xb = solve_pair(regime, grid, params, -1.0, f_vec[1], g_vec[0])?;
    let len = grid.node_count();
    let mut profile = TransverseProfile {
        z: Vec::with_capacity(len),
        u: Vec::with_capacity(len),
        w: Vec::with_capacity(len),
    };
    for j in 0..len {
        profile.z.push(grid.z(j));
        profile.u.push([xa[2 * j], xb[2 * j]]);
        profile.w.push([xb[2 * j + 1], xa[2 * j + 1]]);
    }
    Ok(profile)
}

/// Composite Simpson weights for `m` uniform intervals of width `delta`;
/// odd `m` closes with the 3/8 rule on the last three intervals.
fn simpson_weights(m: usize, delta: f64) -> Vec<f64> {
    assert!(m >= 4, "too few intervals for Simpson quadrature");
    let mut w = vec![0.0; m + 1];
    let simpson_end = if m % 2 == 0 { m } else { m - 3 };
    let third = delta / 3.0;
    for pair in 0..simpson_end / 2 {
        let j = 2 * pair;
        w[j] += third;
        w[j + 1] += 4.0 * third;
        w[j + 2] += third;
    }
    if simpson_end < m {
        let c = 3.0 * delta / 8.0;
        w[m - 3] += c;
        w[m - 2] += 3.0 * c;
        w[m - 1] += 3.0 * c;
        w[m] += c;
    }
    w
}

/// Depth-integrated velocity `int_0^h u dz` of a discrete profile, by
/// composite Simpson quadrature on the stored nodes.
pub fn oracle_average_velocity(profile: &TransverseProfile) -> [f64; 2] {
    let m = profile.z.len() - 1;
    let delta = profile.z[1] - profile.z[0];
    let w = simpson_weights(m, delta);
    let mut out = [0.0; 2];
    for (wj, uj) in w.iter().zip(&profile.u) {
        out[0] += wj * uj[0];
        out[1] += wj * uj[1];
    }
    out
}

/// Cubic Lagrange interpolation of nodal values at `z`, using the four
/// nearest grid nodes (fourth-order accurate on smooth data, so it never
/// limits a second-order convergence study).
fn interp_cubic(z_nodes: &[f64], values: &[f64], z: f64) -> f64 {
    let n = z_nodes.len();
    debug_assert!(n >= 4);
    let delta = z_nodes[1] - z_nodes[0];
    let j = ((z / delta) as usize).saturating_sub(1).min(n - 4);
    let zs = &z_nodes[j..j + 4];
    let vs = &values[j..j + 4];
    let mut acc = 0.0;
    for a in 0..4 {
        let mut l = vs[a];
        for b in 0..4 {
            if a != b {
                l *= (z - zs[b]) / (zs[a] - zs[b]);
            }
        }
        acc += l;
    }
    acc
}

/// Sup-norm distance between two profiles of the same problem at fixed
/// probe depths (interpolated, so the grids need not match).
fn profile_distance(fine: &TransverseProfile, coarse: &TransverseProfile, h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for q in 1..20 {
        let z = h * q as f64 / 20.0;
        for c in 0..2 {
            let uf: Vec<f64> = fine.u.iter().map(|v| v[c]).collect();
            let uc: Vec<f64> = coarse.u.iter().map(|v| v[c]).collect();
            worst = worst
                .max((interp_cubic(&fine.z, &uf, z) - interp_cubic(&coarse.z, &uc, z)).abs());
            let wf: Vec<f64> = fine.w.iter().map(|v| v[c]).collect();
            let wc: Vec<f64> = coarse.w.iter().map(|v| v[c]).collect();
            worst = worst
                .max((interp_cubic(&fine.z, &wf, z) - interp_cubic(&coarse.z, &wc, z)).abs());
        }
    }
    worst
}

/// Observed convergence order of the discretization for the given problem.
///
/// Solves on `levels >= 3` nested grids starting from `base_interior` nodes
/// (spacing halved each level), measures successive profile distances at
/// fixed probe depths, requires them to decrease monotonically
/// ([`Error::NonMonotoneConvergence`] otherwise), and returns the order
/// estimated from the finest pair of distances.
// Negated `<` rather than `>=` so a NaN distance takes the error branch.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn convergence_order(
    regime: SlipRegime,
    params: &FluidParams,
    h: f64,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
    base_interior: usize,
    levels: usize,
) -> Result<f64> {
    if levels < 3 {
        return Err(Error::InvalidMesh {
            reason: format!("convergence study needs >= 3 levels, got {levels}"),
        });
    }
    let mut grid = TransverseGrid::new(base_interior, h)?;
    let mut profiles = Vec::with_capacity(levels);
    for _ in 0..levels {
        profiles.push(solve_reduced_bvp(regime, &grid, params, f_vec, g_vec)?);
        grid = grid.refined();
    }
    let diffs: Vec<f64> = profiles
        .windows(2)
        .map(|pair| profile_distance(&pair[1], &pair[0], h))
        .collect();
    for k in 1..diffs.len() {
        if !(diffs[k] < diffs[k - 1]) {
            return Err(Error::NonMonotoneConvergence { diffs });
        }
    }
    let last = diffs.len() - 1;
    Ok((diffs[last - 1] / diffs[last]).log2())
}

/// Richardson-extrapolated profile: solves on `grid` and its refinement and
/// eliminates the leading second-order error term at the coarse nodes
/// (`(4 fine - coarse) / 3`; coarse node `j` is fine node `2 j`).
pub fn richardson_profile(
    regime: SlipRegime,
    grid: &TransverseGrid,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
) -> Result<TransverseProfile> {
    let coarse = solve_reduced_bvp(regime, grid, params, f_vec, g_vec)?;
    let fine = solve_reduced_bvp(regime, &grid.refined(), params, f_vec, g_vec)?;
    let mut out = coarse.clone();
    for j in 0..coarse.z.len() {
        for c in 0..2 {
            out.u[j][c] = (4.0 * fine.u[2 * j][c] - coarse.u[j][c]) / 3.0;
            out.w[j][c] = (4.0 * fine.w[2 * j][c] - coarse.w[j][c]) / 3.0;
        }
    }
    Ok(out)
}

/// Richardson-extrapolated depth-averaged velocity.
pub fn richardson_average(
    regime: SlipRegime,
    grid: &TransverseGrid,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
) -> Result<[f64; 2]> {
    let coarse = oracle_average_velocity(&solve_reduced_bvp(regime, grid, params, f_vec, g_vec)?);
    let fine = oracle_average_velocity(&solve_reduced_bvp(
        regime,
        &grid.refined(),
        params,
        f_vec,
        g_vec,
    )?);
    Ok([
        (4.0 * fine[0] - coarse[0]) / 3.0,
        (4.0 * fine[1] - coarse[1]) / 3.0,
    ])
}

/// Relative energy-identity residual `|x^T A x - x^T b| / |x^T b|` of the
/// assembled discrete system (both pairs; worst case returned). A sanity
/// check that factorization and assembly agree — the solved vector must
/// reproduce the quadratic form of its own right-hand side.
pub fn energy_residual(
    regime: SlipRegime,
    grid: &TransverseGrid,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (sigma, p, g) in [(1.0, f_vec[0], g_vec[1]), (-1.0, f_vec[1], g_vec[0])] {
        let (a, rhs) = assemble_pair(regime, grid, params, sigma, p, g);
        let x = a.clone().factor()?.solve(&rhs);
        let ax = a.matvec(&x);
        let xax: f64 = x.iter().zip(&ax).map(|(xi, yi)| xi * yi).sum();
        let xb: f64 = x.iter().zip(&rhs).map(|(xi, bi)| xi * bi).sum();
        let denom = xb.abs().max(f64::MIN_POSITIVE);
        worst = worst.max((xax - xb).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> FluidParams {
        FluidParams::new(0.5, 0.75).unwrap()
    }

    /// Pure Poiseuille limit check: as N -> 0 the system decouples and
    /// u -> -P z (h - z) / 2 for no-slip walls with unit forcing.
    #[test]
    fn decoupled_limit_recovers_poiseuille() {
        let p = FluidParams::new(1e-6, 1.0).unwrap();
        let grid = TransverseGrid::new(199, 1.0).unwrap();
        let sol = solve_reduced_bvp(SlipRegime::NoSlip, &grid, &p, [1.0, 0.0], [0.0, 0.0]).unwrap();
        for (j, z) in sol.z.iter().enumerate() {
            let want = -0.5 * z * (1.0 - z);
            assert!(
                (sol.u[j][0] - want).abs() <= 2e-5,
                "u({z}) = {}, want {want}",
                sol.u[j][0]
            );
            assert_eq!(sol.u[j][1], 0.0);
        }
    }

    #[test]
    fn wall_values_satisfy_boundary_conditions() {
        // Partial pivoting may promote an interior row over a boundary
        // identity row, so wall values are exact only to rounding.
        let p = standard();
        let grid = TransverseGrid::new(49, 1.3).unwrap();
        for regime in [
            SlipRegime::NoSlip,
            SlipRegime::Perfect,
            SlipRegime::Partial { lambda: 2.0 },
        ] {
            let s = solve_reduced_bvp(regime, &grid, &p, [0.7, -0.3], [0.4, 1.1]).unwrap();
            let last = s.z.len() - 1;
            for c in 0..2 {
                assert!(s.u[last][c].abs() <= 1e-13, "top velocity");
                assert!(s.w[last][c].abs() <= 1e-13, "top microrotation");
                assert!(s.w[0][c].abs() <= 1e-13, "bottom microrotation");
                if matches!(regime, SlipRegime::NoSlip) {
                    assert!(s.u[0][c].abs() <= 1e-13, "bottom velocity");
                }
            }
        }
    }

    #[test]
    fn robin_condition_holds_discretely() {
        let p = standard();
        let grid = TransverseGrid::new(99, 1.0).unwrap();
        let lambda = 3.0;
        let s =
            solve_reduced_bvp(SlipRegime::Partial { lambda }, &grid, &p, [1.0, 0.4], [0.2, -0.8])
                .unwrap();
        let d = grid.delta();
        for c in 0..2 {
            let du = (-3.0 * s.u[0][c] + 4.0 * s.u[1][c] - s.u[2][c]) / (2.0 * d);
            let residual = du - lambda * s.u[0][c];
            assert!(residual.abs() <= 1e-10, "Robin residual {residual:e}");
        }
    }

    #[test]
    fn converges_to_second_order() {
        let p = standard();
        for regime in [
            SlipRegime::NoSlip,
            SlipRegime::Perfect,
            SlipRegime::Partial { lambda: 1.0 },
        ] {
            let order =
                convergence_order(regime, &p, 1.0, [1.0, 0.0], [0.0, 1.0], 24, 3).unwrap();
            assert!((1.8..=2.2).contains(&order), "{regime:?}: order {order}");
        }
    }

    #[test]
    fn component_pairs_decouple() {
        // Forcing only (F1, g2) must leave (u2, w1) identically zero, and
        // vice versa, at the discrete level.
        let p = standard();
        let grid = TransverseGrid::new(29, 1.0).unwrap();
        let s1 = solve_reduced_bvp(SlipRegime::Partial { lambda: 1.5 }, &grid, &p, [1.0, 0.0], [0.0, 0.7])
            .unwrap();
        for j in 0..s1.z.len() {
            assert_eq!(s1.u[j][1], 0.0);
            assert_eq!(s1.w[j][0], 0.0);
        }
        let s2 = solve_reduced_bvp(SlipRegime::Partial { lambda: 1.5 }, &grid, &p, [0.0, 1.0], [0.7, 0.0])
            .unwrap();
        for j in 0..s2.z.len() {
            assert_eq!(s2.u[j][0], 0.0);
            assert_eq!(s2.w[j][1], 0.0);
        }
    }

    #[test]
    fn discrete_component_symmetry() {
        // The sigma = -1 pair under (F, g) must mirror the sigma = +1 pair
        // under (F, -g): u agrees, w flips sign.
        let p = FluidParams::new(0.6, 1.1).unwrap();
        let grid = TransverseGrid::new(39, 1.2).unwrap();
        let regime = SlipRegime::Partial { lambda: 2.0 };
        let a = solve_reduced_bvp(regime, &grid, &p, [0.5, 0.0], [0.0, 0.9]).unwrap();
        let b = solve_reduced_bvp(regime, &grid, &p, [0.0, 0.5], [-0.9, 0.0]).unwrap();
        for j in 0..a.z.len() {
            let du = (a.u[j][0] - b.u[j][1]).abs();
            let dw = (a.w[j][1] + b.w[j][0]).abs();
            assert!(du <= 1e-13 && dw <= 1e-13, "asymmetry at node {j}: {du:e}, {dw:e}");
        }
    }

    #[test]
    fn simpson_weights_integrate_cubics_exactly() {
        for m in [10usize, 11, 16, 21] {
            let delta = 1.0 / m as f64;
            let w = simpson_weights(m, delta);
            for pow in 0..=3 {
                let got: f64 = w
                    .iter()
                    .enumerate()
                    .map(|(j, wj)| wj * (j as f64 * delta).powi(pow))
                    .sum();
                let want = 1.0 / (pow as f64 + 1.0);
                assert!((got - want).abs() <= 1e-14, "m={m} x^{pow}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn richardson_average_beats_plain_average() {
        let p = standard();
        let grid = TransverseGrid::new(40, 1.0).unwrap();
        let plain = oracle_average_velocity(
            &solve_reduced_bvp(SlipRegime::NoSlip, &grid, &p, [1.0, 0.0], [0.0, 0.0]).unwrap(),
        );
        let extrap =
            richardson_average(SlipRegime::NoSlip, &grid, &p, [1.0, 0.0], [0.0, 0.0]).unwrap();
        let exact = -0.08378554215466897;
        assert!((extrap[0] - exact).abs() < (plain[0] - exact).abs());
        assert!((extrap[0] - exact).abs() <= 1e-9, "extrapolated gap {:e}", extrap[0] - exact);
    }

    #[test]
    fn energy_identity_holds() {
        let p = standard();
        let grid = TransverseGrid::new(99, 1.0).unwrap();
        for regime in [
            SlipRegime::NoSlip,
            SlipRegime::Perfect,
            SlipRegime::Partial { lambda: 0.5 },
        ] {
            let r = energy_residual(regime, &grid, &p, [1.0, -0.4], [0.3, 0.8]).unwrap();
            assert!(r <= 1e-10, "{regime:?}: energy residual {r:e}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(TransverseGrid::new(8, 1.0).is_err());
        assert!(TransverseGrid::new(9, 0.0).is_err());
        let g = TransverseGrid::new(9, 2.0).unwrap();
        assert_eq!(g.node_count(), 11);
        assert_eq!(g.refined().n_interior(), 19);
        assert!((g.z(10) - 2.0).abs() < 1e-15);
    }
}
