//! Generalized Reynolds solver: pressure in a thin film with
//! height-dependent mobility.
//!
//! The depth-averaged flux law `U' = -M(h) (grad p - f') + G(h) perp(g')`
//! combined with `div U' = 0` gives the weak problem: find `p` with
//! h-weighted zero mean such that
//!
//! ```text
//! int M grad p . grad v  =  int S . grad v     for all v,
//! S = M f' + G perp(g'),
//! ```
//!
//! with the natural (zero normal flux) boundary condition. Discretization is
//! by bilinear elements on a structured rectangular mesh with 2x2 Gauss
//! quadrature; the singular-consistent system is solved by conjugate
//! gradients with Jacobi preconditioning and deflation of the constant
//! nullspace.

pub mod mesh;

use std::collections::{BTreeMap, HashMap};

use crate::closed_form::{self, printed};
use crate::error::{Error, Result};
use crate::model::{perp, BodyForces, FilmGeometry, FluidParams, SlipRegime};
use mesh::{shape, shape_grad, CsrMatrix, ReynoldsMesh, GAUSS_POINTS};

/// Which mobility evaluation feeds the assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobilitySource {
    /// Linear-response probe of the validated depth averages (default).
    Probe,
    /// Explicit coefficient expressions (diagnostic; can produce
    /// non-positive mobilities for moderate partial slip, which assembly
    /// rejects).
    Printed,
}

impl MobilitySource {
    pub fn label(&self) -> &'static str {
        match self {
            MobilitySource::Probe => "probe",
            MobilitySource::Printed => "printed",
        }
    }
}

/// Pointwise mobility data precomputed for one mesh/geometry/regime: nodal
/// values for inspection and export, Gauss-point values for assembly, and
/// cell-center values for flux reconstruction.
#[derive(Clone, Debug)]
pub struct MobilityField {
    node_m: Vec<f64>,
    node_g: Vec<f64>,
    node_h: Vec<f64>,
    gauss_m: Vec<[f64; 4]>,
    gauss_s: Vec<[[f64; 2]; 4]>,
    gauss_h: Vec<[f64; 4]>,
    center_m: Vec<f64>,
    center_s: Vec<[f64; 2]>,
    center_h: Vec<f64>,
}

impl MobilityField {
    pub fn node_m(&self) -> &[f64] {
        &self.node_m
    }

    pub fn node_g(&self) -> &[f64] {
        &self.node_g
    }

    pub fn node_h(&self) -> &[f64] {
        &self.node_h
    }

    pub fn center_m(&self) -> &[f64] {
        &self.center_m
    }

    pub fn center_h(&self) -> &[f64] {
        &self.center_h
    }
}

/// Evaluates `(M, G)` for a film height, memoizing on the bit pattern of
/// `h` so constant-height geometries cost one evaluation.
struct MobilityEval<'a> {
    params: &'a FluidParams,
    regime: SlipRegime,
    source: MobilitySource,
    memo: HashMap<u64, (f64, f64)>,
}

impl<'a> MobilityEval<'a> {
    fn new(params: &'a FluidParams, regime: SlipRegime, source: MobilitySource) -> Self {
        Self { params, regime, source, memo: HashMap::new() }
    }

    fn eval(&mut self, x: f64, y: f64, h: f64) -> Result<(f64, f64)> {
        if let Some(&mg) = self.memo.get(&h.to_bits()) {
            return Ok(mg);
        }
        let (m, g) = match self.source {
            MobilitySource::Probe => {
                let r = closed_form::probe_mobility(self.regime, h, self.params)?;
                (r.m, r.g)
            }
            MobilitySource::Printed => printed::combined_mobility(self.regime, h, self.params),
        };
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NonPositiveMobility { x, y, h, m, route: self.source.label() });
        }
        self.memo.insert(h.to_bits(), (m, g));
        Ok((m, g))
    }
}

/// Builds the pointwise mobility data for a mesh. Heights are checked
/// against the geometry bounds; `M <= 0` (possible only on the explicit
/// route) is rejected.
pub fn build_mobility_field(
    mesh: &ReynoldsMesh,
    geometry: &FilmGeometry,
    params: &FluidParams,
    regime: SlipRegime,
    forces: &BodyForces,
    source: MobilitySource,
) -> Result<MobilityField> {
    regime.validate()?;
    let mut eval = MobilityEval::new(params, regime, source);
    let source_at = |m: f64, g: f64, x: f64, y: f64| -> [f64; 2] {
        let f = forces.f.eval(x, y);
        let pg = perp(forces.g.eval(x, y));
        [m * f[0] + g * pg[0], m * f[1] + g * pg[1]]
    };

    let nn = mesh.node_count();
    let mut node_m = Vec::with_capacity(nn);
    let mut node_g = Vec::with_capacity(nn);
    let mut node_h = Vec::with_capacity(nn);
    for i in 0..nn {
        let (x, y) = mesh.node_xy(i);
        let h = geometry.h_at_checked(x, y)?;
        let (m, g) = eval.eval(x, y, h)?;
        node_m.push(m);
        node_g.push(g);
        node_h.push(h);
    }

    let nc = mesh.cell_count();
    let mut gauss_m = Vec::with_capacity(nc);
    let mut gauss_s = Vec::with_capacity(nc);
    let mut gauss_h = Vec::with_capacity(nc);
    let mut center_m = Vec::with_capacity(nc);
    let mut center_s = Vec::with_capacity(nc);
    let mut center_h = Vec::with_capacity(nc);
    for cy in 0..mesh.ny() {
        for cx in 0..mesh.nx() {
            let mut cm = [0.0; 4];
            let mut cs = [[0.0; 2]; 4];
            let mut ch = [0.0; 4];
            for (q, &(xi, eta)) in GAUSS_POINTS.iter().enumerate() {
                let (x, y) = mesh.cell_point(cx, cy, xi, eta);
                let h = geometry.h_at_checked(x, y)?;
                let (m, g) = eval.eval(x, y, h)?;
                cm[q] = m;
                cs[q] = source_at(m, g, x, y);
                ch[q] = h;
            }
            gauss_m.push(cm);
            gauss_s.push(cs);
            gauss_h.push(ch);
            let (x, y) = mesh.cell_point(cx, cy, 0.0, 0.0);
            let h = geometry.h_at_checked(x, y)?;
            let (m, g) = eval.eval(x, y, h)?;
            center_m.push(m);
            center_s.push(source_at(m, g, x, y));
            center_h.push(h);
        }
    }

    Ok(MobilityField {
        node_m,
        node_g,
        node_h,
        gauss_m,
        gauss_s,
        gauss_h,
        center_m,
        center_s,
        center_h,
    })
}

/// Assembled discrete pressure problem.
#[derive(Clone, Debug)]
pub struct ReynoldsSystem {
    mesh: ReynoldsMesh,
    k: CsrMatrix,
    b: Vec<f64>,
    /// h-weighted mass vector: `c_i = int h phi_i`; the pressure constraint
    /// is `c^T p = 0`.
    c: Vec<f64>,
    mobility: MobilityField,
}

/// Assembles stiffness, load, and constraint data on an `nx` x `ny` mesh
/// covering the geometry's planar extent.
pub fn assemble(
    geometry: &FilmGeometry,
    nx: usize,
    ny: usize,
    params: &FluidParams,
    regime: SlipRegime,
    forces: &BodyForces,
    source: MobilitySource,
) -> Result<ReynoldsSystem> {
    let mesh = ReynoldsMesh::new(geometry.lx(), geometry.ly(), nx, ny)?;
    let mobility = build_mobility_field(&mesh, geometry, params, regime, forces, source)?;

    let nn = mesh.node_count();
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); nn];
    let mut b = vec![0.0; nn];
    let mut c = vec![0.0; nn];
    let jac = 0.25 * mesh.dx() * mesh.dy();

    for cy in 0..mesh.ny() {
        for cx in 0..mesh.nx() {
            let cell = cy * mesh.nx() + cx;
            let nodes = mesh.cell_nodes(cx, cy);
            for (q, &(xi, eta)) in GAUSS_POINTS.iter().enumerate() {
                let grads = shape_grad(xi, eta, mesh.dx(), mesh.dy());
                let vals = shape(xi, eta);
                let m = mobility.gauss_m[cell][q];
                let s = mobility.gauss_s[cell][q];
                let h = mobility.gauss_h[cell][q];
                for a in 0..4 {
                    b[nodes[a]] += (s[0] * grads[a][0] + s[1] * grads[a][1]) * jac;
                    c[nodes[a]] += h * vals[a] * jac;
                    for bb in 0..4 {
                        let kab =
                            m * (grads[a][0] * grads[bb][0] + grads[a][1] * grads[bb][1]) * jac;
                        *rows[nodes[a]].entry(nodes[bb]).or_insert(0.0) += kab;
                    }
                }
            }
        }
    }

    Ok(ReynoldsSystem { mesh, k: CsrMatrix::from_rows(rows), b, c, mobility })
}

/// Gauge choice for the additive pressure constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanWeight {
    /// `sum_i c_i p_i = 0` with `c_i = integral of h phi_i` (the gap-volume
    /// weighting under which the pressure is naturally normalized).
    HeightWeighted,
    /// Plain zero mean of the nodal values, for comparison runs.
    Unweighted,
}

/// Conjugate-gradient controls for [`ReynoldsSystem::solve_pressure`].
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Relative residual target `||K p - b|| <= tol * ||b||`.
    pub tol: f64,
    pub max_iterations: usize,
    pub mean_weight: MeanWeight,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iterations: 10_000, mean_weight: MeanWeight::HeightWeighted }
    }
}

/// Iteration record of a pressure solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final absolute residual norm `||K p - b||`.
    pub residual: f64,
    pub rhs_norm: f64,
}

/// Depth-averaged flux reconstruction and conservation diagnostics.
#[derive(Clone, Debug)]
pub struct FluxField {
    /// `U'` at each cell center.
    pub cell_flux: Vec<[f64; 2]>,
    /// Euclidean norm over all cell-center flux values.
    pub flux_norm: f64,
    /// Net outward boundary flux from the variationally consistent reading
    /// `sum over boundary nodes of -(K p - b)_i` (discrete Gauss theorem;
    /// this is the quantity the conservation guarantee applies to).
    pub boundary_flux_weak: f64,
    /// First-order midpoint line integral of the cell-center fluxes over
    /// the boundary; a plausibility diagnostic only, accurate to O(dx).
    pub boundary_flux_midpoint: f64,
    /// `max_i |(K p - b)_i|`: worst nodal defect of the discrete
    /// conservation statement.
    pub divergence_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the component along the constant vector (the stiffness
/// nullspace): `v -= mean(v)`.
fn deflate(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for vi in v.iter_mut() {
        *vi -= mean;
    }
}

impl ReynoldsSystem {
    pub fn mesh(&self) -> &ReynoldsMesh {
        &self.mesh
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.k
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn mass_vector(&self) -> &[f64] {
        &self.c
    }

    pub fn mobility(&self) -> &MobilityField {
        &self.mobility
    }

    /// Nodal defect `K p - b`.
    pub fn residual(&self, p: &[f64]) -> Vec<f64> {
        let mut r = self.k.matvec(p);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }

    /// Solves the singular-consistent system by deflated, Jacobi-
    /// preconditioned conjugate gradients, then shifts to the zero-mean
    /// representative of the requested gauge (h-weighted `c^T p = 0` by
    /// default, or the plain nodal mean).
    pub fn solve_pressure(&self, opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
        let n = self.k.n();
        let diag = self.k.diag();
        let mut b = self.b.clone();
        deflate(&mut b);
        let rhs_norm = norm(&b);
        let mut p = vec![0.0; n];
        if rhs_norm == 0.0 {
            return Ok((p, SolveStats { iterations: 0, residual: 0.0, rhs_norm }));
        }
        let target = opts.tol * rhs_norm;

        let mut r = b;
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
        deflate(&mut z);
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        let mut kd = vec![0.0; n];
        let mut residual = norm(&r);
        let mut iterations = 0;

        while residual > target {
            if iterations >= opts.max_iterations || !residual.is_finite() {
                return Err(Error::SolverDivergence {
                    iterations,
                    residual: residual / rhs_norm,
                    target: opts.tol,
                });
            }
            self.k.matvec_into(&d, &mut kd);
            let dkd = dot(&d, &kd);
            // Negated `>` rather than `<=` so a NaN curvature lands here too.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(dkd > 0.0) {
                // Search direction fell into the (deflated) nullspace or
                // the matrix lost positivity: report divergence.
                return Err(Error::SolverDivergence {
                    iterations,
                    residual: residual / rhs_norm,
                    target: opts.tol,
                });
            }
            let alpha = rz / dkd;
            for i in 0..n {
                p[i] += alpha * d[i];
                r[i] -= alpha * kd[i];
            }
            deflate(&mut r);
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            deflate(&mut z);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                d[i] = z[i] + beta * d[i];
            }
            residual = norm(&r);
            iterations += 1;
        }

        // Fix the additive constant per the requested gauge. One correction
        // is exact up to rounding; repeat once if rounding left a residue.
        let ones = vec![1.0; n];
        let weight: &[f64] = match opts.mean_weight {
            MeanWeight::HeightWeighted => &self.c,
            MeanWeight::Unweighted => &ones,
        };
        let wsum: f64 = weight.iter().sum();
        for _ in 0..2 {
            let shift = dot(weight, &p) / wsum;
            if shift == 0.0 {
                break;
            }
            for pi in p.iter_mut() {
                *pi -= shift;
            }
        }

        Ok((p, SolveStats { iterations, residual, rhs_norm }))
    }

    /// Reconstructs the depth-averaged flux at cell centers and evaluates
    /// the conservation diagnostics for a solved pressure.
    pub fn flux_field(&self, p: &[f64]) -> FluxField {
        let mesh = &self.mesh;
        let nc = mesh.cell_count();
        let mut cell_flux = Vec::with_capacity(nc);
        let mut flux_sq = 0.0;
        for cy in 0..mesh.ny() {
            for cx in 0..mesh.nx() {
                let cell = cy * mesh.nx() + cx;
                let nodes = mesh.cell_nodes(cx, cy);
                let grads = shape_grad(0.0, 0.0, mesh.dx(), mesh.dy());
                let mut gp = [0.0; 2];
                for a in 0..4 {
                    gp[0] += grads[a][0] * p[nodes[a]];
                    gp[1] += grads[a][1] * p[nodes[a]];
                }
                let m = self.mobility.center_m[cell];
                let s = self.mobility.center_s[cell];
                let u = [-m * gp[0] + s[0], -m * gp[1] + s[1]];
                flux_sq += u[0] * u[0] + u[1] * u[1];
                cell_flux.push(u);
            }
        }

        let r = self.residual(p);
        let mut weak = 0.0;
        let mut divergence_residual: f64 = 0.0;
        for (i, ri) in r.iter().enumerate() {
            divergence_residual = divergence_residual.max(ri.abs());
            if mesh.is_boundary_node(i) {
                weak -= ri;
            }
        }

        // Midpoint rule with cell-center values on each boundary edge.
        let mut midpoint = 0.0;
        for cx in 0..mesh.nx() {
            let bottom = cx;
            let top = (mesh.ny() - 1) * mesh.nx() + cx;
            midpoint += -cell_flux[bottom][1] * mesh.dx();
            midpoint += cell_flux[top][1] * mesh.dx();
        }
        for cy in 0..mesh.ny() {
            let left = cy * mesh.nx();
            let right = cy * mesh.nx() + mesh.nx() - 1;
            midpoint += -cell_flux[left][0] * mesh.dy();
            midpoint += cell_flux[right][0] * mesh.dy();
        }

        FluxField {
            cell_flux,
            flux_norm: flux_sq.sqrt(),
            boundary_flux_weak: weak,
            boundary_flux_midpoint: midpoint,
            divergence_residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HeightField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn standard() -> FluidParams {
        FluidParams::new(0.5, 0.75).unwrap()
    }

    fn flat_geometry() -> FilmGeometry {
        FilmGeometry::new(1.0, 1.0, HeightField::Constant(1.0), 0.5, 2.0).unwrap()
    }

    fn bump_geometry() -> FilmGeometry {
        FilmGeometry::new(
            1.0,
            1.0,
            HeightField::SinusoidalBump { base: 1.0, amplitude: 0.3, fx: 1.0, fy: 1.0 },
            0.5,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn stiffness_annihilates_constants_and_is_symmetric() {
        let p = standard();
        let sys = assemble(
            &bump_geometry(),
            8,
            6,
            &p,
            SlipRegime::Partial { lambda: 1.0 },
            &BodyForces::zero(),
            MobilitySource::Probe,
        )
        .unwrap();
        let ones = vec![1.0; sys.matrix().n()];
        let k1 = sys.matrix().matvec(&ones);
        let scale: f64 = sys.matrix().diag().iter().fold(0.0f64, |m, d| m.max(d.abs()));
        for v in k1 {
            assert!(v.abs() <= 1e-13 * scale, "K*1 component {v:e}");
        }
        assert!(sys.matrix().symmetry_gap() <= 1e-13 * scale);
    }

    #[test]
    fn load_vector_sums_to_zero() {
        let p = standard();
        let forces = BodyForces::new(
            PlanarFieldFor::custom(|x: f64, y: f64| [x * y + 0.3, (x - y).cos()]),
            PlanarFieldFor::custom(|x: f64, y: f64| [y.sin(), x]),
        );
        let sys = assemble(
            &bump_geometry(),
            9,
            7,
            &p,
            SlipRegime::NoSlip,
            &forces,
            MobilitySource::Probe,
        )
        .unwrap();
        let total: f64 = sys.rhs().iter().sum();
        let scale: f64 = sys.rhs().iter().fold(0.0f64, |m, b| m.max(b.abs())).max(1e-30);
        assert!(total.abs() <= 1e-12 * scale.max(1.0), "sum b = {total:e}");
    }

    // Small helper so tests can build Custom planar fields tersely.
    struct PlanarFieldFor;
    impl PlanarFieldFor {
        fn custom(
            f: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static,
        ) -> crate::model::PlanarField {
            crate::model::PlanarField::Custom(std::sync::Arc::new(f))
        }
    }

    #[test]
    fn constant_mobility_energy_of_linear_fields_is_exact() {
        // For constant M, x^T K x equals M * int |grad u|^2 exactly for
        // bilinear-representable linear fields u.
        let p = standard();
        let sys = assemble(
            &flat_geometry(),
            6,
            5,
            &p,
            SlipRegime::NoSlip,
            &BodyForces::zero(),
            MobilitySource::Probe,
        )
        .unwrap();
        let m = sys.mobility().node_m()[0];
        let n = sys.matrix().n();
        let xs: Vec<f64> = (0..n).map(|i| sys.mesh().node_xy(i).0).collect();
        let ys: Vec<f64> = (0..n).map(|i| sys.mesh().node_xy(i).1).collect();
        let exy: Vec<f64> = (0..n).map(|i| xs[i] + ys[i]).collect();
        let e_x = dot(&xs, &sys.matrix().matvec(&xs));
        let e_y = dot(&ys, &sys.matrix().matvec(&ys));
        let e_xy = dot(&exy, &sys.matrix().matvec(&exy));
        assert!((e_x - m).abs() <= 1e-12 * m, "x energy {e_x} vs {m}");
        assert!((e_y - m).abs() <= 1e-12 * m, "y energy {e_y} vs {m}");
        assert!((e_xy - 2.0 * m).abs() <= 1e-12 * m, "x+y energy");
    }

    #[test]
    fn stiffness_is_positive_semidefinite() {
        let p = standard();
        let sys = assemble(
            &bump_geometry(),
            7,
            7,
            &p,
            SlipRegime::Perfect,
            &BodyForces::zero(),
            MobilitySource::Probe,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = sys.matrix().n();
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = dot(&x, &sys.matrix().matvec(&x));
            assert!(q >= -1e-12, "x^T K x = {q:e}");
        }
    }

    #[test]
    fn pressure_solve_meets_tolerance_and_constraint() {
        let p = standard();
        let forces = BodyForces::new(
            PlanarFieldFor::custom(|x: f64, y: f64| {
                [(std::f64::consts::PI * x).sin(), (std::f64::consts::PI * y).cos()]
            }),
            crate::model::PlanarField::Zero,
        );
        let sys = assemble(
            &bump_geometry(),
            16,
            16,
            &p,
            SlipRegime::Partial { lambda: 1.0 },
            &forces,
            MobilitySource::Probe,
        )
        .unwrap();
        let (pressure, stats) = sys.solve_pressure(&SolverOptions::default()).unwrap();
        assert!(stats.residual <= 1e-12 * stats.rhs_norm);
        let cp = dot(sys.mass_vector(), &pressure);
        let cnorm = norm(sys.mass_vector());
        let pnorm = norm(&pressure).max(1e-300);
        assert!(cp.abs() <= 1e-10 * cnorm * pnorm, "constraint defect {cp:e}");
        // Conservation diagnostics.
        let flux = sys.flux_field(&pressure);
        assert!(
            flux.boundary_flux_weak.abs() <= 1e-8 * flux.flux_norm.max(1e-300),
            "weak boundary flux {:e} vs norm {:e}",
            flux.boundary_flux_weak,
            flux.flux_norm
        );

        // The unweighted gauge yields the same field up to a constant,
        // with a plain zero nodal mean instead.
        let opts = SolverOptions { mean_weight: MeanWeight::Unweighted, ..Default::default() };
        let (pressure_u, _) = sys.solve_pressure(&opts).unwrap();
        let mean: f64 = pressure_u.iter().sum::<f64>() / pressure_u.len() as f64;
        assert!(mean.abs() <= 1e-10 * pnorm, "nodal mean {mean:e}");
        let shift = pressure_u[0] - pressure[0];
        for (a, b) in pressure_u.iter().zip(&pressure) {
            assert!((a - b - shift).abs() <= 1e-9 * pnorm.max(1.0));
        }
    }

    #[test]
    fn noslip_pressure_ignores_couple_forcing() {
        let p = standard();
        let g_field = PlanarFieldFor::custom(|x: f64, y: f64| [x * x - y, x + 2.0 * y * y]);
        let f_field = PlanarFieldFor::custom(|x: f64, y: f64| {
            [(2.0 * std::f64::consts::PI * y).sin(), (2.0 * std::f64::consts::PI * x).sin()]
        });
        let with_g = assemble(
            &bump_geometry(),
            12,
            12,
            &p,
            SlipRegime::NoSlip,
            &BodyForces::new(f_field, g_field),
            MobilitySource::Probe,
        )
        .unwrap();
        let f_field2 = PlanarFieldFor::custom(|x: f64, y: f64| {
            [(2.0 * std::f64::consts::PI * y).sin(), (2.0 * std::f64::consts::PI * x).sin()]
        });
        let without_g = assemble(
            &bump_geometry(),
            12,
            12,
            &p,
            SlipRegime::NoSlip,
            &BodyForces::new(f_field2, crate::model::PlanarField::Zero),
            MobilitySource::Probe,
        )
        .unwrap();
        let (p1, _) = with_g.solve_pressure(&SolverOptions::default()).unwrap();
        let (p2, _) = without_g.solve_pressure(&SolverOptions::default()).unwrap();
        let scale = norm(&p2).max(1e-300);
        let diff: f64 = p1
            .iter()
            .zip(&p2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-9 * scale, "no-slip couple sensitivity {:e}", diff / scale);
    }

    #[test]
    fn printed_partial_mobility_is_rejected_where_negative() {
        let p = standard();
        let err = assemble(
            &flat_geometry(),
            4,
            4,
            &p,
            SlipRegime::Partial { lambda: 1.0 },
            &BodyForces::zero(),
            MobilitySource::Printed,
        )
        .unwrap_err();
        match err {
            Error::NonPositiveMobility { m, route, .. } => {
                assert!(m < 0.0);
                assert_eq!(route, "printed");
            }
            other => panic!("expected NonPositiveMobility, got {other:?}"),
        }
    }

    #[test]
    fn printed_noslip_assembles_and_matches_probe_assembly() {
        let p = standard();
        let f = PlanarFieldFor::custom(|x: f64, _| [x.sin(), 0.2]);
        let a = assemble(
            &bump_geometry(),
            6,
            6,
            &p,
            SlipRegime::NoSlip,
            &BodyForces::new(f, crate::model::PlanarField::Zero),
            MobilitySource::Printed,
        )
        .unwrap();
        let f2 = PlanarFieldFor::custom(|x: f64, _| [x.sin(), 0.2]);
        let b = assemble(
            &bump_geometry(),
            6,
            6,
            &p,
            SlipRegime::NoSlip,
            &BodyForces::new(f2, crate::model::PlanarField::Zero),
            MobilitySource::Probe,
        )
        .unwrap();
        for (x, y) in a.mobility.node_m.iter().zip(&b.mobility.node_m) {
            assert!((x - y).abs() <= 1e-10 * x.abs());
        }
        for (x, y) in a.rhs().iter().zip(b.rhs()) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-12));
        }
    }

    #[test]
    fn height_bounds_are_enforced() {
        let geom = FilmGeometry::new(
            1.0,
            1.0,
            HeightField::SinusoidalBump { base: 1.0, amplitude: 0.6, fx: 1.0, fy: 1.0 },
            0.5,
            1.5, // 1 + 0.6 exceeds this
        )
        .unwrap();
        let p = standard();
        let err = assemble(
            &geom,
            8,
            8,
            &p,
            SlipRegime::NoSlip,
            &BodyForces::zero(),
            MobilitySource::Probe,
        )
        .unwrap_err();
        assert!(matches!(err, Error::HeightOutOfBounds { .. }), "got {err:?}");
    }

    #[test]
    fn assembly_is_deterministic() {
        let p = standard();
        let build = || {
            let f = PlanarFieldFor::custom(|x: f64, y: f64| [x - y, x * y]);
            assemble(
                &bump_geometry(),
                10,
                9,
                &p,
                SlipRegime::Partial { lambda: 0.8 },
                &BodyForces::new(f, crate::model::PlanarField::Zero),
                MobilitySource::Probe,
            )
            .unwrap()
        };
        let a = build();
        let b = build();
        assert_eq!(a.rhs(), b.rhs());
        assert_eq!(a.mass_vector(), b.mass_vector());
        let pa = a.solve_pressure(&SolverOptions::default()).unwrap().0;
        let pb = b.solve_pressure(&SolverOptions::default()).unwrap().0;
        assert_eq!(pa, pb, "pressure solves must be bitwise reproducible");
    }

    #[test]
    fn mobility_ordering_across_regimes() {
        let p = standard();
        let geom = bump_geometry();
        let build = |regime| {
            build_mobility_field(
                &ReynoldsMesh::new(1.0, 1.0, 6, 6).unwrap(),
                &geom,
                &p,
                regime,
                &BodyForces::zero(),
                MobilitySource::Probe,
            )
            .unwrap()
        };
        let ns = build(SlipRegime::NoSlip);
        let pa = build(SlipRegime::Partial { lambda: 1.0 });
        let pe = build(SlipRegime::Perfect);
        for i in 0..ns.node_m.len() {
            assert!(
                pe.node_m[i] > pa.node_m[i] && pa.node_m[i] > ns.node_m[i],
                "mobility ordering violated at node {i}"
            );
        }
    }

    #[test]
    fn memoization_handles_constant_height() {
        let p = standard();
        let mesh = ReynoldsMesh::new(1.0, 1.0, 32, 32).unwrap();
        let field = build_mobility_field(
            &mesh,
            &flat_geometry(),
            &p,
            SlipRegime::Partial { lambda: 2.0 },
            &BodyForces::zero(),
            MobilitySource::Probe,
        )
        .unwrap();
        let m0 = field.node_m[0];
        assert!(field.node_m.iter().all(|&m| m == m0));
        assert!(field.center_m.iter().all(|&m| m == m0));
    }
}
