//! Closed-form transverse profiles, depth averages, and mobility
//! coefficients for all three slip regimes.
//!
//! The transverse system at a fixed planar point decouples into two scalar
//! pairs after a quarter-turn rotation of the forcing: `(u1, w2)` driven by
//! `(F1, g2)` and `(u2, -w1)` driven by `(F2, -g1)`, where `F = grad p - f`.
//! Each pair reduces to a 2x2 linear system for the hyperbolic-mode
//! amplitudes. This module solves those systems numerically (the
//! "linear-system route", validated against the independent finite-difference
//! oracle in [`crate::oracle`]) and derives profiles, depth averages, and the
//! scalar mobility law
//!
//! ```text
//! U'(x') = -M * (grad p - f')(x') + G * perp(g'(x'))
//! ```
//!
//! with `M > 0` opposing the pressure gradient (Poiseuille orientation).
//!
//! A second, explicit-expression route lives in [`printed`]; it is evaluated
//! only for cross-checks and reporting (see that module's docs for why the
//! two routes disagree for finite slip friction).

pub mod printed;

use crate::error::{Error, Result};
use crate::hyp;
use crate::model::{FluidParams, SlipRegime};

/// Threshold factor for declaring a 2x2 coefficient system singular:
/// `|det Q| < SINGULAR_DET_FACTOR * ||Q||_F^2`.
const SINGULAR_DET_FACTOR: f64 = 1e-14;

/// Relative tolerance for the two-axis mobility probe agreement. The scalar
/// pair is component-decoupled, so any disagreement is an implementation bug.
const ANISOTROPY_TOL: f64 = 1e-12;

/// Normalized partial-slip pair coefficients: `(a1, b1)` is the response to
/// a unit pressure-gradient load, `(a2, b2)` to a unit couple load.
#[derive(Clone, Copy, Debug)]
pub struct PartialSlipCoefficients {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    /// Largest relative gap between these (linear-system route) values and
    /// the explicit-expression route; `inf` when the explicit denominators
    /// are singular. Recorded for diagnostics, not used in computation.
    pub printed_rel_gap: f64,
}

/// No-slip pair coefficients; `a1 = -1/2` exactly and
/// `b1 = coth(k h / 2) / 2`.
#[derive(Clone, Copy, Debug)]
pub struct NoSlipCoefficients {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

/// Normalized perfect-slip pair coefficients (amplitude `b`, offset `d`):
/// `(b1, d1)` responds to a unit pressure-gradient load, `(b2, d2)` to a
/// unit couple load.
#[derive(Clone, Copy, Debug)]
pub struct PerfectSlipCoefficients {
    pub b1: f64,
    pub d1: f64,
    pub b2: f64,
    pub d2: f64,
    /// Largest relative gap against the explicit-expression route (which
    /// carries known transcription slips for `d1`, `b2`, `d2`).
    pub printed_rel_gap: f64,
}

/// Scalar linear-response law of the depth-averaged velocity at one point:
/// `U' = -m * F + g * perp(g')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobilityResponse {
    /// Pressure/force mobility (strictly positive for valid parameters).
    pub m: f64,
    /// Microrotation-source mobility (zero in the no-slip regime).
    pub g: f64,
}

// ---------------------------------------------------------------------------
// 2x2 solves
// ---------------------------------------------------------------------------

/// Solves `q * x = rhs` by Cramer's rule with a singularity guard.
// Negated `>=` rather than `<` so a NaN determinant takes the error branch.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn solve_2x2(q: [[f64; 2]; 2], rhs: [f64; 2], h: f64, inv_lambda: f64) -> Result<[f64; 2]> {
    let det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    let norm2 = q[0][0] * q[0][0] + q[0][1] * q[0][1] + q[1][0] * q[1][0] + q[1][1] * q[1][1];
    let threshold = SINGULAR_DET_FACTOR * norm2;
    if !(det.abs() >= threshold) {
        return Err(Error::SingularCoefficientSystem { det, threshold, h, inv_lambda });
    }
    Ok([
        (rhs[0] * q[1][1] - q[0][1] * rhs[1]) / det,
        (q[0][0] * rhs[1] - q[1][0] * rhs[0]) / det,
    ])
}

/// Coefficient matrix of the partial/no-slip family (`inv_lambda = 1/lambda`,
/// zero for no-slip), assembled from cancellation-free kernels.
fn q_wall(h: f64, params: &FluidParams, inv_lambda: f64) -> [[f64; 2]; 2] {
    let x = params.k() * h;
    let n2 = params.n() * params.n();
    let omn2 = params.one_minus_n2();
    [
        [
            2.0 * n2 * h * x * x * hyp::sinh_m_x_over_x3(x) - 2.0 * omn2 * (h + inv_lambda),
            2.0 * n2 * h * x * hyp::cosh_m1_over_x2(x),
        ],
        [hyp::cosh_m1(x), x * hyp::sinh_over_x(x)],
    ]
}

/// Unit-load solutions of the wall family: `((a1, b1), (a2, b2))` with
/// `Q (a1, b1)^T = (h, 1)^T` and `Q (a2, b2)^T = (1, 0)^T`.
fn wall_normalized(
    h: f64,
    params: &FluidParams,
    inv_lambda: f64,
) -> Result<([f64; 2], [f64; 2])> {
    let q = q_wall(h, params, inv_lambda);
    let c1 = solve_2x2(q, [h, 1.0], h, inv_lambda)?;
    let c2 = solve_2x2(q, [1.0, 0.0], h, inv_lambda)?;
    Ok((c1, c2))
}

/// Unit-load solutions of the perfect-slip family: `((b1, d1), (b2, d2))`.
///
/// The system matrix is `[[2N^2/k cosh(kh), 1], [sinh(kh), 0]]` with
/// determinant `-sinh(kh)`; it is solved in closed form with stable kernels.
fn perfect_normalized(h: f64, params: &FluidParams) -> Result<([f64; 2], [f64; 2])> {
    let x = params.k() * h;
    let n2 = params.n() * params.n();
    let sh = x.sinh();
    let b1 = 1.0 / sh;
    if !b1.is_finite() || !sh.is_finite() {
        // sinh underflowed (or overflowed) beyond f64 range.
        return Err(Error::SingularCoefficientSystem {
            det: -sh,
            threshold: f64::MIN_POSITIVE,
            h,
            inv_lambda: f64::INFINITY,
        });
    }
    let s2k = params.two_n2_over_k();
    let d1 = h - s2k * hyp::coth(x);
    // Couple load (per the scaling in `solve_scalar_pair`):
    // rhs = (h - sinh(kh)/k, (1 - cosh(kh)) / (2 N^2)).
    let b2 = -(0.5 * x).tanh() / (2.0 * n2);
    let d2 = -h * x * x * hyp::sinh_m_x_over_x3(x) + x.cosh() * (0.5 * x).tanh() / params.k();
    Ok(([b1, d1], [b2, d2]))
}

// ---------------------------------------------------------------------------
// Scalar pairs
// ---------------------------------------------------------------------------

/// One solved scalar transverse pair `(u, w)` for forcing `(p, g)` where `p`
/// is a pressure-gradient-minus-force component and `g` a couple component.
struct ScalarPair {
    h: f64,
    k: f64,
    n2: f64,
    omn2: f64,
    s2k: f64,
    p: f64,
    g: f64,
    kind: PairKind,
}

enum PairKind {
    /// Partial slip or no-slip (`inv_lambda = 0`): hyperbolic amplitudes
    /// `a`, `b` of the wall family.
    Wall { inv_lambda: f64, a: f64, b: f64 },
    /// Perfect slip: amplitude `b` and offset `d`.
    Perfect { b: f64, d: f64 },
}

fn solve_scalar_pair(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    p: f64,
    g: f64,
) -> Result<ScalarPair> {
    let n2 = params.n() * params.n();
    let omn2 = params.one_minus_n2();
    let kind = match regime.inv_lambda() {
        Some(inv_lambda) => {
            let (c1, c2) = wall_normalized(h, params, inv_lambda)?;
            let wp = -h * p / (2.0 * omn2);
            let wg = (h + inv_lambda) * g / (2.0 * n2);
            PairKind::Wall {
                inv_lambda,
                a: wp * c1[0] + wg * c2[0],
                b: wp * c1[1] + wg * c2[1],
            }
        }
        None => {
            let (c1, c2) = perfect_normalized(h, params)?;
            let wp = -h * p / (2.0 * omn2);
            let wg = -g / (2.0 * omn2);
            PairKind::Perfect {
                b: wp * c1[0] + wg * c2[0],
                d: wp * c1[1] + wg * c2[1],
            }
        }
    };
    Ok(ScalarPair {
        h,
        k: params.k(),
        n2,
        omn2,
        s2k: params.two_n2_over_k(),
        p,
        g,
        kind,
    })
}

impl ScalarPair {
    /// Velocity component at height `z`.
    fn u(&self, z: f64) -> f64 {
        let x = self.k * z;
        let poiseuille = self.p * z * z / (2.0 * self.omn2);
        match self.kind {
            PairKind::Wall { inv_lambda, a, b } => {
                let bracket = 2.0 * self.n2 * z * x * x * hyp::sinh_m_x_over_x3(x)
                    - 2.0 * self.omn2 * (z + inv_lambda);
                poiseuille + a * bracket + self.s2k * b * hyp::cosh_m1(x)
                    - self.g * (z + inv_lambda) / (2.0 * self.n2)
            }
            PairKind::Perfect { b, d } => {
                poiseuille + self.s2k * b * x.cosh()
                    - self.g * z * x * x * hyp::sinh_m_x_over_x3(x) / (2.0 * self.omn2)
                    + d
            }
        }
    }

    /// Microrotation component at height `z`.
    fn w(&self, z: f64) -> f64 {
        let x = self.k * z;
        let linear = self.p * z / (2.0 * self.omn2);
        match self.kind {
            PairKind::Wall { a, b, .. } => linear + a * hyp::cosh_m1(x) + b * x.sinh(),
            PairKind::Perfect { b, d: _ } => {
                linear + b * x.sinh() - self.g * hyp::cosh_m1(x) / (4.0 * self.n2 * self.omn2)
            }
        }
    }

    /// Analytic depth integral of the velocity component over `[0, h]`.
    fn integral_u(&self) -> f64 {
        let h = self.h;
        let x = self.k * h;
        let poiseuille = self.p * h * h * h / (6.0 * self.omn2);
        match self.kind {
            PairKind::Wall { inv_lambda, a, b } => {
                let ia = 2.0 * self.n2 * h * h * hyp::cosh_m1_over_x2(x) - h * h
                    - 2.0 * self.omn2 * inv_lambda * h;
                let ib = 2.0 * self.n2 * h * h * x * hyp::sinh_m_x_over_x3(x);
                poiseuille + a * ia + b * ib
                    - self.g * (0.5 * h * h + inv_lambda * h) / (2.0 * self.n2)
            }
            PairKind::Perfect { b, d } => {
                poiseuille
                    + self.s2k * b * x.sinh() / self.k
                    + self.g * h * h * (0.5 - hyp::cosh_m1_over_x2(x)) / (2.0 * self.omn2)
                    + d * h
            }
        }
    }
}

/// Solves both scalar pairs for planar forcing `(f_vec, g_vec)`:
/// pair A carries `(u1, w2)` under `(F1, g2)`, pair B carries `(u2, -w1)`
/// under `(F2, -g1)`.
fn solve_pairs(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
) -> Result<(ScalarPair, ScalarPair)> {
    regime.validate()?;
    require_positive_h(h)?;
    let a = solve_scalar_pair(regime, h, params, f_vec[0], g_vec[1])?;
    let b = solve_scalar_pair(regime, h, params, f_vec[1], -g_vec[0])?;
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Normalized partial-slip coefficients at one planar point, from the 2x2
/// linear-system route, with the explicit-expression gap recorded.
pub fn coeffs_partial(h: f64, params: &FluidParams, lambda: f64) -> Result<PartialSlipCoefficients> {
    SlipRegime::Partial { lambda }.validate()?;
    require_positive_h(h)?;
    let (c1, c2) = wall_normalized(h, params, 1.0 / lambda)?;
    let printed = printed::partial_coeffs(h, params, lambda);
    let solved = [c1[0], c1[1], c2[0], c2[1]];
    Ok(PartialSlipCoefficients {
        a1: c1[0],
        b1: c1[1],
        a2: c2[0],
        b2: c2[1],
        printed_rel_gap: max_rel_gap(&solved, &printed),
    })
}

/// No-slip coefficients, evaluated from their exact explicit expressions
/// (`a1 = -1/2`, `b1 = coth(kh/2)/2`, stable denominators for `a2`, `b2`).
pub fn coeffs_noslip(h: f64, params: &FluidParams) -> Result<NoSlipCoefficients> {
    require_positive_h(h)?;
    let c = printed::noslip_coeffs(h, params);
    Ok(NoSlipCoefficients { a1: c[0], b1: c[1], a2: c[2], b2: c[3] })
}

/// Normalized perfect-slip coefficients from the closed-form solve of the
/// amplitude/offset system, with the explicit-expression gap recorded.
pub fn coeffs_perfect(h: f64, params: &FluidParams) -> Result<PerfectSlipCoefficients> {
    require_positive_h(h)?;
    let (c1, c2) = perfect_normalized(h, params)?;
    let printed = printed::perfect_coeffs(h, params);
    let solved = [c1[0], c1[1], c2[0], c2[1]];
    Ok(PerfectSlipCoefficients {
        b1: c1[0],
        d1: c1[1],
        b2: c2[0],
        d2: c2[1],
        printed_rel_gap: max_rel_gap(&solved, &printed),
    })
}

/// Planar velocity `(u1, u2)` at transverse height `z3` (the third component
/// is identically zero and not represented).
///
/// `f_vec` is the combined drive `(grad p - f')` at the planar point; `g_vec`
/// the couple. The formulas are entire in `z3`, so evaluation slightly
/// outside `[0, h]` is permitted (used by finite-difference wall checks).
pub fn velocity_profile(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
    z3: f64,
) -> Result<[f64; 2]> {
    let (a, b) = solve_pairs(regime, h, params, f_vec, g_vec)?;
    Ok([a.u(z3), b.u(z3)])
}

/// Planar microrotation `(w1, w2)` at transverse height `z3` (third
/// component identically zero).
pub fn microrotation_profile(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
    z3: f64,
) -> Result<[f64; 2]> {
    let (a, b) = solve_pairs(regime, h, params, f_vec, g_vec)?;
    Ok([-b.w(z3), a.w(z3)])
}

/// Depth-integrated velocity `U' = int_0^h u' dz3`, from the analytic
/// antiderivatives of the profile terms.
pub fn average_velocity(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    f_vec: [f64; 2],
    g_vec: [f64; 2],
) -> Result<[f64; 2]> {
    let (a, b) = solve_pairs(regime, h, params, f_vec, g_vec)?;
    Ok([a.integral_u(), b.integral_u()])
}

/// No-slip mobility kernel `Phi(h, N, Rc)`; the no-slip flux law is
/// `U' = -(h^3 Phi / (1 - N^2)) (grad p - f')` with no couple contribution.
///
/// Evaluated in the cancellation-free form
/// `Phi = 1/12 + (N^2 / (4 t^2)) * (1 - t coth t)` with `t = k h / 2`,
/// which tends to `(1 - N^2)/12` as the coupling vanishes.
pub fn mobility_phi(h: f64, params: &FluidParams) -> f64 {
    let t = 0.5 * params.k() * h;
    let n2 = params.n() * params.n();
    1.0 / 12.0 + n2 / (4.0 * t * t) * hyp::one_minus_x_coth(t)
}

/// Explicit mobility coefficients per regime (reporting route). See
/// [`printed::PrintedMobility`].
pub fn mobility_coeffs_printed(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
) -> printed::PrintedMobility {
    printed::mobility_coeffs(regime, h, params)
}

/// Extracts the scalar flux law `U' = -M F + G perp(g')` by linear-response
/// probing of [`average_velocity`] with unit loads along both axes.
///
/// The two axis probes must agree (the pair structure is component-
/// decoupled); disagreement raises [`Error::AnisotropyDetected`].
pub fn probe_mobility(regime: SlipRegime, h: f64, params: &FluidParams) -> Result<MobilityResponse> {
    require_positive_h(h)?;
    regime.validate()?;
    // Pressure/force mobility from unit forces along each axis.
    let ux = average_velocity(regime, h, params, [1.0, 0.0], [0.0, 0.0])?;
    let uy = average_velocity(regime, h, params, [0.0, 1.0], [0.0, 0.0])?;
    let m = -ux[0];
    check_isotropy(m, -uy[1])?;
    // Couple mobility from couples whose perp is each unit vector:
    // perp((0,-1)) = (1,0) and perp((1,0)) = (0,1).
    let gx = average_velocity(regime, h, params, [0.0, 0.0], [0.0, -1.0])?;
    let gy = average_velocity(regime, h, params, [0.0, 0.0], [1.0, 0.0])?;
    let g = gx[0];
    check_isotropy(g, gy[1])?;
    Ok(MobilityResponse { m, g })
}

fn check_isotropy(first: f64, second: f64) -> Result<()> {
    let gap = (first - second).abs();
    let tol = ANISOTROPY_TOL * first.abs().max(1.0);
    if gap > tol {
        return Err(Error::AnisotropyDetected { gap, tol });
    }
    Ok(())
}

fn require_positive_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
            constraint: "h > 0",
        });
    }
    Ok(())
}

/// Largest elementwise gap of `other` against the linear-system values,
/// relative to the latter (floored at 1 so near-zero coefficients do not
/// inflate it; `NaN`s from singular explicit denominators map to `inf`).
fn max_rel_gap(solved: &[f64; 4], other: &[f64; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for (s, o) in solved.iter().zip(other) {
        let gap = (s - o).abs() / s.abs().max(1.0);
        worst = worst.max(if gap.is_nan() { f64::INFINITY } else { gap });
    }
    worst
}
