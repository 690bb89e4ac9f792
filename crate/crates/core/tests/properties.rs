//! Property tests for the transverse closed forms and the oracle: boundary
//! conditions, linearity, isotropy, regime limits, and closed-form/oracle
//! agreement over randomized parameters and drives.

use micro_reynolds::oracle::{self, TransverseGrid};
use micro_reynolds::{
    average_velocity, microrotation_profile, mobility_phi, perp, probe_mobility,
    velocity_profile, FluidParams, SlipRegime,
};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = FluidParams> {
    (0.05f64..0.95, 0.1f64..5.0)
        .prop_map(|(n, rc)| FluidParams::new(n, rc).expect("in-range parameters"))
}

fn regime_strategy() -> impl Strategy<Value = SlipRegime> {
    prop_oneof![
        Just(SlipRegime::NoSlip),
        Just(SlipRegime::Perfect),
        (0.05f64..50.0).prop_map(|lambda| SlipRegime::Partial { lambda }),
    ]
}

fn drive_strategy() -> impl Strategy<Value = [f64; 2]> {
    [(-2.0f64..2.0), (-2.0f64..2.0)]
}

fn drive_scale(f: [f64; 2], g: [f64; 2]) -> f64 {
    f[0].abs().max(f[1].abs()).max(g[0].abs()).max(g[1].abs()).max(1.0)
}

/// Centered difference of the velocity profile; the closed forms are entire
/// in z, so evaluating just below the wall is legitimate.
fn wall_velocity_derivative(
    regime: SlipRegime,
    h: f64,
    params: &FluidParams,
    f: [f64; 2],
    g: [f64; 2],
) -> [f64; 2] {
    let delta = 1e-6 * h;
    let up = velocity_profile(regime, h, params, f, g, delta).unwrap();
    let um = velocity_profile(regime, h, params, f, g, -delta).unwrap();
    [(up[0] - um[0]) / (2.0 * delta), (up[1] - um[1]) / (2.0 * delta)]
}

proptest! {
    /// Microrotation vanishes at both walls and velocity vanishes at the
    /// top wall in every regime; the bottom wall obeys the regime's
    /// condition (clamped, shear-free, or Robin).
    #[test]
    fn boundary_conditions_hold_pointwise(
        params in params_strategy(),
        regime in regime_strategy(),
        h in 0.3f64..2.5,
        f in drive_strategy(),
        g in drive_strategy(),
    ) {
        let scale = drive_scale(f, g);
        let u_top = velocity_profile(regime, h, &params, f, g, h).unwrap();
        let w_top = microrotation_profile(regime, h, &params, f, g, h).unwrap();
        let w_bot = microrotation_profile(regime, h, &params, f, g, 0.0).unwrap();
        for c in 0..2 {
            prop_assert!(u_top[c].abs() <= 1e-12 * scale, "u(h) = {:?}", u_top);
            prop_assert!(w_top[c].abs() <= 1e-12 * scale, "w(h) = {:?}", w_top);
            prop_assert!(w_bot[c].abs() <= 1e-12 * scale, "w(0) = {:?}", w_bot);
        }
        let du = wall_velocity_derivative(regime, h, &params, f, g);
        let u_bot = velocity_profile(regime, h, &params, f, g, 0.0).unwrap();
        match regime {
            SlipRegime::NoSlip => {
                for c in 0..2 {
                    prop_assert!(u_bot[c].abs() <= 1e-12 * scale, "u(0) = {:?}", u_bot);
                }
            }
            SlipRegime::Perfect => {
                for c in 0..2 {
                    prop_assert!(du[c].abs() <= 1e-5 * scale, "u'(0) = {:?}", du);
                }
            }
            SlipRegime::Partial { lambda } => {
                for c in 0..2 {
                    let resid = du[c] - lambda * u_bot[c];
                    // The finite-difference step limits accuracy, and the
                    // residual scales with lambda * |u|.
                    let tol = 1e-5 * scale * (1.0 + lambda * u_bot[c].abs());
                    prop_assert!(resid.abs() <= tol, "Robin residual {resid} vs tol {tol}");
                }
            }
        }
    }

    /// Profiles and averages are jointly linear in the drive pair.
    #[test]
    fn profiles_are_linear_in_the_drives(
        params in params_strategy(),
        regime in regime_strategy(),
        h in 0.3f64..2.5,
        f1 in drive_strategy(),
        g1 in drive_strategy(),
        f2 in drive_strategy(),
        g2 in drive_strategy(),
        alpha in -3.0f64..3.0,
        frac in 0.0f64..1.0,
    ) {
        let z = frac * h;
        let fsum = [f1[0] + alpha * f2[0], f1[1] + alpha * f2[1]];
        let gsum = [g1[0] + alpha * g2[0], g1[1] + alpha * g2[1]];
        let scale = drive_scale(fsum, gsum) + drive_scale(f1, g1) + drive_scale(f2, g2);

        let u1 = velocity_profile(regime, h, &params, f1, g1, z).unwrap();
        let u2 = velocity_profile(regime, h, &params, f2, g2, z).unwrap();
        let usum = velocity_profile(regime, h, &params, fsum, gsum, z).unwrap();
        let w1 = microrotation_profile(regime, h, &params, f1, g1, z).unwrap();
        let w2 = microrotation_profile(regime, h, &params, f2, g2, z).unwrap();
        let wsum = microrotation_profile(regime, h, &params, fsum, gsum, z).unwrap();
        for c in 0..2 {
            prop_assert!((usum[c] - (u1[c] + alpha * u2[c])).abs() <= 1e-11 * scale);
            prop_assert!((wsum[c] - (w1[c] + alpha * w2[c])).abs() <= 1e-11 * scale);
        }
    }

    /// Rotating both drives by a quarter turn rotates both responses: the
    /// transverse problem is isotropic in the plane.
    #[test]
    fn quarter_turn_isotropy(
        params in params_strategy(),
        regime in regime_strategy(),
        h in 0.3f64..2.5,
        f in drive_strategy(),
        g in drive_strategy(),
        frac in 0.0f64..1.0,
    ) {
        let z = frac * h;
        let scale = drive_scale(f, g);
        let u = velocity_profile(regime, h, &params, f, g, z).unwrap();
        let w = microrotation_profile(regime, h, &params, f, g, z).unwrap();
        let ur = velocity_profile(regime, h, &params, perp(f), perp(g), z).unwrap();
        let wr = microrotation_profile(regime, h, &params, perp(f), perp(g), z).unwrap();
        let pu = perp(u);
        let pw = perp(w);
        for c in 0..2 {
            prop_assert!((ur[c] - pu[c]).abs() <= 1e-12 * scale);
            prop_assert!((wr[c] - pw[c]).abs() <= 1e-12 * scale);
        }
    }

    /// Large slip coefficients collapse partial slip onto no slip at first
    /// order in 1/lambda.
    #[test]
    fn partial_slip_collapses_to_no_slip(
        params in params_strategy(),
        h in 0.3f64..2.5,
        f in drive_strategy(),
        g in drive_strategy(),
        frac in 0.0f64..1.0,
    ) {
        let z = frac * h;
        let scale = drive_scale(f, g);
        let u_big = velocity_profile(SlipRegime::Partial { lambda: 1e8 }, h, &params, f, g, z)
            .unwrap();
        let u_ns = velocity_profile(SlipRegime::NoSlip, h, &params, f, g, z).unwrap();
        for c in 0..2 {
            prop_assert!((u_big[c] - u_ns[c]).abs() <= 1e-6 * scale,
                "lambda=1e8 profile {:?} vs no-slip {:?}", u_big, u_ns);
        }
    }

    /// The analytic depth integral agrees with Simpson quadrature of the
    /// profile itself.
    #[test]
    fn depth_integral_matches_quadrature_of_profile(
        params in params_strategy(),
        regime in regime_strategy(),
        h in 0.3f64..2.5,
        f in drive_strategy(),
        g in drive_strategy(),
    ) {
        let scale = drive_scale(f, g);
        let flux = average_velocity(regime, h, &params, f, g).unwrap();
        // Composite Simpson over an even number of panels; the panel count
        // tracks k h so the quadrature error stays below the bound on stiff
        // (small Rc) draws.
        let m = 2 * 128usize.max((64.0 * params.k() * h).ceil() as usize);
        let dz = h / m as f64;
        let mut acc = [0.0f64; 2];
        for j in 0..=m {
            let weight = if j == 0 || j == m {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let u = velocity_profile(regime, h, &params, f, g, j as f64 * dz).unwrap();
            acc[0] += weight * u[0];
            acc[1] += weight * u[1];
        }
        let quad = [acc[0] * dz / 3.0, acc[1] * dz / 3.0];
        for c in 0..2 {
            prop_assert!((flux[c] - quad[c]).abs() <= 1e-9 * scale,
                "analytic {:?} vs quadrature {:?}", flux, quad);
        }
    }

    /// The independent finite-difference solution converges to the closed
    /// forms (Richardson-extrapolated comparison at the coarse nodes).
    #[test]
    fn oracle_agrees_with_closed_forms(
        params in params_strategy(),
        regime in regime_strategy(),
        h in 0.3f64..2.5,
        f in drive_strategy(),
        g in drive_strategy(),
    ) {
        let scale = drive_scale(f, g);
        // The extrapolated error grows like (k h / n)^4 * k^2, so the node
        // count tracks k h to keep a fixed resolution per wavelength; small
        // Rc draws are the stiff corner.
        let n = 149usize.max((70.0 * params.k() * h).ceil() as usize);
        let grid = TransverseGrid::new(n, h).unwrap();
        let extrapolated = oracle::richardson_profile(regime, &grid, &params, f, g).unwrap();
        for (j, &z) in extrapolated.z.iter().enumerate() {
            let u = velocity_profile(regime, h, &params, f, g, z).unwrap();
            let w = microrotation_profile(regime, h, &params, f, g, z).unwrap();
            for c in 0..2 {
                prop_assert!((u[c] - extrapolated.u[j][c]).abs() <= 5e-6 * scale,
                    "u gap {} at z={z}", (u[c] - extrapolated.u[j][c]).abs());
                prop_assert!((w[c] - extrapolated.w[j][c]).abs() <= 5e-6 * scale,
                    "w gap {} at z={z}", (w[c] - extrapolated.w[j][c]).abs());
            }
        }
    }

    /// Discrete energy identity: the oracle solution satisfies
    /// x^T A x = x^T b to rounding.
    #[test]
    fn oracle_energy_identity(
        params in params_strategy(),
        regime in regime_strategy(),
        h in 0.3f64..2.5,
        f in drive_strategy(),
        g in drive_strategy(),
    ) {
        let grid = TransverseGrid::new(99, h).unwrap();
        let resid = oracle::energy_residual(regime, &grid, &params, f, g).unwrap();
        prop_assert!(resid <= 1e-9, "energy residual {resid}");
    }

    /// Mobility sanity over parameters: the no-slip shape factor stays in
    /// (0, 1/12] and slip only ever increases the pressure mobility.
    #[test]
    fn mobility_ordering_and_shape_factor(
        params in params_strategy(),
        h in 0.3f64..2.5,
        lambda in 0.05f64..50.0,
    ) {
        let phi = mobility_phi(h, &params);
        prop_assert!(phi > 0.0 && phi <= 1.0 / 12.0 + 1e-15, "Phi = {phi}");
        let m_ns = probe_mobility(SlipRegime::NoSlip, h, &params).unwrap().m;
        let m_pa = probe_mobility(SlipRegime::Partial { lambda }, h, &params).unwrap().m;
        let m_pf = probe_mobility(SlipRegime::Perfect, h, &params).unwrap().m;
        prop_assert!(m_ns > 0.0);
        prop_assert!(m_pa >= m_ns - 1e-12, "partial {m_pa} < no-slip {m_ns}");
        prop_assert!(m_pf >= m_pa - 1e-12, "perfect {m_pf} < partial {m_pa}");
    }
}
