//! Fluid parameters, slip regimes, film geometry, and body forces.
//!
//! Everything here is immutable after construction and cheap to share across
//! threads; all validation happens in the constructors so the solver layers
//! can assume well-formed inputs.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Derived transverse wavenumber `k = 2 N sqrt((1 - N^2) / Rc)`.
///
/// Governs every hyperbolic term in the transverse profiles.
pub fn compute_k(n: f64, rc: f64) -> Result<f64> {
    if !(n > 0.0 && n < 1.0) {
        return Err(Error::InvalidParameter {
            name: "N",
            value: n,
            constraint: "0 < N < 1",
        });
    }
    if !(rc > 0.0 && rc.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "Rc",
            value: rc,
            constraint: "Rc > 0 and finite",
        });
    }
    Ok(2.0 * n * ((1.0 - n * n) / rc).sqrt())
}

/// Dimensionless fluid parameters: coupling number `N`, microrotation
/// number `Rc`, and the derived wavenumber `k` (cached).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidParams {
    n: f64,
    rc: f64,
    k: f64,
}

impl FluidParams {
    /// Validates `0 < N < 1` and `Rc > 0`, then caches `k`.
    pub fn new(n: f64, rc: f64) -> Result<Self> {
        let k = compute_k(n, rc)?;
        Ok(Self { n, rc, k })
    }

    /// Coupling number `N`.
    #[inline]
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Microrotation number `Rc`.
    #[inline]
    pub fn rc(&self) -> f64 {
        self.rc
    }

    /// Transverse wavenumber `k = 2 N sqrt((1 - N^2)/Rc)`.
    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Coercivity constant `1 - N^2` (strictly positive).
    #[inline]
    pub fn one_minus_n2(&self) -> f64 {
        1.0 - self.n * self.n
    }

    /// The recurring group `2 N^2 / k = N sqrt(Rc / (1 - N^2))`.
    #[inline]
    pub fn two_n2_over_k(&self) -> f64 {
        2.0 * self.n * self.n / self.k
    }
}

/// Bottom-wall boundary condition for the velocity. The top wall and the
/// microrotation are always no-slip/no-spin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SlipRegime {
    /// Zero shear at the bottom wall (`du/dz = 0`).
    Perfect,
    /// Navier slip `du/dz = lambda * u` with friction coefficient
    /// `lambda > 0`.
    Partial { lambda: f64 },
    /// Zero velocity at the bottom wall.
    NoSlip,
}

impl SlipRegime {
    /// Checks that a `Partial` regime carries a valid friction coefficient.
    pub fn validate(&self) -> Result<()> {
        if let SlipRegime::Partial { lambda } = *self {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "lambda",
                    value: lambda,
                    constraint: "0 < lambda < inf",
                });
            }
        }
        Ok(())
    }

    /// `1/lambda` for the unified partial/no-slip coefficient family
    /// (`0` for no-slip); `None` for perfect slip, which uses a different
    /// coefficient system.
    #[inline]
    pub(crate) fn inv_lambda(&self) -> Option<f64> {
        match *self {
            SlipRegime::NoSlip => Some(0.0),
            SlipRegime::Partial { lambda } => Some(1.0 / lambda),
            SlipRegime::Perfect => None,
        }
    }

    /// Short lowercase label used in diagnostics and manifests.
    pub fn label(&self) -> &'static str {
        match self {
            SlipRegime::Perfect => "perfect",
            SlipRegime::Partial { .. } => "partial",
            SlipRegime::NoSlip => "noslip",
        }
    }
}

/// Maps the regime-selection parameter to a slip regime:
/// `gamma > -1` -> perfect slip, `gamma == -1` (exact) -> partial slip with
/// the given friction coefficient, `gamma < -1` -> no slip.
///
/// The comparison is exact: gamma is a modeling choice, not a measured
/// quantity, so callers wanting the partial regime must pass exactly -1.
pub fn regime_from_gamma(gamma: f64, lambda: f64) -> Result<SlipRegime> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            constraint: "0 < lambda < inf",
        });
    }
    Ok(if gamma > -1.0 {
        SlipRegime::Perfect
    } else if gamma == -1.0 {
        SlipRegime::Partial { lambda }
    } else {
        SlipRegime::NoSlip
    })
}

/// Rotates a planar vector a quarter turn counterclockwise:
/// `perp((v1, v2)) = (-v2, v1)`.
#[inline]
pub fn perp(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

/// Film thickness sampled on a uniform grid, evaluated anywhere by bilinear
/// interpolation (queries outside the grid clamp to the boundary).
#[derive(Clone, Debug)]
pub struct BilinearGrid {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    /// Row-major values, `(nx + 1) * (ny + 1)` entries, x fastest.
    values: Vec<f64>,
}

impl BilinearGrid {
    /// `values` holds `(nx + 1) * (ny + 1)` samples over `[0,lx] x [0,ly]`,
    /// x varying fastest.
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh {
                reason: format!("height grid must have at least 1x1 cells, got {nx}x{ny}"),
            });
        }
        let expect = (nx + 1) * (ny + 1);
        if values.len() != expect {
            return Err(Error::InvalidMesh {
                reason: format!(
                    "height grid needs {expect} samples for {nx}x{ny} cells, got {}",
                    values.len()
                ),
            });
        }
        Ok(Self { lx, ly, nx, ny, values })
    }

    /// Bilinear interpolation with clamping at the domain boundary.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let fx = (x / self.lx * self.nx as f64).clamp(0.0, self.nx as f64);
        let fy = (y / self.ly * self.ny as f64).clamp(0.0, self.ny as f64);
        let ix = (fx as usize).min(self.nx - 1);
        let iy = (fy as usize).min(self.ny - 1);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let idx = |i: usize, j: usize| self.values[j * (self.nx + 1) + i];
        let bottom = idx(ix, iy) * (1.0 - tx) + idx(ix + 1, iy) * tx;
        let top = idx(ix, iy + 1) * (1.0 - tx) + idx(ix + 1, iy + 1) * tx;
        bottom * (1.0 - ty) + top * ty
    }
}

/// Film height as a function of the planar position.
#[derive(Clone)]
pub enum HeightField {
    /// `h(x, y) = value`.
    Constant(f64),
    /// `h(x, y) = c0 + cx*x + cy*y`.
    Affine { c0: f64, cx: f64, cy: f64 },
    /// `h(x, y) = base + amplitude * sin(2 pi fx x) * sin(2 pi fy y)`.
    SinusoidalBump {
        base: f64,
        amplitude: f64,
        fx: f64,
        fy: f64,
    },
    /// Bilinear interpolation of sampled values.
    Grid(BilinearGrid),
    /// Arbitrary user-supplied height function (e.g. a parsed expression).
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl HeightField {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            HeightField::Constant(v) => *v,
            HeightField::Affine { c0, cx, cy } => c0 + cx * x + cy * y,
            HeightField::SinusoidalBump { base, amplitude, fx, fy } => {
                use std::f64::consts::TAU;
                base + amplitude * (TAU * fx * x).sin() * (TAU * fy * y).sin()
            }
            HeightField::Grid(grid) => grid.eval(x, y),
            HeightField::Custom(f) => f(x, y),
        }
    }
}

impl fmt::Debug for HeightField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightField::Constant(v) => write!(f, "Constant({v})"),
            HeightField::Affine { c0, cx, cy } => {
                write!(f, "Affine {{ c0: {c0}, cx: {cx}, cy: {cy} }}")
            }
            HeightField::SinusoidalBump { base, amplitude, fx, fy } => write!(
                f,
                "SinusoidalBump {{ base: {base}, amplitude: {amplitude}, fx: {fx}, fy: {fy} }}"
            ),
            HeightField::Grid(g) => write!(f, "Grid({}x{})", g.nx, g.ny),
            HeightField::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Planar domain `[0, Lx] x [0, Ly]` with a positive film height over it.
#[derive(Clone, Debug)]
pub struct FilmGeometry {
    lx: f64,
    ly: f64,
    h: HeightField,
    h_min: f64,
    h_max: f64,
}

impl FilmGeometry {
    /// Validates the extents and declared height bounds. The bounds are
    /// checked against the actual height at every mesh node when a solver
    /// mesh is attached (see `reynolds::build_mobility_field`).
    pub fn new(lx: f64, ly: f64, h: HeightField, h_min: f64, h_max: f64) -> Result<Self> {
        if !(lx > 0.0 && lx.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "Lx",
                value: lx,
                constraint: "Lx > 0",
            });
        }
        if !(ly > 0.0 && ly.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "Ly",
                value: ly,
                constraint: "Ly > 0",
            });
        }
        if !(h_min > 0.0 && h_min.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "h_min",
                value: h_min,
                constraint: "h_min > 0",
            });
        }
        if !(h_max >= h_min && h_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "h_max",
                value: h_max,
                constraint: "h_max >= h_min",
            });
        }
        Ok(Self { lx, ly, h, h_min, h_max })
    }

    #[inline]
    pub fn lx(&self) -> f64 {
        self.lx
    }

    #[inline]
    pub fn ly(&self) -> f64 {
        self.ly
    }

    #[inline]
    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    #[inline]
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Film height at a planar point (no bound check).
    #[inline]
    pub fn h_at(&self, x: f64, y: f64) -> f64 {
        self.h.eval(x, y)
    }

    /// Film height at a planar point, verified against the declared bounds.
    pub fn h_at_checked(&self, x: f64, y: f64) -> Result<f64> {
        let h = self.h.eval(x, y);
        if h < self.h_min || h > self.h_max || !h.is_finite() {
            return Err(Error::HeightOutOfBounds {
                x,
                y,
                h,
                h_min: self.h_min,
                h_max: self.h_max,
            });
        }
        Ok(h)
    }
}

/// A planar vector field evaluable anywhere in the domain.
#[derive(Clone)]
pub enum PlanarField {
    Zero,
    Constant([f64; 2]),
    /// Arbitrary user-supplied field (e.g. parsed expressions).
    Custom(Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>),
}

impl PlanarField {
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            PlanarField::Zero => [0.0, 0.0],
            PlanarField::Constant(v) => *v,
            PlanarField::Custom(f) => f(x, y),
        }
    }
}

impl fmt::Debug for PlanarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarField::Zero => write!(f, "Zero"),
            PlanarField::Constant(v) => write!(f, "Constant({v:?})"),
            PlanarField::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Planar body forces: `f` drives the velocity equation, `g` the
/// microrotation equation. Both are independent of the transverse variable.
#[derive(Clone, Debug)]
pub struct BodyForces {
    pub f: PlanarField,
    pub g: PlanarField,
}

impl BodyForces {
    pub fn zero() -> Self {
        Self { f: PlanarField::Zero, g: PlanarField::Zero }
    }

    pub fn new(f: PlanarField, g: PlanarField) -> Self {
        Self { f, g }
    }
}
