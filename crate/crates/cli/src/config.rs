//! JSON run configuration: schema, validation, and resolution into the
//! solver's domain types. Unknown fields are rejected, and every
//! validation error names the offending field so scripts can react.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use micro_reynolds::{
    regime_from_gamma, BodyForces, FilmGeometry, FluidParams, HeightField, MeanWeight,
    MobilitySource, PlanarField, SlipRegime, SolverOptions,
};

use crate::expr;

/// Configuration error tied to a named field; maps to exit code 2.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn field_err(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError { field: field.to_string(), message: message.to_string() }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub fluid: FluidSpec,
    pub regime: RegimeSpec,
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub forces: ForcesSpec,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    pub output: OutputSpec,
    /// Seed for the discrepancy-report sampler recorded in the manifest.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidSpec {
    /// Coupling number N, in (0, 1).
    pub n: f64,
    /// Microrotation number Rc, positive.
    pub rc: f64,
}

/// Slip regime: either `kind` = "noslip" | "perfect" | "partial" (with
/// `lambda` for partial), or `gamma` + `lambda` for the exponent-based
/// selection (gamma > -1 perfect, = -1 partial, < -1 no slip).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub lx: f64,
    pub ly: f64,
    /// Gap-height expression of (x, y), e.g. `"1 + 0.3*sin(2*pi*x)*sin(2*pi*y)"`.
    pub height: String,
    /// Declared positive lower bound for the height over the domain.
    pub h_min: f64,
    /// Declared upper bound for the height over the domain.
    pub h_max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcesSpec {
    /// In-plane body-force components `f = (f1(x,y), f2(x,y))`.
    pub f: [String; 2],
    /// In-plane couple components `g = (g1(x,y), g2(x,y))`.
    pub g: [String; 2],
}

impl Default for ForcesSpec {
    fn default() -> Self {
        Self { f: ["0".into(), "0".into()], g: ["0".into(), "0".into()] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    /// Pressure-mesh cells along x (at least 4).
    pub nx: usize,
    /// Pressure-mesh cells along y (at least 4).
    pub ny: usize,
    /// Through-thickness layers of the reconstructed 3-D field (at least 2).
    pub nz: usize,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MobilitySourceSpec {
    /// Quadrature-backed linear-response mobilities (default; authoritative).
    #[default]
    Probe,
    /// Explicit coefficient formulas, for comparison runs.
    Printed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    /// Relative conjugate-gradient residual target.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub mobility_source: MobilitySourceSpec,
    /// true: h-weighted zero-mean pressure gauge (default); false: plain
    /// nodal mean, for comparison.
    pub weighted_mean: bool,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 10_000,
            mobility_source: MobilitySourceSpec::Probe,
            weighted_mean: true,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory for exported fields and the run manifest (created if absent).
    pub directory: PathBuf,
    /// Base name of the run; files are `<name>.csv`, `<name>.vtk`,
    /// `<name>_manifest.json`.
    pub name: String,
    #[serde(default = "default_true")]
    pub csv: bool,
    #[serde(default = "default_true")]
    pub vtk: bool,
}

/// Config resolved into solver-ready domain objects.
#[derive(Debug)]
pub struct ResolvedConfig {
    pub params: FluidParams,
    pub regime: SlipRegime,
    pub geometry: FilmGeometry,
    pub forces: BodyForces,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub solver: SolverOptions,
    pub source: MobilitySource,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| field_err("(config)", e))
    }

    pub fn resolve(&self) -> Result<ResolvedConfig, ConfigError> {
        let params = FluidParams::new(self.fluid.n, self.fluid.rc)
            .map_err(|e| field_err("fluid", e))?;
        let regime = self.regime.resolve()?;

        let g = &self.geometry;
        let height_expr =
            expr::parse(&g.height).map_err(|e| field_err("geometry.height", e))?;
        let height =
            HeightField::Custom(Arc::new(move |x: f64, y: f64| height_expr.eval(x, y)));
        let geometry = FilmGeometry::new(g.lx, g.ly, height, g.h_min, g.h_max)
            .map_err(|e| field_err("geometry", e))?;

        let forces = BodyForces::new(
            planar_field(&self.forces.f, "forces.f")?,
            planar_field(&self.forces.g, "forces.g")?,
        );

        if self.mesh.nx < 4 || self.mesh.ny < 4 {
            return Err(field_err("mesh", "nx and ny must be at least 4"));
        }
        if self.mesh.nz < 2 {
            return Err(field_err("mesh.nz", "at least 2 layers are required"));
        }

        let s = &self.solver;
        if !(s.tolerance > 0.0 && s.tolerance.is_finite()) {
            return Err(field_err("solver.tolerance", "must be positive and finite"));
        }
        if s.max_iterations == 0 {
            return Err(field_err("solver.max_iterations", "must be at least 1"));
        }
        let solver = SolverOptions {
            tol: s.tolerance,
            max_iterations: s.max_iterations,
            mean_weight: if s.weighted_mean {
                MeanWeight::HeightWeighted
            } else {
                MeanWeight::Unweighted
            },
        };
        let source = match s.mobility_source {
            MobilitySourceSpec::Probe => MobilitySource::Probe,
            MobilitySourceSpec::Printed => MobilitySource::Printed,
        };

        if self.output.name.is_empty() {
            return Err(field_err("output.name", "must not be empty"));
        }
        if self.output.name.contains(['/', '\\']) {
            return Err(field_err("output.name", "must not contain path separators"));
        }

        Ok(ResolvedConfig {
            params,
            regime,
            geometry,
            forces,
            nx: self.mesh.nx,
            ny: self.mesh.ny,
            nz: self.mesh.nz,
            solver,
            source,
        })
    }
}

impl RegimeSpec {
    pub fn resolve(&self) -> Result<SlipRegime, ConfigError> {
        match (self.kind.as_deref(), self.gamma) {
            (Some(_), Some(_)) => {
                Err(field_err("regime", "give either `kind` or `gamma`, not both"))
            }
            (None, Some(gamma)) => {
                let lambda = self.lambda.ok_or_else(|| {
                    field_err("regime.lambda", "required alongside `gamma`")
                })?;
                regime_from_gamma(gamma, lambda).map_err(|e| field_err("regime", e))
            }
            (Some("noslip"), None) | (Some("perfect"), None) => {
                if self.lambda.is_some() {
                    return Err(field_err(
                        "regime.lambda",
                        "only valid with kind = \"partial\"",
                    ));
                }
                Ok(match self.kind.as_deref() {
                    Some("noslip") => SlipRegime::NoSlip,
                    _ => SlipRegime::Perfect,
                })
            }
            (Some("partial"), None) => {
                let lambda = self
                    .lambda
                    .ok_or_else(|| field_err("regime.lambda", "required for partial slip"))?;
                let regime = SlipRegime::Partial { lambda };
                regime.validate().map_err(|e| field_err("regime.lambda", e))?;
                Ok(regime)
            }
            (Some(other), None) => Err(field_err(
                "regime.kind",
                format!("unknown kind '{other}' (expected noslip, perfect, or partial)"),
            )),
            (None, None) => Err(field_err("regime", "give `kind` or `gamma`")),
        }
    }
}

fn planar_field(components: &[String; 2], field: &str) -> Result<PlanarField, ConfigError> {
    let e0 = expr::parse(&components[0]).map_err(|e| field_err(&format!("{field}[0]"), e))?;
    let e1 = expr::parse(&components[1]).map_err(|e| field_err(&format!("{field}[1]"), e))?;
    Ok(PlanarField::Custom(Arc::new(move |x: f64, y: f64| [e0.eval(x, y), e1.eval(x, y)])))
}
