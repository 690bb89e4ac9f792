//! Command implementations: the solve pipeline with its run manifest, the
//! mobility sweep table, and the verification suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use micro_reynolds::postprocess::{self, DiscrepancyReport};
use micro_reynolds::verify::{self, VerifyLevel};
use micro_reynolds::{
    probe_mobility, reynolds, Error as CoreError, FluidParams, MeanWeight, SlipRegime,
};

use crate::config::{
    ConfigError, FluidSpec, ForcesSpec, GeometrySpec, MeshSpec, OutputSpec, RegimeSpec,
    ResolvedConfig, RunConfig, SolverSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Pipeline failure: configuration problems exit with 2, everything after
/// a valid configuration exits with 3.
pub enum StageFailure {
    Config(ConfigError),
    Runtime { stage: &'static str, message: String },
}

impl StageFailure {
    fn stage(&self) -> &'static str {
        match self {
            StageFailure::Config(_) => "config",
            StageFailure::Runtime { stage, .. } => stage,
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            StageFailure::Config(_) => EXIT_CONFIG,
            StageFailure::Runtime { .. } => EXIT_RUNTIME,
        }
    }
}

/// Machine-readable error record; printed to stderr as a single JSON line.
fn emit_error_json(stage: &str, failure: &StageFailure) {
    let body = match failure {
        StageFailure::Config(e) => serde_json::json!({
            "error": { "stage": stage, "field": e.field, "message": e.message }
        }),
        StageFailure::Runtime { message, .. } => serde_json::json!({
            "error": { "stage": stage, "message": message }
        }),
    };
    eprintln!("{body}");
}

#[derive(Serialize)]
struct StageTime {
    stage: &'static str,
    ms: f64,
}

#[derive(Serialize)]
struct SolveSection {
    mobility_route: &'static str,
    gauge: &'static str,
    iterations: usize,
    /// Final conjugate-gradient residual relative to the deflated load norm.
    relative_residual: f64,
    rhs_norm: f64,
    /// Gauge functional of the returned pressure (zero up to rounding).
    constraint_value: f64,
    /// Worst nodal defect of the discrete conservation statement.
    divergence_residual: f64,
    boundary_flux_weak: f64,
    boundary_flux_midpoint: f64,
    flux_norm: f64,
}

#[derive(Serialize)]
struct ManifestError {
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    message: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure_stage: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ManifestError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a RunConfig>,
    timings_ms: &'a [StageTime],
    #[serde(skip_serializing_if = "Option::is_none")]
    solve: Option<&'a SolveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrepancy: Option<&'a DiscrepancyReport>,
    outputs: &'a [String],
}

/// Accumulated run artifacts; whatever exists at failure time still lands
/// in the manifest.
#[derive(Default)]
pub struct RunState {
    config: Option<RunConfig>,
    timings: Vec<StageTime>,
    solve: Option<SolveSection>,
    discrepancy: Option<DiscrepancyReport>,
    outputs: Vec<String>,
}

impl RunState {
    /// First export path with the given extension, if any.
    pub fn output_with_extension(&self, ext: &str) -> Option<&str> {
        self.outputs.iter().map(String::as_str).find(|p| p.ends_with(ext))
    }
}

fn timed<T>(
    timings: &mut Vec<StageTime>,
    stage: &'static str,
    f: impl FnOnce() -> Result<T, StageFailure>,
) -> Result<T, StageFailure> {
    let start = Instant::now();
    let out = f();
    timings.push(StageTime { stage, ms: start.elapsed().as_secs_f64() * 1e3 });
    out
}

fn runtime(stage: &'static str, e: impl std::fmt::Display) -> StageFailure {
    StageFailure::Runtime { stage, message: e.to_string() }
}

/// Runs the full pipeline for an already-parsed configuration.
pub fn run_pipeline(config: &RunConfig, state: &mut RunState) -> Result<(), StageFailure> {
    state.config = Some(config.clone());
    let resolved: ResolvedConfig = timed(&mut state.timings, "config", || {
        config.resolve().map_err(StageFailure::Config)
    })?;

    timed(&mut state.timings, "prepare", || {
        fs::create_dir_all(&config.output.directory)
            .map_err(|e| runtime("prepare", format!("cannot create output directory: {e}")))
    })?;

    let system = timed(&mut state.timings, "assemble", || {
        reynolds::assemble(
            &resolved.geometry,
            resolved.nx,
            resolved.ny,
            &resolved.params,
            resolved.regime,
            &resolved.forces,
            resolved.source,
        )
        .map_err(|e| runtime("assemble", e))
    })?;

    let (pressure, solve_section) = timed(&mut state.timings, "solve", || {
        let (pressure, stats) =
            system.solve_pressure(&resolved.solver).map_err(|e| runtime("solve", e))?;
        let flux = system.flux_field(&pressure);
        let ones;
        let weight: &[f64] = match resolved.solver.mean_weight {
            MeanWeight::HeightWeighted => system.mass_vector(),
            MeanWeight::Unweighted => {
                ones = vec![1.0; pressure.len()];
                &ones
            }
        };
        let constraint_value: f64 = weight.iter().zip(&pressure).map(|(w, p)| w * p).sum();
        let section = SolveSection {
            mobility_route: resolved.source.label(),
            gauge: match resolved.solver.mean_weight {
                MeanWeight::HeightWeighted => "height-weighted",
                MeanWeight::Unweighted => "unweighted",
            },
            iterations: stats.iterations,
            relative_residual: if stats.rhs_norm > 0.0 {
                stats.residual / stats.rhs_norm
            } else {
                0.0
            },
            rhs_norm: stats.rhs_norm,
            constraint_value,
            divergence_residual: flux.divergence_residual,
            boundary_flux_weak: flux.boundary_flux_weak,
            boundary_flux_midpoint: flux.boundary_flux_midpoint,
            flux_norm: flux.flux_norm,
        };
        Ok((pressure, section))
    })?;
    state.solve = Some(solve_section);

    let field = timed(&mut state.timings, "reconstruct", || {
        postprocess::reconstruct_3d(
            system.mesh(),
            &resolved.geometry,
            &resolved.params,
            resolved.regime,
            &resolved.forces,
            &pressure,
            resolved.nz,
        )
        .map_err(|e| runtime("reconstruct", e))
    })?;

    let written = timed(&mut state.timings, "export", || {
        let mut written = Vec::new();
        if config.output.csv {
            let path = config
                .output
                .directory
                .join(format!("{}.csv", config.output.name));
            postprocess::export::write_csv(&path, &field).map_err(|e| runtime("export", e))?;
            written.push(path.display().to_string());
        }
        if config.output.vtk {
            let path = config
                .output
                .directory
                .join(format!("{}.vtk", config.output.name));
            postprocess::export::write_vtk(&path, &field).map_err(|e| runtime("export", e))?;
            written.push(path.display().to_string());
        }
        Ok(written)
    })?;
    state.outputs = written;

    let report = timed(&mut state.timings, "report", || {
        postprocess::discrepancy_report(
            &resolved.geometry,
            &resolved.params,
            resolved.regime,
            64,
            config.seed,
        )
        .map_err(|e| runtime("report", e))
    })?;
    state.discrepancy = Some(report);

    Ok(())
}

/// Writes the run manifest; to the configured output directory when known,
/// otherwise to `run_manifest.json` in the working directory.
fn write_manifest(state: &RunState, failure: Option<&StageFailure>) -> std::io::Result<PathBuf> {
    let (status, failure_stage, error) = match failure {
        None => ("success", None, None),
        Some(f) => (
            "failed",
            Some(f.stage()),
            Some(match f {
                StageFailure::Config(e) => {
                    ManifestError { field: Some(e.field.clone()), message: e.message.clone() }
                }
                StageFailure::Runtime { message, .. } => {
                    ManifestError { field: None, message: message.clone() }
                }
            }),
        ),
    };
    let manifest = Manifest {
        status,
        failure_stage,
        error,
        config: state.config.as_ref(),
        timings_ms: &state.timings,
        solve: state.solve.as_ref(),
        discrepancy: state.discrepancy.as_ref(),
        outputs: &state.outputs,
    };
    let path = match &state.config {
        Some(cfg) => {
            // Best effort: the directory may be the thing that failed.
            let _ = fs::create_dir_all(&cfg.output.directory);
            cfg.output.directory.join(format!("{}_manifest.json", cfg.output.name))
        }
        None => PathBuf::from("run_manifest.json"),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn load_config(path: &Path) -> Result<RunConfig, StageFailure> {
    let text = fs::read_to_string(path).map_err(|e| {
        StageFailure::Config(ConfigError {
            field: "(config)".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })
    })?;
    RunConfig::from_json(&text).map_err(StageFailure::Config)
}

pub fn cmd_solve(config_path: &Path) -> i32 {
    let mut state = RunState::default();
    let result = load_config(config_path).and_then(|config| run_pipeline(&config, &mut state));
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            emit_error_json(failure.stage(), failure);
            failure.exit_code()
        }
    };
    match write_manifest(&state, result.as_ref().err()) {
        Ok(path) => {
            if code == EXIT_OK {
                println!("run complete; manifest at {}", path.display());
                for out in &state.outputs {
                    println!("wrote {out}");
                }
            }
            code
        }
        Err(e) => {
            eprintln!("failed to write run manifest: {e}");
            EXIT_RUNTIME.max(code)
        }
    }
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda,
    N,
    Rc,
    H,
}

impl SweepAxis {
    fn column(self) -> &'static str {
        match self {
            SweepAxis::Lambda => "lambda",
            SweepAxis::N => "N",
            SweepAxis::Rc => "Rc",
            SweepAxis::H => "h",
        }
    }
}

fn parse_values(values: &str) -> Result<Vec<f64>, ConfigError> {
    let trimmed = values.trim();
    if trimmed.is_empty() {
        return Err(ConfigError { field: "values".into(), message: "empty value list".into() });
    }
    trimmed
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>().map_err(|_| ConfigError {
                field: "values".into(),
                message: format!("'{tok}' is not a number"),
            })
        })
        .collect()
}

/// Classifies a probe failure: invalid parameter values are the caller's
/// input (exit 2), anything else is a solver problem (exit 3).
fn sweep_failure(e: CoreError) -> StageFailure {
    match e {
        CoreError::InvalidParameter { .. } => StageFailure::Config(ConfigError {
            field: "values".into(),
            message: e.to_string(),
        }),
        other => runtime("sweep", other),
    }
}

pub fn cmd_sweep(config_path: &Path, axis: SweepAxis, values: &str) -> i32 {
    match sweep_table(config_path, axis, values) {
        Ok(table) => {
            print!("{table}");
            EXIT_OK
        }
        Err(failure) => {
            emit_error_json("sweep", &failure);
            failure.exit_code()
        }
    }
}

fn sweep_table(config_path: &Path, axis: SweepAxis, values: &str) -> Result<String, StageFailure> {
    let config = load_config(config_path)?;
    let resolved = config.resolve().map_err(StageFailure::Config)?;
    let values = parse_values(values).map_err(StageFailure::Config)?;

    // Mobilities are probed at the domain-center height; an `h` sweep
    // substitutes the height directly.
    let h_center = resolved
        .geometry
        .h_at(0.5 * resolved.geometry.lx(), 0.5 * resolved.geometry.ly());

    let mut out = String::new();
    match axis {
        SweepAxis::Lambda => {
            out.push_str("lambda,M,G,gap_to_noslip\n");
            let base = probe_mobility(SlipRegime::NoSlip, h_center, &resolved.params)
                .map_err(sweep_failure)?;
            for &v in &values {
                let regime = SlipRegime::Partial { lambda: v };
                regime.validate().map_err(sweep_failure)?;
                let resp =
                    probe_mobility(regime, h_center, &resolved.params).map_err(sweep_failure)?;
                out.push_str(&format!(
                    "{v:.16e},{:.16e},{:.16e},{:.16e}\n",
                    resp.m,
                    resp.g,
                    (resp.m - base.m).abs()
                ));
            }
        }
        SweepAxis::N | SweepAxis::Rc => {
            out.push_str(&format!("{},M,G\n", axis.column()));
            for &v in &values {
                let params = match axis {
                    SweepAxis::N => FluidParams::new(v, resolved.params.rc()),
                    _ => FluidParams::new(resolved.params.n(), v),
                }
                .map_err(sweep_failure)?;
                let resp =
                    probe_mobility(resolved.regime, h_center, &params).map_err(sweep_failure)?;
                out.push_str(&format!("{v:.16e},{:.16e},{:.16e}\n", resp.m, resp.g));
            }
        }
        SweepAxis::H => {
            out.push_str("h,M,G\n");
            for &v in &values {
                let resp =
                    probe_mobility(resolved.regime, v, &resolved.params).map_err(sweep_failure)?;
                out.push_str(&format!("{v:.16e},{:.16e},{:.16e}\n", resp.m, resp.g));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Verify
// ---------------------------------------------------------------------------

/// Configuration used by the determinism criterion: a representative run
/// with every pipeline stage active, CSV export on.
fn determinism_config(dir: &Path) -> RunConfig {
    RunConfig {
        fluid: FluidSpec { n: 0.5, rc: 0.75 },
        regime: RegimeSpec { kind: Some("partial".into()), lambda: Some(1.0), gamma: None },
        geometry: GeometrySpec {
            lx: 1.0,
            ly: 1.0,
            height: "1 + 0.3*sin(2*pi*x)*sin(2*pi*y)".into(),
            h_min: 0.5,
            h_max: 2.0,
        },
        forces: ForcesSpec {
            f: ["sin(2*pi*y)".into(), "cos(2*pi*x)".into()],
            g: ["0.3".into(), "-0.4".into()],
        },
        mesh: MeshSpec { nx: 12, ny: 12, nz: 5 },
        solver: SolverSpec::default(),
        output: OutputSpec {
            directory: dir.to_path_buf(),
            name: "determinism".into(),
            csv: true,
            vtk: false,
        },
        seed: 42,
    }
}

/// Criterion 11: two identical solve runs must produce byte-identical CSV.
pub fn determinism_check() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| format!("cannot create temp dir: {e}"))?;
    let mut bytes = Vec::new();
    for sub in ["a", "b"] {
        let dir = tmp.path().join(sub);
        let config = determinism_config(&dir);
        let mut state = RunState::default();
        run_pipeline(&config, &mut state).map_err(|f| {
            let stage = f.stage();
            match f {
                StageFailure::Config(e) => format!("pipeline rejected config: {e}"),
                StageFailure::Runtime { message, .. } => format!("{stage} failed: {message}"),
            }
        })?;
        let csv = state
            .output_with_extension(".csv")
            .ok_or_else(|| "no CSV produced".to_string())?;
        bytes.push(fs::read(csv).map_err(|e| format!("cannot read {csv}: {e}"))?);
    }
    if bytes[0] == bytes[1] {
        Ok(format!("two runs, {} bytes each, byte-identical", bytes[0].len()))
    } else {
        Err("CSV outputs differ between identical runs".to_string())
    }
}

pub fn cmd_verify(level: VerifyLevel) -> i32 {
    let mut all_passed = true;
    for r in verify::run_all(level) {
        all_passed &= r.passed;
        println!(
            "criterion {:02} {} {} — {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    let (passed, detail) = match determinism_check() {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    all_passed &= passed;
    println!(
        "criterion 11 {} identical configs export byte-identical fields — {}",
        if passed { "PASS" } else { "FAIL" },
        detail
    );
    if all_passed {
        println!("verification passed (11/11)");
        EXIT_OK
    } else {
        println!("verification FAILED");
        EXIT_VERIFY_FAILED
    }
}
