//! Batch front end: JSON run configuration, the five subcommands and the
//! JSON/CSV result records.
//!
//! ```text
//! slipstokes <mobility|swim|certify|validate|converge> --config run.json [--output out.json] [--threads n]
//! ```
//!
//! Exit codes: 0 success (warnings are recorded in the output), 2 invalid
//! configuration or input files, 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use nalgebra::{Matrix3, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{load_triangle_mesh, make_parametric_surface, Shape, SurfaceKind, SurfaceMesh};
use crate::mobility::{
    invert_grand_matrix, swim_velocity, thrust_projection, GrandMatrix, Mobility, ThrustProjection, THRUST_NONZERO_TOL,
};
use crate::selfprop::{ns_certificate, solve_with, NsCertificate, SolverConfig, Thresholds};
use crate::slip_bvp::{BoundaryData, SolveReport, DEFAULT_SVD_TOL};
use crate::stokes::{SourcePlacement, DEFAULT_SHRINK, DEFAULT_STRIDE};
use crate::validation::{
    calibrate, convergence_study, identity_suite, sphere_resistance_checks, CheckResult, ConvergenceTable,
    ShellQuadrature, IDENTITY_TOL,
};

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "SLIPSTOKES_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Grand matrix and its blocks only.
    Mobility,
    /// Full Stokes pipeline for the configured boundary data.
    Swim,
    /// `swim` plus the conditional Navier-Stokes certificate.
    Certify,
    /// Identity checks and analytic oracles.
    Validate,
    /// Convergence table as CSV.
    Converge,
}

#[derive(Debug, Parser)]
#[command(
    name = "slipstokes",
    version,
    about = "Self-propelled rigid bodies in Stokes flow with Navier slip"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the output path of the configuration; stdout when neither is set.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Sphere {
        radius: f64,
    },
    Spheroid {
        a_axis: f64,
        c_axis: f64,
    },
    /// Closed triangle mesh in OFF or OBJ format, relative to the config file.
    Mesh {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// Trace of the elementary rigid motion `ẽ_k`, `k = 1..6`.
    RigidTrace(usize),
    /// Tangential squirmer data `B₁ sin θ θ̂`.
    Squirmer { b1: f64 },
    /// Uniform normal data with total flux `phi`.
    Source { phi: f64 },
    /// Per-node CSV with columns `node,n,t1,t2`, relative to the config file.
    Custom { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub resolution: usize,
    pub shrink: f64,
    pub stride: usize,
    pub placement: SourcePlacement,
    pub svd_tol: f64,
    pub propulsion_tol: f64,
    /// Truncation radius of the volume integrals in `validate`.
    pub r_t: f64,
    pub quadrature: ShellQuadrature,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            resolution: 24,
            shrink: DEFAULT_SHRINK,
            stride: DEFAULT_STRIDE,
            placement: SourcePlacement::default(),
            svd_tol: DEFAULT_SVD_TOL,
            propulsion_tol: 1e-3,
            r_t: 20.0,
            quadrature: ShellQuadrature::default(),
        }
    }
}

impl SolverSection {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            shrink: self.shrink,
            stride: self.stride,
            placement: self.placement,
            svd_tol: self.svd_tol,
            propulsion_tol: self.propulsion_tol,
        }
    }
}

fn default_resolutions() -> Vec<usize> {
    vec![9, 18, 35]
}

fn default_calibration_alphas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 5.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    pub alpha: f64,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Resolutions of the `converge` subcommand.
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<usize>,
    /// Friction coefficients of the slip calibration in `validate`.
    #[serde(default = "default_calibration_alphas")]
    pub calibration_alphas: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Adds wall-clock timing to the record, which makes it run-dependent.
    #[serde(default)]
    pub record_timing: bool,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let GeometrySpec::Mesh { path } = &mut self.geometry {
            fix(path);
        }
        if let Some(DataSpec::Custom { path }) = &mut self.data {
            fix(path);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_error(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match &self.geometry {
            GeometrySpec::Sphere { radius } => positive("radius", *radius)?,
            GeometrySpec::Spheroid { a_axis, c_axis } => {
                positive("a_axis", *a_axis)?;
                positive("c_axis", *c_axis)?;
            }
            GeometrySpec::Mesh { .. } => {}
        }
        positive("alpha", self.alpha)?;
        if !(self.re >= 0.0 && self.re.is_finite()) {
            return Err(config_error(format!("re must be >= 0, got {}", self.re)));
        }
        let s = &self.solver;
        if s.resolution < 8 {
            return Err(config_error(format!("resolution must be >= 8, got {}", s.resolution)));
        }
        if !(s.shrink > 0.0 && s.shrink < 1.0) {
            return Err(config_error(format!("shrink must be in (0, 1), got {}", s.shrink)));
        }
        if s.stride == 0 {
            return Err(config_error("stride must be >= 1"));
        }
        if !(s.svd_tol > 0.0 && s.svd_tol < 1.0) {
            return Err(config_error(format!("svd_tol must be in (0, 1), got {}", s.svd_tol)));
        }
        positive("propulsion_tol", s.propulsion_tol)?;
        positive("r_t", s.r_t)?;
        if s.quadrature.radial == 0 || s.quadrature.polar == 0 {
            return Err(config_error("quadrature node counts must be >= 1"));
        }
        positive("c1_user", self.thresholds.c1_user)?;
        positive("c2_user", self.thresholds.c2_user)?;
        if let Some(DataSpec::RigidTrace(k)) = self.data {
            if !(1..=6).contains(&k) {
                return Err(config_error(format!("rigid_trace index must be in 1..=6, got {k}")));
            }
        }
        if let Some(DataSpec::Squirmer { b1 }) = self.data {
            if !b1.is_finite() {
                return Err(config_error("squirmer b1 must be finite"));
            }
        }
        if let Some(DataSpec::Source { phi }) = self.data {
            if !phi.is_finite() {
                return Err(config_error("source phi must be finite"));
            }
        }
        if self.resolutions.len() < 3 || self.resolutions.iter().any(|&r| r < 8) {
            return Err(config_error("resolutions needs at least three entries, each >= 8"));
        }
        for &a in &self.calibration_alphas {
            positive("calibration alpha", a)?;
        }
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<SurfaceMesh> {
        match &self.geometry {
            GeometrySpec::Sphere { radius } => {
                make_parametric_surface(&Shape::Sphere { radius: *radius }, self.solver.resolution)
            }
            GeometrySpec::Spheroid { a_axis, c_axis } => make_parametric_surface(
                &Shape::Spheroid {
                    a_axis: *a_axis,
                    c_axis: *c_axis,
                },
                self.solver.resolution,
            ),
            GeometrySpec::Mesh { path } => load_triangle_mesh(path),
        }
    }

    pub fn build_data(&self, mesh: &SurfaceMesh) -> Result<Option<BoundaryData>> {
        Ok(match &self.data {
            None => None,
            Some(DataSpec::RigidTrace(k)) => Some(BoundaryData::rigid_trace(mesh, *k)?),
            Some(DataSpec::Squirmer { b1 }) => Some(BoundaryData::squirmer(mesh, *b1)),
            Some(DataSpec::Source { phi }) => Some(BoundaryData::uniform_source(mesh, *phi)),
            Some(DataSpec::Custom { path }) => Some(BoundaryData::from_csv(mesh, path)?),
        })
    }
}

type Mat3Rows = [[f64; 3]; 3];
type Mat6Rows = [[f64; 6]; 6];

fn rows3(m: &Matrix3<f64>) -> Mat3Rows {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn rows6(m: &Matrix6<f64>) -> Mat6Rows {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub nodes: usize,
    pub sources: usize,
    pub area: f64,
    pub volume: f64,
    pub centroid: [f64; 3],
    pub min_source_distance: f64,
}

/// Matrices are stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobilityRecord {
    pub m: Mat6Rows,
    pub m_symmetric: Mat6Rows,
    pub k: Mat3Rows,
    pub s: Mat3Rows,
    pub r: Mat3Rows,
    pub a: Mat3Rows,
    pub b: Mat3Rows,
    pub symmetry_defect: f64,
    pub min_eigenvalue: f64,
    /// Block-formula inverse against a direct inverse.
    pub inverse_difference: f64,
    pub gram_singular_values: [f64; 6],
    pub tangential_gram_singular_values: [f64; 6],
}

impl MobilityRecord {
    fn new(mobility: &Mobility) -> Result<Self> {
        let gm: &GrandMatrix = &mobility.grand;
        Ok(Self {
            m: rows6(&gm.raw),
            m_symmetric: rows6(&gm.m),
            k: rows3(&gm.k),
            s: rows3(&gm.s),
            r: rows3(&gm.r),
            a: rows3(&gm.a),
            b: rows3(&gm.b),
            symmetry_defect: gm.symmetry_defect,
            min_eigenvalue: gm.min_eigenvalue,
            inverse_difference: invert_grand_matrix(gm)?.relative_difference,
            gram_singular_values: mobility.basis.gram_singular_values,
            tangential_gram_singular_values: mobility.basis.tangential_gram_singular_values,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwimRecord {
    pub wrench: [f64; 6],
    pub xi: [f64; 3],
    pub omega: [f64; 3],
    pub system_residual: f64,
    pub thrust_projection: ThrustProjection,
    /// `(ξ, ω)` from `M c = β` with `β` from the lifting field.
    pub coefficients: [f64; 6],
    pub beta: [f64; 6],
    /// `|c − (ξ, ω)|` between the two solution routes.
    pub code_path_difference: f64,
    pub force_residual: f64,
    pub torque_residual: f64,
    pub dissipation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledReport {
    pub label: String,
    #[serde(flatten)]
    pub report: SolveReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: Command,
    pub config: RunConfig,
    pub mesh: MeshSummary,
    pub mobility: Option<MobilityRecord>,
    pub swim: Option<SwimRecord>,
    pub certificate: Option<NsCertificate>,
    pub checks: Option<Vec<CheckResult>>,
    pub convergence: Option<ConvergenceTable>,
    pub residuals: Vec<LabelledReport>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_seconds: Option<f64>,
}

/// Output of one run.
#[derive(Clone, Debug, PartialEq)]
pub enum RunOutput {
    Record(Box<ResultRecord>),
    Csv(String),
}

impl RunOutput {
    pub fn render(&self) -> Result<String> {
        match self {
            RunOutput::Record(r) => Ok(serde_json::to_string_pretty(r)? + "\n"),
            RunOutput::Csv(s) => Ok(s.clone()),
        }
    }
}

fn mesh_summary(mesh: &SurfaceMesh, sources: usize, min_distance: f64) -> MeshSummary {
    let c = mesh.centroid();
    MeshSummary {
        nodes: mesh.len(),
        sources,
        area: mesh.area(),
        volume: mesh.volume(),
        centroid: [c.x, c.y, c.z],
        min_source_distance: min_distance,
    }
}

/// Runs one subcommand. Errors carry the exit-code category through
/// [`Error::Config`] versus everything else.
pub fn run(command: Command, config: &RunConfig) -> Result<RunOutput> {
    let start = Instant::now();
    config.validate()?;
    let mesh = config.build_mesh().map_err(as_config_error)?;
    let data = config.build_data(&mesh).map_err(as_config_error)?;
    if matches!(command, Command::Swim | Command::Certify) && data.is_none() {
        return Err(config_error(format!("{command:?} needs a `data` section")));
    }
    let solver_config = config.solver.solver_config();

    if command == Command::Converge {
        let shape = match config.geometry {
            GeometrySpec::Sphere { radius } => Shape::Sphere { radius },
            GeometrySpec::Spheroid { a_axis, c_axis } => Shape::Spheroid { a_axis, c_axis },
            GeometrySpec::Mesh { .. } => {
                return Err(config_error("converge needs a parametric geometry"));
            }
        };
        let table = convergence_study(&shape, config.alpha, &config.resolutions, &solver_config)?;
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        for w in &table.warnings {
            log::warn!("{w}");
        }
        return Ok(RunOutput::Csv(String::from_utf8(buf).expect("csv output is utf-8")));
    }

    let solver = solver_config.build_solver(&mesh, config.alpha)?;
    let mobility = Mobility::compute(&solver)?;
    let mut warnings = Vec::new();
    if solver.sources().is_ill_conditioned() {
        warnings.push("sources lie close to the surface; the collocation system is ill-conditioned".to_string());
    }
    let mut residuals: Vec<LabelledReport> = mobility
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| LabelledReport {
            label: format!("auxiliary {}", i + 1),
            report: *r,
        })
        .collect();
    let mut record = ResultRecord {
        command,
        config: config.clone(),
        mesh: mesh_summary(&mesh, solver.sources().len(), solver.sources().min_surface_distance()),
        mobility: Some(MobilityRecord::new(&mobility)?),
        swim: None,
        certificate: None,
        checks: None,
        convergence: None,
        residuals: Vec::new(),
        warnings: Vec::new(),
        timing_seconds: None,
    };

    if let (Command::Swim | Command::Certify, Some(v_star)) = (command, &data) {
        let w = mobility.wrench(v_star, &mesh)?;
        let swim = swim_velocity(&mobility.grand, &w);
        let projection = thrust_projection(v_star, &mobility.basis, &mesh, THRUST_NONZERO_TOL)?;
        let sol = solve_with(&solver, &mobility, v_star, solver_config.propulsion_tol)?;
        if let Some(msg) = &sol.accuracy_warning {
            warnings.push(msg.clone());
        }
        residuals.push(LabelledReport {
            label: "lifting".into(),
            report: sol.lifting_report,
        });
        let z = [
            swim.xi.x,
            swim.xi.y,
            swim.xi.z,
            swim.omega.x,
            swim.omega.y,
            swim.omega.z,
        ];
        let diff = sol
            .coefficients
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        record.swim = Some(SwimRecord {
            wrench: std::array::from_fn(|i| w.w[i]),
            xi: [swim.xi.x, swim.xi.y, swim.xi.z],
            omega: [swim.omega.x, swim.omega.y, swim.omega.z],
            system_residual: swim.system_residual,
            thrust_projection: projection,
            coefficients: sol.coefficients,
            beta: sol.beta,
            code_path_difference: diff,
            force_residual: sol.force_residual,
            torque_residual: sol.torque_residual,
            dissipation: sol.dissipation,
        });
        if command == Command::Certify {
            record.certificate = Some(ns_certificate(
                config.re,
                v_star,
                &mesh,
                &mobility.grand,
                &w,
                config.thresholds,
            )?);
        }
    }

    if command == Command::Validate {
        let mut checks = identity_suite(
            &mobility,
            &mesh,
            config.alpha,
            config.solver.r_t,
            config.solver.quadrature,
            IDENTITY_TOL,
        )?;
        let gm = &mobility.grand;
        checks.push(CheckResult::compare(
            "symmetry defect",
            gm.symmetry_defect,
            0.0,
            Some(1.0),
            1e-3,
        ));
        let inv = invert_grand_matrix(gm)?;
        checks.push(CheckResult::compare(
            "block inverse",
            inv.relative_difference,
            0.0,
            Some(1.0),
            1e-10,
        ));
        let mut pd = CheckResult::compare("min eigenvalue > 0", gm.min_eigenvalue, 0.0, Some(1.0), 0.0);
        pd.relative_error = (-gm.min_eigenvalue).max(0.0) / gm.m.norm();
        pd.passed = gm.min_eigenvalue > 0.0;
        checks.push(pd);
        if let SurfaceKind::Parametric(Shape::Sphere { radius }) = mesh.kind() {
            checks.extend(sphere_resistance_checks(gm, *radius, config.alpha, 0.01)?);
            let mut grands = Vec::new();
            for &alpha in &config.calibration_alphas {
                let s = solver_config.build_solver(&mesh, alpha)?;
                grands.push(Mobility::compute(&s)?.grand);
            }
            let cal = calibrate(*radius, &config.calibration_alphas, &grands, 0.05);
            for (alpha, g) in config.calibration_alphas.iter().zip(&grands) {
                for mut c in sphere_resistance_checks(g, *radius, *alpha, 0.02)? {
                    c.name = format!("alpha={alpha} {}", c.name);
                    checks.push(c);
                }
            }
            checks.push(cal.check);
        }
        for c in checks.iter().filter(|c| !c.passed) {
            warnings.push(format!(
                "check `{}` failed: relative error {:e}",
                c.name, c.relative_error
            ));
        }
        record.checks = Some(checks);
    }

    if command == Command::Mobility {
        residuals.truncate(6);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    record.residuals = residuals;
    record.warnings = warnings;
    if config.record_timing {
        record.timing_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(RunOutput::Record(Box::new(record)))
}

fn as_config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Exit code of an error: 2 for configuration and input problems, 3 otherwise.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        _ => 3,
    }
}

/// Resolves the thread count: flag, then environment, then all cores.
pub fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(config_error("--threads must be >= 1"))
        } else {
            Ok(n)
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(config_error(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Configures rayon and the dense linear algebra for `n` threads.
pub fn configure_threads(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::LinearAlgebra(format!("thread pool: {e}")))?;
    faer::set_global_parallelism(if n == 1 { faer::Par::Seq } else { faer::Par::rayon(n) });
    Ok(())
}

fn execute(args: &Args) -> Result<()> {
    let threads = thread_count(args.threads)?;
    let config = RunConfig::from_path(&args.config)?;
    configure_threads(threads)?;
    let output = run(args.command, &config)?;
    let text = output.render()?;
    match args.output.as_ref().or(config.output.as_ref()) {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Entry point of the binary.
pub fn main_with_args(args: Args) -> ExitCode {
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(r#"{"geometry": {"sphere": {"radius": 1.0}}, "alpha": 1e6}"#).unwrap();
        assert_eq!(c.solver, SolverSection::default());
        assert_eq!(c.re, 0.0);
        assert!(c.data.is_none());
    }

    #[test]
    fn presets_parse() {
        for data in [
            r#"{"rigid_trace": 3}"#,
            r#"{"squirmer": {"b1": 1.0}}"#,
            r#"{"source": {"phi": 2.0}}"#,
            r#"{"custom": {"path": "d.csv"}}"#,
        ] {
            let text = format!(r#"{{"geometry": {{"sphere": {{"radius": 1.0}}}}, "alpha": 1, "data": {data}}}"#);
            assert!(parse(&text).is_ok(), "{data}");
        }
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_rejected() {
        assert!(parse(r#"{"geometry": {"sphere": {"radius": 1.0}}, "alpha": 1, "bogus": 1}"#).is_err());
        assert!(parse(r#"{"geometry": {"sphere": {"radius": 1.0}}, "alpha": -1}"#).is_err());
        assert!(parse(r#"{"geometry": {"sphere": {"radius": 1.0}}, "alpha": 1, "re": -2}"#).is_err());
        assert!(parse(r#"{"geometry": {"sphere": {"radius": 1.0}}, "alpha": 1, "solver": {"shrink": 1.5}}"#).is_err());
        assert!(parse(r#"{"geometry": {"sphere": {"radius": 1.0}}, "alpha": 1, "data": {"rigid_trace": 7}}"#).is_err());
        assert!(parse(r#"{"geometry": {"cube": {"side": 1.0}}, "alpha": 1}"#).is_err());
    }

    #[test]
    fn config_round_trips() {
        let c = parse(r#"{"geometry": {"spheroid": {"a_axis": 1.0, "c_axis": 2.0}}, "alpha": 3, "data": {"squirmer": {"b1": 0.5}}}"#).unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&config_error("x")), 2);
        assert_eq!(exit_code(&Error::DegenerateSystem), 3);
    }
}
