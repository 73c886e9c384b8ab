//! Executable checks: reciprocal and energy identities, classical sphere and
//! squirmer oracles, convergence studies and the slip-length calibration.
//!
//! Volume integrals over `Ω ∩ B_{R_t}` use a star-shaped shell rule around
//! the centroid: Gauss–Legendre in `t = 1/r` between the body surface and
//! `R_t`, Gauss–Legendre in `cos θ` and the trapezoid rule in `φ`. The part
//! of the domain beyond `R_t` is accounted for by the flux through `S_{R_t}`,
//! which the divergence theorem makes exact:
//!
//! ```text
//!   ∫_{∂Ω} H^(i)·g^(j) dS = 2∫_{Ω_R} D(H^(i)):D(H^(j)) dx − ∫_{S_R} H^(i)·T(H^(j)) x̂ dS.
//! ```

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{elementary_rigid_motion, make_parametric_surface, tangential_part, Shape, SurfaceMesh, Vec3};
use crate::mobility::{GrandMatrix, Mobility, ThrustBasis};
use crate::quadrature::{gauss_legendre, gauss_legendre_on, pairwise_sum};
use crate::selfprop::SolverConfig;
use crate::stokes::FlowField;

/// Default tolerance of the identity checks.
pub const IDENTITY_TOL: f64 = 0.03;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Magnitude of the far-field correction for truncated volume integrals.
    pub tail_bound: Option<f64>,
    /// Relative error without the far-field correction.
    pub uncorrected_error: Option<f64>,
}

impl CheckResult {
    /// Compares `lhs` and `rhs` relative to `scale` (`max(|lhs|, |rhs|)`
    /// when `scale` is `None`).
    pub fn compare(name: impl Into<String>, lhs: f64, rhs: f64, scale: Option<f64>, tolerance: f64) -> Self {
        let scale = scale.unwrap_or_else(|| lhs.abs().max(rhs.abs()));
        let diff = (lhs - rhs).abs();
        let relative_error = if diff == 0.0 { 0.0 } else { diff / scale };
        Self {
            name: name.into(),
            lhs,
            rhs,
            relative_error,
            tolerance,
            passed: relative_error <= tolerance,
            tail_bound: None,
            uncorrected_error: None,
        }
    }
}

/// Point density of the shell rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShellQuadrature {
    pub radial: usize,
    /// Gauss–Legendre nodes in `cos θ`; twice as many azimuths are used.
    pub polar: usize,
}

impl Default for ShellQuadrature {
    fn default() -> Self {
        Self { radial: 24, polar: 24 }
    }
}

struct AngularRule {
    dirs: Vec<Vec3>,
    weights: Vec<f64>,
}

fn angular_rule(polar: usize) -> AngularRule {
    let (us, wu) = gauss_legendre(polar);
    let n_phi = 2 * polar;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut dirs = Vec::with_capacity(polar * n_phi);
    let mut weights = Vec::with_capacity(polar * n_phi);
    for (u, w) in us.iter().zip(&wu) {
        let s = (1.0 - u * u).sqrt();
        for k in 0..n_phi {
            let phi = (k as f64 + 0.5) * dphi;
            dirs.push(Vec3::new(s * phi.cos(), s * phi.sin(), *u));
            weights.push(w * dphi);
        }
    }
    AngularRule { dirs, weights }
}

/// Strains of the six auxiliary fields on a truncated exterior shell, plus
/// the far-sphere data needed for the correction term.
pub struct IdentityEvaluator<'a> {
    basis: &'a ThrustBasis,
    mesh: &'a SurfaceMesh,
    r_t: f64,
    /// `2 ∫_{Ω_R} D(H^i):D(H^j)`.
    volume: [[f64; 6]; 6],
    /// `∫_{S_R} H^i · T(H^j) x̂`.
    far: [[f64; 6]; 6],
    /// `∫_{∂Ω} H^i · g^j`.
    boundary: [[f64; 6]; 6],
}

fn pair_integral<A: Sync, B: Sync>(a: &[A], b: &[B], w: &[f64], f: impl Fn(&A, &B) -> f64 + Sync) -> f64 {
    let terms: Vec<f64> = a.par_iter().zip(b).zip(w).map(|((x, y), w)| w * f(x, y)).collect();
    pairwise_sum(&terms)
}

impl<'a> IdentityEvaluator<'a> {
    pub fn new(basis: &'a ThrustBasis, mesh: &'a SurfaceMesh, r_t: f64, quad: ShellQuadrature) -> Result<Self> {
        let diameter = 2.0 * mesh.outer_radius();
        if !(r_t > 2.0 * diameter) || !r_t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "truncation radius {r_t} must exceed twice the body diameter {diameter}"
            )));
        }
        if quad.radial == 0 || quad.polar == 0 {
            return Err(Error::InvalidParameter(
                "shell quadrature needs at least one node per direction".into(),
            ));
        }
        let fields = &basis.aux_fields;
        let centre = mesh.centroid();
        let ang = angular_rule(quad.polar);

        // Shell points and weights; r = 1/t so dr r² = t⁻⁴ dt.
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (dir, wa) in ang.dirs.iter().zip(&ang.weights) {
            let rb = mesh.radial_extent(dir).ok_or_else(|| {
                Error::InvalidGeometry(format!("body is not star-shaped about its centroid along {dir:?}"))
            })?;
            let (ts, wt) = gauss_legendre_on(quad.radial, 1.0 / r_t, 1.0 / rb);
            for (t, w) in ts.iter().zip(&wt) {
                points.push(centre + dir * (1.0 / t));
                weights.push(wa * w / t.powi(4));
            }
        }
        let strains: Vec<Vec<Matrix3<f64>>> = fields
            .iter()
            .map(|h| points.par_iter().map(|x| h.strain(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;

        let far_points: Vec<Vec3> = ang.dirs.iter().map(|d| centre + d * r_t).collect();
        let far_weights: Vec<f64> = ang.weights.iter().map(|w| w * r_t * r_t).collect();
        let far_velocity: Vec<Vec<Vec3>> = fields
            .iter()
            .map(|h| far_points.par_iter().map(|x| h.velocity(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let far_traction: Vec<Vec<Vec3>> = fields
            .iter()
            .map(|h| {
                far_points
                    .par_iter()
                    .zip(&ang.dirs)
                    .map(|(x, d)| Ok(h.stress(x)? * d))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let node_velocity: Vec<Vec<Vec3>> = fields
            .iter()
            .map(|h| {
                mesh.nodes()
                    .par_iter()
                    .map(|x| h.velocity(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let mut volume = [[0.0; 6]; 6];
        let mut far = [[0.0; 6]; 6];
        let mut boundary = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                volume[i][j] = 2.0 * pair_integral(&strains[i], &strains[j], &weights, |a, b| a.dot(b));
                far[i][j] = pair_integral(&far_velocity[i], &far_traction[j], &far_weights, |a, b| a.dot(b));
                boundary[i][j] = pair_integral(&node_velocity[i], &basis.tractions[j], mesh.weights(), |a, b| a.dot(b));
            }
        }
        Ok(Self {
            basis,
            mesh,
            r_t,
            volume,
            far,
            boundary,
        })
    }

    pub fn truncation_radius(&self) -> f64 {
        self.r_t
    }

    /// `2 ∫_{Ω_R} D(H^i):D(H^j)` without correction.
    pub fn volume_term(&self, i: usize, j: usize) -> f64 {
        self.volume[i - 1][j - 1]
    }

    /// Exterior dissipation `2 ∫_Ω D:D` reconstructed from the truncated
    /// volume and the far-sphere flux.
    pub fn dissipation(&self, i: usize, j: usize) -> f64 {
        self.volume[i - 1][j - 1] - self.far[i - 1][j - 1]
    }

    fn check_index(i: usize, j: usize) -> Result<()> {
        for k in [i, j] {
            if !(1..=6).contains(&k) {
                return Err(Error::IndexOutOfRange { index: k, max: 6 });
            }
        }
        Ok(())
    }

    fn scale(m: &[[f64; 6]; 6], i: usize, j: usize) -> f64 {
        (m[i - 1][i - 1].abs() * m[j - 1][j - 1].abs()).sqrt()
    }

    /// `∫_{∂Ω} g^(j)·H^(i) dS` against `2∫_Ω D(H^(j)):D(H^(i)) dx`. Errors are
    /// measured relative to `sqrt(|L_ii L_jj|)`.
    pub fn reciprocal(&self, i: usize, j: usize, tolerance: f64) -> Result<CheckResult> {
        Self::check_index(i, j)?;
        let lhs = self.boundary[i - 1][j - 1];
        let scale = Self::scale(&self.boundary, i, j);
        let mut check = CheckResult::compare(
            format!("reciprocal[{i},{j}]"),
            lhs,
            self.dissipation(i, j),
            Some(scale),
            tolerance,
        );
        check.tail_bound = Some(self.far[i - 1][j - 1].abs());
        check.uncorrected_error = Some((lhs - self.volume_term(i, j)).abs() / scale);
        Ok(check)
    }

    /// `M_ij` against `2∫_Ω D:D + α ∫ [H^(i) − ẽ_i]_τ·[H^(j) − ẽ_j]_τ dS`.
    pub fn energy(&self, gm: &GrandMatrix, alpha: f64, i: usize, j: usize, tolerance: f64) -> Result<CheckResult> {
        Self::check_index(i, j)?;
        let slip = self.slip_term(alpha, i, j)?;
        let lhs = gm.raw[(i - 1, j - 1)];
        let scale = (gm.raw[(i - 1, i - 1)].abs() * gm.raw[(j - 1, j - 1)].abs()).sqrt();
        let mut check = CheckResult::compare(
            format!("energy[{i},{j}]"),
            lhs,
            self.dissipation(i, j) + slip,
            Some(scale),
            tolerance,
        );
        check.tail_bound = Some(self.far[i - 1][j - 1].abs());
        check.uncorrected_error = Some((lhs - self.volume_term(i, j) - slip).abs() / scale);
        Ok(check)
    }

    /// `α ∫ [H^(i) − ẽ_i]_τ·[H^(j) − ẽ_j]_τ dS`.
    pub fn slip_term(&self, alpha: f64, i: usize, j: usize) -> Result<f64> {
        let mesh = self.mesh;
        let slip = |k: usize| -> Result<Vec<Vec3>> {
            let h = &self.basis.aux_fields[k - 1];
            mesh.nodes()
                .iter()
                .zip(mesh.normals())
                .map(|(x, n)| Ok(tangential_part(&(h.velocity(x)? - elementary_rigid_motion(k, x)?), n)))
                .collect()
        };
        let a = slip(i)?;
        let b = slip(j)?;
        Ok(alpha * pair_integral(&a, &b, mesh.weights(), |x, y| x.dot(y)))
    }
}

/// One reciprocal check with the default shell rule.
pub fn reciprocal_check(i: usize, j: usize, basis: &ThrustBasis, mesh: &SurfaceMesh, r_t: f64) -> Result<CheckResult> {
    IdentityEvaluator::new(basis, mesh, r_t, ShellQuadrature::default())?.reciprocal(i, j, IDENTITY_TOL)
}

/// One energy-identity check with the default shell rule.
pub fn energy_identity_check(
    i: usize,
    j: usize,
    basis: &ThrustBasis,
    gm: &GrandMatrix,
    mesh: &SurfaceMesh,
    alpha: f64,
    r_t: f64,
) -> Result<CheckResult> {
    IdentityEvaluator::new(basis, mesh, r_t, ShellQuadrature::default())?.energy(gm, alpha, i, j, IDENTITY_TOL)
}

/// Both identities for every pair `i ≤ j`.
pub fn identity_suite(
    mobility: &Mobility,
    mesh: &SurfaceMesh,
    alpha: f64,
    r_t: f64,
    quad: ShellQuadrature,
    tolerance: f64,
) -> Result<Vec<CheckResult>> {
    let eval = IdentityEvaluator::new(&mobility.basis, mesh, r_t, quad)?;
    let mut out = Vec::new();
    for i in 1..=6 {
        for j in i..=6 {
            out.push(eval.reciprocal(i, j, tolerance)?);
        }
    }
    for i in 1..=6 {
        for j in i..=6 {
            out.push(eval.energy(&mobility.grand, alpha, i, j, tolerance)?);
        }
    }
    Ok(out)
}

/// Diagonal resistances of a sphere of `radius` with slip length `b`:
/// `K = 6πa(1 + 2b/a)/(1 + 3b/a)`, `R = 8πa³/(1 + 3b/a)`.
pub fn analytic_sphere_resistance(radius: f64, slip_length: f64) -> Result<(f64, f64)> {
    if !(radius > 0.0) || !(slip_length >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need radius > 0 and slip length >= 0, got {radius}, {slip_length}"
        )));
    }
    if slip_length.is_infinite() {
        return Ok((4.0 * PI * radius, 0.0));
    }
    let beta = slip_length / radius;
    Ok((
        6.0 * PI * radius * (1.0 + 2.0 * beta) / (1.0 + 3.0 * beta),
        8.0 * PI * radius.powi(3) / (1.0 + 3.0 * beta),
    ))
}

/// Swimming speed `(2/3) B₁` of the no-slip spherical squirmer.
pub fn squirmer_oracle(b1: f64) -> f64 {
    2.0 / 3.0 * b1
}

/// Slip length implied by a measured translational resistance of a sphere,
/// inverting `K / 6πa = (1 + 2β)/(1 + 3β)`.
pub fn slip_length_from_k(radius: f64, k_diag: f64) -> f64 {
    let kappa = k_diag / (6.0 * PI * radius);
    radius * (1.0 - kappa) / (3.0 * kappa - 2.0)
}

/// Checks `K_ii` and `R_ii` of a sphere against the classical formulas and
/// the off-diagonal blocks against zero.
pub fn sphere_resistance_checks(gm: &GrandMatrix, radius: f64, alpha: f64, tolerance: f64) -> Result<Vec<CheckResult>> {
    let (k, r) = analytic_sphere_resistance(radius, 1.0 / alpha)?;
    let mut out = Vec::new();
    for i in 0..3 {
        out.push(CheckResult::compare(
            format!("K[{i},{i}]"),
            gm.k[(i, i)],
            k,
            Some(k),
            tolerance,
        ));
    }
    for i in 0..3 {
        out.push(CheckResult::compare(
            format!("R[{i},{i}]"),
            gm.r[(i, i)],
            r,
            Some(r),
            tolerance,
        ));
    }
    let mut k_off = gm.k;
    let mut r_off = gm.r;
    k_off.fill_diagonal(0.0);
    r_off.fill_diagonal(0.0);
    out.push(CheckResult::compare(
        "K off-diagonal",
        k_off.norm(),
        0.0,
        Some(k),
        tolerance,
    ));
    out.push(CheckResult::compare(
        "R off-diagonal",
        r_off.norm(),
        0.0,
        Some(r),
        tolerance,
    ));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub nodes: usize,
    pub k_diag: f64,
    pub k_error: f64,
    pub r_diag: f64,
    pub r_error: f64,
    pub symmetry_defect: f64,
    /// Largest auxiliary-problem boundary residual, tangential part divided
    /// by `max(α, 1)`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub alpha: f64,
    pub k_reference: f64,
    pub r_reference: f64,
    /// `analytic` for spheres, `extrapolated` otherwise.
    pub reference_kind: String,
    pub rows: Vec<ConvergenceRow>,
    pub warnings: Vec<String>,
}

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["N", "value", "error", "defect", "residual"])?;
        for row in &self.rows {
            w.write_record([
                row.nodes.to_string(),
                format!("{:e}", row.k_diag),
                format!("{:e}", row.k_error),
                format!("{:e}", row.symmetry_defect),
                format!("{:e}", row.residual),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mean_diag(m: &Matrix3<f64>) -> f64 {
    m.trace() / 3.0
}

/// Aitken extrapolation of the last three values; falls back to the last
/// value when the sequence is not contracting.
fn extrapolate(values: &[f64]) -> f64 {
    let n = values.len();
    let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom == 0.0 || d2.abs() >= d1.abs() {
        c
    } else {
        c - d2 * d2 / denom
    }
}

/// Resistance diagonals at increasing resolution, measured against the
/// analytic sphere values or an extrapolated reference.
pub fn convergence_study(
    shape: &Shape,
    alpha: f64,
    resolutions: &[usize],
    config: &SolverConfig,
) -> Result<ConvergenceTable> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidParameter(
            "a convergence study needs at least three resolutions".into(),
        ));
    }
    let mut raw = Vec::new();
    for &res in resolutions {
        let mesh = make_parametric_surface(shape, res)?;
        let solver = config.build_solver(&mesh, alpha)?;
        let mob = Mobility::compute(&solver)?;
        let residual = mob
            .reports
            .iter()
            .map(|r| r.residual_normal.max(r.residual_tangential / alpha.max(1.0)))
            .fold(0.0, f64::max);
        raw.push((
            res,
            mesh.len(),
            mean_diag(&mob.grand.k),
            mean_diag(&mob.grand.r),
            mob.grand.symmetry_defect,
            residual,
        ));
    }
    let (k_ref, r_ref, kind) = match *shape {
        Shape::Sphere { radius } => {
            let (k, r) = analytic_sphere_resistance(radius, 1.0 / alpha)?;
            (k, r, "analytic")
        }
        Shape::Spheroid { .. } => {
            let ks: Vec<f64> = raw.iter().map(|r| r.2).collect();
            let rs: Vec<f64> = raw.iter().map(|r| r.3).collect();
            (extrapolate(&ks), extrapolate(&rs), "extrapolated")
        }
    };
    let rows: Vec<ConvergenceRow> = raw
        .into_iter()
        .map(|(resolution, nodes, k, r, symmetry_defect, residual)| ConvergenceRow {
            resolution,
            nodes,
            k_diag: k,
            k_error: (k - k_ref).abs() / k_ref.abs(),
            r_diag: r,
            r_error: (r - r_ref).abs() / r_ref.abs(),
            symmetry_defect,
            residual,
        })
        .collect();
    let mut warnings = Vec::new();
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.k_error >= a.k_error {
            warnings.push(format!("K error did not decrease from N={} to N={}", a.nodes, b.nodes));
        }
        if b.r_error >= a.r_error {
            warnings.push(format!("R error did not decrease from N={} to N={}", a.nodes, b.nodes));
        }
        if b.residual >= a.residual {
            warnings.push(format!("residual did not decrease from N={} to N={}", a.nodes, b.nodes));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ConvergenceTable {
        alpha,
        k_reference: k_ref,
        r_reference: r_ref,
        reference_kind: kind.into(),
        rows,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlipCalibration {
    pub alphas: Vec<f64>,
    pub k_diag: Vec<f64>,
    pub r_diag: Vec<f64>,
    /// Slip lengths implied by each `K_diag`.
    pub slip_lengths: Vec<f64>,
    /// Least-squares `γ` in `b = γ/α`.
    pub gamma: f64,
    pub check: CheckResult,
}

/// Fits `b = γ/α` to the slip lengths implied by discrete `K` of a sphere.
pub fn slip_calibration(
    radius: f64,
    resolution: usize,
    alphas: &[f64],
    config: &SolverConfig,
    tolerance: f64,
) -> Result<(SlipCalibration, Vec<GrandMatrix>)> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter(
            "slip calibration needs at least one alpha".into(),
        ));
    }
    let mesh = make_parametric_surface(&Shape::Sphere { radius }, resolution)?;
    let mut grands = Vec::new();
    for &alpha in alphas {
        let solver = config.build_solver(&mesh, alpha)?;
        grands.push(Mobility::compute(&solver)?.grand);
    }
    Ok((calibrate(radius, alphas, &grands, tolerance), grands))
}

/// Calibration from already computed grand matrices.
pub fn calibrate(radius: f64, alphas: &[f64], grands: &[GrandMatrix], tolerance: f64) -> SlipCalibration {
    let k_diag: Vec<f64> = grands.iter().map(|g| mean_diag(&g.k)).collect();
    let r_diag: Vec<f64> = grands.iter().map(|g| mean_diag(&g.r)).collect();
    let slip_lengths: Vec<f64> = k_diag.iter().map(|&k| slip_length_from_k(radius, k)).collect();
    let num: Vec<f64> = slip_lengths.iter().zip(alphas).map(|(b, a)| b / a).collect();
    let den: Vec<f64> = alphas.iter().map(|a| 1.0 / (a * a)).collect();
    let gamma = pairwise_sum(&num) / pairwise_sum(&den);
    let check = CheckResult::compare("slip length b = 1/alpha", gamma, 1.0, Some(1.0), tolerance);
    SlipCalibration {
        alphas: alphas.to_vec(),
        k_diag,
        r_diag,
        slip_lengths,
        gamma,
        check,
    }
}

/// Squirmer swimming speed against `(2/3) B₁`.
pub fn squirmer_check(xi: &Vec3, omega: &Vec3, b1: f64, tolerance: f64) -> Vec<CheckResult> {
    let expected = squirmer_oracle(b1);
    vec![
        CheckResult::compare(
            "squirmer |xi|",
            xi.norm(),
            expected.abs(),
            Some(expected.abs().max(f64::MIN_POSITIVE)),
            tolerance,
        ),
        CheckResult::compare(
            "squirmer xi_z",
            xi.z,
            expected,
            Some(expected.abs().max(f64::MIN_POSITIVE)),
            tolerance,
        ),
        CheckResult::compare("squirmer |omega|", omega.norm(), 0.0, Some(1.0), 1e-3),
    ]
}

/// Velocity of `field` at points outside the body, for rest-state checks.
pub fn max_velocity(field: &FlowField, points: &[Vec3]) -> Result<f64> {
    let v = points
        .par_iter()
        .map(|x| field.velocity(x).map(|u| u.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(v.into_iter().fold(0.0, f64::max))
}

pub fn write_checks_json<W: Write>(checks: &[CheckResult], writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, checks)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_resistance_values() {
        let (k, r) = analytic_sphere_resistance(1.0, 0.0).unwrap();
        assert!((k - 18.849_555_921_538_76).abs() < 1e-12);
        assert!((r - 25.132_741_228_718_345).abs() < 1e-12);
        let (k, _) = analytic_sphere_resistance(1.0, 1e6).unwrap();
        assert!((k - 4.0 * PI).abs() < 1e-5);
        let (k, r) = analytic_sphere_resistance(2.0, 0.0).unwrap();
        assert!((k - 12.0 * PI).abs() < 1e-12 && (r - 64.0 * PI).abs() < 1e-12);
        assert!(analytic_sphere_resistance(0.0, 0.0).is_err());
    }

    #[test]
    fn squirmer_oracle_is_linear() {
        assert!((squirmer_oracle(1.0) - 0.666_666_666_666_666_6).abs() < 1e-15);
        assert_eq!(squirmer_oracle(0.0), 0.0);
        assert_eq!(squirmer_oracle(-1.0), -squirmer_oracle(1.0));
    }

    #[test]
    fn slip_length_inversion_round_trips() {
        for b in [0.0, 0.2, 1.0, 2.0] {
            let (k, _) = analytic_sphere_resistance(1.5, b).unwrap();
            assert!((slip_length_from_k(1.5, k) - b).abs() < 1e-12);
        }
    }

    #[test]
    fn check_result_pass_flag_follows_tolerance() {
        let c = CheckResult::compare("x", 1.0, 1.02, None, 0.03);
        assert!(c.passed);
        let c = CheckResult::compare("x", 1.0, 1.05, None, 0.03);
        assert!(!c.passed);
        assert!((c.relative_error - 0.05 / 1.05).abs() < 1e-15);
    }

    #[test]
    fn aitken_recovers_geometric_limit() {
        let v: Vec<f64> = (0..3).map(|k| 2.0 + 0.5f64.powi(k)).collect();
        assert!((extrapolate(&v) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn angular_rule_integrates_quadratics() {
        let rule = angular_rule(8);
        let area: f64 = rule.weights.iter().sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let zz: f64 = rule.dirs.iter().zip(&rule.weights).map(|(d, w)| d.z * d.z * w).sum();
        assert!((zz - 4.0 * PI / 3.0).abs() < 1e-12);
    }
}
