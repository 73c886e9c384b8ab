//! Self-propelled Stokes problem and the conditional Navier-Stokes
//! certificate.
//!
//! The solution is sought as `v = c_i H^(i) + ϑ` where `ϑ` lifts the
//! prescribed data. Imposing zero net force and torque gives `M c = β` with
//! `β_i = −∫ ẽ_i · T(ϑ) n dS`, and `(ξ, ω) = (c₁..₃, c₄..₆)`.

use std::sync::Arc;

use nalgebra::Vector6;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{elementary_rigid_motion, l2_inner, SurfaceMesh, Vec3};
use crate::mobility::{
    net_force_and_torque, rotational_prediction, translational_prediction, GrandMatrix, Mobility, Wrench,
};
use crate::quadrature::pairwise_sum;
use crate::slip_bvp::{BoundaryData, FluxCarrier, SlipSolver, SolveReport, DEFAULT_SVD_TOL};
use crate::stokes::{evaluate_traction, FlowField, SourcePlacement, DEFAULT_SHRINK, DEFAULT_STRIDE};

/// Discretization and tolerance knobs shared by every solve on one body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub shrink: f64,
    pub stride: usize,
    pub placement: SourcePlacement,
    pub svd_tol: f64,
    /// Net force and torque of the composite field are accepted below this
    /// fraction of `|β|`.
    pub propulsion_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            shrink: DEFAULT_SHRINK,
            stride: DEFAULT_STRIDE,
            placement: SourcePlacement::default(),
            svd_tol: DEFAULT_SVD_TOL,
            propulsion_tol: 1e-3,
        }
    }
}

impl SolverConfig {
    /// Places sources and factors the collocation operator.
    pub fn build_solver<'m>(&self, mesh: &'m SurfaceMesh, alpha: f64) -> Result<SlipSolver<'m>> {
        let sources = Arc::new(self.placement.place(mesh, self.shrink, self.stride)?);
        SlipSolver::new(mesh, sources, alpha, self.svd_tol)
    }
}

#[derive(Clone, Debug)]
pub struct SelfPropSolution {
    pub coefficients: [f64; 6],
    pub beta: [f64; 6],
    pub lifting: FlowField,
    pub lifting_report: SolveReport,
    /// `c_i H^(i) + ϑ` as one strength set.
    pub composite: FlowField,
    pub xi: Vec3,
    pub omega: Vec3,
    pub force_residual: f64,
    pub torque_residual: f64,
    /// `‖D(v)‖_{L²(Ω)}` from the boundary work `½ ∫ v · T(v) n dS`.
    pub dissipation: f64,
    pub accuracy_warning: Option<String>,
}

/// Full pipeline: factor once, solve the six auxiliary problems and the
/// lifting concurrently, then combine.
pub fn solve_selfpropelled_stokes(
    v_star: &BoundaryData,
    mesh: &SurfaceMesh,
    alpha: f64,
    config: &SolverConfig,
) -> Result<SelfPropSolution> {
    let solver = config.build_solver(mesh, alpha)?;
    let (mobility, lifting) = rayon::join(|| Mobility::compute(&solver), || solver.solve_lifting(v_star));
    let mobility = mobility?;
    let (lifting, report) = lifting?;
    combine(&solver, &mobility, lifting, report, config.propulsion_tol)
}

/// Same as [`solve_selfpropelled_stokes`] but reuses an existing solver and
/// mobility.
pub fn solve_with(
    solver: &SlipSolver<'_>,
    mobility: &Mobility,
    v_star: &BoundaryData,
    propulsion_tol: f64,
) -> Result<SelfPropSolution> {
    let (lifting, report) = solver.solve_lifting(v_star)?;
    combine(solver, mobility, lifting, report, propulsion_tol)
}

fn combine(
    solver: &SlipSolver<'_>,
    mobility: &Mobility,
    lifting: FlowField,
    lifting_report: SolveReport,
    propulsion_tol: f64,
) -> Result<SelfPropSolution> {
    let mesh = solver.mesh();
    let lifting_traction = evaluate_traction(&lifting, mesh)?;
    let mut beta = Vector6::zeros();
    for i in 1..=6 {
        let e: Vec<Vec3> = mesh
            .nodes()
            .iter()
            .map(|x| elementary_rigid_motion(i, x))
            .collect::<Result<_>>()?;
        beta[i - 1] = -l2_inner(mesh, &e, &lifting_traction)?;
    }
    let c = mobility.grand.block_inverse() * beta;
    let mut terms: Vec<(f64, &FlowField)> = mobility
        .basis
        .aux_fields
        .iter()
        .enumerate()
        .map(|(i, h)| (c[i], h))
        .collect();
    terms.push((1.0, &lifting));
    let composite = FlowField::linear_combination(&terms)?;

    let traction = evaluate_traction(&composite, mesh)?;
    let (force, torque) = net_force_and_torque(mesh, &traction)?;
    let force_residual = force.norm();
    let torque_residual = torque.norm();
    let velocity: Vec<Vec3> = mesh
        .nodes()
        .par_iter()
        .map(|x| composite.velocity(x))
        .collect::<Result<_>>()?;
    let work = l2_inner(mesh, &velocity, &traction)?;
    let dissipation = (0.5 * work).max(0.0).sqrt();

    let scale = beta.norm();
    let defect = force_residual.max(torque_residual);
    // Below this the net force is rounding in the traction sum.
    let abs: Vec<f64> = traction.iter().zip(mesh.weights()).map(|(t, w)| w * t.norm()).collect();
    let rounding = 1e-12 * pairwise_sum(&abs);
    let accuracy_warning = (defect > propulsion_tol * scale && defect > rounding).then(|| {
        let msg = format!(
            "net force/torque {defect:e} of the composite field exceeds {propulsion_tol:e} x |beta| = {:e}",
            propulsion_tol * scale
        );
        log::warn!("{msg}");
        msg
    });

    Ok(SelfPropSolution {
        coefficients: [c[0], c[1], c[2], c[3], c[4], c[5]],
        beta: [beta[0], beta[1], beta[2], beta[3], beta[4], beta[5]],
        lifting,
        lifting_report,
        composite,
        xi: Vec3::new(c[0], c[1], c[2]),
        omega: Vec3::new(c[3], c[4], c[5]),
        force_residual,
        torque_residual,
        dissipation,
        accuracy_warning,
    })
}

/// Net flux and its zero-flux remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxDecomposition {
    pub phi: f64,
    /// Normalized carrier `σ̂` at the nodes, `Σ w σ̂·n = 1`.
    pub sigma_trace: Vec<Vec3>,
    /// `β_* = (v_*·n) n − Φ σ̂`.
    pub beta_star: Vec<Vec3>,
    /// `Σ w β_*·n`, zero up to rounding.
    pub beta_star_flux: f64,
}

pub fn flux_and_carrier(v_star: &BoundaryData, mesh: &SurfaceMesh, x0: Vec3) -> Result<FluxDecomposition> {
    if v_star.len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: v_star.len(),
        });
    }
    let carrier = FluxCarrier::new(mesh, x0)?;
    let phi = v_star.flux(mesh);
    let sigma_trace = carrier.trace(mesh)?;
    let beta_star: Vec<Vec3> = (0..mesh.len())
        .map(|k| {
            let n = mesh.normals()[k];
            n * v_star.normal_data()[k] - sigma_trace[k] * phi
        })
        .collect();
    let terms: Vec<f64> = (0..mesh.len())
        .map(|k| mesh.weights()[k] * beta_star[k].dot(&mesh.normals()[k]))
        .collect();
    Ok(FluxDecomposition {
        phi,
        sigma_trace,
        beta_star,
        beta_star_flux: pairwise_sum(&terms),
    })
}

/// Discrete `H^{1/2}(∂Ω)` norm by the Gagliardo double sum
/// `‖f‖² + Σ_{j≠k} w_j w_k |f_j − f_k|² / |x_j − x_k|³`.
pub fn h_half_norm(field: &[Vec3], mesh: &SurfaceMesh) -> Result<f64> {
    if field.len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: field.len(),
        });
    }
    let x = mesh.nodes();
    let w = mesh.weights();
    let rows: Vec<f64> = (0..mesh.len())
        .into_par_iter()
        .map(|j| {
            let terms: Vec<f64> = (0..mesh.len())
                .filter(|&k| k != j)
                .map(|k| w[k] * (field[j] - field[k]).norm_squared() / (x[j] - x[k]).norm().powi(3))
                .collect();
            w[j] * pairwise_sum(&terms)
        })
        .collect();
    let l2: Vec<f64> = field.iter().zip(w).map(|(f, w)| w * f.norm_squared()).collect();
    Ok((pairwise_sum(&l2) + pairwise_sum(&rows)).sqrt())
}

/// Scalar version of [`h_half_norm`].
pub fn h_half_norm_scalar(field: &[f64], mesh: &SurfaceMesh) -> Result<f64> {
    let v: Vec<Vec3> = field.iter().map(|&f| Vec3::new(f, 0.0, 0.0)).collect();
    h_half_norm(&v, mesh)
}

/// User stand-ins for the smallness constants of the existence theorem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub c1_user: f64,
    pub c2_user: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            c1_user: 1.0,
            c2_user: 1.0,
        }
    }
}

pub const NONCONSTRUCTIVE_NOTE: &str = "the smallness constants C1, C2 and the Reynolds threshold C(v_*) \
are not computable; `passes` only compares against the user thresholds and the brackets hold only \
below that unknown threshold";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NsCertificate {
    pub phi: f64,
    pub re: f64,
    pub re_phi: f64,
    pub beta_star_half_norm: f64,
    pub re_beta: f64,
    pub beta_star_flux: f64,
    pub c1_user: f64,
    pub c2_user: f64,
    pub passes: bool,
    pub xi_stokes: Vec3,
    pub omega_stokes: Vec3,
    pub xi_bracket: [f64; 2],
    pub omega_bracket: [f64; 2],
    pub note: String,
}

pub fn ns_certificate(
    re: f64,
    v_star: &BoundaryData,
    mesh: &SurfaceMesh,
    gm: &GrandMatrix,
    w: &Wrench,
    thresholds: Thresholds,
) -> Result<NsCertificate> {
    if !(re >= 0.0) || !re.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Reynolds number must be finite and >= 0, got {re}"
        )));
    }
    if !(thresholds.c1_user > 0.0 && thresholds.c2_user > 0.0) {
        return Err(Error::InvalidParameter(
            "certificate thresholds must be positive".into(),
        ));
    }
    let flux = flux_and_carrier(v_star, mesh, mesh.centroid())?;
    let beta_star_half_norm = h_half_norm(&flux.beta_star, mesh)?;
    let re_phi = re * flux.phi.abs();
    let re_beta = re * beta_star_half_norm;
    let xi_stokes = translational_prediction(gm, w);
    let omega_stokes = rotational_prediction(gm, w);
    let bracket = |z: &Vec3| [0.5 * z.norm(), 1.5 * z.norm()];
    Ok(NsCertificate {
        phi: flux.phi,
        re,
        re_phi,
        beta_star_half_norm,
        re_beta,
        beta_star_flux: flux.beta_star_flux,
        c1_user: thresholds.c1_user,
        c2_user: thresholds.c2_user,
        passes: re_phi < thresholds.c1_user && re_beta < thresholds.c2_user,
        xi_bracket: bracket(&xi_stokes),
        omega_bracket: bracket(&omega_stokes),
        xi_stokes,
        omega_stokes,
        note: NONCONSTRUCTIVE_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_parametric_surface, Shape};
    use crate::mobility::Mat6;

    fn sphere(res: usize) -> SurfaceMesh {
        make_parametric_surface(&Shape::Sphere { radius: 1.0 }, res).unwrap()
    }

    #[test]
    fn zero_normal_data_has_no_flux() {
        let mesh = sphere(10);
        let d = flux_and_carrier(&BoundaryData::squirmer(&mesh, 1.0), &mesh, Vec3::zeros()).unwrap();
        assert!(d.phi.abs() < 1e-14);
        assert!(d.beta_star.iter().all(|b| b.norm() == 0.0));
    }

    #[test]
    fn unit_normal_data_flux_is_area() {
        let mesh = sphere(16);
        let ones = BoundaryData::new(&mesh, vec![1.0; mesh.len()], vec![Vec3::zeros(); mesh.len()]).unwrap();
        let d = flux_and_carrier(&ones, &mesh, Vec3::zeros()).unwrap();
        assert!((d.phi - 4.0 * std::f64::consts::PI).abs() < 1e-3 * 4.0 * std::f64::consts::PI);
        assert!(d.beta_star_flux.abs() < 1e-10);
    }

    #[test]
    fn pure_source_data_cancels() {
        let mesh = sphere(12);
        let carrier = FluxCarrier::new(&mesh, Vec3::zeros()).unwrap();
        let trace = carrier.trace(&mesh).unwrap();
        let normal: Vec<f64> = trace.iter().zip(mesh.normals()).map(|(s, n)| 3.0 * s.dot(n)).collect();
        let data = BoundaryData::new(&mesh, normal, vec![Vec3::zeros(); mesh.len()]).unwrap();
        let d = flux_and_carrier(&data, &mesh, Vec3::zeros()).unwrap();
        assert!((d.phi - 3.0).abs() < 1e-12);
        assert!(d.beta_star.iter().all(|b| b.norm() < 1e-12));
    }

    #[test]
    fn carrier_outside_body_is_rejected() {
        let mesh = sphere(8);
        assert!(flux_and_carrier(&BoundaryData::zero(&mesh), &mesh, Vec3::new(2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn half_norm_of_constant_is_l2() {
        let mesh = sphere(12);
        let f = vec![Vec3::new(0.0, 2.0, 0.0); mesh.len()];
        let n = h_half_norm(&f, &mesh).unwrap();
        assert!((n - 2.0 * mesh.area().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn half_norm_is_homogeneous() {
        let mesh = sphere(12);
        let f: Vec<f64> = mesh.nodes().iter().map(|x| x.z).collect();
        let g: Vec<f64> = f.iter().map(|v| 2.0 * v).collect();
        let a = h_half_norm_scalar(&f, &mesh).unwrap();
        let b = h_half_norm_scalar(&g, &mesh).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn certificate_brackets_and_zero_reynolds() {
        let mesh = sphere(10);
        let gm = GrandMatrix::from_matrix(Mat6::identity() * 2.0).unwrap();
        let w = Wrench {
            w: Vector6::new(2.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        };
        let data = BoundaryData::uniform_source(&mesh, 1.0);
        let cert = ns_certificate(
            0.0,
            &data,
            &mesh,
            &gm,
            &w,
            Thresholds {
                c1_user: 1e-9,
                c2_user: 1e-9,
            },
        )
        .unwrap();
        assert!(cert.passes);
        assert_eq!(cert.xi_bracket, [0.5, 1.5]);
        assert_eq!(cert.omega_bracket, [0.0, 0.0]);
        assert!(ns_certificate(-1.0, &data, &mesh, &gm, &w, Thresholds::default()).is_err());
        let loud = ns_certificate(1e3, &data, &mesh, &gm, &w, Thresholds::default()).unwrap();
        assert!(!loud.passes);
    }
}
