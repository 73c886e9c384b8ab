//! Collocation solver for exterior Stokes problems with Navier-slip
//! conditions
//!
//! ```text
//!   u·n = g_n,    2[D(u) n]_τ + α u_τ = α g_τ    on ∂Ω,    u → 0 at ∞,
//! ```
//!
//! with `u` represented by interior Stokeslets. Each node contributes one
//! normal-velocity row and two slip rows written in its tangent frame.
//! Rigid-body unknowns never enter this system; they are recovered from the
//! 6×6 grand-matrix system in [`crate::mobility`].

mod data;

pub use data::BoundaryData;

use std::sync::Arc;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{tangential_part, SurfaceMesh, Vec3};
use crate::quadrature::pairwise_sum;
use crate::stokes::{FlowField, PointSource, SourceSet};

/// Default relative singular-value cutoff.
pub const DEFAULT_SVD_TOL: f64 = 1e-12;

/// A posteriori accuracy of one solve, evaluated from the field itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// `‖u·n − g_n‖_{L²(∂Ω)}`.
    pub residual_normal: f64,
    /// `‖2[D(u)n]_τ + α u_τ − α g_τ‖_{L²(∂Ω)}`.
    pub residual_tangential: f64,
    pub svd_rank: usize,
    /// Ratio of the largest to the smallest retained singular value.
    pub condition_estimate: f64,
}

/// Dense collocation system for one right-hand side.
#[derive(Debug)]
pub struct CollocationSystem<'m> {
    mesh: &'m SurfaceMesh,
    sources: Arc<SourceSet>,
    data: BoundaryData,
    point_source: Option<PointSource>,
    pub matrix: Mat<f64>,
    pub rhs: Vec<f64>,
    /// Rows `[normal, slip·t₁, slip·t₂]` for each node.
    pub row_map: Vec<[usize; 3]>,
    pub alpha: f64,
}

impl CollocationSystem<'_> {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

fn check_svd_tol(svd_tol: f64) -> Result<()> {
    if !(svd_tol > 0.0 && svd_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "svd_tol must be in (0, 1), got {svd_tol}"
        )));
    }
    Ok(())
}

fn assemble_matrix(mesh: &SurfaceMesh, sources: &SourceSet, alpha: f64) -> Result<Mat<f64>> {
    let n = mesh.len();
    let k = sources.len();
    let min_distance = sources.min_surface_distance();
    if !(min_distance > 0.0) {
        return Err(Error::SingularEvaluation { distance: min_distance });
    }
    let inv_8pi = 1.0 / (8.0 * std::f64::consts::PI);
    let inv_4pi = 1.0 / (4.0 * std::f64::consts::PI);
    // Node-major row blocks computed independently, then copied in order.
    let blocks: Vec<Vec<[f64; 9]>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let x = mesh.nodes()[j];
            let nrm = mesh.normals()[j];
            let [t1, t2] = mesh.tangents()[j];
            sources
                .locations()
                .iter()
                .map(|s| {
                    let r = x - s;
                    let d = r.norm();
                    let inv = 1.0 / d;
                    let inv3 = inv * inv * inv;
                    // Oseen tensor G is symmetric, so (G v)_c is row c of G applied to v.
                    let g = |v: &Vec3| (v * inv + r * (r.dot(v) * inv3)) * inv_8pi;
                    let gn = g(&nrm);
                    let gt1 = g(&t1);
                    let gt2 = g(&t2);
                    // Traction of e_c is q r_c with q = −3 (r·n) r / 4π r⁵.
                    let q = r * (-3.0 * r.dot(&nrm) * inv3 * inv * inv * inv_4pi);
                    let (q1, q2) = (q.dot(&t1), q.dot(&t2));
                    let mut e = [0.0; 9];
                    for c in 0..3 {
                        e[c] = gn[c];
                        e[3 + c] = q1 * r[c] + alpha * gt1[c];
                        e[6 + c] = q2 * r[c] + alpha * gt2[c];
                    }
                    e
                })
                .collect()
        })
        .collect();
    let mut a = Mat::<f64>::zeros(3 * n, 3 * k);
    for (j, row) in blocks.iter().enumerate() {
        for (kk, e) in row.iter().enumerate() {
            for r in 0..3 {
                for c in 0..3 {
                    a[(3 * j + r, 3 * kk + c)] = e[3 * r + c];
                }
            }
        }
    }
    Ok(a)
}

/// Right-hand side for `data`, minus the boundary operator applied to an
/// optional point source that is carried separately.
fn assemble_rhs(
    mesh: &SurfaceMesh,
    alpha: f64,
    data: &BoundaryData,
    point_source: Option<&PointSource>,
) -> Result<Vec<f64>> {
    if data.len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: data.len(),
        });
    }
    let mut rhs = vec![0.0; 3 * mesh.len()];
    for j in 0..mesh.len() {
        let [t1, t2] = mesh.tangents()[j];
        let g = data.tangential_data()[j];
        let mut normal = data.normal_data()[j];
        let mut slip = g * alpha;
        if let Some(ps) = point_source {
            let x = mesh.nodes()[j];
            let n = mesh.normals()[j];
            let u = ps.velocity(&x)?;
            let grad = ps.gradient(&x)?;
            let traction = (grad + grad.transpose()) * n;
            normal -= u.dot(&n);
            slip -= traction + u * alpha;
        }
        rhs[3 * j] = normal;
        rhs[3 * j + 1] = slip.dot(&t1);
        rhs[3 * j + 2] = slip.dot(&t2);
    }
    Ok(rhs)
}

/// Assembles the collocation system for boundary data `data` (rigid
/// velocity of the body taken as zero).
pub fn assemble_system<'m>(
    mesh: &'m SurfaceMesh,
    sources: Arc<SourceSet>,
    alpha: f64,
    data: &BoundaryData,
) -> Result<CollocationSystem<'m>> {
    assemble_system_with_source(mesh, sources, alpha, data, None)
}

fn assemble_system_with_source<'m>(
    mesh: &'m SurfaceMesh,
    sources: Arc<SourceSet>,
    alpha: f64,
    data: &BoundaryData,
    point_source: Option<PointSource>,
) -> Result<CollocationSystem<'m>> {
    check_alpha(alpha)?;
    let matrix = assemble_matrix(mesh, &sources, alpha)?;
    let rhs = assemble_rhs(mesh, alpha, data, point_source.as_ref())?;
    let row_map = (0..mesh.len()).map(|j| [3 * j, 3 * j + 1, 3 * j + 2]).collect();
    Ok(CollocationSystem {
        mesh,
        sources,
        data: data.clone(),
        point_source,
        matrix,
        rhs,
        row_map,
        alpha,
    })
}

/// Row scaling applied before the least-squares solve: `√w_j` on every row,
/// with the slip rows further divided by `1 + α` so both row types are O(1).
fn row_scales(mesh: &SurfaceMesh, alpha: f64) -> Vec<f64> {
    let slip = 1.0 / (1.0 + alpha);
    mesh.weights()
        .iter()
        .flat_map(|w| {
            let s = w.sqrt();
            [s, s * slip, s * slip]
        })
        .collect()
}

/// Truncated SVD of the scaled collocation matrix.
#[derive(Debug)]
struct TruncatedSvd {
    u: Mat<f64>,
    v: Mat<f64>,
    singular_values: Vec<f64>,
    rank: usize,
}

impl TruncatedSvd {
    fn new(a: &Mat<f64>, svd_tol: f64) -> Result<Self> {
        let svd = a
            .thin_svd()
            .map_err(|e| Error::LinearAlgebra(format!("SVD did not converge: {e:?}")))?;
        let s = svd.S().column_vector();
        let singular_values: Vec<f64> = (0..s.nrows()).map(|i| s[i]).collect();
        let smax = singular_values.iter().cloned().fold(0.0, f64::max);
        let rank = if smax > 0.0 {
            singular_values.iter().filter(|&&v| v >= svd_tol * smax).count()
        } else {
            0
        };
        if rank == 0 {
            return Err(Error::DegenerateSystem);
        }
        Ok(Self {
            u: svd.U().to_owned(),
            v: svd.V().to_owned(),
            singular_values,
            rank,
        })
    }

    fn condition(&self) -> f64 {
        let kept = &self.singular_values[..self.rank];
        let max = kept.iter().cloned().fold(0.0, f64::max);
        let min = kept.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (m, k) = (self.u.nrows(), self.v.nrows());
        let mut y = vec![0.0; self.singular_values.len()];
        let mut col = vec![0.0; m];
        for (i, yi) in y.iter_mut().enumerate().take(self.rank) {
            for (r, c) in col.iter_mut().enumerate() {
                *c = self.u[(r, i)] * b[r];
            }
            *yi = pairwise_sum(&col) / self.singular_values[i];
        }
        let mut x = vec![0.0; k];
        for (r, xr) in x.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, yi) in y.iter().enumerate().take(self.rank) {
                acc += self.v[(r, i)] * yi;
            }
            *xr = acc;
        }
        x
    }
}

/// Solves by truncated SVD, discarding singular values below
/// `svd_tol · σ_max`, and evaluates the resulting field's boundary residuals.
pub fn solve_system(system: &CollocationSystem<'_>, svd_tol: f64) -> Result<(FlowField, SolveReport)> {
    check_svd_tol(svd_tol)?;
    let scales = row_scales(system.mesh, system.alpha);
    let mut scaled = system.matrix.clone();
    for (r, s) in scales.iter().enumerate() {
        for c in 0..scaled.ncols() {
            scaled[(r, c)] *= s;
        }
    }
    let factor = TruncatedSvd::new(&scaled, svd_tol)?;
    finish_solve(
        system.mesh,
        &system.sources,
        system.alpha,
        &factor,
        &scales,
        &system.rhs,
        &system.data,
        system.point_source,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_solve(
    mesh: &SurfaceMesh,
    sources: &Arc<SourceSet>,
    alpha: f64,
    factor: &TruncatedSvd,
    scales: &[f64],
    rhs: &[f64],
    data: &BoundaryData,
    point_source: Option<PointSource>,
) -> Result<(FlowField, SolveReport)> {
    let b: Vec<f64> = rhs.iter().zip(scales).map(|(r, s)| r * s).collect();
    let x = factor.solve(&b);
    let strengths = x.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
    let field = FlowField::new(sources.clone(), strengths)?.with_point_source(point_source);
    let (residual_normal, residual_tangential) = boundary_residuals(&field, mesh, alpha, data)?;
    Ok((
        field,
        SolveReport {
            residual_normal,
            residual_tangential,
            svd_rank: factor.rank,
            condition_estimate: factor.condition(),
        },
    ))
}

/// `(‖u·n − g_n‖, ‖2[D(u)n]_τ + α u_τ − α g_τ‖)` in `L²(∂Ω)`, evaluated
/// directly from the field on any mesh carrying matching data.
pub fn boundary_residuals(
    field: &FlowField,
    mesh: &SurfaceMesh,
    alpha: f64,
    data: &BoundaryData,
) -> Result<(f64, f64)> {
    if data.len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: data.len(),
        });
    }
    let per_node: Vec<(f64, f64)> = (0..mesh.len())
        .into_par_iter()
        .map(|j| {
            let x = mesh.nodes()[j];
            let n = mesh.normals()[j];
            let w = mesh.weights()[j];
            let u = field.velocity(&x)?;
            let traction = field.stress(&x)? * n;
            let rn = u.dot(&n) - data.normal_data()[j];
            let rt = tangential_part(&(traction + u * alpha), &n) - data.tangential_data()[j] * alpha;
            Ok((w * rn * rn, w * rt.norm_squared()))
        })
        .collect::<Result<_>>()?;
    let normal: Vec<f64> = per_node.iter().map(|p| p.0).collect();
    let tangential: Vec<f64> = per_node.iter().map(|p| p.1).collect();
    Ok((pairwise_sum(&normal).sqrt(), pairwise_sum(&tangential).sqrt()))
}

/// `‖u − ẽ_i + (2/α)[D(u)n]_τ‖_{L²(∂Ω)}`: how well a solved auxiliary field
/// satisfies the boundary identity equivalent to its Navier conditions.
pub fn auxiliary_identity_residual(field: &FlowField, mesh: &SurfaceMesh, alpha: f64, i: usize) -> Result<f64> {
    let terms = (0..mesh.len())
        .map(|j| {
            let x = mesh.nodes()[j];
            let n = mesh.normals()[j];
            let u = field.velocity(&x)?;
            let d = field.strain(&x)?;
            let e = crate::geometry::elementary_rigid_motion(i, &x)?;
            let r = u - e + tangential_part(&(d * n), &n) * (2.0 / alpha);
            Ok(mesh.weights()[j] * r.norm_squared())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms).sqrt())
}

/// Flux carrier: the unit point source rescaled so its discrete flux
/// through `mesh` is exactly one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxCarrier {
    pub location: Vec3,
    /// Multiplier applied to `σ` so that `Σ w_k σ̂·n_k = 1`.
    pub normalization: f64,
}

impl FluxCarrier {
    pub fn new(mesh: &SurfaceMesh, location: Vec3) -> Result<Self> {
        if !mesh.contains(&location) {
            return Err(Error::InvalidParameter(format!(
                "carrier location {location:?} must lie inside the body"
            )));
        }
        let unit = PointSource {
            location,
            strength: 1.0,
        };
        let terms = mesh
            .nodes()
            .iter()
            .zip(mesh.normals())
            .zip(mesh.weights())
            .map(|((x, n), w)| Ok(w * unit.velocity(x)?.dot(n)))
            .collect::<Result<Vec<f64>>>()?;
        let flux = pairwise_sum(&terms);
        Ok(Self {
            location,
            normalization: 1.0 / flux,
        })
    }

    /// Point source carrying discrete flux `phi`.
    pub fn source(&self, phi: f64) -> PointSource {
        PointSource {
            location: self.location,
            strength: phi * self.normalization,
        }
    }

    /// `σ̂` at every node.
    pub fn trace(&self, mesh: &SurfaceMesh) -> Result<Vec<Vec3>> {
        let unit = self.source(1.0);
        mesh.nodes().iter().map(|x| unit.velocity(x)).collect()
    }
}

/// Flux below which boundary data is treated as flux-free.
fn flux_threshold(mesh: &SurfaceMesh, data: &BoundaryData) -> f64 {
    let abs: Vec<f64> = data
        .normal_data()
        .iter()
        .zip(mesh.weights())
        .map(|(u, w)| (u * w).abs())
        .collect();
    1e-12 * pairwise_sum(&abs)
}

/// Factorized collocation operator for one `(mesh, sources, α)`. Every
/// auxiliary and lifting problem on the same body shares it.
#[derive(Debug)]
pub struct SlipSolver<'m> {
    mesh: &'m SurfaceMesh,
    sources: Arc<SourceSet>,
    alpha: f64,
    svd_tol: f64,
    scales: Vec<f64>,
    factor: TruncatedSvd,
    carrier: FluxCarrier,
}

impl<'m> SlipSolver<'m> {
    pub fn new(mesh: &'m SurfaceMesh, sources: Arc<SourceSet>, alpha: f64, svd_tol: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_svd_tol(svd_tol)?;
        let mut a = assemble_matrix(mesh, &sources, alpha)?;
        let scales = row_scales(mesh, alpha);
        for (r, s) in scales.iter().enumerate() {
            for c in 0..a.ncols() {
                a[(r, c)] *= s;
            }
        }
        let factor = TruncatedSvd::new(&a, svd_tol)?;
        let carrier = FluxCarrier::new(mesh, mesh.centroid())?;
        Ok(Self {
            mesh,
            sources,
            alpha,
            svd_tol,
            scales,
            factor,
            carrier,
        })
    }

    pub fn mesh(&self) -> &'m SurfaceMesh {
        self.mesh
    }

    pub fn sources(&self) -> &Arc<SourceSet> {
        &self.sources
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn svd_tol(&self) -> f64 {
        self.svd_tol
    }

    pub fn svd_rank(&self) -> usize {
        self.factor.rank
    }

    pub fn carrier(&self) -> &FluxCarrier {
        &self.carrier
    }

    /// Solves with Stokeslets only; data must carry no net flux for an
    /// accurate result.
    pub fn solve(&self, data: &BoundaryData) -> Result<(FlowField, SolveReport)> {
        self.solve_with_source(data, None)
    }

    fn solve_with_source(
        &self,
        data: &BoundaryData,
        point_source: Option<PointSource>,
    ) -> Result<(FlowField, SolveReport)> {
        let rhs = assemble_rhs(self.mesh, self.alpha, data, point_source.as_ref())?;
        finish_solve(
            self.mesh,
            &self.sources,
            self.alpha,
            &self.factor,
            &self.scales,
            &rhs,
            data,
            point_source,
        )
    }

    /// Auxiliary field `H^(i)`: data `ẽ_i·n` and `[ẽ_i]_τ`.
    pub fn solve_auxiliary(&self, i: usize) -> Result<(FlowField, SolveReport)> {
        let data = BoundaryData::rigid_trace(self.mesh, i)?;
        self.solve(&data)
    }

    /// Lifting field `ϑ` of arbitrary data. A net flux `Φ` is carried by a
    /// point source of flux `Φ` at the centroid; Stokeslets take the rest.
    pub fn solve_lifting(&self, v_star: &BoundaryData) -> Result<(FlowField, SolveReport)> {
        let phi = v_star.flux(self.mesh);
        let source = (phi.abs() > flux_threshold(self.mesh, v_star)).then(|| self.carrier.source(phi));
        self.solve_with_source(v_star, source)
    }
}

/// One-shot auxiliary solve; see [`SlipSolver::solve_auxiliary`].
pub fn solve_auxiliary(
    i: usize,
    mesh: &SurfaceMesh,
    sources: Arc<SourceSet>,
    alpha: f64,
    svd_tol: f64,
) -> Result<(FlowField, SolveReport)> {
    if !(1..=6).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i, max: 6 });
    }
    SlipSolver::new(mesh, sources, alpha, svd_tol)?.solve_auxiliary(i)
}

/// One-shot lifting solve; see [`SlipSolver::solve_lifting`].
pub fn solve_lifting(
    v_star: &BoundaryData,
    mesh: &SurfaceMesh,
    sources: Arc<SourceSet>,
    alpha: f64,
    svd_tol: f64,
) -> Result<(FlowField, SolveReport)> {
    SlipSolver::new(mesh, sources, alpha, svd_tol)?.solve_lifting(v_star)
}

/// Lifting through an explicitly assembled system, for callers that want to
/// inspect the matrix.
pub fn assemble_lifting_system<'m>(
    mesh: &'m SurfaceMesh,
    sources: Arc<SourceSet>,
    alpha: f64,
    v_star: &BoundaryData,
) -> Result<CollocationSystem<'m>> {
    let phi = v_star.flux(mesh);
    let source = if phi.abs() > flux_threshold(mesh, v_star) {
        Some(FluxCarrier::new(mesh, mesh.centroid())?.source(phi))
    } else {
        None
    };
    assemble_system_with_source(mesh, sources, alpha, v_star, source)
}
