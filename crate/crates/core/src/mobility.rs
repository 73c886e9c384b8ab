//! Thrust basis, grand resistance matrix and the rigid-body velocity it
//! induces from prescribed boundary data.
//!
//! With `g^(i) = T(H^(i), P^(i)) n` the traction of the i-th auxiliary field,
//!
//! ```text
//!   M_ij = ∫ ẽ_i · g^(j) dS,      M = [[K, Sᵀ], [S, R]],
//!   W_i  = −∫ v_* · g^(i) dS,     M (ξ, ω) = W.
//! ```
//!
//! The discrete `M` is only symmetric to discretization accuracy; the raw
//! matrix is kept for diagnostics and its symmetric part is used for every
//! solve so the Schur-complement block inverse is exact algebra.

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{elementary_rigid_motion, l2_inner, l2_norm, tangential_part, SurfaceMesh, Vec3};
use crate::quadrature::pairwise_sum;
use crate::slip_bvp::{BoundaryData, SlipSolver, SolveReport};
use crate::stokes::{evaluate_traction, FlowField};

pub type Mat6 = Matrix6<f64>;
pub type Vec6 = Vector6<f64>;

/// Relative threshold on singular values of the traction Gram matrices.
pub const GRAM_RANK_TOL: f64 = 1e-12;
/// `ℙ(v_*)` counts as nonzero above this fraction of `‖v_*‖`.
pub const THRUST_NONZERO_TOL: f64 = 1e-8;

/// Tractions of the six auxiliary fields on the body boundary.
#[derive(Clone, Debug)]
pub struct ThrustBasis {
    pub tractions: Vec<Vec<Vec3>>,
    pub tangential_tractions: Vec<Vec<Vec3>>,
    pub aux_fields: Vec<FlowField>,
    pub gram_singular_values: [f64; 6],
    pub tangential_gram_singular_values: [f64; 6],
    gram: Mat6,
}

impl ThrustBasis {
    pub fn gram(&self) -> &Mat6 {
        &self.gram
    }

    pub fn gram_rank(&self) -> usize {
        numerical_rank(&self.gram_singular_values, GRAM_RANK_TOL)
    }

    pub fn tangential_gram_rank(&self) -> usize {
        numerical_rank(&self.tangential_gram_singular_values, GRAM_RANK_TOL)
    }
}

fn numerical_rank(values: &[f64; 6], tol: f64) -> usize {
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > tol * max).count()
}

fn gram_matrix(mesh: &SurfaceMesh, fields: &[Vec<Vec3>]) -> Result<Mat6> {
    let mut g = Mat6::zeros();
    for i in 0..6 {
        for j in i..6 {
            let v = l2_inner(mesh, &fields[i], &fields[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

fn sorted_singular_values(m: &Mat6) -> [f64; 6] {
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    [s[0], s[1], s[2], s[3], s[4], s[5]]
}

/// Evaluates `g^(i)` and `[g^(i)]_τ` and checks that both families are
/// linearly independent in `L²(∂Ω)`.
pub fn traction_basis(aux: Vec<FlowField>, mesh: &SurfaceMesh) -> Result<ThrustBasis> {
    if aux.len() != 6 {
        return Err(Error::LengthMismatch {
            expected: 6,
            got: aux.len(),
        });
    }
    let tractions = aux
        .iter()
        .map(|h| evaluate_traction(h, mesh))
        .collect::<Result<Vec<_>>>()?;
    let tangential_tractions: Vec<Vec<Vec3>> = tractions
        .iter()
        .map(|g| {
            g.iter()
                .zip(mesh.normals())
                .map(|(t, n)| tangential_part(t, n))
                .collect()
        })
        .collect();
    let gram = gram_matrix(mesh, &tractions)?;
    let tgram = gram_matrix(mesh, &tangential_tractions)?;
    let basis = ThrustBasis {
        gram_singular_values: sorted_singular_values(&gram),
        tangential_gram_singular_values: sorted_singular_values(&tgram),
        tractions,
        tangential_tractions,
        aux_fields: aux,
        gram,
    };
    let rank = basis.gram_rank();
    if rank < 6 {
        return Err(Error::DegenerateThrustBasis {
            rank,
            which: "tractions",
        });
    }
    let rank = basis.tangential_gram_rank();
    if rank < 6 {
        return Err(Error::DegenerateThrustBasis {
            rank,
            which: "tangential tractions",
        });
    }
    Ok(basis)
}

/// Grand matrix with its blocks and Schur complements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrandMatrix {
    /// Matrix as assembled from the quadrature.
    pub raw: Mat6,
    /// Symmetric part of `raw`; all blocks below derive from it.
    pub m: Mat6,
    pub k: Matrix3<f64>,
    pub s: Matrix3<f64>,
    pub r: Matrix3<f64>,
    /// `(K − Sᵀ R⁻¹ S)⁻¹`
    pub a: Matrix3<f64>,
    /// `(R − S K⁻¹ Sᵀ)⁻¹`
    pub b: Matrix3<f64>,
    pub k_inv: Matrix3<f64>,
    pub r_inv: Matrix3<f64>,
    /// `‖M − Mᵀ‖_F / ‖M‖_F` of the raw matrix.
    pub symmetry_defect: f64,
    pub min_eigenvalue: f64,
}

fn block(m: &Mat6, row: usize, col: usize) -> Matrix3<f64> {
    m.fixed_view::<3, 3>(row, col).into_owned()
}

impl GrandMatrix {
    /// Builds blocks and Schur complements from a raw 6×6 matrix.
    pub fn from_matrix(raw: Mat6) -> Result<Self> {
        let norm = raw.norm();
        let symmetry_defect = if norm > 0.0 {
            (raw - raw.transpose()).norm() / norm
        } else {
            0.0
        };
        let m = (raw + raw.transpose()) * 0.5;
        let min_eigenvalue = SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(min_eigenvalue > 0.0) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue,
                symmetry_defect,
            });
        }
        let k = block(&m, 0, 0);
        let s = block(&m, 3, 0);
        let r = block(&m, 3, 3);
        let k_inv = k.try_inverse().ok_or(Error::SingularBlock("K"))?;
        let r_inv = r.try_inverse().ok_or(Error::SingularBlock("R"))?;
        let a = (k - s.transpose() * r_inv * s)
            .try_inverse()
            .ok_or(Error::SingularBlock("K - S^T R^-1 S"))?;
        let b = (r - s * k_inv * s.transpose())
            .try_inverse()
            .ok_or(Error::SingularBlock("R - S K^-1 S^T"))?;
        Ok(Self {
            raw,
            m,
            k,
            s,
            r,
            a,
            b,
            k_inv,
            r_inv,
            symmetry_defect,
            min_eigenvalue,
        })
    }

    /// `M⁻¹` from the block formula `[[A, −A Sᵀ R⁻¹], [−B S K⁻¹, B]]`.
    pub fn block_inverse(&self) -> Mat6 {
        let mut inv = Mat6::zeros();
        inv.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.a);
        inv.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&(-self.a * self.s.transpose() * self.r_inv));
        inv.fixed_view_mut::<3, 3>(3, 0)
            .copy_from(&(-self.b * self.s * self.k_inv));
        inv.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.b);
        inv
    }
}

/// `M_ij = Σ_k w_k ẽ_i(x_k) · g^(j)_k`.
pub fn assemble_grand_matrix(basis: &ThrustBasis, mesh: &SurfaceMesh) -> Result<GrandMatrix> {
    let motions = elementary_traces(mesh)?;
    let mut raw = Mat6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            raw[(i, j)] = l2_inner(mesh, &motions[i], &basis.tractions[j])?;
        }
    }
    GrandMatrix::from_matrix(raw)
}

fn elementary_traces(mesh: &SurfaceMesh) -> Result<Vec<Vec<Vec3>>> {
    (1..=6)
        .map(|i| mesh.nodes().iter().map(|x| elementary_rigid_motion(i, x)).collect())
        .collect()
}

/// Block-formula inverse alongside a direct inverse of the same matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GrandInverse {
    pub block: Mat6,
    pub direct: Mat6,
    /// `‖block − direct‖_F / ‖direct‖_F`.
    pub relative_difference: f64,
}

pub fn invert_grand_matrix(gm: &GrandMatrix) -> Result<GrandInverse> {
    let block = gm.block_inverse();
    let direct = gm.m.try_inverse().ok_or(Error::SingularBlock("M"))?;
    let relative_difference = (block - direct).norm() / direct.norm();
    Ok(GrandInverse {
        block,
        direct,
        relative_difference,
    })
}

/// Generalized force `W_i = −∫ v_* · g^(i) dS`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    pub w: Vec6,
}

impl Wrench {
    pub fn force(&self) -> Vec3 {
        Vec3::new(self.w[0], self.w[1], self.w[2])
    }

    pub fn torque(&self) -> Vec3 {
        Vec3::new(self.w[3], self.w[4], self.w[5])
    }
}

pub fn compute_wrench(v_star: &BoundaryData, basis: &ThrustBasis, mesh: &SurfaceMesh) -> Result<Wrench> {
    if v_star.len() != mesh.len() || basis.tractions[0].len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: v_star.len(),
        });
    }
    let v = v_star.vector_field(mesh);
    let mut w = Vec6::zeros();
    for i in 0..6 {
        w[i] = -l2_inner(mesh, &v, &basis.tractions[i])?;
    }
    Ok(Wrench { w })
}

/// Rigid-body velocity from the wrench.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwimVelocity {
    pub xi: Vec3,
    pub omega: Vec3,
    /// `‖M (ξ, ω) − W‖ / ‖W‖` (zero when `W = 0`).
    pub system_residual: f64,
}

/// Tolerance on the consistency of the Schur-complement formulas with `M`.
pub const SWIM_SYSTEM_TOL: f64 = 1e-10;

/// `ξ = A (W_F − Sᵀ R⁻¹ W_T)`, `ω = B (W_T − S K⁻¹ W_F)`.
pub fn swim_velocity(gm: &GrandMatrix, w: &Wrench) -> SwimVelocity {
    let wf = w.force();
    let wt = w.torque();
    let xi = gm.a * (wf - gm.s.transpose() * gm.r_inv * wt);
    let omega = gm.b * (wt - gm.s * gm.k_inv * wf);
    let z = Vec6::new(xi.x, xi.y, xi.z, omega.x, omega.y, omega.z);
    let wn = w.w.norm();
    let system_residual = if wn > 0.0 { (gm.m * z - w.w).norm() / wn } else { 0.0 };
    if system_residual > SWIM_SYSTEM_TOL {
        log::warn!("swim velocity fails M (xi, omega) = W by {system_residual:e}");
    }
    SwimVelocity {
        xi,
        omega,
        system_residual,
    }
}

/// Stokes prediction `A (W_F − Sᵀ R⁻¹ W_T)` for the translational velocity.
pub fn translational_prediction(gm: &GrandMatrix, w: &Wrench) -> Vec3 {
    gm.a * (w.force() - gm.s.transpose() * gm.r_inv * w.torque())
}

/// Stokes prediction `B (W_T − S K⁻¹ W_F)` for the angular velocity.
pub fn rotational_prediction(gm: &GrandMatrix, w: &Wrench) -> Vec3 {
    gm.b * (w.torque() - gm.s * gm.k_inv * w.force())
}

/// `L²(∂Ω)` projection of `v_*` onto the thrust space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThrustProjection {
    pub coefficients: [f64; 6],
    /// `‖v_* − ℙ v_*‖`.
    pub residual_norm: f64,
    /// `‖ℙ v_*‖`.
    pub projection_norm: f64,
    pub data_norm: f64,
    pub is_nonzero: bool,
}

pub fn thrust_projection(
    v_star: &BoundaryData,
    basis: &ThrustBasis,
    mesh: &SurfaceMesh,
    tol: f64,
) -> Result<ThrustProjection> {
    let rank = basis.gram_rank();
    if rank < 6 {
        return Err(Error::DegenerateThrustBasis {
            rank,
            which: "tractions",
        });
    }
    let v = v_star.vector_field(mesh);
    let mut rhs = Vec6::zeros();
    for i in 0..6 {
        rhs[i] = l2_inner(mesh, &v, &basis.tractions[i])?;
    }
    let chol = basis.gram.cholesky().ok_or(Error::DegenerateThrustBasis {
        rank,
        which: "tractions (Cholesky)",
    })?;
    let c = chol.solve(&rhs);
    let projected: Vec<Vec3> = (0..mesh.len())
        .map(|k| (0..6).map(|i| basis.tractions[i][k] * c[i]).sum())
        .collect();
    let residual: Vec<Vec3> = v.iter().zip(&projected).map(|(a, b)| a - b).collect();
    let projection_norm = l2_norm(mesh, &projected)?;
    let data_norm = l2_norm(mesh, &v)?;
    Ok(ThrustProjection {
        coefficients: [c[0], c[1], c[2], c[3], c[4], c[5]],
        residual_norm: l2_norm(mesh, &residual)?,
        projection_norm,
        data_norm,
        is_nonzero: projection_norm > tol * data_norm,
    })
}

/// Removes the thrust-space component of a per-node vector field.
pub fn orthogonal_complement(field: &[Vec3], basis: &ThrustBasis, mesh: &SurfaceMesh) -> Result<Vec<Vec3>> {
    let data = BoundaryData::from_vector_field(mesh, field)?;
    let p = thrust_projection(&data, basis, mesh, THRUST_NONZERO_TOL)?;
    Ok((0..mesh.len())
        .map(|k| field[k] - (0..6).map(|i| basis.tractions[i][k] * p.coefficients[i]).sum::<Vec3>())
        .collect())
}

/// Everything derived from the six auxiliary problems on one body.
#[derive(Clone, Debug)]
pub struct Mobility {
    pub basis: ThrustBasis,
    pub grand: GrandMatrix,
    pub reports: Vec<SolveReport>,
}

impl Mobility {
    /// Runs the six auxiliary solves (concurrently) and assembles `M`.
    pub fn compute(solver: &SlipSolver<'_>) -> Result<Self> {
        let solved = (1..=6usize)
            .into_par_iter()
            .map(|i| solver.solve_auxiliary(i))
            .collect::<Result<Vec<_>>>()?;
        let (fields, reports): (Vec<_>, Vec<_>) = solved.into_iter().unzip();
        let basis = traction_basis(fields, solver.mesh())?;
        let grand = assemble_grand_matrix(&basis, solver.mesh())?;
        Ok(Self { basis, grand, reports })
    }

    pub fn wrench(&self, v_star: &BoundaryData, mesh: &SurfaceMesh) -> Result<Wrench> {
        compute_wrench(v_star, &self.basis, mesh)
    }
}

/// `(Σ w t, Σ w x × t)` for a per-node traction `t`.
pub fn net_force_and_torque(mesh: &SurfaceMesh, tractions: &[Vec3]) -> Result<(Vec3, Vec3)> {
    if tractions.len() != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got: tractions.len(),
        });
    }
    let mut force = Vec3::zeros();
    let mut torque = Vec3::zeros();
    let mut terms = vec![0.0; mesh.len()];
    for c in 0..3 {
        for (t, (g, w)) in terms.iter_mut().zip(tractions.iter().zip(mesh.weights())) {
            *t = g[c] * w;
        }
        force[c] = pairwise_sum(&terms);
        for (k, t) in terms.iter_mut().enumerate() {
            *t = mesh.nodes()[k].cross(&tractions[k])[c] * mesh.weights()[k];
        }
        torque[c] = pairwise_sum(&terms);
    }
    Ok((force, torque))
}
