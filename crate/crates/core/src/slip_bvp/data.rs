use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{elementary_rigid_motion, tangential_part, RigidMotion, SurfaceMesh, Vec3};
use crate::quadrature::pairwise_sum;

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Prescribed boundary velocity split into its normal component and its
/// tangential part (stored as full vectors with no normal component).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    normal_data: Vec<f64>,
    tangential_data: Vec<Vec3>,
}

impl BoundaryData {
    pub fn new(mesh: &SurfaceMesh, normal_data: Vec<f64>, tangential_data: Vec<Vec3>) -> Result<Self> {
        if normal_data.len() != mesh.len() {
            return Err(Error::LengthMismatch {
                expected: mesh.len(),
                got: normal_data.len(),
            });
        }
        if tangential_data.len() != mesh.len() {
            return Err(Error::LengthMismatch {
                expected: mesh.len(),
                got: tangential_data.len(),
            });
        }
        for (k, (t, n)) in tangential_data.iter().zip(mesh.normals()).enumerate() {
            if t.dot(n).abs() > ORTHOGONALITY_TOL * t.norm().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "tangential data at node {k} has normal component {:e}",
                    t.dot(n)
                )));
            }
        }
        Ok(Self {
            normal_data,
            tangential_data,
        })
    }

    pub fn zero(mesh: &SurfaceMesh) -> Self {
        Self {
            normal_data: vec![0.0; mesh.len()],
            tangential_data: vec![Vec3::zeros(); mesh.len()],
        }
    }

    /// Splits a per-node vector field `v` into `(v·n, v − (v·n) n)`.
    pub fn from_vector_field(mesh: &SurfaceMesh, field: &[Vec3]) -> Result<Self> {
        if field.len() != mesh.len() {
            return Err(Error::LengthMismatch {
                expected: mesh.len(),
                got: field.len(),
            });
        }
        let normal_data = field.iter().zip(mesh.normals()).map(|(v, n)| v.dot(n)).collect();
        let tangential_data = field
            .iter()
            .zip(mesh.normals())
            .map(|(v, n)| tangential_part(v, n))
            .collect();
        Ok(Self {
            normal_data,
            tangential_data,
        })
    }

    /// Trace of the elementary rigid motion `ẽ_i`.
    pub fn rigid_trace(mesh: &SurfaceMesh, i: usize) -> Result<Self> {
        let field = mesh
            .nodes()
            .iter()
            .map(|x| elementary_rigid_motion(i, x))
            .collect::<Result<Vec<_>>>()?;
        Self::from_vector_field(mesh, &field)
    }

    pub fn rigid(mesh: &SurfaceMesh, motion: &RigidMotion) -> Result<Self> {
        Self::from_vector_field(mesh, &mesh.rigid_trace(motion))
    }

    /// Treadmilling squirmer mode `B₁ sin θ θ̂` about the `z` axis, written as
    /// `−B₁ [e_z]_τ` so it extends to non-spherical bodies.
    pub fn squirmer(mesh: &SurfaceMesh, b1: f64) -> Self {
        let ez = Vec3::z();
        Self {
            normal_data: vec![0.0; mesh.len()],
            tangential_data: mesh.normals().iter().map(|n| -tangential_part(&ez, n) * b1).collect(),
        }
    }

    /// Uniform normal velocity carrying total flux `phi`.
    pub fn uniform_source(mesh: &SurfaceMesh, phi: f64) -> Self {
        let un = phi / mesh.area();
        Self {
            normal_data: vec![un; mesh.len()],
            tangential_data: vec![Vec3::zeros(); mesh.len()],
        }
    }

    /// Reads per-node data from CSV with header `node,n,t1,t2`: the normal
    /// component and the two components in the mesh's tangent frame.
    pub fn from_csv(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            node: usize,
            n: f64,
            t1: f64,
            t2: f64,
        }
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let mut normal_data = vec![f64::NAN; mesh.len()];
        let mut tangential_data = vec![Vec3::zeros(); mesh.len()];
        for row in reader.deserialize() {
            let row: Row = row?;
            if row.node >= mesh.len() {
                return Err(Error::IndexOutOfRange {
                    index: row.node,
                    max: mesh.len() - 1,
                });
            }
            let [t1, t2] = mesh.tangents()[row.node];
            normal_data[row.node] = row.n;
            tangential_data[row.node] = t1 * row.t1 + t2 * row.t2;
        }
        if let Some(k) = normal_data.iter().position(|v| v.is_nan()) {
            return Err(Error::Config(format!("boundary data file has no row for node {k}")));
        }
        Ok(Self {
            normal_data,
            tangential_data,
        })
    }

    pub fn len(&self) -> usize {
        self.normal_data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normal_data.is_empty()
    }

    pub fn normal_data(&self) -> &[f64] {
        &self.normal_data
    }

    pub fn tangential_data(&self) -> &[Vec3] {
        &self.tangential_data
    }

    /// The full boundary velocity `(v·n) n + v_τ`.
    pub fn vector_field(&self, mesh: &SurfaceMesh) -> Vec<Vec3> {
        self.normal_data
            .iter()
            .zip(&self.tangential_data)
            .zip(mesh.normals())
            .map(|((un, t), n)| n * *un + t)
            .collect()
    }

    /// Net flux `Σ w_k (v·n)_k` through the boundary.
    pub fn flux(&self, mesh: &SurfaceMesh) -> f64 {
        let terms: Vec<f64> = self
            .normal_data
            .iter()
            .zip(mesh.weights())
            .map(|(u, w)| u * w)
            .collect();
        pairwise_sum(&terms)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            normal_data: self.normal_data.iter().map(|v| v * c).collect(),
            tangential_data: self.tangential_data.iter().map(|v| v * c).collect(),
        }
    }

    /// `a·self + other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        Self {
            normal_data: self
                .normal_data
                .iter()
                .zip(&other.normal_data)
                .map(|(x, y)| a * x + y)
                .collect(),
            tangential_data: self
                .tangential_data
                .iter()
                .zip(&other.tangential_data)
                .map(|(x, y)| x * a + y)
                .collect(),
        }
    }
}
