//! Discretized body surfaces, rigid motions and boundary quadrature.
//!
//! Normals follow the fluid-side convention used throughout the crate: they
//! point *out of the fluid*, i.e. into the body. For a closed surface this
//! makes `Σ_k w_k (n_k · x_k) = −3·volume`, which is the sign the unit-ball
//! checks pin down.

mod mesh_io;
mod parametric;

pub use mesh_io::load_triangle_mesh;
pub use parametric::{make_parametric_surface, parametric_node_count, Shape};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Mass and inertia of the body. Carried along for completeness; the steady
/// Stokes solves never read them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyMetadata {
    pub mass: f64,
    pub inertia: Mat3,
}

impl Default for BodyMetadata {
    fn default() -> Self {
        Self {
            mass: 0.0,
            inertia: Mat3::zeros(),
        }
    }
}

impl BodyMetadata {
    pub fn new(mass: f64, inertia: Mat3) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidGeometry(format!("mass must be >= 0, got {mass}")));
        }
        if (inertia - inertia.transpose()).norm() > 1e-12 * (1.0 + inertia.norm()) {
            return Err(Error::InvalidGeometry("inertia tensor must be symmetric".into()));
        }
        Ok(Self { mass, inertia })
    }
}

/// Closed triangulation retained by meshes loaded from file.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub vertices: Vec<Vec3>,
    /// Faces oriented counter-clockwise seen from outside the body.
    pub faces: Vec<[usize; 3]>,
}

#[derive(Clone, Debug)]
pub enum SurfaceKind {
    Parametric(Shape),
    Triangulated(Triangulation),
}

/// Body boundary sampled at quadrature nodes.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    nodes: Vec<Vec3>,
    normals: Vec<Vec3>,
    weights: Vec<f64>,
    tangents: Vec<[Vec3; 2]>,
    metadata: BodyMetadata,
    kind: SurfaceKind,
    volume: f64,
    centroid: Vec3,
}

impl SurfaceMesh {
    /// Builds a mesh from raw node data; `normals` must already point into
    /// the body. Tangent frames are generated.
    pub fn from_parts(
        nodes: Vec<Vec3>,
        normals: Vec<Vec3>,
        weights: Vec<f64>,
        kind: SurfaceKind,
        volume: f64,
        centroid: Vec3,
    ) -> Result<Self> {
        let n = nodes.len();
        if normals.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: normals.len(),
            });
        }
        if weights.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: weights.len(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidGeometry("surface has no nodes".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::InvalidGeometry(format!("non-positive quadrature weight {w}")));
        }
        let normals: Vec<Vec3> = normals
            .into_iter()
            .map(|v| {
                let len = v.norm();
                if len > 0.0 && len.is_finite() {
                    Ok(v / len)
                } else {
                    Err(Error::InvalidGeometry("zero or non-finite normal".into()))
                }
            })
            .collect::<Result<_>>()?;
        let tangents = normals.iter().map(tangent_frame).collect();
        Ok(Self {
            nodes,
            normals,
            weights,
            tangents,
            metadata: BodyMetadata::default(),
            kind,
            volume,
            centroid,
        })
    }

    pub fn with_metadata(mut self, metadata: BodyMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tangents(&self) -> &[[Vec3; 2]] {
        &self.tangents
    }

    pub fn metadata(&self) -> &BodyMetadata {
        &self.metadata
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    /// Enclosed volume of the body.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Volume centroid of the body.
    pub fn centroid(&self) -> Vec3 {
        self.centroid
    }

    pub fn area(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Largest distance from the centroid to a node.
    pub fn outer_radius(&self) -> f64 {
        self.nodes
            .iter()
            .map(|x| (x - self.centroid).norm())
            .fold(0.0, f64::max)
    }

    /// Distance from the centroid to the boundary along unit direction `dir`.
    /// Only meaningful for bodies star-shaped about their centroid.
    pub fn radial_extent(&self, dir: &Vec3) -> Option<f64> {
        match &self.kind {
            SurfaceKind::Parametric(shape) => Some(shape.radial_extent(dir)),
            SurfaceKind::Triangulated(tri) => {
                let origin = self.centroid;
                tri.faces
                    .iter()
                    .filter_map(|f| {
                        ray_triangle(
                            &origin,
                            dir,
                            &tri.vertices[f[0]],
                            &tri.vertices[f[1]],
                            &tri.vertices[f[2]],
                        )
                    })
                    .reduce(f64::max)
            }
        }
    }

    /// Whether `x` lies strictly inside the body.
    pub fn contains(&self, x: &Vec3) -> bool {
        let d = x - self.centroid;
        let r = d.norm();
        if r == 0.0 {
            return true;
        }
        match self.radial_extent(&(d / r)) {
            Some(extent) => r < extent,
            None => false,
        }
    }

    /// Rigid-motion trace `a + b × x_k` at every node.
    pub fn rigid_trace(&self, motion: &RigidMotion) -> Vec<Vec3> {
        self.nodes.iter().map(|x| motion.eval(x)).collect()
    }
}

fn tangent_frame(n: &Vec3) -> [Vec3; 2] {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vec3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let t1 = axis.cross(n).normalize();
    let t2 = n.cross(&t1);
    [t1, t2]
}

// Möller–Trumbore, returns the ray parameter of a forward hit.
fn ray_triangle(origin: &Vec3, dir: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - a;
    let u = s.dot(&p) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > 0.0).then_some(t)
}

/// Rigid velocity field `x ↦ a + b × x`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RigidMotion {
    pub a: Vec3,
    pub b: Vec3,
}

impl RigidMotion {
    pub fn new(a: Vec3, b: Vec3) -> Self {
        Self { a, b }
    }

    /// The rigid motion with generalized velocity `(a, b) = z`.
    pub fn from_six(z: &[f64; 6]) -> Self {
        Self {
            a: Vec3::new(z[0], z[1], z[2]),
            b: Vec3::new(z[3], z[4], z[5]),
        }
    }

    pub fn eval(&self, x: &Vec3) -> Vec3 {
        self.a + self.b.cross(x)
    }
}

/// The six elementary rigid motions: `e_i` for `i = 1..3`, `e_{i-3} × x`
/// for `i = 4..6`.
pub fn elementary_rigid_motion(i: usize, x: &Vec3) -> Result<Vec3> {
    match i {
        1..=3 => Ok(unit(i - 1)),
        4..=6 => Ok(unit(i - 4).cross(x)),
        _ => Err(Error::IndexOutOfRange { index: i, max: 6 }),
    }
}

pub(crate) fn unit(axis: usize) -> Vec3 {
    let mut v = Vec3::zeros();
    v[axis] = 1.0;
    v
}

/// `v − (v·n) n`, the part of `v` orthogonal to the unit vector `n`.
pub fn tangential_part(v: &Vec3, n: &Vec3) -> Vec3 {
    v - n * v.dot(n)
}

/// `Σ_k w_k f_k` for a per-node scalar field.
pub fn surface_integral(mesh: &SurfaceMesh, field: &[f64]) -> Result<f64> {
    check_len(mesh, field.len())?;
    let terms: Vec<f64> = field.iter().zip(mesh.weights()).map(|(f, w)| f * w).collect();
    Ok(pairwise_sum(&terms))
}

/// `Σ_k w_k f_k` for a per-node vector field.
pub fn surface_integral_vec(mesh: &SurfaceMesh, field: &[Vec3]) -> Result<Vec3> {
    check_len(mesh, field.len())?;
    let mut out = Vec3::zeros();
    let mut terms = vec![0.0; field.len()];
    for c in 0..3 {
        for (t, (f, w)) in terms.iter_mut().zip(field.iter().zip(mesh.weights())) {
            *t = f[c] * w;
        }
        out[c] = pairwise_sum(&terms);
    }
    Ok(out)
}

/// Weighted L² inner product `Σ_k w_k f_k · g_k` of two per-node vector fields.
pub fn l2_inner(mesh: &SurfaceMesh, f: &[Vec3], g: &[Vec3]) -> Result<f64> {
    check_len(mesh, f.len())?;
    check_len(mesh, g.len())?;
    let terms: Vec<f64> = f
        .iter()
        .zip(g)
        .zip(mesh.weights())
        .map(|((a, b), w)| w * a.dot(b))
        .collect();
    Ok(pairwise_sum(&terms))
}

pub fn l2_norm(mesh: &SurfaceMesh, f: &[Vec3]) -> Result<f64> {
    Ok(l2_inner(mesh, f, f)?.max(0.0).sqrt())
}

fn check_len(mesh: &SurfaceMesh, got: usize) -> Result<()> {
    if got != mesh.len() {
        return Err(Error::LengthMismatch {
            expected: mesh.len(),
            got,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn elementary_motions() {
        let x = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(
            elementary_rigid_motion(1, &Vec3::new(3.0, -2.0, 5.0)).unwrap(),
            Vec3::x()
        );
        // e_1 × e_3 = −e_2
        assert_eq!(elementary_rigid_motion(4, &x).unwrap(), Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(elementary_rigid_motion(6, &x).unwrap(), Vec3::zeros());
        assert!(matches!(
            elementary_rigid_motion(0, &x),
            Err(Error::IndexOutOfRange { index: 0, .. })
        ));
        assert!(elementary_rigid_motion(7, &x).is_err());
    }

    #[test]
    fn rigid_motion_eval_is_exact() {
        let m = RigidMotion::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(-0.5, 0.25, 2.0));
        let x = Vec3::new(0.3, -1.1, 0.7);
        assert_eq!(m.eval(&x), m.a + m.b.cross(&x));
    }

    #[test]
    fn tangential_projection_cases() {
        let n = Vec3::z();
        assert_eq!(tangential_part(&n, &n), Vec3::zeros());
        assert_eq!(tangential_part(&Vec3::x(), &n), Vec3::x());
        assert_eq!(tangential_part(&Vec3::new(1.0, 1.0, 0.0), &n), Vec3::new(1.0, 1.0, 0.0));
        let v = Vec3::new(0.3, -2.0, 4.0);
        let nn = Vec3::new(1.0, 2.0, 2.0) / 3.0;
        let cross_form = nn.cross(&v.cross(&nn));
        assert!((tangential_part(&v, &nn) - cross_form).norm() < 1e-15);
    }

    #[test]
    fn surface_integral_length_mismatch() {
        let mesh = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 8).unwrap();
        assert!(matches!(
            surface_integral(&mesh, &[1.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn sphere_normal_flux_sign() {
        // Normals point into the body, so the divergence identity carries a minus sign.
        let mesh = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 16).unwrap();
        let f: Vec<f64> = mesh.nodes().iter().zip(mesh.normals()).map(|(x, n)| n.dot(x)).collect();
        let flux = surface_integral(&mesh, &f).unwrap();
        assert!((flux + 4.0 * PI).abs() < 1e-12);
        assert!((flux + 3.0 * mesh.volume()).abs() < 1e-12);
    }

    #[test]
    fn containment_on_sphere() {
        let mesh = make_parametric_surface(&Shape::Sphere { radius: 2.0 }, 8).unwrap();
        assert!(mesh.contains(&Vec3::new(0.0, 1.9, 0.0)));
        assert!(!mesh.contains(&Vec3::new(0.0, 2.1, 0.0)));
    }
}
