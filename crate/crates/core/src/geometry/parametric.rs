use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{SurfaceKind, SurfaceMesh, Vec3};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Analytic body shapes, centred at the origin with the symmetry axis on `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Sphere {
        radius: f64,
    },
    /// Spheroid with equatorial semi-axis `a_axis` and polar semi-axis `c_axis`.
    Spheroid {
        a_axis: f64,
        c_axis: f64,
    },
}

impl Shape {
    fn axes(&self) -> (f64, f64) {
        match *self {
            Shape::Sphere { radius } => (radius, radius),
            Shape::Spheroid { a_axis, c_axis } => (a_axis, c_axis),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, c) = self.axes();
        if !(a > 0.0 && c > 0.0 && a.is_finite() && c.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "shape dimensions must be positive, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        let (a, c) = self.axes();
        4.0 / 3.0 * PI * a * a * c
    }

    /// Distance from the origin to the surface along unit direction `dir`.
    pub fn radial_extent(&self, dir: &Vec3) -> f64 {
        let (a, c) = self.axes();
        let q = (dir.x * dir.x + dir.y * dir.y) / (a * a) + dir.z * dir.z / (c * c);
        1.0 / q.sqrt()
    }
}

/// Samples `shape` on a reduced Gaussian grid: `resolution` Gauss–Legendre
/// rings in `u = cos θ`, ring `k` carrying `max(3, round(2·resolution·sin θ_k))`
/// equispaced azimuths offset by half a step. Node spacing is then roughly
/// uniform and no node sits on a pole; `N ≈ 1.27·resolution²`.
///
/// Node ordering is ring-major with rings running from the south pole
/// (`u → −1`) to the north pole and azimuth increasing within a ring. This
/// ordering is stable and is what per-node data files refer to.
pub fn make_parametric_surface(shape: &Shape, resolution: usize) -> Result<SurfaceMesh> {
    shape.validate()?;
    if resolution < 8 {
        return Err(Error::InvalidGeometry(format!(
            "resolution must be >= 8, got {resolution}"
        )));
    }
    let (a, c) = shape.axes();
    let (us, wu) = gauss_legendre(resolution);

    let mut nodes = Vec::new();
    let mut normals = Vec::new();
    let mut weights = Vec::new();
    for (u, w) in us.iter().zip(&wu) {
        let s = (1.0 - u * u).sqrt();
        let n_phi = ring_size(resolution, s);
        let dphi = 2.0 * PI / n_phi as f64;
        // |∂x/∂u × ∂x/∂φ| for the polar map x = (a s cos φ, a s sin φ, c u).
        let jac = a * (a * a * u * u + c * c * s * s).sqrt();
        for k in 0..n_phi {
            let phi = (k as f64 + 0.5) * dphi;
            let (sp, cp) = phi.sin_cos();
            let x = Vec3::new(a * s * cp, a * s * sp, c * u);
            let outward = Vec3::new(x.x / (a * a), x.y / (a * a), x.z / (c * c));
            nodes.push(x);
            normals.push(-outward.normalize());
            weights.push(w * jac * dphi);
        }
    }
    SurfaceMesh::from_parts(
        nodes,
        normals,
        weights,
        SurfaceKind::Parametric(*shape),
        shape.volume(),
        Vec3::zeros(),
    )
}

fn ring_size(resolution: usize, sin_theta: f64) -> usize {
    ((2.0 * resolution as f64 * sin_theta).round() as usize).max(3)
}

/// Node count of [`make_parametric_surface`] at `resolution`.
pub fn parametric_node_count(resolution: usize) -> usize {
    let (us, _) = gauss_legendre(resolution);
    us.iter().map(|u| ring_size(resolution, (1.0 - u * u).sqrt())).sum()
}
