//! Free-space Stokes fundamental solutions (unit viscosity) and flow fields
//! built by superposing them from sources inside the body.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mat3, Shape, SurfaceKind, SurfaceMesh, Vec3};

const SINGULAR_RADIUS: f64 = 1e-12;
/// Sources closer than this to the boundary make the collocation matrix
/// badly conditioned.
pub const CLOSE_SOURCE_DISTANCE: f64 = 0.01;
/// Default source radius as a fraction of the node radius.
pub const DEFAULT_SHRINK: f64 = 0.5;
/// Default source thinning: one source per two nodes, so the collocation
/// fit is a genuine least-squares problem.
pub const DEFAULT_STRIDE: usize = 2;

fn separation(source: &Vec3, x: &Vec3) -> Result<(Vec3, f64)> {
    let r = x - source;
    let d = r.norm();
    if !(d > SINGULAR_RADIUS) {
        return Err(Error::SingularEvaluation { distance: d });
    }
    Ok((r, d))
}

/// Oseen tensor applied to `strength`: velocity `(I/r + r̂⊗r̂/r) f / 8π` and
/// pressure `r·f / 4π r³`.
pub fn stokeslet_velocity(source: &Vec3, strength: &Vec3, x: &Vec3) -> Result<(Vec3, f64)> {
    let (r, d) = separation(source, x)?;
    let rf = r.dot(strength);
    let inv = 1.0 / d;
    let inv3 = inv * inv * inv;
    let u = (strength * inv + r * (rf * inv3)) / (8.0 * PI);
    let p = rf * inv3 / (4.0 * PI);
    Ok((u, p))
}

/// Velocity gradient `G_ij = ∂u_i/∂x_j` of a Stokeslet.
pub fn stokeslet_gradient(source: &Vec3, strength: &Vec3, x: &Vec3) -> Result<Mat3> {
    let (r, d) = separation(source, x)?;
    let rf = r.dot(strength);
    let inv2 = 1.0 / (d * d);
    let inv3 = inv2 / d;
    let c = 1.0 / (8.0 * PI);
    // −f_i r_j/r³ + (δ_ij (r·f) + r_i f_j)/r³ − 3 (r·f) r_i r_j / r⁵
    let g = (-strength * r.transpose() + r * strength.transpose()) * inv3 + Mat3::identity() * (rf * inv3)
        - r * r.transpose() * (3.0 * rf * inv3 * inv2);
    Ok(g * c)
}

/// Cauchy stress `−p I + 2 D(u)` of a Stokeslet, `−3 (r⊗r)(r·f) / 4π r⁵`.
pub fn stokeslet_stress(source: &Vec3, strength: &Vec3, x: &Vec3) -> Result<Mat3> {
    let (r, d) = separation(source, x)?;
    let rf = r.dot(strength);
    let inv5 = 1.0 / (d * d * d * d * d);
    Ok(r * r.transpose() * (-3.0 * rf * inv5 / (4.0 * PI)))
}

/// Symmetric part of a velocity gradient.
pub fn strain(gradient: &Mat3) -> Mat3 {
    (gradient + gradient.transpose()) * 0.5
}

/// Potential point source carrying a net volume flux. The unit field is
/// `σ(x) = −(x − x₀) / 4π|x − x₀|³`, whose flux through the body boundary
/// measured with into-body normals is `+1`; `strength` multiplies it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSource {
    pub location: Vec3,
    pub strength: f64,
}

impl PointSource {
    pub fn velocity(&self, x: &Vec3) -> Result<Vec3> {
        let (r, d) = separation(&self.location, x)?;
        Ok(r * (-self.strength / (4.0 * PI * d * d * d)))
    }

    pub fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        let (r, d) = separation(&self.location, x)?;
        let inv2 = 1.0 / (d * d);
        let inv3 = inv2 / d;
        let g = Mat3::identity() * inv3 - r * r.transpose() * (3.0 * inv3 * inv2);
        Ok(g * (-self.strength / (4.0 * PI)))
    }
}

/// Interior source locations for the fundamental-solution representation.
#[derive(Clone, Debug)]
pub struct SourceSet {
    locations: Vec<Vec3>,
    min_surface_distance: f64,
}

impl SourceSet {
    /// Wraps arbitrary interior points; the minimum distance to `mesh` nodes
    /// is recorded and every point must lie inside the body.
    pub fn new(locations: Vec<Vec3>, mesh: &SurfaceMesh) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::Placement("empty source set".into()));
        }
        if locations.len() > mesh.len() {
            return Err(Error::Placement(format!(
                "{} sources exceed {} surface nodes",
                locations.len(),
                mesh.len()
            )));
        }
        for s in &locations {
            if !mesh.contains(s) {
                return Err(Error::Placement(format!("source {s:?} lies outside the body")));
            }
        }
        let min_surface_distance = locations
            .iter()
            .flat_map(|s| mesh.nodes().iter().map(move |x| (x - s).norm()))
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            locations,
            min_surface_distance,
        })
    }

    pub fn locations(&self) -> &[Vec3] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn min_surface_distance(&self) -> f64 {
        self.min_surface_distance
    }

    /// True when some source is closer than [`CLOSE_SOURCE_DISTANCE`].
    pub fn is_ill_conditioned(&self) -> bool {
        self.min_surface_distance < CLOSE_SOURCE_DISTANCE
    }
}

/// Places a source at `centroid + shrink (x_k − centroid)` for every
/// `stride`-th node. Requires the body to be star-shaped about its centroid.
pub fn place_sources(mesh: &SurfaceMesh, shrink: f64, stride: usize) -> Result<SourceSet> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shrink must be in (0, 1), got {shrink}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be >= 1".into()));
    }
    let c = mesh.centroid();
    let locations: Vec<Vec3> = mesh
        .nodes()
        .iter()
        .step_by(stride)
        .map(|x| c + (x - c) * shrink)
        .collect();
    let set = SourceSet::new(locations, mesh)?;
    if set.is_ill_conditioned() {
        log::warn!(
            "sources within {:.3e} of the surface (shrink {shrink}); expect an ill-conditioned system",
            set.min_surface_distance
        );
    }
    Ok(set)
}

/// How interior sources are laid out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourcePlacement {
    /// [`place_sources`] on every body.
    Radial,
    /// [`place_confocal_sources`] on parametric spheroids, [`place_sources`]
    /// otherwise.
    #[default]
    Confocal,
}

impl SourcePlacement {
    pub fn place(self, mesh: &SurfaceMesh, shrink: f64, stride: usize) -> Result<SourceSet> {
        match (self, mesh.kind()) {
            (SourcePlacement::Confocal, SurfaceKind::Parametric(Shape::Spheroid { .. })) => {
                place_confocal_sources(mesh, shrink, stride)
            }
            _ => place_sources(mesh, shrink, stride),
        }
    }
}

/// Places sources on the spheroid confocal with a parametric spheroid whose
/// minor semi-axis is `shrink` times the body's, at the same spheroidal
/// angles as every `stride`-th node. The singular focal segment (prolate)
/// or disk (oblate) of the exterior field then stays inside the source
/// surface, which a similarity map cannot guarantee for elongated bodies.
/// On a sphere this is the similarity map.
pub fn place_confocal_sources(mesh: &SurfaceMesh, shrink: f64, stride: usize) -> Result<SourceSet> {
    let SurfaceKind::Parametric(Shape::Spheroid { a_axis: a, c_axis: c }) = *mesh.kind() else {
        return Err(Error::Placement(
            "confocal placement needs a parametric spheroid".into(),
        ));
    };
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shrink must be in (0, 1), got {shrink}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be >= 1".into()));
    }
    let (a_in, c_in) = if c >= a {
        let a_in = shrink * a;
        (a_in, (c * c - a * a + a_in * a_in).sqrt())
    } else {
        let c_in = shrink * c;
        ((a * a - c * c + c_in * c_in).sqrt(), c_in)
    };
    let locations: Vec<Vec3> = mesh
        .nodes()
        .iter()
        .step_by(stride)
        .map(|x| Vec3::new(x.x * (a_in / a), x.y * (a_in / a), x.z * (c_in / c)))
        .collect();
    let set = SourceSet::new(locations, mesh)?;
    if set.is_ill_conditioned() {
        log::warn!(
            "sources within {:.3e} of the surface (shrink {shrink}); expect an ill-conditioned system",
            set.min_surface_distance
        );
    }
    Ok(set)
}

/// Exterior Stokes field: Stokeslets at shared source locations plus an
/// optional flux-carrying point source.
#[derive(Clone, Debug)]
pub struct FlowField {
    sources: Arc<SourceSet>,
    strengths: Vec<Vec3>,
    point_source: Option<PointSource>,
}

impl FlowField {
    pub fn new(sources: Arc<SourceSet>, strengths: Vec<Vec3>) -> Result<Self> {
        if strengths.len() != sources.len() {
            return Err(Error::LengthMismatch {
                expected: sources.len(),
                got: strengths.len(),
            });
        }
        Ok(Self {
            sources,
            strengths,
            point_source: None,
        })
    }

    pub fn zero(sources: Arc<SourceSet>) -> Self {
        let strengths = vec![Vec3::zeros(); sources.len()];
        Self {
            sources,
            strengths,
            point_source: None,
        }
    }

    pub fn with_point_source(mut self, point_source: Option<PointSource>) -> Self {
        self.point_source = point_source;
        self
    }

    pub fn sources(&self) -> &Arc<SourceSet> {
        &self.sources
    }

    pub fn strengths(&self) -> &[Vec3] {
        &self.strengths
    }

    pub fn point_source(&self) -> Option<&PointSource> {
        self.point_source.as_ref()
    }

    /// Net flux carried by the point source (zero without one).
    pub fn source_flux(&self) -> f64 {
        self.point_source.map_or(0.0, |p| p.strength)
    }

    /// Total Stokeslet force `Σ f_k`.
    pub fn total_strength(&self) -> Vec3 {
        self.strengths.iter().sum()
    }

    /// `Σ_i c_i F_i` over fields sharing one source set.
    pub fn linear_combination(terms: &[(f64, &FlowField)]) -> Result<FlowField> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let sources = first.sources.clone();
        let mut strengths = vec![Vec3::zeros(); sources.len()];
        let mut point: Option<PointSource> = None;
        for (c, f) in terms {
            if !Arc::ptr_eq(&f.sources, &sources) {
                return Err(Error::InvalidParameter(
                    "fields in a combination must share their source set".into(),
                ));
            }
            for (s, g) in strengths.iter_mut().zip(&f.strengths) {
                *s += g * *c;
            }
            if let Some(p) = f.point_source {
                match &mut point {
                    Some(q) if (q.location - p.location).norm() == 0.0 => q.strength += c * p.strength,
                    Some(_) => {
                        return Err(Error::InvalidParameter(
                            "point sources at different locations cannot be merged".into(),
                        ))
                    }
                    None => {
                        point = Some(PointSource {
                            location: p.location,
                            strength: c * p.strength,
                        })
                    }
                }
            }
        }
        Ok(FlowField {
            sources,
            strengths,
            point_source: point,
        })
    }

    pub fn scaled(&self, c: f64) -> FlowField {
        FlowField {
            sources: self.sources.clone(),
            strengths: self.strengths.iter().map(|s| s * c).collect(),
            point_source: self.point_source.map(|p| PointSource {
                strength: p.strength * c,
                ..p
            }),
        }
    }

    pub fn velocity_pressure(&self, x: &Vec3) -> Result<(Vec3, f64)> {
        let mut u = Vec3::zeros();
        let mut p = 0.0;
        for (s, f) in self.sources.locations().iter().zip(&self.strengths) {
            let (du, dp) = stokeslet_velocity(s, f, x)?;
            u += du;
            p += dp;
        }
        if let Some(ps) = &self.point_source {
            u += ps.velocity(x)?;
        }
        Ok((u, p))
    }

    pub fn velocity(&self, x: &Vec3) -> Result<Vec3> {
        Ok(self.velocity_pressure(x)?.0)
    }

    pub fn gradient(&self, x: &Vec3) -> Result<Mat3> {
        let mut g = Mat3::zeros();
        for (s, f) in self.sources.locations().iter().zip(&self.strengths) {
            g += stokeslet_gradient(s, f, x)?;
        }
        if let Some(ps) = &self.point_source {
            g += ps.gradient(x)?;
        }
        Ok(g)
    }

    pub fn strain(&self, x: &Vec3) -> Result<Mat3> {
        Ok(strain(&self.gradient(x)?))
    }

    /// Stress `−p I + 2 D(u)`.
    pub fn stress(&self, x: &Vec3) -> Result<Mat3> {
        let mut t = Mat3::zeros();
        for (s, f) in self.sources.locations().iter().zip(&self.strengths) {
            t += stokeslet_stress(s, f, x)?;
        }
        if let Some(ps) = &self.point_source {
            let g = ps.gradient(x)?;
            t += g + g.transpose();
        }
        Ok(t)
    }
}

/// Velocity and pressure at each point.
pub fn evaluate_flow(field: &FlowField, points: &[Vec3]) -> Result<Vec<(Vec3, f64)>> {
    points.par_iter().map(|x| field.velocity_pressure(x)).collect()
}

/// Traction `T(u,p) n` at every mesh node, with the mesh's into-body normals.
pub fn evaluate_traction(field: &FlowField, mesh: &SurfaceMesh) -> Result<Vec<Vec3>> {
    mesh.nodes()
        .par_iter()
        .zip(mesh.normals().par_iter())
        .map(|(x, n)| Ok(field.stress(x)? * n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_parametric_surface, surface_integral_vec, Shape};

    fn sphere(res: usize) -> SurfaceMesh {
        make_parametric_surface(&Shape::Sphere { radius: 1.0 }, res).unwrap()
    }

    #[test]
    fn oseen_axis_cases() {
        let d = 0.37;
        let f = Vec3::x();
        let (u, _) = stokeslet_velocity(&Vec3::zeros(), &f, &Vec3::new(d, 0.0, 0.0)).unwrap();
        assert!((u - Vec3::new(1.0 / (4.0 * PI * d), 0.0, 0.0)).norm() < 1e-15);
        let (u, _) = stokeslet_velocity(&Vec3::zeros(), &f, &Vec3::new(0.0, d, 0.0)).unwrap();
        assert!((u - Vec3::new(1.0 / (8.0 * PI * d), 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn homogeneity() {
        let s = Vec3::new(0.1, -0.2, 0.3);
        let f = Vec3::new(0.3, 1.0, -2.0);
        let r = Vec3::new(0.4, 0.5, -0.1);
        let (u1, _) = stokeslet_velocity(&s, &f, &(s + r)).unwrap();
        let (u10, _) = stokeslet_velocity(&s, &f, &(s + r * 10.0)).unwrap();
        assert!((u1 / 10.0 - u10).norm() < 1e-15 * u1.norm());
        let t1 = stokeslet_stress(&s, &f, &(s + r)).unwrap();
        let t2 = stokeslet_stress(&s, &f, &(s + r * 2.0)).unwrap();
        assert!((t1 / 4.0 - t2).norm() < 1e-14 * t1.norm());
    }

    #[test]
    fn singular_points_are_rejected() {
        let s = Vec3::new(0.0, 0.0, 0.5);
        assert!(matches!(
            stokeslet_velocity(&s, &Vec3::x(), &s),
            Err(Error::SingularEvaluation { .. })
        ));
        assert!(stokeslet_stress(&s, &Vec3::x(), &s).is_err());
        let p = PointSource {
            location: s,
            strength: 1.0,
        };
        assert!(p.velocity(&s).is_err());
    }

    #[test]
    fn source_placement_on_sphere() {
        let mesh = sphere(10);
        let set = place_sources(&mesh, 0.7, 1).unwrap();
        assert_eq!(set.len(), mesh.len());
        for s in set.locations() {
            assert!((s.norm() - 0.7).abs() < 1e-12);
        }
        assert!((set.min_surface_distance() - 0.3).abs() < 0.05);
        for stride in [2, 3, 7] {
            let set = place_sources(&mesh, 0.7, stride).unwrap();
            assert_eq!(set.len(), mesh.len().div_ceil(stride));
        }
        let close = place_sources(&mesh, 0.999, 1).unwrap();
        assert!(close.is_ill_conditioned());
        assert!(place_sources(&mesh, 1.0, 1).is_err());
        assert!(place_sources(&mesh, 0.5, 0).is_err());
    }

    #[test]
    fn confocal_placement_encloses_the_foci() {
        for (a, c) in [(1.0, 2.0), (1.0, 0.6)] {
            let mesh = make_parametric_surface(&Shape::Spheroid { a_axis: a, c_axis: c }, 14).unwrap();
            let set = place_confocal_sources(&mesh, 0.5, 2).unwrap();
            assert_eq!(set.len(), mesh.len().div_ceil(2));
            let f2 = (c * c - a * a).abs();
            let (a_in, c_in) = if c > a {
                (0.5 * a, (f2 + 0.25 * a * a).sqrt())
            } else {
                ((f2 + 0.25 * c * c).sqrt(), 0.5 * c)
            };
            for s in set.locations() {
                let q = (s.x * s.x + s.y * s.y) / (a_in * a_in) + s.z * s.z / (c_in * c_in);
                assert!((q - 1.0).abs() < 1e-12);
            }
            assert!(c_in.max(a_in) > f2.sqrt());
        }
        let sphere_mesh = sphere(10);
        assert!(place_confocal_sources(&sphere_mesh, 0.5, 1).is_err());
        let auto = SourcePlacement::Confocal.place(&sphere_mesh, 0.5, 1).unwrap();
        assert_eq!(
            auto.locations(),
            place_sources(&sphere_mesh, 0.5, 1).unwrap().locations()
        );
    }

    #[test]
    fn sources_outside_body_are_rejected() {
        let mesh = sphere(8);
        let outside = vec![Vec3::new(0.0, 0.0, 1.5)];
        assert!(matches!(SourceSet::new(outside, &mesh), Err(Error::Placement(_))));
    }

    #[test]
    fn superposition() {
        let mesh = sphere(8);
        let set = Arc::new(place_sources(&mesh, 0.5, 16).unwrap());
        let zero = FlowField::zero(set.clone());
        let pts = [Vec3::new(2.0, 0.1, -0.3), Vec3::new(-1.2, 1.5, 0.7)];
        for (u, p) in evaluate_flow(&zero, &pts).unwrap() {
            assert_eq!(u, Vec3::zeros());
            assert_eq!(p, 0.0);
        }
        let k = set.len();
        let mut a = vec![Vec3::zeros(); k];
        let mut b = vec![Vec3::zeros(); k];
        a[0] = Vec3::new(1.0, -2.0, 0.5);
        b[1] = Vec3::new(-0.3, 0.2, 1.0);
        let fa = FlowField::new(set.clone(), a.clone()).unwrap();
        let fb = FlowField::new(set.clone(), b.clone()).unwrap();
        let both = FlowField::linear_combination(&[(1.0, &fa), (1.0, &fb)]).unwrap();
        let single = stokeslet_velocity(&set.locations()[0], &a[0], &pts[0]).unwrap();
        assert!((fa.velocity(&pts[0]).unwrap() - single.0).norm() < 1e-16);
        for x in &pts {
            let sum = fa.velocity(x).unwrap() + fb.velocity(x).unwrap();
            assert!((both.velocity(x).unwrap() - sum).norm() < 1e-14);
        }
        let ta = evaluate_traction(&fa, &mesh).unwrap();
        let t3 = evaluate_traction(&fa.scaled(3.0), &mesh).unwrap();
        for (x, y) in ta.iter().zip(&t3) {
            assert!((x * 3.0 - y).norm() < 1e-14 * (1.0 + y.norm()));
        }
        assert!(evaluate_traction(&zero, &mesh)
            .unwrap()
            .iter()
            .all(|t| *t == Vec3::zeros()));
    }

    #[test]
    fn momentum_flux_is_surface_independent() {
        let mesh = sphere(24);
        let set = Arc::new(place_sources(&mesh, 0.5, 37).unwrap());
        let strengths: Vec<Vec3> = (0..set.len())
            .map(|k| Vec3::new((k as f64).sin(), (2.0 * k as f64).cos(), 0.3))
            .collect();
        let field = FlowField::new(set, strengths).unwrap();
        let inner = surface_integral_vec(&mesh, &evaluate_traction(&field, &mesh).unwrap()).unwrap();
        let far = make_parametric_surface(&Shape::Sphere { radius: 20.0 }, 24).unwrap();
        let outer = surface_integral_vec(&far, &evaluate_traction(&field, &far).unwrap()).unwrap();
        let total = field.total_strength();
        assert!((inner - total).norm() < 1e-6 * total.norm());
        assert!((outer - total).norm() < 1e-6 * total.norm());
    }

    #[test]
    fn point_source_flux_is_one() {
        let mesh = sphere(16);
        let ps = PointSource {
            location: Vec3::new(0.1, 0.0, -0.2),
            strength: 1.0,
        };
        let flux: f64 = mesh
            .nodes()
            .iter()
            .zip(mesh.normals())
            .zip(mesh.weights())
            .map(|((x, n), w)| w * ps.velocity(x).unwrap().dot(n))
            .sum();
        assert!((flux - 1.0).abs() < 1e-6, "{flux}");
        let g = ps.gradient(&Vec3::new(2.0, 1.0, 0.5)).unwrap();
        assert!(g.trace().abs() < 1e-15);
        assert!((g - g.transpose()).norm() < 1e-16);
    }
}
