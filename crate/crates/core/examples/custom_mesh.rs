//! Mobility of a body read from an OFF triangulation, compared with the
//! same body sampled parametrically.

use slipstokes::geometry::{load_triangle_mesh, make_parametric_surface, Shape};
use slipstokes::mobility::{swim_velocity, Mobility};
use slipstokes::selfprop::SolverConfig;
use slipstokes::slip_bvp::BoundaryData;

fn main() -> slipstokes::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/icosphere.off").to_string());
    let tri = load_triangle_mesh(&path)?;
    let smooth = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 32)?;
    let config = SolverConfig::default();
    for (label, mesh) in [("triangulated", &tri), ("parametric", &smooth)] {
        let solver = config.build_solver(mesh, 10.0)?;
        let mobility = Mobility::compute(&solver)?;
        let w = mobility.wrench(&BoundaryData::squirmer(mesh, 1.0), mesh)?;
        let v = swim_velocity(&mobility.grand, &w);
        println!(
            "{label:>12}: N = {:>4}, area = {:.5}, K = {:.5}, R = {:.5}, xi_z = {:+.5}",
            mesh.len(),
            mesh.area(),
            mobility.grand.k.trace() / 3.0,
            mobility.grand.r.trace() / 3.0,
            v.xi.z
        );
    }
    Ok(())
}
