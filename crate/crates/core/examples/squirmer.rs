//! Swimming velocity of a treadmilling squirmer on a sphere and on
//! prolate spheroids, by both solution routes.

use slipstokes::geometry::{make_parametric_surface, Shape};
use slipstokes::mobility::{swim_velocity, Mobility};
use slipstokes::selfprop::{solve_with, SolverConfig};
use slipstokes::slip_bvp::BoundaryData;

fn main() -> slipstokes::Result<()> {
    let config = SolverConfig::default();
    let alpha = 1e6;
    for c_axis in [1.0, 1.5, 2.0] {
        let mesh = make_parametric_surface(&Shape::Spheroid { a_axis: 1.0, c_axis }, 35)?;
        let solver = config.build_solver(&mesh, alpha)?;
        let mobility = Mobility::compute(&solver)?;
        let data = BoundaryData::squirmer(&mesh, 1.0);

        let w = mobility.wrench(&data, &mesh)?;
        let route_a = swim_velocity(&mobility.grand, &w);
        let route_b = solve_with(&solver, &mobility, &data, config.propulsion_tol)?;
        println!(
            "c/a = {c_axis:.1}: xi_z = {:+.6} (wrench), {:+.6} (composite field), |omega| = {:.1e}, net force {:.1e}",
            route_a.xi.z,
            route_b.xi.z,
            route_a.omega.norm(),
            route_b.force_residual
        );
    }
    println!("sphere reference: 2/3 = {:.6}", 2.0 / 3.0);
    Ok(())
}
