//! Resistance of a slip sphere across the friction range, against the
//! closed-form Basset values.

use slipstokes::geometry::{make_parametric_surface, Shape};
use slipstokes::mobility::Mobility;
use slipstokes::selfprop::SolverConfig;
use slipstokes::validation::analytic_sphere_resistance;

fn main() -> slipstokes::Result<()> {
    let mesh = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 24)?;
    let config = SolverConfig::default();
    println!(
        "{:>10} {:>12} {:>12} {:>10} {:>12} {:>12} {:>10}",
        "alpha", "K", "K exact", "rel err", "R", "R exact", "rel err"
    );
    for alpha in [0.1, 1.0, 10.0, 100.0, 1e6] {
        let solver = config.build_solver(&mesh, alpha)?;
        let gm = Mobility::compute(&solver)?.grand;
        let (k, r) = analytic_sphere_resistance(1.0, 1.0 / alpha)?;
        let kd = gm.k.trace() / 3.0;
        let rd = gm.r.trace() / 3.0;
        println!(
            "{alpha:>10.1e} {kd:>12.6} {k:>12.6} {:>10.2e} {rd:>12.6} {r:>12.6} {:>10.2e}",
            (kd - k).abs() / k,
            (rd - r).abs() / r
        );
    }
    Ok(())
}
