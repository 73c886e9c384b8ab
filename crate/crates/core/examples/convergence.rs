//! Resolution study for a sphere (analytic reference) and a spheroid
//! (extrapolated reference), written as CSV.

use slipstokes::geometry::Shape;
use slipstokes::selfprop::SolverConfig;
use slipstokes::validation::convergence_study;

fn main() -> slipstokes::Result<()> {
    let config = SolverConfig::default();
    for shape in [
        Shape::Sphere { radius: 1.0 },
        Shape::Spheroid {
            a_axis: 1.0,
            c_axis: 2.0,
        },
    ] {
        let table = convergence_study(&shape, 1.0, &[9, 14, 20, 27], &config)?;
        println!(
            "# {shape:?}, reference {} ({})",
            table.k_reference, table.reference_kind
        );
        table.write_csv(std::io::stdout())?;
        for w in &table.warnings {
            println!("# warning: {w}");
        }
    }
    Ok(())
}
