//! Reciprocal and energy identities of the auxiliary fields on a spheroid,
//! with the effect of the truncation radius.

use slipstokes::geometry::{make_parametric_surface, Shape};
use slipstokes::mobility::Mobility;
use slipstokes::selfprop::SolverConfig;
use slipstokes::validation::{identity_suite, ShellQuadrature, IDENTITY_TOL};

fn main() -> slipstokes::Result<()> {
    let alpha = 2.0;
    let mesh = make_parametric_surface(
        &Shape::Spheroid {
            a_axis: 1.0,
            c_axis: 1.5,
        },
        18,
    )?;
    let solver = SolverConfig::default().build_solver(&mesh, alpha)?;
    let mobility = Mobility::compute(&solver)?;
    for r_t in [10.0, 20.0] {
        let checks = identity_suite(&mobility, &mesh, alpha, r_t, ShellQuadrature::default(), IDENTITY_TOL)?;
        let worst = checks
            .iter()
            .max_by(|a, b| a.relative_error.total_cmp(&b.relative_error))
            .unwrap();
        let worst_raw = checks.iter().filter_map(|c| c.uncorrected_error).fold(0.0, f64::max);
        let passed = checks.iter().filter(|c| c.passed).count();
        println!(
            "R_t = {r_t}: {passed}/{} passed, worst {} at {:.2e}, worst without tail correction {:.2e}",
            checks.len(),
            worst.name,
            worst.relative_error,
            worst_raw
        );
    }
    Ok(())
}
