//! Small-data certificate for a source-plus-squirmer swimmer at a few
//! Reynolds numbers.

use slipstokes::geometry::{make_parametric_surface, Shape};
use slipstokes::mobility::Mobility;
use slipstokes::selfprop::{ns_certificate, SolverConfig, Thresholds};
use slipstokes::slip_bvp::BoundaryData;

fn main() -> slipstokes::Result<()> {
    let alpha = 5.0;
    let mesh = make_parametric_surface(&Shape::Sphere { radius: 1.0 }, 16)?;
    let solver = SolverConfig::default().build_solver(&mesh, alpha)?;
    let mobility = Mobility::compute(&solver)?;
    let data = BoundaryData::squirmer(&mesh, 1.0).axpy(1.0, &BoundaryData::uniform_source(&mesh, 0.2));
    let w = mobility.wrench(&data, &mesh)?;
    for re in [0.0, 0.1, 1.0, 10.0] {
        let cert = ns_certificate(re, &data, &mesh, &mobility.grand, &w, Thresholds::default())?;
        println!(
            "Re {re:>5}: Re*Phi = {:.3e}, Re*|beta*| = {:.3e}, passes = {}, xi_z in [{:+.4}, {:+.4}]",
            cert.re_phi, cert.re_beta, cert.passes, cert.xi_bracket[0], cert.xi_bracket[1]
        );
    }
    println!("note: {}", slipstokes::selfprop::NONCONSTRUCTIVE_NOTE);
    Ok(())
}
