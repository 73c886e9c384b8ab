//! Recovers the slip length b = 1/alpha from discrete sphere resistances.

use slipstokes::selfprop::SolverConfig;
use slipstokes::validation::slip_calibration;

fn main() -> slipstokes::Result<()> {
    let alphas = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0];
    let (cal, _) = slip_calibration(1.0, 20, &alphas, &SolverConfig::default(), 0.02)?;
    for (k, alpha) in alphas.iter().enumerate() {
        println!(
            "alpha {alpha:>5}: K = {:.8}, implied b = {:.8}, 1/alpha = {:.8}",
            cal.k_diag[k],
            cal.slip_lengths[k],
            1.0 / alpha
        );
    }
    println!(
        "gamma = {:.8} ({})",
        cal.gamma,
        if cal.check.passed { "pass" } else { "fail" }
    );
    Ok(())
}
