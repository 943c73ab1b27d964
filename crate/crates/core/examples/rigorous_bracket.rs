//! Rigorous lower and upper bounds on the hard-square capacity from transfer matrices of
//! width at most `N`, with safe values that account for the numerical enclosures.
//!
//! ```text
//! cargo run --release --example rigorous_bracket -- 14
//! ```

use capacity_lab::bounds::{bound_report, lower_bound_open_2d, upper_bound_periodic_2d, upper_bound_open_2d};
use capacity_lab::constraint::{hard_square_system, Boundary};
use capacity_lab::spectral::{perron_radius, IterationConfig};
use capacity_lab::transfer::build_row_transfer_2d;

fn main() -> capacity_lab::Result<()> {
    let max_n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    let sys = hard_square_system(2)?;
    let cfg = IterationConfig::with_precision(30);
    let rho = |n, b| perron_radius(&build_row_transfer_2d(&sys, n, b)?, &cfg);

    let mut bounds = Vec::new();
    // (rho(T_{p+2q+1}) / rho(T_{2q+1}))^(1/p) with p = 1 and the largest q that fits
    let q = (max_n - 2) / 2;
    bounds.push(lower_bound_open_2d(&rho(2 * q + 2, Boundary::Open)?, &rho(2 * q + 1, Boundary::Open)?, 1, q)?);
    bounds.push(upper_bound_open_2d(&rho(max_n, Boundary::Open)?, max_n)?);
    let even = max_n - max_n % 2;
    bounds.push(upper_bound_periodic_2d(&rho(even, Boundary::Periodic)?, even)?);

    let report = bound_report(&bounds);
    print!("{}", report.to_text());
    Ok(())
}
