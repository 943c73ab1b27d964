//! Perron roots of the standard and periodic row transfer matrices of the hard-square
//! constraint, and the entropy bracket they imply.
//!
//! ```text
//! cargo run --release --example hard_square_table -- 14
//! ```

use capacity_lab::constraint::{hard_square_system, Boundary};
use capacity_lab::numeric::format_float;
use capacity_lab::operator::Operator;
use capacity_lab::spectral::{perron_radius, IterationConfig};
use capacity_lab::transfer::build_row_transfer_2d;

fn main() -> capacity_lab::Result<()> {
    let max_n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let sys = hard_square_system(2)?;
    let cfg = IterationConfig::with_precision(40);

    println!("{:>3} {:>7} {:>42} {:>42}", "n", "states", "rho(T_n)", "rho(T_n,per)");
    for n in 2..=max_n {
        let open = build_row_transfer_2d(&sys, n, Boundary::Open)?;
        let per = build_row_transfer_2d(&sys, n, Boundary::Periodic)?;
        let a = perron_radius(&open, &cfg)?;
        let b = perron_radius(&per, &cfg)?;
        println!("{n:>3} {:>7} {:>42} {:>42}", open.dim(), format_float(&a.value, 34), format_float(&b.value, 34));
    }
    Ok(())
}
