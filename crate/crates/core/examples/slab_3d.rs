//! Perron roots of slab transfer operators for hard cubes, for each transverse boundary
//! combination. Large slabs switch to the matrix-free representation automatically.
//!
//! ```text
//! cargo run --release --example slab_3d -- 5 5
//! ```

use capacity_lab::constraint::hard_square_system;
use capacity_lab::numeric::format_float;
use capacity_lab::operator::Operator;
use capacity_lab::spectral::{perron_radius, IterationConfig};
use capacity_lab::transfer::build_slab_transfer_3d;

fn main() -> capacity_lab::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|a| a.parse::<usize>().ok());
    let n1 = args.next().unwrap_or(3);
    let n2 = args.next().unwrap_or(n1);
    let sys = hard_square_system(3)?;
    let cfg = IterationConfig::with_precision(20);

    for bc in ["open,open", "periodic,periodic", "open,periodic"] {
        let op = build_slab_transfer_3d(&sys, n1, n2, &bc.parse()?)?;
        let est = perron_radius(&op, &cfg)?;
        println!(
            "({n1},{n2}) {bc:<18} states={:<7} repr={:<16} rho={}",
            op.dim(),
            op.representation().to_string(),
            format_float(&est.value, 16)
        );
    }
    Ok(())
}
