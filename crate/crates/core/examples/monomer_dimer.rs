//! The monomer–dimer colour coding: with the same-axis back edge the 1-D system grows
//! like the golden ratio, as tilings do; without it the growth rate is the real root of
//! x^3 = x^2 + 1. Masked colourings of small boxes match direct tiling counts.
//!
//! ```text
//! cargo run --release --example monomer_dimer
//! ```

use capacity_lab::constraint::monomer_dimer_system;
use capacity_lab::numeric::format_float;
use capacity_lab::operator::SparseMatrix;
use capacity_lab::oracle::{brute_count_monomer_dimer, monomer_dimer_colour_count};
use capacity_lab::spectral::{perron_radius, IterationConfig};

fn main() -> capacity_lab::Result<()> {
    let cfg = IterationConfig::with_precision(30);
    for chain in [true, false] {
        let sys = monomer_dimer_system(1, chain)?;
        let g = sys.axis(0);
        let rows = (0..sys.k()).map(|a| (0..sys.k()).filter(|&b| g.has_edge(a, b)).collect()).collect();
        let est = perron_radius(&SparseMatrix::from_rows(rows)?, &cfg)?;
        println!("d=1 same_axis_chain={chain:<5} growth rate {}", format_float(&est.value, 25));
    }
    for dims in [[2, 2], [2, 3], [3, 3]] {
        let tilings = brute_count_monomer_dimer(&dims)?;
        let coloured = monomer_dimer_colour_count(&dims, true)?;
        println!("{}x{}: {} tilings, {} masked colourings", dims[0], dims[1], tilings.value, coloured.value);
    }
    Ok(())
}
