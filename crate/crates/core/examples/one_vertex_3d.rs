//! The three-dimensional one-vertex operator on helical slab words.
//!
//! ```text
//! cargo run --release --example one_vertex_3d -- 4 5
//! ```

use capacity_lab::constraint::hard_square_system;
use capacity_lab::numeric::format_float;
use capacity_lab::one_vertex::build_one_vertex_3d;
use capacity_lab::operator::Operator;
use capacity_lab::spectral::{perron_radius, IterationConfig};

fn main() -> capacity_lab::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|a| a.parse::<usize>().ok());
    let n1 = args.next().unwrap_or(4);
    let n2 = args.next().unwrap_or(n1);
    let op = build_one_vertex_3d(&hard_square_system(3)?, n1, n2)?;
    let est = perron_radius(&op, &IterationConfig::with_precision(20))?;
    println!(
        "P_({n1},{n2}): {} states, rho = {} in [{}, {}] after {} iterations",
        op.dim(),
        format_float(&est.value, 12),
        format_float(&est.cw_lower, 12),
        format_float(&est.cw_upper, 12),
        est.iterations
    );
    Ok(())
}
