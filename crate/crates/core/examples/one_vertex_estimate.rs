//! One-vertex transfer operators: at most two successors per state, so widths far beyond
//! the reach of row transfer matrices are cheap. Prints rho(S_n) over a range of widths,
//! the even/odd bracket it suggests, and the sandwich check at a small width.
//!
//! ```text
//! cargo run --release --example one_vertex_estimate -- 16 21
//! ```

use capacity_lab::bounds::{heuristic_bracket_2d, sandwich_check_one_vertex};
use capacity_lab::constraint::hard_square_system;
use capacity_lab::numeric::format_float;
use capacity_lab::one_vertex::build_one_vertex_2d;
use capacity_lab::operator::Operator;
use capacity_lab::spectral::{perron_radius, IterationConfig};

fn main() -> capacity_lab::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|a| a.parse::<usize>().ok());
    let lo = args.next().unwrap_or(12);
    let hi = args.next().unwrap_or(lo + 5);
    let sys = hard_square_system(2)?;
    let cfg = IterationConfig::with_precision(24);

    let mut values = Vec::new();
    for n in lo..=hi {
        let op = build_one_vertex_2d(&sys, n)?;
        let est = perron_radius(&op, &cfg)?;
        println!("n={n:<3} states={:<8} rho(S_n)={}  iterations={}", op.dim(), format_float(&est.value, 22), est.iterations);
        values.push((n, est.value));
    }

    let report = heuristic_bracket_2d(&values);
    match report.bracket {
        Some((lower, upper)) => println!("heuristic bracket: {lower}\n                   {upper}"),
        None => println!("no bracket: {}", report.violation.unwrap_or_else(|| "need an even and an odd width".into())),
    }

    let s = sandwich_check_one_vertex(&sys, 6, &cfg)?;
    println!(
        "sandwich n=6: lower gap {}, upper gap {}, violated: {}",
        format_float(&s.lower_gap, 6),
        format_float(&s.upper_gap, 6),
        s.violated
    );
    Ok(())
}
