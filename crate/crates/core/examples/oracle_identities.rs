//! Exact walk counts `1^T A^m 1` of every operator against brute-force enumeration of
//! boxes, cylinders and slanted tori.
//!
//! ```text
//! cargo run --release --example oracle_identities -- 4
//! ```

use capacity_lab::oracle::counting_identities;

fn main() -> capacity_lab::Result<()> {
    let max_n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let checks = counting_identities(max_n)?;
    for c in &checks {
        let mark = if c.holds { "ok  " } else { "FAIL" };
        println!("{mark} {:<60} {} {} {}", c.name, c.lhs, c.relation, c.rhs);
    }
    let failed = checks.iter().filter(|c| !c.holds).count();
    println!("{} identities, {failed} failed", checks.len());
    Ok(())
}
