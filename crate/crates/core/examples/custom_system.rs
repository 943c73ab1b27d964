//! A constraint system read from text: a run-length limited code in which 1s must be
//! separated by at least two 0s horizontally and at least one vertically.
//!
//! ```text
//! cargo run --release --example custom_system
//! ```

use capacity_lab::bounds::friendly_lower_bound_2d;
use capacity_lab::constraint::{find_friendly_colours, parse_system, validate_system, Boundary};
use capacity_lab::numeric::format_float;
use capacity_lab::one_vertex::build_one_vertex_2d;
use capacity_lab::spectral::{perron_radius, IterationConfig};
use capacity_lab::transfer::build_row_transfer_2d;

// colours: 1 = a 1 bit, 2 = a 0 right after a 1, 3 = any other 0
const SYSTEM: &str = "\
# (2,inf) horizontally, (1,inf) vertically
k 3
d 2
axis 1
1 2
2 3
3 1
3 3
axis 2
1 2
1 3
2 1
2 2
2 3
3 1
3 2
3 3
";

fn main() -> capacity_lab::Result<()> {
    let sys = parse_system(SYSTEM)?;
    let report = validate_system(&sys);
    println!("valid: {}, isotropic: {}, friendly colours: {:?}", report.is_valid(), report.isotropic, find_friendly_colours(&sys));

    let cfg = IterationConfig::with_precision(20);
    for n in [4, 8, 12] {
        let r = perron_radius(&build_row_transfer_2d(&sys, n, Boundary::Open)?, &cfg)?;
        let p = perron_radius(&build_one_vertex_2d(&sys, n)?, &cfg)?;
        let upper = r.value.clone().root(n as u32);
        println!("n={n:<3} rho(R_n)^(1/n) = {}  rho(P_n) = {}", format_float(&upper, 12), format_float(&p.value, 12));
    }

    // no colour is compatible with everything here, so the friendly-colour inequality does not apply
    let r = perron_radius(&build_row_transfer_2d(&sys, 4, Boundary::Open)?, &cfg)?;
    let p = perron_radius(&build_one_vertex_2d(&sys, 5)?, &cfg)?;
    match friendly_lower_bound_2d(&sys, &r, 4, &p) {
        Ok(f) => println!("friendly inequality holds: {}", f.holds),
        Err(e) => println!("friendly inequality: {e}"),
    }
    Ok(())
}
