//! A long iteration stopped part way and resumed from its checkpoint ends at exactly
//! the same numbers as an uninterrupted run.
//!
//! ```text
//! cargo run --release --example checkpoint_resume
//! ```

use capacity_lab::constraint::hard_square_system;
use capacity_lab::one_vertex::build_one_vertex_2d;
use capacity_lab::spectral::{perron_radius, CheckpointConfig, IterationConfig};

fn main() -> capacity_lab::Result<()> {
    let op = build_one_vertex_2d(&hard_square_system(2)?, 16)?;
    let path = std::env::temp_dir().join(format!("capacity-lab-example-{}.ckpt", std::process::id()));
    let base = IterationConfig::with_precision(30);

    let straight = perron_radius(&op, &base)?;

    let checkpoint = |resume| Some(CheckpointConfig { path: path.clone(), interval: 50, resume });
    let first = perron_radius(&op, &IterationConfig { max_iterations: 200, checkpoint: checkpoint(false), ..base.clone() })?;
    println!("stopped after {} iterations (converged: {})", first.iterations, first.converged);
    let resumed = perron_radius(&op, &IterationConfig { checkpoint: checkpoint(true), ..base })?;
    println!("resumed run finished at iteration {}", resumed.iterations);

    println!("uninterrupted: {}", straight.value);
    println!("resumed:       {}", resumed.value);
    println!("identical: {}", straight.value == resumed.value && straight.cw_upper == resumed.cw_upper);
    std::fs::remove_file(&path).ok();
    Ok(())
}
