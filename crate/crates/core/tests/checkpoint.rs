use std::path::Path;

use capacity_lab::constraint::{hard_square_system, Boundary};
use capacity_lab::one_vertex::build_one_vertex_2d;
use capacity_lab::spectral::{perron_radius, CheckpointConfig, IterationConfig, SpectralEstimate};
use capacity_lab::transfer::build_row_transfer_2d;
use capacity_lab::Error;

fn with_checkpoint(base: &IterationConfig, path: &Path, max_iterations: u64, resume: bool) -> IterationConfig {
    IterationConfig {
        max_iterations,
        checkpoint: Some(CheckpointConfig { path: path.to_path_buf(), interval: 20, resume }),
        ..base.clone()
    }
}

/// Precision in bits recorded in the file header; 53 marks the f64 warm-up.
fn stored_bits(path: &Path) -> u32 {
    let bytes = std::fs::read(path).unwrap();
    u32::from_le_bytes(bytes[52..56].try_into().unwrap())
}

fn same(a: &SpectralEstimate, b: &SpectralEstimate) -> bool {
    a.value == b.value && a.cw_lower == b.cw_lower && a.cw_upper == b.cw_upper && a.iterations == b.iterations
}

#[test]
fn resume_is_bit_exact_from_either_phase() {
    let dir = tempfile::tempdir().unwrap();
    let op = build_one_vertex_2d(&hard_square_system(2).unwrap(), 12).unwrap();
    let base = IterationConfig::with_precision(40);
    let straight = perron_radius(&op, &base).unwrap();
    assert!(straight.converged);

    let mut phases = Vec::new();
    for stop in [40, straight.iterations - 20] {
        let path = dir.path().join(format!("stop{stop}.ckpt"));
        let partial = perron_radius(&op, &with_checkpoint(&base, &path, stop, false)).unwrap();
        assert!(!partial.converged);
        phases.push(stored_bits(&path));
        let resumed = perron_radius(&op, &with_checkpoint(&base, &path, base.max_iterations, true)).unwrap();
        assert!(same(&straight, &resumed), "stop at {stop}: {} vs {}", straight.value, resumed.value);
    }
    assert_eq!(phases[0], 53);
    assert!(phases[1] > 53);
}

#[test]
fn resume_rejects_another_operator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.ckpt");
    let sys = hard_square_system(2).unwrap();
    let base = IterationConfig::with_precision(30);
    let t5 = build_row_transfer_2d(&sys, 5, Boundary::Open).unwrap();
    let t6 = build_row_transfer_2d(&sys, 6, Boundary::Open).unwrap();
    perron_radius(&t5, &with_checkpoint(&base, &path, 30, false)).unwrap();
    let err = perron_radius(&t6, &with_checkpoint(&base, &path, 1000, true)).unwrap_err();
    assert!(matches!(err, Error::CheckpointMismatch { .. }), "{err}");
}

#[test]
fn resume_rejects_damaged_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.ckpt");
    let t = build_row_transfer_2d(&hard_square_system(2).unwrap(), 6, Boundary::Periodic).unwrap();
    let base = IterationConfig::with_precision(30);
    perron_radius(&t, &with_checkpoint(&base, &path, 30, false)).unwrap();

    let mut bytes = std::fs::read(&path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x5a;
    std::fs::write(&path, &bytes).unwrap();
    let err = perron_radius(&t, &with_checkpoint(&base, &path, 1000, true)).unwrap_err();
    assert!(matches!(err, Error::CheckpointCorrupt { .. }), "{err}");

    std::fs::write(&path, &bytes[..20]).unwrap();
    let err = perron_radius(&t, &with_checkpoint(&base, &path, 1000, true)).unwrap_err();
    assert!(matches!(err, Error::CheckpointCorrupt { .. }), "{err}");
}

#[test]
fn resume_without_a_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let t = build_row_transfer_2d(&hard_square_system(2).unwrap(), 4, Boundary::Open).unwrap();
    let cfg = with_checkpoint(&IterationConfig::with_precision(30), &dir.path().join("missing"), 100, true);
    assert!(matches!(perron_radius(&t, &cfg).unwrap_err(), Error::Io(_)));
}
