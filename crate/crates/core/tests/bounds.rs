use capacity_lab::bounds::{
    friendly_lower_bound_2d, lower_bound_open_2d, lower_bound_periodic_2d, sandwich_check_one_vertex,
    sandwich_from_estimates, upper_bound_open_2d, upper_bound_periodic_2d, EntropyBound,
};
use capacity_lab::constraint::{hard_square_system, Boundary, ConstraintGraph, ConstraintSystem};
use capacity_lab::one_vertex::build_one_vertex_2d;
use capacity_lab::operator::{Operator, SparseMatrix};
use capacity_lab::spectral::{perron_radius, IterationConfig, SpectralEstimate};
use capacity_lab::transfer::build_row_transfer_2d;
use capacity_lab::Error;
use rug::Float;

const HARD_SQUARE: f64 = 1.503_048_082_475_332;

fn cfg() -> IterationConfig {
    IterationConfig::with_precision(30)
}

fn hs() -> ConstraintSystem {
    hard_square_system(2).unwrap()
}

fn t(n: usize, b: Boundary) -> SpectralEstimate {
    perron_radius(&build_row_transfer_2d(&hs(), n, b).unwrap(), &cfg()).unwrap()
}

fn s(n: usize) -> SpectralEstimate {
    perron_radius(&build_one_vertex_2d(&hs(), n).unwrap(), &cfg()).unwrap()
}

fn f(x: &Float) -> f64 {
    x.to_f64()
}

#[test]
fn periodic_rows_bound_odd_one_vertex_radii_from_below() {
    for n in 2..=5 {
        let per = t(2 * n, Boundary::Periodic);
        let one = s(2 * n + 1);
        let lhs = f(&per.value).powf(1.0 / (2 * n + 1) as f64);
        assert!(lhs <= f(&one.value), "n={n}: {lhs} > {}", one.value);
    }
}

#[test]
fn ratio_and_root_sequences_are_monotone() {
    // ratio[i] = rho(T_{i+10}) / rho(T_{i+9}); the two parities approach from different sides
    let open: Vec<f64> = (9..=14).map(|n| f(&t(n, Boundary::Open).value)).collect();
    let ratios: Vec<f64> = open.windows(2).map(|w| w[1] / w[0]).collect();
    let even: Vec<f64> = ratios.iter().step_by(2).copied().collect();
    let odd: Vec<f64> = ratios.iter().skip(1).step_by(2).copied().collect();
    assert!(even.windows(2).all(|w| w[0] < w[1]) && even.iter().all(|&r| r < HARD_SQUARE), "{ratios:?}");
    assert!(odd.windows(2).all(|w| w[0] > w[1]), "{ratios:?}");

    let roots: Vec<f64> =
        (2..=7).map(|m| f(&t(2 * m, Boundary::Periodic).value).powf(1.0 / (2 * m) as f64)).collect();
    assert!(roots.windows(2).all(|w| w[0] > w[1]), "{roots:?}");
    assert!(*roots.last().unwrap() > HARD_SQUARE);
}

#[test]
fn every_rigorous_lower_is_below_every_rigorous_upper() {
    let graph = perron_radius(&SparseMatrix::from_rows(vec![vec![0, 1], vec![0]]).unwrap(), &cfg()).unwrap();
    assert!((f(&graph.value) - 1.618033988749895).abs() < 1e-12);
    let open: Vec<SpectralEstimate> = (1..=14).map(|n| t(n, Boundary::Open)).collect();
    let per: Vec<SpectralEstimate> = (1..=14).map(|n| t(n, Boundary::Periodic)).collect();
    let mut lowers: Vec<EntropyBound> = Vec::new();
    let mut uppers: Vec<EntropyBound> = Vec::new();
    for n in 1..=14 {
        uppers.push(upper_bound_open_2d(&open[n - 1], n).unwrap());
        if n % 2 == 0 {
            uppers.push(upper_bound_periodic_2d(&per[n - 1], n).unwrap());
            lowers.push(lower_bound_periodic_2d(&per[n - 1], &graph, n, 0).unwrap());
        }
    }
    for q in 0..=6 {
        for p in 1..=14 - 2 * q - 1 {
            lowers.push(lower_bound_open_2d(&open[p + 2 * q], &open[2 * q], p, q).unwrap());
        }
    }
    for q in 1..=6 {
        for p in 1..=14 - 2 * q {
            lowers.push(lower_bound_periodic_2d(&per[p + 2 * q - 1], &per[2 * q - 1], p, q).unwrap());
        }
    }
    let target = Float::with_val(100, HARD_SQUARE);
    for lo in &lowers {
        assert!(lo.safe_value <= lo.value);
        assert!(lo.admits(&target), "{lo}");
        for hi in &uppers {
            assert!(lo.safe_value <= hi.safe_value, "{lo} vs {hi}");
        }
    }
    for hi in &uppers {
        assert!(hi.safe_value >= hi.value);
        assert!(hi.admits(&target), "{hi}");
    }
}

#[test]
fn sandwich_holds_for_hard_squares() {
    for n in 3..=8 {
        let r = sandwich_check_one_vertex(&hs(), n, &cfg()).unwrap();
        assert!(!r.violated, "n={n}");
        assert!(r.lower_gap > 0 && r.upper_gap > 0, "n={n}");
    }
}

#[test]
fn sandwich_flags_a_damaged_operator() {
    let n = 6;
    let op = build_one_vertex_2d(&hs(), n).unwrap();
    let [prev, full, open, next] =
        [t(n - 1, Boundary::Periodic), s(n), t(n, Boundary::Open), t(n + 1, Boundary::Periodic)];
    assert!(!sandwich_from_estimates(n, &prev, &full, &open, &next).unwrap().violated);
    let mut damaged = SparseMatrix::from_operator(&op);
    assert_eq!(damaged.dim(), 21);
    // found by deleting entries one at a time; this one costs S_6 enough walks
    assert!(damaged.remove_entry(12, 7));
    let hurt = perron_radius(&damaged, &cfg()).unwrap();
    assert!(hurt.converged && hurt.value < full.value);
    let r = sandwich_from_estimates(n, &prev, &hurt, &open, &next).unwrap();
    assert!(r.violated && r.lower_gap < 0);
}

#[test]
fn friendly_colour_inequality_tightens_with_width() {
    let mut slack = Vec::new();
    for n in [4, 8] {
        let r = friendly_lower_bound_2d(&hs(), &t(n, Boundary::Open), n, &s(n + 1)).unwrap();
        assert_eq!(r.friendly_colours, vec![2]);
        assert!(r.holds && r.certified, "n={n}");
        slack.push(r.slack);
    }
    assert!(slack[1] < slack[0]);
}

#[test]
fn friendly_colour_needs_a_friendly_colour() {
    // a proper 2-colouring: no colour may sit next to itself
    let sys = ConstraintSystem::isotropic(ConstraintGraph::from_edges(2, &[(0, 1), (1, 0)]).unwrap(), 2).unwrap();
    let any = s(3);
    assert!(matches!(friendly_lower_bound_2d(&sys, &any, 2, &any), Err(Error::NoFriendlyColour)));
}
