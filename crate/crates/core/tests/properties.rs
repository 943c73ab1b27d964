use capacity_lab::bounds::{lower_bound_open_2d, upper_bound_open_2d, BoundKind};
use capacity_lab::constraint::{format_system, parse_system, Boundary, ConstraintGraph, ConstraintSystem};
use capacity_lab::one_vertex::build_one_vertex_2d;
use capacity_lab::operator::{apply, Operator, SparseMatrix};
use capacity_lab::oracle::{brute_count_box, brute_count_slanted_2d};
use capacity_lab::spectral::{collatz_wielandt_bounds, perron_radius, IterationConfig, SpectralEstimate};
use capacity_lab::transfer::{
    build_row_transfer_2d, build_row_transfer_2d_with, quadratic_form_count, Representation, TransferOptions,
};
use proptest::prelude::*;
use rug::{Float, Integer};

fn graph(k: usize, mask: u64) -> ConstraintGraph {
    let edges: Vec<(usize, usize)> =
        (0..k * k).filter(|b| mask >> b & 1 == 1).map(|b| (b / k, b % k)).collect();
    ConstraintGraph::from_edges(k, &edges).unwrap()
}

/// Random 2-D systems on 2 or 3 colours, possibly directed and anisotropic.
fn system() -> impl Strategy<Value = ConstraintSystem> {
    (2usize..=3).prop_flat_map(|k| {
        let full = (1u64 << (k * k)) - 1;
        (1..=full, 1..=full).prop_map(move |(a, b)| ConstraintSystem::new(vec![graph(k, a), graph(k, b)]).unwrap())
    })
}

/// Random symmetric graph used on both axes.
fn isotropic_system() -> impl Strategy<Value = ConstraintSystem> {
    (2usize..=3, any::<u64>()).prop_map(|(k, bits)| {
        let mut edges = Vec::new();
        let mut b = 0;
        for i in 0..k {
            for j in i..k {
                if bits >> b & 1 == 1 || (i == k - 1 && j == k - 1) {
                    edges.push((i, j));
                    edges.push((j, i));
                }
                b += 1;
            }
        }
        ConstraintSystem::isotropic(ConstraintGraph::from_edges(k, &edges).unwrap(), 2).unwrap()
    })
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Open), Just(Boundary::Periodic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn representations_are_the_same_matrix(sys in system(), n in 1usize..=4, b in boundary()) {
        let build = |r| build_row_transfer_2d_with(&sys, n, b, &TransferOptions::with_representation(r));
        let lists = build(Representation::SuccessorLists).unwrap().to_sparse().to_text();
        prop_assert_eq!(&lists, &build(Representation::BitsetRows).unwrap().to_sparse().to_text());
        prop_assert_eq!(&lists, &build(Representation::MatrixFree).unwrap().to_sparse().to_text());
    }

    // single-cell rows drop colours isolated along the row axis, so widths start at 2
    #[test]
    fn walk_counts_are_box_counts(sys in system(), n in 2usize..=3, q in 1usize..=3, b in boundary()) {
        let t = build_row_transfer_2d(&sys, n, b).unwrap();
        let count = brute_count_box(&sys, &[n, q], &[b, Boundary::Open]).unwrap();
        prop_assert_eq!(quadratic_form_count(&t, q as u32 - 1), count.value);
    }

    #[test]
    fn one_vertex_walks_are_slanted_counts(sys in system(), n in 2usize..=4, q in 1usize..=3) {
        let s = build_one_vertex_2d(&sys, n).unwrap();
        let count = brute_count_slanted_2d(&sys, n, q).unwrap();
        prop_assert_eq!(quadratic_form_count(&s, ((q - 1) * n) as u32), count.value);
        prop_assert!(SparseMatrix::from_operator(&s).max_row_len() <= sys.k());
    }

    #[test]
    fn symmetric_systems_give_symmetric_transfer_matrices(sys in isotropic_system(), n in 1usize..=5, b in boundary()) {
        prop_assert!(build_row_transfer_2d(&sys, n, b).unwrap().to_sparse().is_symmetric());
    }

    #[test]
    fn periodic_is_a_principal_submatrix(sys in isotropic_system(), n in 1usize..=5) {
        let open = build_row_transfer_2d(&sys, n, Boundary::Open).unwrap();
        let per = build_row_transfer_2d(&sys, n, Boundary::Periodic).unwrap();
        let map: Vec<usize> = per.states().iter().map(|w| open.states().index_of(&w).unwrap()).collect();
        for i in 0..per.dim() {
            for j in 0..per.dim() {
                prop_assert_eq!(per.entry(i, j).unwrap(), open.entry(map[i], map[j]).unwrap());
            }
        }
    }

    #[test]
    fn system_text_round_trips(sys in system()) {
        let text = format_system(&sys);
        prop_assert_eq!(format_system(&parse_system(&text).unwrap()), text);
    }

    #[test]
    fn apply_is_linear_over_integers(sys in system(), n in 1usize..=4, seed in any::<u64>()) {
        let t = build_row_transfer_2d(&sys, n, Boundary::Open).unwrap();
        let m = t.dim();
        let x: Vec<Integer> = (0..m).map(|i| Integer::from((seed >> (i % 60)) & 7)).collect();
        let y: Vec<Integer> = (0..m).map(|i| Integer::from((seed >> ((i + 7) % 60)) & 5)).collect();
        let sum: Vec<Integer> = x.iter().zip(&y).map(|(a, b)| Integer::from(a + b)).collect();
        let (ax, ay, asum) = (apply(&t, &x).unwrap(), apply(&t, &y).unwrap(), apply(&t, &sum).unwrap());
        for i in 0..m {
            prop_assert_eq!(Integer::from(&ax[i] + &ay[i]), asum[i].clone());
        }
    }

    #[test]
    fn collatz_wielandt_brackets_the_radius(sys in isotropic_system(), n in 1usize..=5, seed in any::<u64>()) {
        let t = build_row_transfer_2d(&sys, n, Boundary::Open).unwrap();
        let est = perron_radius(&t, &IterationConfig::with_precision(30)).unwrap();
        prop_assume!(est.converged);
        prop_assert!(est.cw_lower <= est.value && est.value <= est.cw_upper);
        let v: Vec<Float> = (0..t.dim()).map(|i| Float::with_val(100, 1 + ((seed >> (i % 61)) & 15))).collect();
        let (lo, hi) = collatz_wielandt_bounds(&t, &v).unwrap();
        prop_assert!(lo <= est.cw_upper && est.cw_lower <= hi);
    }

    #[test]
    fn safe_values_are_conservative(a in 1.0f64..1e6, b in 1.0f64..1e6, wa in 0.0f64..1e-3, wb in 0.0f64..1e-3, p in 1usize..6) {
        let est = |v: f64, w: f64| {
            let mut e = SpectralEstimate::exact_value(Float::with_val(80, v));
            e.cw_lower = Float::with_val(80, v * (1.0 - w));
            e.cw_upper = Float::with_val(80, v * (1.0 + w));
            e
        };
        let lo = lower_bound_open_2d(&est(a, wa), &est(b, wb), p, 0).unwrap();
        prop_assert_eq!(lo.kind, BoundKind::Lower);
        prop_assert!(lo.safe_value <= lo.value);
        let hi = upper_bound_open_2d(&est(a, wa), p).unwrap();
        prop_assert!(hi.safe_value >= hi.value);
    }
}
