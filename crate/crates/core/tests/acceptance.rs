//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the log. The process
//! fails when any line differs from its expected outcome. Two lines are expected to
//! FAIL: the 2n = 14 periodic upper bound, which the tabulated radius pins at 7 digits,
//! and the (5,5) one-vertex value, where the published number is not the converged radius.

use std::time::Instant;

use capacity_lab::bounds::{
    heuristic_bracket_2d, lower_bound_open_2d, sandwich_check_one_vertex, upper_bound_periodic_2d,
    upper_bound_periodic_3d,
};
use capacity_lab::constraint::{hard_square_system, monomer_dimer_system, Boundary};
use capacity_lab::experiment::{run_experiment, ExperimentConfig, ModelSpec, OpKind, Task};
use capacity_lab::one_vertex::{build_one_vertex_2d, build_one_vertex_3d};
use capacity_lab::operator::{Operator, SparseMatrix};
use capacity_lab::oracle::{brute_count_monomer_dimer, counting_identities, monomer_dimer_colour_count};
use capacity_lab::spectral::{perron_radius, IterationConfig, SpectralEstimate};
use capacity_lab::transfer::{build_row_transfer_2d, build_slab_transfer_3d, BoundaryDescriptor};
use rug::ops::Pow;
use rug::Float;

const STANDARD_RADII: [&str; 13] = [
    "2.414213562373095",
    "3.631381260403638",
    "5.457705395965834",
    "8.203259193755024",
    "12.32988221531524",
    "18.53240737754881",
    "27.85509909631079",
    "41.8675533182809",
    "62.928945725187815984970517564242",
    "94.585231204973665631062351227180",
    "142.16615039284113705381555339180",
    "213.68255974084561463042598863826",
    "321.17516167688358891589859286791",
];

const PERIODIC_RADII: [&str; 12] = [
    "3.302775637731994646559610633735247",
    "5.156325174658661693523159039366916",
    "7.637519478750677316156696280583774",
    "11.55170956604814509016646221019832",
    "17.31622927332784947478739705217656",
    "26.05798609193972135567942994470689",
    "39.14578184202813825907509993927013",
    "58.85193508152278064182392832406795",
    "88.44780432952028084071406736758034",
    "132.9477940474849517182393096863462",
    "199.8224640440179428924580367714202",
    "300.3458520273548324890314287157792",
];

const ONE_VERTEX_RADII: [(usize, &str); 6] = [
    (25, "1.5030480825182810708944214989118"),
    (26, "1.5030480824559338746449982720899"),
    (27, "1.5030480824841133358901685021830"),
    (28, "1.5030480824713491171046098760579"),
    (29, "1.5030480824771425174857112752302"),
    (30, "1.5030480824745080695008293589330"),
];

const HARD_SQUARE_12: &str = "1.503048082475";
const HARD_SQUARE_LOWER: &str = "1.50304808247533226432204921";
const HARD_SQUARE_UPPER: &str = "1.50304808247533992728837255";

const SLABS_5X5: [(Boundary, Boundary, &str); 3] = [
    (Boundary::Open, Boundary::Open, "13427.06985344107"),
    (Boundary::Periodic, Boundary::Periodic, "8185.111027254276"),
    (Boundary::Open, Boundary::Periodic, "10331.06553679985"),
];

const P_RADII: [(usize, usize, &str); 3] = [(4, 4, "1.431707"), (4, 5, "1.433880"), (5, 4, "1.433943")];
const P_STRETCH: (usize, usize, &str) = (6, 5, "1.436801");
const P_5X5_PUBLISHED: &str = "1.439764";
const P_5X5_CERTIFIED: &str = "1.4397675223";

const TORUS_6X8: &str = "37133338.84386827";
const TORUS_BOUND: &str = "1.43781634614";

const GOLDEN: &str = "1.6180339887498948482045868343656";

fn big(text: &str) -> Float {
    Float::with_val(256, Float::parse(text).expect("decimal literal"))
}

fn significant_digits(text: &str) -> u32 {
    text.trim_start_matches(['0', '.']).chars().filter(char::is_ascii_digit).count() as u32
}

/// Largest `d` (at most the printed digits) with `|x - p| < 10^(E - d + 1)`, `E = floor(log10 |p|)`.
/// Truncated and rounded printouts both pass at their full length.
fn matched_digits(x: &Float, published: &str) -> u32 {
    let p = big(published);
    let printed = significant_digits(published);
    let diff = Float::with_val(256, x - &p).abs();
    if diff.is_zero() {
        return printed;
    }
    let e = p.clone().abs().log10().to_f64().floor();
    let d = (e + 1.0 - diff.log10().to_f64()).ceil() - 1.0;
    (d.max(0.0) as u32).min(printed)
}

struct Line {
    id: &'static str,
    title: &'static str,
    pass: bool,
    expected: bool,
    detail: String,
}

struct Run {
    lines: Vec<Line>,
    /// Every estimate whose enclosure is checked under criterion 8.
    enclosures: Vec<(String, bool)>,
}

impl Run {
    fn record(&mut self, id: &'static str, title: &'static str, pass: bool, detail: String) {
        self.record_expecting(id, title, pass, true, detail);
    }

    fn record_expecting(&mut self, id: &'static str, title: &'static str, pass: bool, expected: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        let note = if pass == expected { "" } else { "  <-- unexpected" };
        println!("criterion {id:<3} {status}  {title}: {detail}{note}");
        self.lines.push(Line { id, title, pass, expected, detail });
    }

    fn estimate<O: Operator + ?Sized>(&mut self, label: String, op: &O, digits: u32) -> SpectralEstimate {
        let est = perron_radius(op, &IterationConfig::with_precision(digits)).expect("iteration runs");
        let ok = est.converged && est.contains(&est.value) && est.cw_lower <= est.cw_upper;
        self.enclosures.push((label, ok));
        est
    }
}

fn row_radii(run: &mut Run) {
    let sys = hard_square_system(2).unwrap();
    for (id, title, boundary, first, published) in [
        ("1", "hard-square standard radii, n = 2..14", Boundary::Open, 2, &STANDARD_RADII[..]),
        ("2", "hard-square periodic radii, n = 3..14", Boundary::Periodic, 3, &PERIODIC_RADII[..]),
    ] {
        let start = Instant::now();
        let mut worst = (u32::MAX, 0);
        let mut max_states = 0;
        for (i, p) in published.iter().enumerate() {
            let n = first + i;
            let t = build_row_transfer_2d(&sys, n, boundary).unwrap();
            max_states = max_states.max(t.dim());
            let est = run.estimate(format!("T_{n} {boundary:?}"), &t, 40);
            let d = matched_digits(&est.value, p);
            if d < worst.0 {
                worst = (d, n);
            }
        }
        run.record(
            id,
            title,
            worst.0 >= 13,
            format!(
                "at least {} significant digits (weakest n = {}), {} states max, {:.1} s",
                worst.0,
                worst.1,
                max_states,
                start.elapsed().as_secs_f64()
            ),
        );
    }
}

fn one_vertex_radii(run: &mut Run) -> Vec<(usize, Float)> {
    let sys = hard_square_system(2).unwrap();
    let start = Instant::now();
    let mut values = Vec::new();
    let mut worst = u32::MAX;
    let mut shape_ok = true;
    let mut max_states = 0;
    for (n, p) in ONE_VERTEX_RADII {
        let s = build_one_vertex_2d(&sys, n).unwrap();
        max_states = max_states.max(s.dim());
        shape_ok &= s.dim() <= 2_200_000 && SparseMatrix::from_operator(&s).max_row_len() <= 2;
        let est = run.estimate(format!("S_{n}"), &s, 24);
        worst = worst.min(matched_digits(&est.value, p));
        values.push((n, est.value));
    }
    let report = heuristic_bracket_2d(&values);
    let monotone = report.even_increasing && report.odd_decreasing && report.violation.is_none();
    run.record(
        "3",
        "hard-square one-vertex radii, n = 25..30",
        worst >= 14 && shape_ok && monotone,
        format!(
            "at least {worst} significant digits, {max_states} states max, <= 2 successors: {shape_ok}, \
             even up / odd down: {monotone}, {:.0} s",
            start.elapsed().as_secs_f64()
        ),
    );
    values
}

fn bracket(run: &mut Run, one_vertex: &[(usize, Float)]) {
    let sys = hard_square_system(2).unwrap();
    let mut radius = |n: usize, b: Boundary| {
        let op = build_row_transfer_2d(&sys, n, b).unwrap();
        run.estimate(format!("T_{n} {b:?}"), &op, 40)
    };
    let (t13, t14) = (radius(13, Boundary::Open), radius(14, Boundary::Open));
    let (t14p, t16p) = (radius(14, Boundary::Periodic), radius(16, Boundary::Periodic));
    let lower = lower_bound_open_2d(&t14, &t13, 1, 6).unwrap();
    let upper = upper_bound_periodic_2d(&t14p, 14).unwrap();
    let wider = upper_bound_periodic_2d(&t16p, 16).unwrap();
    let show = |x: &Float| capacity_lab::numeric::format_float(x, 13);

    // the sharper published bracket must sit inside ours
    let contains_published = lower.admits(&big(HARD_SQUARE_LOWER)) && upper.admits(&big(HARD_SQUARE_UPPER));
    let heuristic = heuristic_bracket_2d(one_vertex)
        .bracket
        .is_some_and(|(lo, hi)| lo.admits(&big(HARD_SQUARE_LOWER)) && hi.admits(&big(HARD_SQUARE_UPPER)));
    let (dl, du, dw) = (
        matched_digits(&lower.safe_value, HARD_SQUARE_12),
        matched_digits(&upper.safe_value, HARD_SQUARE_12),
        matched_digits(&wider.safe_value, HARD_SQUARE_12),
    );
    run.record(
        "4a",
        "2D rigorous lower bound, p = 1, q = 6",
        dl >= 8 && contains_published && heuristic,
        format!(
            "{} <= e^h2 ({dl} digits of {HARD_SQUARE_12}), below the published lower bound: {contains_published}, \
             one-vertex heuristic bracket contains the published bracket: {heuristic}",
            show(&lower.safe_value)
        ),
    );
    // rho(T_14,per)^(1/14) is fixed by the reference radius 300.3458520273548...; it reaches 7 digits, not 8
    let forced = matched_digits(&upper.value, "1.503048429581555422904") >= 15;
    run.record_expecting(
        "4b",
        "2D rigorous upper bound, 2n = 14",
        du >= 8 && contains_published,
        false,
        format!(
            "e^h2 <= {} matches {du} digits of {HARD_SQUARE_12} (equals the tabulated radius to the 1/14: {forced}); \
             2n = 16 gives {} with {dw} digits",
            show(&upper.safe_value),
            show(&wider.safe_value)
        ),
    );
    if !(forced && dw >= 8 && wider.admits(&big(HARD_SQUARE_UPPER))) {
        run.record("4c", "2D upper bound as documented", false, "the 2n = 14 or 2n = 16 value moved".into());
    }
}

fn slabs(run: &mut Run) {
    let sys = hard_square_system(3).unwrap();
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (b1, b2, p) in SLABS_5X5 {
        let op = build_slab_transfer_3d(&sys, 5, 5, &BoundaryDescriptor::slab(b1, b2)).unwrap();
        let est = run.estimate(format!("R_(5,5) {b1:?},{b2:?}"), &op, 20);
        let d = matched_digits(&est.value, p);
        pass &= d >= 10;
        parts.push(format!("{b1:?}/{b2:?} {d} digits ({} states, {:?})", op.dim(), op.representation()));
    }
    run.record(
        "5",
        "3D (5,5) slabs, three boundaries",
        pass,
        format!("{}, {:.1} s", parts.join("; "), start.elapsed().as_secs_f64()),
    );
}

fn one_vertex_3d(run: &mut Run) {
    let sys = hard_square_system(3).unwrap();
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (n1, n2, p) in P_RADII.into_iter().chain([P_STRETCH]) {
        let op = build_one_vertex_3d(&sys, n1, n2).unwrap();
        let est = run.estimate(format!("P_({n1},{n2})"), &op, 20);
        let d = matched_digits(&est.value, p);
        pass &= d >= 7;
        parts.push(format!("({n1},{n2}) {d}/7"));
    }
    run.record(
        "6a",
        "3D one-vertex radii (4,4) (4,5) (5,4), stretch (6,5)",
        pass,
        format!("{}, {:.1} s", parts.join(", "), start.elapsed().as_secs_f64()),
    );

    let op = build_one_vertex_3d(&sys, 5, 5).unwrap();
    let est = run.estimate("P_(5,5)".into(), &op, 30);
    let d = matched_digits(&est.value, P_5X5_PUBLISHED);
    // the enclosure excludes every number that prints as the published one
    let published = big(P_5X5_PUBLISHED);
    let excluded = est.cw_lower > Float::with_val(256, &published + Float::with_val(256, 10).pow(-6));
    let as_documented = matched_digits(&est.value, P_5X5_CERTIFIED) >= 10 && excluded && op.dim() == 42416;
    let agrees = d >= 7;
    run.record_expecting(
        "6b",
        "3D one-vertex radius (5,5)",
        agrees,
        false,
        format!(
            "published {P_5X5_PUBLISHED} matches {d}/7 digits; certified radius {} in [{}, {}] over {} states \
             excludes it (documented discrepancy: {as_documented})",
            capacity_lab::numeric::format_float(&est.value, 11),
            capacity_lab::numeric::format_float(&est.cw_lower, 11),
            capacity_lab::numeric::format_float(&est.cw_upper, 11),
            op.dim()
        ),
    );
    if !as_documented {
        run.record("6c", "(5,5) radius as documented", false, "the certified value moved".into());
    }
}

fn torus_bound(run: &mut Run) {
    let rho = SpectralEstimate::published(TORUS_6X8, 40).unwrap();
    let bound = upper_bound_periodic_3d(&rho, 6, 8).unwrap();
    let target = big(TORUS_BOUND);
    let unit = Float::with_val(256, 10).pow(-11);
    let gap = Float::with_val(256, &bound.safe_value - &target);
    let pass = gap <= unit && gap.clone().abs() <= unit;
    run.record(
        "7",
        "3D upper bound from the published (6,8) torus",
        pass,
        format!(
            "{} = {} (safe {}), published bound {TORUS_BOUND}",
            bound.formula,
            capacity_lab::numeric::format_float(&bound.value, 13),
            capacity_lab::numeric::format_float(&bound.safe_value, 13)
        ),
    );
}

fn properties(run: &mut Run) {
    let identities = counting_identities(4).unwrap();
    let failed: Vec<_> = identities.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();

    let sys = hard_square_system(2).unwrap();
    let cfg = IterationConfig::with_precision(30);
    let sandwich_bad: Vec<usize> =
        (3..=8).filter(|&n| sandwich_check_one_vertex(&sys, n, &cfg).unwrap().violated).collect();

    let bad_enclosures: Vec<_> = run.enclosures.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.clone()).collect();

    let mut cfg = ExperimentConfig::new(ModelSpec::Builtin("hard-square".into()), Task::Sweep);
    cfg.op = OpKind::Periodic;
    cfg.n = Some("4..12".parse().unwrap());
    let first = run_experiment(&cfg).unwrap().document;
    let second = run_experiment(&cfg).unwrap().document;
    let deterministic = first == second;

    run.record(
        "8",
        "identities, sandwich, enclosures, determinism",
        failed.is_empty() && sandwich_bad.is_empty() && bad_enclosures.is_empty() && deterministic,
        format!(
            "{}/{} counting identities exact, sandwich violated for n in {sandwich_bad:?}, {}/{} enclosures contain \
             their value, repeated sweep byte-identical: {deterministic}",
            identities.len() - failed.len(),
            identities.len(),
            run.enclosures.len() - bad_enclosures.len(),
            run.enclosures.len()
        ),
    );
}

fn monomer_dimer(run: &mut Run) {
    let radius = |chain: bool| {
        let sys = monomer_dimer_system(1, chain).unwrap();
        let g = sys.axis(0);
        let rows = (0..sys.k()).map(|a| (0..sys.k()).filter(|&b| g.has_edge(a, b)).collect()).collect();
        perron_radius(&SparseMatrix::from_rows(rows).unwrap(), &IterationConfig::with_precision(32)).unwrap()
    };
    let with_chain = radius(true);
    let without = radius(false);
    let golden = big(GOLDEN);
    let digits = matched_digits(&with_chain.value, GOLDEN);
    let differs = !without.contains(&golden) && (without.value.to_f64() - 1.4656).abs() < 1e-4;

    let mut masked_ok = true;
    for a in 1..=3 {
        for b in 1..=3 {
            let tilings = brute_count_monomer_dimer(&[a, b]).unwrap();
            let coloured = monomer_dimer_colour_count(&[a, b], true).unwrap();
            masked_ok &= tilings.value == coloured.value;
        }
    }
    run.record(
        "9",
        "monomer-dimer validation",
        digits >= 20 && differs && masked_ok,
        format!(
            "d=1 radius matches the golden ratio to {digits} digits, without the back edge {} (excludes it: {differs}), \
             masked counts equal tilings on boxes up to 3x3: {masked_ok}",
            capacity_lab::numeric::format_float(&without.value, 10)
        ),
    );
}

fn main() {
    let start = Instant::now();
    let mut run = Run { lines: Vec::new(), enclosures: Vec::new() };
    row_radii(&mut run);
    let one_vertex = one_vertex_radii(&mut run);
    bracket(&mut run, &one_vertex);
    slabs(&mut run);
    one_vertex_3d(&mut run);
    torus_bound(&mut run);
    properties(&mut run);
    monomer_dimer(&mut run);

    let passed = run.lines.iter().filter(|l| l.pass).count();
    let unexpected: Vec<&Line> = run.lines.iter().filter(|l| l.pass != l.expected).collect();
    println!(
        "acceptance: {passed}/{} lines pass, {} unexpected, {:.0} s",
        run.lines.len(),
        unexpected.len(),
        start.elapsed().as_secs_f64()
    );
    if !unexpected.is_empty() {
        for l in unexpected {
            eprintln!("unexpected outcome for criterion {} ({}): {}", l.id, l.title, l.detail);
        }
        std::process::exit(1);
    }
}
