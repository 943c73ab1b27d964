//! Entropy bounds assembled from spectral radii. Every bound is reported on the
//! exponential scale `e^h`, so a bound like `h <= log(rho) / n` becomes `rho^(1/n)`.
//!
//! `value` is computed from the estimates' central values; `safe_value` is recomputed
//! from their Collatz–Wielandt enclosures with directed rounding, so that it remains a
//! valid bound whatever the numerical error in `value`.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use rug::float::Round;
use rug::ops::{DivAssignRound, MulAssignRound};
use rug::Float;
use serde::Serialize;

use crate::constraint::{find_friendly_colours, Boundary, ConstraintSystem};
use crate::error::{Error, Result};
use crate::numeric::{display_digits, format_float, serialize_float};
use crate::one_vertex::build_one_vertex_2d;
use crate::spectral::{perron_radius, IterationConfig, SpectralEstimate};
use crate::transfer::build_row_transfer_2d;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    H2,
    H3,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::H2 => "e^h2",
            Quantity::H3 => "e^h3",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        })
    }
}

/// `Conditional` bounds rest on a recipe or ansatz that is not proved here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rigor {
    Rigorous,
    Heuristic,
    Conditional,
}

impl fmt::Display for Rigor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rigor::Rigorous => "rigorous",
            Rigor::Heuristic => "heuristic",
            Rigor::Conditional => "conditional",
        })
    }
}

/// A spectral radius that fed a bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundInput {
    pub label: String,
    #[serde(serialize_with = "serialize_float")]
    pub value: Float,
    #[serde(serialize_with = "serialize_float")]
    pub cw_lower: Float,
    #[serde(serialize_with = "serialize_float")]
    pub cw_upper: Float,
    pub converged: bool,
}

impl BoundInput {
    fn new(label: impl Into<String>, est: &SpectralEstimate) -> Self {
        Self {
            label: label.into(),
            value: est.value.clone(),
            cw_lower: est.cw_lower.clone(),
            cw_upper: est.cw_upper.clone(),
            converged: est.converged,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyBound {
    pub quantity: Quantity,
    pub kind: BoundKind,
    pub rigor: Rigor,
    #[serde(serialize_with = "serialize_float")]
    pub value: Float,
    #[serde(serialize_with = "serialize_float")]
    pub safe_value: Float,
    pub formula: String,
    pub inputs: Vec<BoundInput>,
}

impl EntropyBound {
    /// `h` itself, in nats.
    pub fn entropy(&self) -> Float {
        self.value.clone().ln()
    }

    /// Whether `x` (on the `e^h` scale) is consistent with the safe value.
    pub fn admits(&self, x: &Float) -> bool {
        match self.kind {
            BoundKind::Lower => &self.safe_value <= x,
            BoundKind::Upper => x <= &self.safe_value,
        }
    }

    fn digits(&self) -> usize {
        display_digits(self.value.prec())
    }
}

impl fmt::Display for EntropyBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.kind {
            BoundKind::Lower => ">=",
            BoundKind::Upper => "<=",
        };
        write!(
            f,
            "{} {rel} {} (safe {}) [{} {}; {}]",
            self.quantity,
            format_float(&self.value, self.digits()),
            format_float(&self.safe_value, self.digits()),
            self.rigor,
            self.kind,
            self.formula
        )
    }
}

fn require_rigorous(label: &str, est: &SpectralEstimate) -> Result<()> {
    if !est.converged || !est.cw_upper.is_finite() || est.cw_lower <= 0 {
        return Err(Error::NotConverged(format!(
            "{label}: a rigorous bound needs a converged estimate with a finite positive enclosure"
        )));
    }
    Ok(())
}

fn working_bits(inputs: &[&SpectralEstimate]) -> u32 {
    inputs.iter().map(|e| e.value.prec()).max().unwrap_or(64)
}

/// `(prod num / prod den)^(1/root)` in the given rounding direction. With `Round::Down`
/// every step rounds down (numerators) or up (denominators), and vice versa.
fn ratio_root(bits: u32, num: &[&Float], den: &[&Float], root: u32, round: Round) -> Float {
    let opposite = match round {
        Round::Down => Round::Up,
        Round::Up => Round::Down,
        r => r,
    };
    let mut top = Float::with_val_round(bits, 1u32, round).0;
    for x in num {
        top.mul_assign_round(*x, round);
    }
    let mut bottom = Float::with_val_round(bits, 1u32, opposite).0;
    for x in den {
        bottom.mul_assign_round(*x, opposite);
    }
    top.div_assign_round(&bottom, round);
    if root > 1 {
        top.root_round(root, round);
    }
    top
}

fn build_bound(
    quantity: Quantity,
    kind: BoundKind,
    rigor: Rigor,
    formula: String,
    num: &[(&str, &SpectralEstimate)],
    den: &[(&str, &SpectralEstimate)],
    root: u32,
) -> EntropyBound {
    let all: Vec<&SpectralEstimate> = num.iter().chain(den).map(|(_, e)| *e).collect();
    let bits = working_bits(&all);
    let num_values: Vec<&Float> = num.iter().map(|(_, e)| &e.value).collect();
    let den_values: Vec<&Float> = den.iter().map(|(_, e)| &e.value).collect();
    let value = ratio_root(bits, &num_values, &den_values, root, Round::Nearest);
    // a lower bound uses the smallest the numerators can be and the largest the denominators can be
    let (safe_num, safe_den, round): (Vec<&Float>, Vec<&Float>, Round) = match kind {
        BoundKind::Lower => (
            num.iter().map(|(_, e)| &e.cw_lower).collect(),
            den.iter().map(|(_, e)| &e.cw_upper).collect(),
            Round::Down,
        ),
        BoundKind::Upper => (
            num.iter().map(|(_, e)| &e.cw_upper).collect(),
            den.iter().map(|(_, e)| &e.cw_lower).collect(),
            Round::Up,
        ),
    };
    let mut safe_value = ratio_root(bits, &safe_num, &safe_den, root, round);
    // keep the ordering invariant even when an enclosure is wider on one side than the value suggests
    match kind {
        BoundKind::Lower if safe_value > value => safe_value = value.clone(),
        BoundKind::Upper if safe_value < value => safe_value = value.clone(),
        _ => {}
    }
    let inputs = num.iter().chain(den).map(|(label, e)| BoundInput::new(*label, e)).collect();
    EntropyBound { quantity, kind, rigor, value, safe_value, formula, inputs }
}

fn positive(name: &str, v: usize) -> Result<u32> {
    if v == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
    }
    u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("{name} is too large")))
}

/// `e^h2 >= (rho(T_{p+2q+1}) / rho(T_{2q+1}))^(1/p)` for an isotropic symmetric system.
/// With `q = 0` the small radius is that of the constraint graph itself.
pub fn lower_bound_open_2d(
    rho_large: &SpectralEstimate,
    rho_small: &SpectralEstimate,
    p: usize,
    q: usize,
) -> Result<EntropyBound> {
    let pp = positive("p", p)?;
    let large = format!("rho(T_{})", p + 2 * q + 1);
    let small = format!("rho(T_{})", 2 * q + 1);
    require_rigorous(&large, rho_large)?;
    require_rigorous(&small, rho_small)?;
    Ok(build_bound(
        Quantity::H2,
        BoundKind::Lower,
        Rigor::Rigorous,
        format!("({large} / {small})^(1/{p})"),
        &[(&large, rho_large)],
        &[(&small, rho_small)],
        pp,
    ))
}

/// `e^h2 <= rho(T_n)^(1/n)`.
pub fn upper_bound_open_2d(rho: &SpectralEstimate, n: usize) -> Result<EntropyBound> {
    let nn = positive("n", n)?;
    let label = format!("rho(T_{n})");
    require_rigorous(&label, rho)?;
    Ok(build_bound(
        Quantity::H2,
        BoundKind::Upper,
        Rigor::Rigorous,
        format!("{label}^(1/{n})"),
        &[(&label, rho)],
        &[],
        nn,
    ))
}

/// `e^h2 >= (rho(T_{p+2q,per}) / rho(T_{2q,per}))^(1/p)`; for `q = 0` pass the radius of
/// the constraint graph as `rho_small`.
pub fn lower_bound_periodic_2d(
    rho_large: &SpectralEstimate,
    rho_small: &SpectralEstimate,
    p: usize,
    q: usize,
) -> Result<EntropyBound> {
    let pp = positive("p", p)?;
    let large = format!("rho(T_{},per)", p + 2 * q);
    let small = if q == 0 { "rho(graph)".to_string() } else { format!("rho(T_{},per)", 2 * q) };
    require_rigorous(&large, rho_large)?;
    require_rigorous(&small, rho_small)?;
    Ok(build_bound(
        Quantity::H2,
        BoundKind::Lower,
        Rigor::Rigorous,
        format!("({large} / {small})^(1/{p})"),
        &[(&large, rho_large)],
        &[(&small, rho_small)],
        pp,
    ))
}

/// `e^h2 <= rho(T_{side,per})^(1/side)`, valid for even `side` only.
pub fn upper_bound_periodic_2d(rho: &SpectralEstimate, side: usize) -> Result<EntropyBound> {
    let s = positive("side", side)?;
    if side % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "the periodic upper bound needs an even cycle length, got {side}"
        )));
    }
    let label = format!("rho(T_{side},per)");
    require_rigorous(&label, rho)?;
    Ok(build_bound(Quantity::H2, BoundKind::Upper, Rigor::Rigorous, format!("{label}^(1/{side})"), &[(&label, rho)], &[], s))
}

/// `e^h3 <= rho(T_{(a,b),per})^(1/(a b))` for a torus slab with both sides even.
pub fn upper_bound_periodic_3d(rho: &SpectralEstimate, side1: usize, side2: usize) -> Result<EntropyBound> {
    positive("side1", side1)?;
    positive("side2", side2)?;
    if side1 % 2 == 1 || side2 % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "the periodic 3-D upper bound needs even torus sides, got ({side1},{side2})"
        )));
    }
    let root = positive("torus area", side1 * side2)?;
    let label = format!("rho(T_({side1},{side2}),per)");
    require_rigorous(&label, rho)?;
    Ok(build_bound(
        Quantity::H3,
        BoundKind::Upper,
        Rigor::Rigorous,
        format!("{label}^(1/{})", side1 * side2),
        &[(&label, rho)],
        &[],
        root,
    ))
}

/// Slab radius at a given slab size.
#[derive(Clone, Copy, Debug)]
pub struct SlabRadius<'a> {
    pub n1: usize,
    pub n2: usize,
    pub estimate: &'a SpectralEstimate,
}

/// `e^h3 >= rho(m1+1, m2+1) rho(m1, m2) / (rho(m1+1, m2) rho(m1, m2+1))`, the corner
/// ratio of four slab radii. Conditional: the inequality is not proved here.
pub fn corner_ratio_lower_bound_3d(radii: [SlabRadius<'_>; 4]) -> Result<EntropyBound> {
    let (m1, m2) = radii.iter().map(|r| (r.n1, r.n2)).min().expect("four inputs");
    let find = |a: usize, b: usize| {
        radii.iter().find(|r| r.n1 == a && r.n2 == b).map(|r| r.estimate).ok_or_else(|| {
            let got: Vec<String> = radii.iter().map(|r| format!("({},{})", r.n1, r.n2)).collect();
            Error::InvalidArgument(format!(
                "corner ratio needs slabs ({m1},{m2}), ({},{m2}), ({m1},{}), ({},{}); got {}",
                m1 + 1,
                m2 + 1,
                m1 + 1,
                m2 + 1,
                got.join(" ")
            ))
        })
    };
    let r11 = find(m1, m2)?;
    let r21 = find(m1 + 1, m2)?;
    let r12 = find(m1, m2 + 1)?;
    let r22 = find(m1 + 1, m2 + 1)?;
    let l11 = format!("rho({m1},{m2})");
    let l21 = format!("rho({},{m2})", m1 + 1);
    let l12 = format!("rho({m1},{})", m2 + 1);
    let l22 = format!("rho({},{})", m1 + 1, m2 + 1);
    for (label, est) in [(&l11, r11), (&l21, r21), (&l12, r12), (&l22, r22)] {
        require_rigorous(label, est)?;
    }
    Ok(build_bound(
        Quantity::H3,
        BoundKind::Lower,
        Rigor::Conditional,
        format!("{l22} {l11} / ({l21} {l12})"),
        &[(&l22, r22), (&l11, r11)],
        &[(&l21, r21), (&l12, r12)],
        1,
    ))
}

/// The one-vertex sandwich
/// `rho(T_{n-1,per})^(1/n) <= rho(S_n) <= min(rho(T_n)^(1/n), rho(T_{n+1,per})^(1/n))`.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub n: usize,
    #[serde(serialize_with = "serialize_float")]
    pub lower: Float,
    #[serde(serialize_with = "serialize_float")]
    pub middle: Float,
    #[serde(serialize_with = "serialize_float")]
    pub upper_standard: Float,
    #[serde(serialize_with = "serialize_float")]
    pub upper_periodic: Float,
    /// `middle - lower`.
    #[serde(serialize_with = "serialize_float")]
    pub lower_gap: Float,
    /// `min(upper_standard, upper_periodic) - middle`.
    #[serde(serialize_with = "serialize_float")]
    pub upper_gap: Float,
    /// Set when the enclosures prove that one of the inequalities fails.
    pub violated: bool,
}

/// Computes the four radii of the sandwich for `sys` and checks it.
pub fn sandwich_check_one_vertex(sys: &ConstraintSystem, n: usize, cfg: &IterationConfig) -> Result<SandwichReport> {
    if sys.d() != 2 || !sys.is_isotropic() || !sys.is_symmetric() {
        return Err(Error::InvalidArgument("the sandwich needs an isotropic symmetric 2-D system".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("the sandwich needs n >= 2".into()));
    }
    let t_prev = perron_radius(&build_row_transfer_2d(sys, n - 1, Boundary::Periodic)?, cfg)?;
    let s = perron_radius(&build_one_vertex_2d(sys, n)?, cfg)?;
    let t = perron_radius(&build_row_transfer_2d(sys, n, Boundary::Open)?, cfg)?;
    let t_next = perron_radius(&build_row_transfer_2d(sys, n + 1, Boundary::Periodic)?, cfg)?;
    sandwich_from_estimates(n, &t_prev, &s, &t, &t_next)
}

/// The sandwich from precomputed radii of `T_{n-1,per}`, `S_n`, `T_n` and `T_{n+1,per}`.
pub fn sandwich_from_estimates(
    n: usize,
    t_per_prev: &SpectralEstimate,
    s: &SpectralEstimate,
    t: &SpectralEstimate,
    t_per_next: &SpectralEstimate,
) -> Result<SandwichReport> {
    let root = positive("n", n)?;
    let bits = working_bits(&[t_per_prev, s, t, t_per_next]);
    let nth = |x: &Float, round: Round| ratio_root(bits, &[x], &[], root, round);
    let lower = nth(&t_per_prev.value, Round::Nearest);
    let upper_standard = nth(&t.value, Round::Nearest);
    let upper_periodic = nth(&t_per_next.value, Round::Nearest);
    let middle = Float::with_val(bits, &s.value);
    let lower_gap = Float::with_val(bits, &middle - &lower);
    let upper_gap = Float::with_val(bits, upper_standard.clone().min(&upper_periodic) - &middle);
    let lower_fails = s.cw_upper < nth(&t_per_prev.cw_lower, Round::Down);
    let upper_fails =
        s.cw_lower > nth(&t.cw_upper, Round::Up) || s.cw_lower > nth(&t_per_next.cw_upper, Round::Up);
    Ok(SandwichReport {
        n,
        lower,
        middle,
        upper_standard,
        upper_periodic,
        lower_gap,
        upper_gap,
        violated: lower_fails || upper_fails,
    })
}

/// `rho(R_n)^(1/(n+1)) <= rho(P_{n+1})` for systems with a friendly colour.
#[derive(Clone, Debug, Serialize)]
pub struct FriendlyReport {
    pub n: usize,
    /// 1-based friendly colours.
    pub friendly_colours: Vec<usize>,
    #[serde(serialize_with = "serialize_float")]
    pub lhs: Float,
    #[serde(serialize_with = "serialize_float")]
    pub rhs: Float,
    #[serde(serialize_with = "serialize_float")]
    pub slack: Float,
    pub holds: bool,
    /// Whether the enclosures alone already prove the inequality.
    pub certified: bool,
}

pub fn friendly_lower_bound_2d(
    sys: &ConstraintSystem,
    rho_r: &SpectralEstimate,
    n: usize,
    rho_p: &SpectralEstimate,
) -> Result<FriendlyReport> {
    let friendly = find_friendly_colours(sys);
    if friendly.is_empty() {
        return Err(Error::NoFriendlyColour);
    }
    let root = positive("n + 1", n + 1)?;
    let bits = working_bits(&[rho_r, rho_p]);
    let lhs = ratio_root(bits, &[&rho_r.value], &[], root, Round::Nearest);
    let rhs = Float::with_val(bits, &rho_p.value);
    let slack = Float::with_val(bits, &rhs - &lhs);
    let certified = ratio_root(bits, &[&rho_r.cw_upper], &[], root, Round::Up) <= rho_p.cw_lower;
    Ok(FriendlyReport {
        n,
        friendly_colours: friendly.iter().map(|c| c + 1).collect(),
        holds: lhs <= rhs,
        lhs,
        rhs,
        slack,
        certified,
    })
}

/// Monotonicity of the one-vertex radii and the bracket they give under the ansatz
/// that even sizes increase and odd sizes decrease towards `e^h2`.
#[derive(Clone, Debug, Serialize)]
pub struct HeuristicReport {
    pub even_increasing: bool,
    pub odd_decreasing: bool,
    pub violation: Option<String>,
    pub bracket: Option<(EntropyBound, EntropyBound)>,
}

pub fn heuristic_bracket_2d(values: &[(usize, Float)]) -> HeuristicReport {
    let mut sorted: Vec<&(usize, Float)> = values.iter().collect();
    sorted.sort_by_key(|(n, _)| *n);
    let even: Vec<&(usize, Float)> = sorted.iter().copied().filter(|(n, _)| n % 2 == 0).collect();
    let odd: Vec<&(usize, Float)> = sorted.iter().copied().filter(|(n, _)| n % 2 == 1).collect();
    let first_break = |seq: &[&(usize, Float)], want: Ordering| {
        seq.windows(2).find(|w| w[0].1.partial_cmp(&w[1].1) != Some(want)).map(|w| (w[0].0, w[1].0))
    };
    let even_break = first_break(&even, Ordering::Less);
    let odd_break = first_break(&odd, Ordering::Greater);
    let violation = match (even_break, odd_break) {
        (Some((a, b)), _) => Some(format!("rho(S_{a}) >= rho(S_{b}): even sizes do not increase")),
        (None, Some((a, b))) => Some(format!("rho(S_{a}) <= rho(S_{b}): odd sizes do not decrease")),
        (None, None) => None,
    };
    let bracket = match (violation.is_none(), even.last(), odd.last()) {
        (true, Some((ne, ve)), Some((no, vo))) if ve <= vo => {
            let mk = |kind, n: usize, v: &Float| {
                let est = SpectralEstimate::exact_value(v.clone());
                build_bound(
                    Quantity::H2,
                    kind,
                    Rigor::Heuristic,
                    format!("rho(S_{n})"),
                    &[(&format!("rho(S_{n})"), &est)],
                    &[],
                    1,
                )
            };
            Some((mk(BoundKind::Lower, *ne, ve), mk(BoundKind::Upper, *no, vo)))
        }
        _ => None,
    };
    HeuristicReport { even_increasing: even_break.is_none(), odd_decreasing: odd_break.is_none(), violation, bracket }
}

/// Best bounds per quantity, rigorous, heuristic and conditional kept apart.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundReport {
    pub sections: Vec<ReportSection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportSection {
    pub quantity: Quantity,
    pub rigorous_lower: Option<EntropyBound>,
    pub rigorous_upper: Option<EntropyBound>,
    pub heuristic_lower: Option<EntropyBound>,
    pub heuristic_upper: Option<EntropyBound>,
    pub conditional: Vec<EntropyBound>,
}

fn best<'a>(bounds: impl Iterator<Item = &'a EntropyBound>, kind: BoundKind) -> Option<EntropyBound> {
    bounds
        .filter(|b| b.kind == kind)
        .max_by(|a, b| {
            let ord = a.safe_value.partial_cmp(&b.safe_value).unwrap_or(Ordering::Equal);
            if kind == BoundKind::Lower {
                ord
            } else {
                ord.reverse()
            }
        })
        .cloned()
}

pub fn bound_report(bounds: &[EntropyBound]) -> BoundReport {
    let mut quantities: Vec<Quantity> = bounds.iter().map(|b| b.quantity).collect();
    quantities.sort();
    quantities.dedup();
    let sections = quantities
        .into_iter()
        .map(|q| {
            let of = |r: Rigor| bounds.iter().filter(move |b| b.quantity == q && b.rigor == r);
            ReportSection {
                quantity: q,
                rigorous_lower: best(of(Rigor::Rigorous), BoundKind::Lower),
                rigorous_upper: best(of(Rigor::Rigorous), BoundKind::Upper),
                heuristic_lower: best(of(Rigor::Heuristic), BoundKind::Lower),
                heuristic_upper: best(of(Rigor::Heuristic), BoundKind::Upper),
                conditional: of(Rigor::Conditional).cloned().collect(),
            }
        })
        .collect();
    BoundReport { sections }
}

impl BoundReport {
    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            writeln!(out, "{}", s.quantity).unwrap();
            let mut line = |title: &str, b: &Option<EntropyBound>| {
                if let Some(b) = b {
                    writeln!(out, "  {title:<16} {b}").unwrap();
                }
            };
            line("rigorous lower", &s.rigorous_lower);
            line("rigorous upper", &s.rigorous_upper);
            line("heuristic lower", &s.heuristic_lower);
            line("heuristic upper", &s.heuristic_upper);
            for b in &s.conditional {
                writeln!(out, "  {:<16} {b}", "conditional").unwrap();
            }
        }
        out
    }
}

/// One CSV row per bound: quantity, kind, rigor, value, safe_value, formula, inputs.
pub fn bounds_csv(bounds: &[EntropyBound]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "kind", "rigor", "value", "safe_value", "formula", "inputs"]).unwrap();
    for b in bounds {
        let inputs: Vec<String> = b
            .inputs
            .iter()
            .map(|i| {
                let d = display_digits(i.value.prec());
                format!("{}={} [{}, {}]", i.label, format_float(&i.value, d), format_float(&i.cw_lower, d), format_float(&i.cw_upper, d))
            })
            .collect();
        w.write_record([
            b.quantity.to_string(),
            b.kind.to_string(),
            b.rigor.to_string(),
            format_float(&b.value, b.digits()),
            format_float(&b.safe_value, b.digits()),
            b.formula.clone(),
            inputs.join("; "),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}
