//! Perron roots by shifted power iteration, certified with Collatz–Wielandt bounds.
//!
//! The iteration runs on `A + sigma I` and normalises each iterate by a power of two.
//! When `warm_start` is on, it first runs in `f64` until the enclosure is as tight as
//! double precision allows, then converts the iterate exactly and continues with MPFR
//! floats at the requested precision. The final enclosure is recomputed with directed
//! rounding, so `cw_lower <= rho(A) <= cw_upper` holds rigorously for the operator.

mod checkpoint;

use std::cmp::Ordering;
use std::path::PathBuf;

use rayon::prelude::*;
use rug::float::Round;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{digits_to_bits, format_float, ten_pow_neg, RoundDown, RoundUp};
use crate::operator::{Operator, Scratch, PAR_MIN_ROWS};
use checkpoint::{descriptor_hash, Checkpoint, F64_PHASE_BITS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shift {
    /// `sigma = 1`.
    Auto,
    Explicit(f64),
}

#[derive(Clone, Debug)]
pub struct CheckpointConfig {
    pub path: PathBuf,
    /// Write every this many iterations (and when the run stops).
    pub interval: u64,
    /// Start from the file at `path` instead of the all-ones vector.
    pub resume: bool,
}

#[derive(Clone, Debug)]
pub struct IterationConfig {
    /// Significant decimal digits of the working precision; at least 16.
    pub precision_digits: u32,
    /// Relative enclosure width `(upper - lower) / value` to stop at;
    /// `None` means `10^-(precision_digits - 8)`.
    pub tolerance: Option<f64>,
    pub max_iterations: u64,
    pub shift: Shift,
    /// Enclosures are evaluated every this many iterations.
    pub check_interval: u64,
    pub checkpoint: Option<CheckpointConfig>,
    /// Every entry of the start vector.
    pub start_value: f64,
    pub warm_start: bool,
    /// Keep the enclosure seen at every check in [`SpectralEstimate::history`].
    pub record_history: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            precision_digits: 40,
            tolerance: None,
            max_iterations: 1_000_000,
            shift: Shift::Auto,
            check_interval: 10,
            checkpoint: None,
            start_value: 1.0,
            warm_start: true,
            record_history: false,
        }
    }
}

impl IterationConfig {
    pub fn with_precision(digits: u32) -> Self {
        Self { precision_digits: digits, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_digits < 16 {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least 16 digits, got {}",
                self.precision_digits
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.check_interval == 0 {
            return Err(Error::InvalidArgument("check interval must be at least 1".into()));
        }
        if let Shift::Explicit(s) = self.shift {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("shift must be a non-negative number, got {s}")));
            }
        }
        if !(self.start_value > 0.0 && self.start_value.is_finite()) {
            return Err(Error::InvalidArgument("start value must be positive".into()));
        }
        if let Some(c) = &self.checkpoint {
            if c.interval == 0 {
                return Err(Error::InvalidArgument("checkpoint interval must be at least 1".into()));
            }
        }
        Ok(())
    }

    pub fn bits(&self) -> u32 {
        digits_to_bits(self.precision_digits)
    }

    pub fn shift_value(&self) -> f64 {
        match self.shift {
            Shift::Auto => 1.0,
            Shift::Explicit(s) => s,
        }
    }

    fn tolerance_float(&self) -> Float {
        match self.tolerance {
            Some(t) => Float::with_val(self.bits(), t),
            None => ten_pow_neg(self.precision_digits as i32 - 8, self.bits()),
        }
    }
}

/// Enclosure observed at one check, rounded to `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnclosureSample {
    pub iteration: u64,
    pub lower: f64,
    pub upper: f64,
}

/// Dominant eigenvalue with a Collatz–Wielandt enclosure.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralEstimate {
    #[serde(serialize_with = "crate::numeric::serialize_float")]
    pub value: Float,
    #[serde(serialize_with = "crate::numeric::serialize_float")]
    pub cw_lower: Float,
    /// `+inf` when the final iterate has zero entries.
    #[serde(serialize_with = "crate::numeric::serialize_float")]
    pub cw_upper: Float,
    pub iterations: u64,
    pub precision_digits: u32,
    pub converged: bool,
    pub shift_applied: f64,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<EnclosureSample>,
}

impl SpectralEstimate {
    /// A radius known exactly: the enclosure is the single point `value`.
    pub fn exact_value(value: Float) -> Self {
        let precision_digits = crate::numeric::display_digits(value.prec()) as u32;
        Self {
            cw_lower: value.clone(),
            cw_upper: value.clone(),
            value,
            iterations: 0,
            precision_digits,
            converged: true,
            shift_applied: 0.0,
            dimension: 0,
            history: Vec::new(),
        }
    }

    /// A radius quoted elsewhere to `text`'s significant digits. The enclosure is one unit
    /// of the last quoted digit either side, which covers both rounding and truncation.
    pub fn published(text: &str, precision_digits: u32) -> Result<Self> {
        let bits = digits_to_bits(precision_digits);
        let parsed = Float::parse(text.trim())
            .map_err(|e| Error::InvalidArgument(format!("`{text}` is not a number: {e}")))?;
        let value = Float::with_val(bits, parsed);
        if !value.is_finite() || value <= 0 {
            return Err(Error::InvalidArgument(format!("published radius `{text}` must be positive")));
        }
        let (mantissa, exp) = match text.trim().split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
            None => (text.trim(), 0),
        };
        let decimals = mantissa.split_once('.').map_or(0, |(_, f)| f.len() as i32);
        let unit = ten_pow_neg(decimals - exp, bits);
        let mut cw_lower = Float::with_val(bits, &value - &unit);
        let mut cw_upper = Float::with_val(bits, &value + &unit);
        cw_lower.next_down();
        cw_upper.next_up();
        Ok(Self {
            value,
            cw_lower,
            cw_upper,
            iterations: 0,
            precision_digits,
            converged: true,
            shift_applied: 0.0,
            dimension: 0,
            history: Vec::new(),
        })
    }

    /// `(upper - lower) / value`.
    pub fn relative_gap(&self) -> Float {
        let mut g = Float::with_val(self.value.prec(), &self.cw_upper - &self.cw_lower);
        g /= &self.value;
        g
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Value with `precision_digits` significant digits.
    pub fn value_string(&self) -> String {
        format_float(&self.value, self.precision_digits as usize)
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.cw_lower <= x && x <= &self.cw_upper
    }
}

/// `(min_i (Av)_i / v_i, max_i (Av)_i / v_i)` for strictly positive `v`, rounded outward.
pub fn collatz_wielandt_bounds<O: Operator + ?Sized>(op: &O, v: &[Float]) -> Result<(Float, Float)> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: v.len() });
    }
    if let Some(index) = v.iter().position(|x| !x.is_finite() || *x <= 0) {
        return Err(Error::NonPositiveEntry { index });
    }
    let (lo, hi) = directed_enclosure(op, v.to_vec());
    Ok((lo, hi.expect("positive vector gives a finite upper bound")))
}

/// Lower bound over the support of `x`; the upper bound only when `x` is strictly positive.
fn directed_enclosure<O: Operator + ?Sized>(op: &O, x: Vec<Float>) -> (Float, Option<Float>) {
    let bits = x.first().map_or(64, Float::prec);
    let m = x.len();
    let mut scratch = Scratch::new();
    let xd: Vec<RoundDown> = x.into_iter().map(RoundDown).collect();
    let mut yd = vec![RoundDown(Float::new(bits)); m];
    op.apply_with(&xd, &mut yd, &mut scratch);
    let x: Vec<Float> = xd.into_iter().map(|r| r.0).collect();
    let lower = (0..m)
        .into_par_iter()
        .with_min_len(PAR_MIN_ROWS)
        .filter(|&i| x[i] > 0)
        .map(|i| Float::with_val_round(bits, &yd[i].0 / &x[i], Round::Down).0)
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .unwrap_or_else(|| Float::new(bits));
    drop(yd);
    if x.iter().any(|v| *v <= 0) {
        return (lower, None);
    }
    let mut scratch = Scratch::new();
    let xu: Vec<RoundUp> = x.into_iter().map(RoundUp).collect();
    let mut yu = vec![RoundUp(Float::new(bits)); m];
    op.apply_with(&xu, &mut yu, &mut scratch);
    let upper = (0..m)
        .into_par_iter()
        .with_min_len(PAR_MIN_ROWS)
        .map(|i| Float::with_val_round(bits, &yu[i].0 / &xu[i].0, Round::Up).0)
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .unwrap_or_else(|| Float::new(bits));
    (lower, Some(upper))
}

/// Power-iteration state: the iterate after `iteration` multiplications.
enum Iterate {
    Double(Vec<f64>),
    Multi(Vec<Float>),
}

/// Dominant eigenvalue of a non-negative operator.
pub fn perron_radius<O: Operator + ?Sized>(op: &O, cfg: &IterationConfig) -> Result<SpectralEstimate> {
    cfg.validate()?;
    let m = op.dim();
    if m == 0 {
        return Err(Error::InvalidArgument("operator has no states".into()));
    }
    let bits = cfg.bits();
    let sigma = cfg.shift_value();
    let depth = op.accumulation_depth().min(1 << 20) as f64;
    let hash = descriptor_hash(&op.descriptor());
    let mut history = Vec::new();

    let (mut state, mut t) = match &cfg.checkpoint {
        Some(c) if c.resume => {
            let ck = Checkpoint::load(&c.path)?;
            let mismatch = || Error::CheckpointMismatch { path: c.path.clone() };
            if ck.descriptor_hash != hash || ck.vector.len() != m || ck.shift.to_bits() != sigma.to_bits() {
                return Err(mismatch());
            }
            let state = if ck.bits == F64_PHASE_BITS {
                Iterate::Double(ck.vector.iter().map(Float::to_f64).collect())
            } else if ck.bits == bits {
                Iterate::Multi(ck.vector)
            } else {
                return Err(mismatch());
            };
            log::info!("resumed from {:?} at iteration {}", c.path, ck.iteration);
            (state, ck.iteration)
        }
        _ if cfg.warm_start => (Iterate::Double(vec![cfg.start_value; m]), 0),
        _ => (Iterate::Multi(vec![Float::with_val(bits, cfg.start_value); m]), 0),
    };

    let save = |state: &Iterate, t: u64| -> Result<()> {
        let Some(c) = &cfg.checkpoint else { return Ok(()) };
        let (vector, b) = match state {
            Iterate::Double(x) => (x.iter().map(|&v| Float::with_val(F64_PHASE_BITS, v)).collect(), F64_PHASE_BITS),
            Iterate::Multi(x) => (x.clone(), bits),
        };
        Checkpoint { descriptor_hash: hash, iteration: t, bits: b, shift: sigma, vector }.save(&c.path)
    };
    let checkpoint_due = |t: u64| cfg.checkpoint.as_ref().is_some_and(|c| t.is_multiple_of(c.interval));

    // the limit was reached during the warm phase; its checkpoint must stay an f64 one
    let mut stopped_warm = false;
    if let Iterate::Double(x) = &mut state {
        let target = cfg.tolerance.unwrap_or(0.0).max(64.0 * (depth + 3.0) * f64::EPSILON);
        let widen = (depth + 3.0) * f64::EPSILON;
        let mut ax = vec![0.0; m];
        let mut scratch = Scratch::new();
        loop {
            if t >= cfg.max_iterations {
                save(&Iterate::Double(x.clone()), t)?;
                stopped_warm = true;
                break;
            }
            op.apply_with(x, &mut ax, &mut scratch);
            if t % cfg.check_interval == 0 {
                let (lo, hi) = f64_ratios(x, &ax);
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(Error::NonFinite { iterations: t });
                }
                let (lo, hi) = (lo * (1.0 - widen), hi * (1.0 + widen));
                if cfg.record_history {
                    history.push(EnclosureSample { iteration: t, lower: lo, upper: hi });
                }
                if lo > 0.0 && (hi - lo) / lo <= target {
                    break;
                }
                if x.contains(&0.0) {
                    // zero entries are only possible without a shift; precision cannot help the f64 phase
                    break;
                }
            }
            let scale = x
                .par_iter_mut()
                .zip(ax.par_iter())
                .with_min_len(PAR_MIN_ROWS)
                .map(|(xi, &ai)| {
                    *xi = *xi * sigma + ai;
                    *xi
                })
                .reduce(|| 0.0, f64::max);
            if scale == 0.0 {
                return Ok(nilpotent(cfg, m, t + 1, history));
            }
            if !scale.is_finite() {
                return Err(Error::NonFinite { iterations: t + 1 });
            }
            let factor = 2f64.powi(-(scale.log2().floor() as i32));
            x.par_iter_mut().with_min_len(PAR_MIN_ROWS).for_each(|v| *v *= factor);
            t += 1;
            if checkpoint_due(t) {
                save(&Iterate::Double(x.clone()), t)?;
            }
        }
        log::debug!("f64 warm-up ended at iteration {t}");
    }

    let mut x: Vec<Float> = match state {
        Iterate::Double(x) => x.into_iter().map(|v| Float::with_val(bits, v)).collect(),
        Iterate::Multi(x) => x,
    };
    let tol = cfg.tolerance_float();
    let widen = Float::with_val(bits, (depth + 3.0) * 2f64.powi(1 - bits as i32));
    let sigma_f = Float::with_val(bits, sigma);
    let mut ax = vec![Float::new(bits); m];
    let mut scratch = Scratch::new();
    let mut converged = false;
    loop {
        op.apply_with(&x, &mut ax, &mut scratch);
        if stopped_warm {
            break;
        }
        let at_limit = t >= cfg.max_iterations;
        if t % cfg.check_interval == 0 || at_limit {
            let (lo, hi) = multi_ratios(&x, &ax);
            if let (Some(lo), Some(hi)) = (lo, hi) {
                let lo = Float::with_val(bits, &lo * (Float::with_val(bits, 1) - &widen));
                let hi = Float::with_val(bits, &hi * (Float::with_val(bits, 1) + &widen));
                if cfg.record_history {
                    history.push(EnclosureSample { iteration: t, lower: lo.to_f64(), upper: hi.to_f64() });
                }
                if lo > 0 && Float::with_val(bits, &hi - &lo) / &lo <= tol {
                    converged = true;
                }
            }
        }
        if converged || at_limit {
            save(&Iterate::Multi(x.clone()), t)?;
            break;
        }
        let max_exp = x
            .par_iter_mut()
            .zip(ax.par_iter())
            .with_min_len(PAR_MIN_ROWS)
            .map(|(xi, ai)| {
                xi.mul_add_mut(&sigma_f, ai);
                if xi.is_zero() {
                    i32::MIN
                } else {
                    xi.get_exp().unwrap_or(i32::MAX)
                }
            })
            .reduce(|| i32::MIN, i32::max);
        if max_exp == i32::MIN {
            return Ok(nilpotent(cfg, m, t + 1, history));
        }
        if max_exp == i32::MAX {
            return Err(Error::NonFinite { iterations: t + 1 });
        }
        x.par_iter_mut().with_min_len(PAR_MIN_ROWS).for_each(|v| *v >>= max_exp);
        t += 1;
        if checkpoint_due(t) {
            save(&Iterate::Multi(x.clone()), t)?;
        }
    }

    let sum_x: Float = Float::with_val(bits, Float::sum(x.iter()));
    let sum_ax: Float = Float::with_val(bits, Float::sum(ax.iter()));
    drop(ax);
    let (lower, upper) = directed_enclosure(op, x);
    let positive = upper.is_some();
    let upper = upper.unwrap_or_else(|| Float::with_val(bits, rug::float::Special::Infinity));
    let mut value = sum_ax / sum_x;
    if value < lower {
        value.clone_from(&lower);
    }
    if value > upper {
        value.clone_from(&upper);
    }
    if !value.is_finite() {
        return Err(Error::NonFinite { iterations: t });
    }
    Ok(SpectralEstimate {
        value,
        cw_lower: lower,
        cw_upper: upper,
        iterations: t,
        precision_digits: cfg.precision_digits,
        converged: converged && positive,
        shift_applied: sigma,
        dimension: m,
        history,
    })
}

/// `A^t 1 = 0`, so `A` is nilpotent and its spectral radius is 0.
fn nilpotent(cfg: &IterationConfig, m: usize, t: u64, history: Vec<EnclosureSample>) -> SpectralEstimate {
    let zero = Float::new(cfg.bits());
    SpectralEstimate {
        value: zero.clone(),
        cw_lower: zero.clone(),
        cw_upper: zero,
        iterations: t,
        precision_digits: cfg.precision_digits,
        converged: true,
        shift_applied: cfg.shift_value(),
        dimension: m,
        history,
    }
}

fn f64_ratios(x: &[f64], ax: &[f64]) -> (f64, f64) {
    x.par_iter()
        .zip(ax.par_iter())
        .with_min_len(PAR_MIN_ROWS)
        .map(|(&xi, &ai)| if xi > 0.0 { (ai / xi, ai / xi) } else { (f64::INFINITY, 0.0) })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)))
}

/// Nearest-rounded min and max ratio over the support; `None` when the support is empty
/// (and the maximum is `None` as well when `x` has zeros).
fn multi_ratios(x: &[Float], ax: &[Float]) -> (Option<Float>, Option<Float>) {
    let bits = x[0].prec();
    let pick = |a: Option<Float>, b: Option<Float>, want: Ordering| match (a, b) {
        (Some(a), Some(b)) => Some(if a.partial_cmp(&b) == Some(want) { a } else { b }),
        (a, None) => a,
        (None, b) => b,
    };
    let (lo, hi, zeros) = x
        .par_iter()
        .zip(ax.par_iter())
        .with_min_len(PAR_MIN_ROWS)
        .map(|(xi, ai)| {
            if *xi > 0 {
                let r = Float::with_val(bits, ai / xi);
                (Some(r.clone()), Some(r), false)
            } else {
                (None, None, true)
            }
        })
        .reduce(
            || (None, None, false),
            |a, b| (pick(a.0, b.0, Ordering::Less), pick(a.1, b.1, Ordering::Greater), a.2 || b.2),
        );
    (lo, if zeros { None } else { hi })
}
