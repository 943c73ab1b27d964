//! Element types that operators can sum: `f64`, MPFR floats, exact big integers,
//! and MPFR floats summed with directed rounding.

use rug::float::Round;
use rug::ops::{AddAssignRound, PowAssign};
use rug::{Assign, Float, Integer};

/// Values an operator apply can accumulate. Sums are always formed left to right
/// in the order an operator defines, so results do not depend on thread count.
pub trait Accumulate: Clone + Send + Sync {
    /// A zero of the same kind (and precision) as `self`.
    fn zeroed_like(&self) -> Self;
    fn set_zero(&mut self);
    fn add_assign_ref(&mut self, rhs: &Self);

    /// Whether `other` can share a buffer with `self` (same precision for floats).
    fn same_kind(&self, _other: &Self) -> bool {
        true
    }
}

impl Accumulate for f64 {
    #[inline]
    fn zeroed_like(&self) -> Self {
        0.0
    }

    #[inline]
    fn set_zero(&mut self) {
        *self = 0.0;
    }

    #[inline]
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += *rhs;
    }
}

impl Accumulate for Float {
    fn zeroed_like(&self) -> Self {
        Float::new(self.prec())
    }

    fn same_kind(&self, other: &Self) -> bool {
        self.prec() == other.prec()
    }

    #[inline]
    fn set_zero(&mut self) {
        self.assign(0u32);
    }

    #[inline]
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl Accumulate for Integer {
    fn zeroed_like(&self) -> Self {
        Integer::new()
    }

    #[inline]
    fn set_zero(&mut self) {
        self.assign(0u32);
    }

    #[inline]
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

/// Float whose sums round toward negative infinity.
#[derive(Clone, Debug)]
pub struct RoundDown(pub Float);

/// Float whose sums round toward positive infinity.
#[derive(Clone, Debug)]
pub struct RoundUp(pub Float);

impl Accumulate for RoundDown {
    fn zeroed_like(&self) -> Self {
        RoundDown(Float::new(self.0.prec()))
    }

    fn same_kind(&self, other: &Self) -> bool {
        self.0.prec() == other.0.prec()
    }

    #[inline]
    fn set_zero(&mut self) {
        self.0.assign(0u32);
    }

    #[inline]
    fn add_assign_ref(&mut self, rhs: &Self) {
        self.0.add_assign_round(&rhs.0, Round::Down);
    }
}

impl Accumulate for RoundUp {
    fn zeroed_like(&self) -> Self {
        RoundUp(Float::new(self.0.prec()))
    }

    fn same_kind(&self, other: &Self) -> bool {
        self.0.prec() == other.0.prec()
    }

    #[inline]
    fn set_zero(&mut self) {
        self.0.assign(0u32);
    }

    #[inline]
    fn add_assign_ref(&mut self, rhs: &Self) {
        self.0.add_assign_round(&rhs.0, Round::Up);
    }
}

/// Mantissa bits for `digits` significant decimal digits plus eight guard bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

/// `10^-e` at the given precision.
pub fn ten_pow_neg(e: i32, bits: u32) -> Float {
    let mut t = Float::with_val(bits, 10u32);
    t.pow_assign(-e);
    t
}

/// Significant digits worth printing for a value held at `bits` of precision.
pub fn display_digits(bits: u32) -> usize {
    ((bits as f64 - 8.0) / std::f64::consts::LOG2_10).floor().max(1.0) as usize
}

pub(crate) fn serialize_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_float(x, display_digits(x.prec())))
}

/// Decimal rendering with `digits` significant digits.
pub fn format_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_infinite() {
        return if x.is_sign_positive() { "inf".into() } else { "-inf".into() };
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    // rug prints `1.2345e2`; rewrite to plain positional form when the exponent is modest
    let (mantissa, exp) = match s.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    if !(-6..=24).contains(&exp) {
        return s;
    }
    let negative = mantissa.starts_with('-');
    let digits_str: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let int_len = mantissa.trim_start_matches('-').split('.').next().map_or(1, str::len) as i64 + exp;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if int_len <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-int_len) as usize));
        out.push_str(&digits_str);
    } else if int_len as usize >= digits_str.len() {
        out.push_str(&digits_str);
        out.push_str(&"0".repeat(int_len as usize - digits_str.len()));
    } else {
        out.push_str(&digits_str[..int_len as usize]);
        out.push('.');
        out.push_str(&digits_str[int_len as usize..]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_sums_bracket_nearest() {
        let bits = 20;
        let third = Float::with_val(bits, 1) / 3u32;
        let tiny = Float::with_val(bits, 1e-9);
        let mut lo = RoundDown(third.clone());
        let mut hi = RoundUp(third.clone());
        let mut mid = third.clone();
        for _ in 0..5 {
            lo.add_assign_ref(&RoundDown(tiny.clone()));
            hi.add_assign_ref(&RoundUp(tiny.clone()));
            mid.add_assign_ref(&tiny);
        }
        assert!(lo.0 <= mid && mid <= hi.0);
        assert!(lo.0 < hi.0);
    }

    #[test]
    fn formats_positional() {
        let x = Float::with_val(200, 2.5);
        assert_eq!(format_float(&x, 5), "2.5000");
        let y = Float::with_val(200, 13427.06985344107);
        assert_eq!(format_float(&y, 16), "13427.06985344107");
        let z = Float::with_val(200, 0.00125);
        assert_eq!(format_float(&z, 3), "0.00125");
    }

    #[test]
    fn bits_cover_digits() {
        assert!(digits_to_bits(40) >= 133);
        assert!((ten_pow_neg(2, 64) - 0.01f64).abs() < 1e-18);
    }
}
