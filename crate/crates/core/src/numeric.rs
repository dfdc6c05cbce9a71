//! Integer weight representations and the fixed-precision helpers shared by
//! the weight functions and the diagnostics.
//!
//! Model weights are always exact nonnegative integers counted in *units* of
//! the active weight function (see [`crate::weight_model::WeightFunction::unit_bits`]).
//! Depending on how large a model can grow, the codecs run over `u64`, `u128`
//! or [`BigUint`]; all three implement [`WeightValue`].

use std::fmt::Debug;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact nonnegative integer used as a model weight.
pub trait WeightValue: Clone + Ord + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_u64(v: u64) -> Self;
    /// `None` when `v` does not fit.
    fn from_u128(v: u128) -> Option<Self>;
    /// `None` when `v` does not fit.
    fn from_biguint(v: &BigUint) -> Option<Self>;
    fn to_biguint(&self) -> BigUint;
    fn to_u128(&self) -> Option<u128>;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    /// Caller guarantees `self >= other`.
    fn sub_assign_ref(&mut self, other: &Self);
    /// Number of significant bits (0 for zero).
    fn bit_len(&self) -> u64;
    /// `self >> shift`, which the caller guarantees fits in a `u64`.
    fn shr_to_u64(&self, shift: u64) -> u64;

    fn checked_sub_ref(&self, other: &Self) -> Option<Self> {
        if self < other {
            None
        } else {
            let mut out = self.clone();
            out.sub_assign_ref(other);
            Some(out)
        }
    }
}

impl WeightValue for u64 {
    fn zero() -> Self {
        0
    }
    fn from_u64(v: u64) -> Self {
        v
    }
    fn from_u128(v: u128) -> Option<Self> {
        u64::try_from(v).ok()
    }
    fn from_biguint(v: &BigUint) -> Option<Self> {
        v.to_u64()
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn to_u128(&self) -> Option<u128> {
        Some(u128::from(*self))
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= *other;
    }
    fn bit_len(&self) -> u64 {
        u64::from(64 - self.leading_zeros())
    }
    fn shr_to_u64(&self, shift: u64) -> u64 {
        if shift >= 64 {
            0
        } else {
            *self >> shift
        }
    }
}

impl WeightValue for u128 {
    fn zero() -> Self {
        0
    }
    fn from_u64(v: u64) -> Self {
        u128::from(v)
    }
    fn from_u128(v: u128) -> Option<Self> {
        Some(v)
    }
    fn from_biguint(v: &BigUint) -> Option<Self> {
        ToPrimitive::to_u128(v)
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn to_u128(&self) -> Option<u128> {
        Some(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= *other;
    }
    fn bit_len(&self) -> u64 {
        u64::from(128 - self.leading_zeros())
    }
    fn shr_to_u64(&self, shift: u64) -> u64 {
        if shift >= 128 {
            0
        } else {
            (*self >> shift) as u64
        }
    }
}

impl WeightValue for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
    fn from_u128(v: u128) -> Option<Self> {
        Some(BigUint::from(v))
    }
    fn from_biguint(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
    fn to_u128(&self) -> Option<u128> {
        ToPrimitive::to_u128(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn bit_len(&self) -> u64 {
        self.bits()
    }
    fn shr_to_u64(&self, shift: u64) -> u64 {
        let word = (shift / 64) as usize;
        let bit = shift % 64;
        let mut digits = self.iter_u64_digits().skip(word);
        let lo = digits.next().unwrap_or(0);
        let hi = digits.next().unwrap_or(0);
        if digits.next().is_some() || (bit == 0 && hi != 0) || (bit > 0 && hi >> bit != 0) {
            return u64::MAX;
        }
        if bit == 0 {
            lo
        } else {
            lo >> bit | hi << (64 - bit)
        }
    }
}

/// Which integer width a model needs, chosen from an upper bound on its total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightClass {
    Word,
    Wide,
    Big,
}

impl WeightClass {
    /// Picks the narrowest class whose sums cannot overflow for totals of
    /// at most `max_total_bits` bits.
    pub fn for_total_bits(max_total_bits: u64) -> Self {
        if max_total_bits <= 62 {
            WeightClass::Word
        } else if max_total_bits <= 126 {
            WeightClass::Wide
        } else {
            WeightClass::Big
        }
    }
}

/// Runs `$body` with the type alias `$w` bound to the integer type of `$class`.
macro_rules! with_weight_class {
    ($class:expr, $w:ident => $body:expr) => {
        match $class {
            $crate::numeric::WeightClass::Word => {
                type $w = u64;
                $body
            }
            $crate::numeric::WeightClass::Wide => {
                type $w = u128;
                $body
            }
            $crate::numeric::WeightClass::Big => {
                type $w = ::num_bigint::BigUint;
                $body
            }
        }
    };
}
pub(crate) use with_weight_class;

/// High 128 bits of the 256-bit product `a * b`, plus the low half.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & u128::from(u64::MAX));
    let (b1, b0) = (b >> 64, b & u128::from(u64::MAX));
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & u128::from(u64::MAX)) + (p10 & u128::from(u64::MAX));
    let lo = (p00 & u128::from(u64::MAX)) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// A positive binary float with a 128-bit mantissa: `mant * 2^(exp - 127)`,
/// `mant` normalized so its top bit is set. Multiplication truncates, so the
/// result of a fixed sequence of operations is fully deterministic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Float128 {
    mant: u128,
    exp: i64,
}

impl Float128 {
    pub(crate) const ONE: Float128 = Float128 { mant: 1 << 127, exp: 0 };

    /// `num / den` truncated to 128 significant bits.
    pub(crate) fn from_ratio(num: &BigUint, den: &BigUint) -> Float128 {
        assert!(!Zero::is_zero(num) && !Zero::is_zero(den));
        // Enough headroom that the quotient has at least 128 bits.
        let shift = 130 + den.bits() as i64 - num.bits() as i64;
        let shift_u = shift.max(0) as usize;
        let q = (num << shift_u) / den;
        let qbits = q.bits() as i64;
        let drop = qbits - 128;
        let mant = ToPrimitive::to_u128(&(q >> drop as usize)).expect("128-bit mantissa");
        Float128 { mant, exp: qbits - 1 - shift_u as i64 }
    }

    pub(crate) fn mul(self, other: Float128) -> Float128 {
        let (hi, lo) = mul_wide(self.mant, other.mant);
        // Product lies in [2^254, 2^256).
        if hi >> 127 == 1 {
            Float128 { mant: hi, exp: self.exp + other.exp + 1 }
        } else {
            Float128 { mant: (hi << 1) | (lo >> 127), exp: self.exp + other.exp }
        }
    }

    /// `floor(self * 2^scale_bits)` as an exact integer.
    pub(crate) fn floor_scaled(self, scale_bits: u32) -> BigUint {
        let e = self.exp + i64::from(scale_bits) - 127;
        let m = BigUint::from(self.mant);
        if e >= 0 {
            m << e as usize
        } else {
            m >> (-e) as usize
        }
    }
}

/// Fractional bits of [`FixedLog`].
pub const LOG_FRAC_BITS: u32 = 64;

/// A base-2 logarithm in signed fixed point with [`LOG_FRAC_BITS`] fractional bits.
pub type FixedLog = i128;

/// `log2(x)` for a positive integer, truncated to [`LOG_FRAC_BITS`]
/// fractional bits (the fractional part is exact up to ~2^-120 before
/// truncation).
pub fn log2_fixed(x: &BigUint) -> FixedLog {
    assert!(!Zero::is_zero(x), "log2 of zero");
    let bits = x.bits();
    if bits <= 127 {
        return log2_fixed_u128(ToPrimitive::to_u128(x).unwrap());
    }
    let mant = ToPrimitive::to_u128(&(x >> (bits - 127) as usize)).unwrap();
    log2_of_mantissa(bits - 1, mant)
}

/// [`log2_fixed`] for a nonzero machine integer.
pub fn log2_fixed_u128(x: u128) -> FixedLog {
    assert!(x != 0, "log2 of zero");
    let bits = 128 - u64::from(x.leading_zeros());
    log2_of_mantissa(bits - 1, x << (128 - bits) >> 1)
}

/// `int_part + log2(mant / 2^126)` for a mantissa in `[2^126, 2^127)`.
fn log2_of_mantissa(int_part: u64, mant: u128) -> FixedLog {
    let int_part = int_part as i128;
    let mut m = mant;
    let mut frac: u128 = 0;
    for k in 0..LOG_FRAC_BITS {
        // m in [1,2) at 126 fractional bits; square it.
        let (hi, lo) = mul_wide(m, m);
        // m*m has 252 fractional bits; shift back to 126.
        let sq = (hi << 2) | (lo >> 126);
        if sq >> 127 == 1 {
            frac |= 1 << (LOG_FRAC_BITS - 1 - k);
            m = sq >> 1;
        } else {
            m = sq;
        }
    }
    (int_part << LOG_FRAC_BITS) + frac as i128
}

pub fn fixed_to_f64(v: FixedLog) -> f64 {
    v as f64 / (1u128 << LOG_FRAC_BITS) as f64
}

/// Integer power of a `BigUint` base.
pub(crate) fn big_pow(base: u64, exp: u64) -> BigUint {
    let mut result = BigUint::one();
    let mut b = BigUint::from(base);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_of_powers_of_two_is_exact() {
        for k in [0u32, 1, 5, 63, 64, 200] {
            let x = BigUint::one() << k as usize;
            assert_eq!(log2_fixed(&x), (k as i128) << LOG_FRAC_BITS);
        }
    }

    #[test]
    fn log2_matches_f64_reference() {
        for v in [3u64, 10, 55, 12345, 999_999_937] {
            let got = fixed_to_f64(log2_fixed(&BigUint::from(v)));
            assert!((got - (v as f64).log2()).abs() < 1e-12, "{v}: {got}");
        }
    }

    #[test]
    fn float128_ratio_and_product() {
        let three_halves = Float128::from_ratio(&BigUint::from(3u32), &BigUint::from(2u32));
        let sq = three_halves.mul(three_halves);
        // 2.25 * 2^8 = 576
        assert_eq!(sq.floor_scaled(8), BigUint::from(576u32));
        assert_eq!(Float128::ONE.floor_scaled(3), BigUint::from(8u32));
    }

    #[test]
    fn wide_multiply_high_half() {
        let (hi, lo) = mul_wide(u128::MAX, u128::MAX);
        assert_eq!(hi, u128::MAX - 1);
        assert_eq!(lo, 1);
    }

    #[test]
    fn class_thresholds() {
        assert_eq!(WeightClass::for_total_bits(10), WeightClass::Word);
        assert_eq!(WeightClass::for_total_bits(100), WeightClass::Wide);
        assert_eq!(WeightClass::for_total_bits(400), WeightClass::Big);
    }
}
