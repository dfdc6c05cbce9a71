//! Brute-force reference computations for tests.
//!
//! Nothing here reuses the engines: weights are summed literally from a
//! separate evaluation of `g`, Huffman costs come from repeated min-merging
//! on a heap, and code lengths multiply per-position probabilities
//! recomputed from scratch. Everything is quadratic or worse.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::Variant;
use crate::weight_model::WeightFunctionSpec;

fn rational(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Largest `y` with `y^q <= x`, by bisection.
fn floor_root(x: &BigUint, q: u32) -> BigUint {
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one() << (x.bits() / u64::from(q) + 1) as usize;
    while &lo + 1u32 < hi {
        let mid: BigUint = (&lo + &hi) >> 1usize;
        if Pow::pow(&mid, q) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `g(i)` for a text of length `n`, as the codecs define it.
///
/// Fractional polynomial exponents give `floor((n-i+1)^k * 2^64) / 2^64`.
/// Fractional exponential bases give the exact power, which the codecs only
/// approximate (to well within `2^-64` relative error).
pub fn oracle_g(spec: &WeightFunctionSpec, i: u64, n: u64) -> BigRational {
    assert!(1 <= i && i <= n, "position {i} outside 1..={n}");
    let dist = n - i + 1;
    match spec {
        WeightFunctionSpec::Constant => rational(1),
        WeightFunctionSpec::Positional => rational(dist),
        WeightFunctionSpec::Polynomial { k } => {
            let (p, q) = (*k.numer(), *k.denom() as u32);
            let power = Pow::pow(&BigUint::from(dist), p);
            if q == 1 {
                return rational(power);
            }
            let scaled = power << (64 * q as usize);
            BigRational::new(floor_root(&scaled, q).into(), BigInt::one() << 64)
        }
        WeightFunctionSpec::ExponentialBase { base } => {
            let e = dist - 1;
            let num = Pow::pow(&BigUint::from(*base.numer()), e);
            let den = Pow::pow(&BigUint::from(*base.denom()), e);
            BigRational::new(num.into(), den.into())
        }
        WeightFunctionSpec::ExponentialPow2 => {
            let mut v = rational(1);
            for _ in 0..dist - 1 {
                v *= rational(2);
            }
            v
        }
        WeightFunctionSpec::Interpolated { j } => rational(interpolated(*j, i, n)),
    }
}

/// `g_j(i)`: `g_1 = 1`, and `g_j` takes the value `j` on the first
/// `n - j + 1` positions and agrees with `g_{j-1}` after them.
fn interpolated(j: u64, i: u64, n: u64) -> u64 {
    if j <= 1 {
        1
    } else if i <= n + 1 - j {
        j
    } else {
        interpolated(j - 1, i, n)
    }
}

/// `g(1..=n)` over a common denominator.
#[derive(Clone, Debug)]
pub struct GValues {
    /// `num[j - 1] / den = g(j)`.
    pub num: Vec<BigUint>,
    pub den: BigUint,
}

impl GValues {
    pub fn new(spec: &WeightFunctionSpec, n: u64) -> Self {
        let values: Vec<BigRational> = (1..=n).map(|i| oracle_g(spec, i, n)).collect();
        // Denominators are powers of one base, so the largest one is common.
        let den = values.iter().map(|v| v.denom().clone()).max().unwrap_or_else(BigInt::one);
        let num =
            values.iter().map(|v| (v.numer() * (&den / v.denom())).to_biguint().expect("g is nonnegative")).collect();
        GValues { num, den: den.to_biguint().expect("positive") }
    }
}

/// `W(g, s, i, n)` for every symbol of `text`, by literal summation over
/// positions `i..=n`. Symbols with no occurrence from `i` on map to zero.
pub fn oracle_weights(text: &[u8], spec: &WeightFunctionSpec, i: u64) -> BTreeMap<u8, BigRational> {
    let g = GValues::new(spec, text.len() as u64);
    let den = BigInt::from(g.den.clone());
    oracle_weight_sums(text, &g, i).into_iter().map(|(s, w)| (s, BigRational::new(w.into(), den.clone()))).collect()
}

/// The numerators of [`oracle_weights`] over `g.den`.
pub fn oracle_weight_sums(text: &[u8], g: &GValues, i: u64) -> BTreeMap<u8, BigUint> {
    let mut table: BTreeMap<u8, BigUint> = text.iter().map(|&s| (s, BigUint::zero())).collect();
    for j in i..=text.len() as u64 {
        let s = text[(j - 1) as usize];
        *table.get_mut(&s).unwrap() += &g.num[(j - 1) as usize];
    }
    table
}

/// Total weighted codeword length of an optimal prefix code for `weights`:
/// repeatedly merge the two smallest entries and add up the merged sums.
pub fn oracle_huffman_cost(weights: &[BigUint]) -> BigUint {
    assert!(!weights.is_empty(), "no symbols");
    let mut heap: BinaryHeap<Reverse<BigUint>> = weights.iter().cloned().map(Reverse).collect();
    let mut cost = BigUint::zero();
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().unwrap();
        let Reverse(b) = heap.pop().unwrap();
        let sum = a + b;
        cost += &sum;
        heap.push(Reverse(sum));
    }
    cost
}

/// The model a codec uses before coding position `i`, recomputed from
/// scratch: every member with its weight, over the common denominator of
/// `g` (one for the unweighted variants). `smoothing` is added to backward
/// counts (1 for arithmetic coding, 0 for Huffman).
pub fn oracle_model(text: &[u8], variant: &Variant, i: u64, smoothing: u64) -> BTreeMap<u8, BigUint> {
    let n = text.len() as u64;
    let nonzero = |t: BTreeMap<u8, BigUint>| t.into_iter().filter(|(_, w)| !w.is_zero()).collect();
    match variant {
        Variant::Static => nonzero(oracle_weight_sums(text, &GValues::new(&WeightFunctionSpec::Constant, n), 1)),
        Variant::Forward => nonzero(oracle_weight_sums(text, &GValues::new(&WeightFunctionSpec::Constant, n), i)),
        Variant::Weighted(spec) => nonzero(oracle_weight_sums(text, &GValues::new(spec, n), i)),
        Variant::Backward => {
            let mut table: BTreeMap<u8, BigUint> = text.iter().map(|&s| (s, BigUint::from(smoothing))).collect();
            for &s in &text[..(i - 1) as usize] {
                *table.get_mut(&s).unwrap() += 1u32;
            }
            table
        }
    }
}

/// Exact probability of `text` under the arithmetic coder's model as an
/// unreduced `(num, den)` pair, and its code length `-log2(num / den)`.
/// Positions where the model has a single member contribute probability one.
pub fn oracle_arith_length(text: &[u8], variant: &Variant) -> Result<(BigUint, BigUint, f64)> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = text.len() as u64;
    let g = match variant {
        Variant::Weighted(spec) => Some(GValues::new(spec, n)),
        _ => None,
    };
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let mut len = 0.0;
    for i in 1..=n {
        let model = match &g {
            Some(g) => oracle_weight_sums(text, g, i).into_iter().filter(|(_, w)| !w.is_zero()).collect(),
            None => oracle_model(text, variant, i, 1),
        };
        if model.len() < 2 {
            continue;
        }
        let w = &model[&text[(i - 1) as usize]];
        let total: BigUint = model.values().sum();
        len += log2_int(&total) - log2_int(w);
        num *= w;
        den *= total;
    }
    Ok((num, den, len))
}

fn log2_int(v: &BigUint) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(60);
    let top = (v >> shift as usize).to_f64().unwrap();
    top.log2() + shift as f64
}

/// `log2` of a positive rational through `f64` on the leading bits.
pub fn log2(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "log of a nonpositive number");
    log2_int(x.numer().magnitude()) - log2_int(x.denom().magnitude())
}

/// Number of payload bits a Huffman run must spend under the exp2 model:
/// one per position while two or more symbols remain.
pub fn oracle_exp2_bits(text: &[u8]) -> u64 {
    let n = text.len();
    // Positions from the start of the final run of one symbol cost nothing.
    let last = text[n - 1];
    let run = text.iter().rev().take_while(|&&s| s == last).count();
    (n - run) as u64
}
