//! Adaptive arithmetic coding over a model trajectory.
//!
//! Symbols are laid out on the unit interval in ascending byte order, each
//! taking a share proportional to its current weight. Positions where the
//! model has a single member cost nothing.
//!
//! Two coders are provided. The exact coder multiplies the interval through
//! with unbounded integers and terminates with the shortest dyadic interval
//! inside the final one, so its output is at most one bit above the ideal
//! length. The streaming coder is a 62-bit renormalizing coder working on
//! frequencies quantized to totals below `2^32`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::One;

use crate::bits::{BitReader, BitStream};
use crate::error::{Error, Result};
use crate::header::{Encoded, ModelHeader};
use crate::model::{table_from_parts, ArithMode, Engine, Trajectory, Variant};
use crate::numeric::{log2_fixed, log2_fixed_u128, with_weight_class, FixedLog, WeightValue, LOG_FRAC_BITS};
use crate::weight_model::{Alphabet, WeightTable};

/// Cumulative weight below `symbol` in ascending byte order.
fn cumulative_below<W: WeightValue>(table: &WeightTable<W>, symbol: u8) -> W {
    let mut cum = W::zero();
    for s in table.members() {
        if s >= symbol {
            break;
        }
        cum.add_assign_ref(table.weight(s));
    }
    cum
}

/// Exact interval state: the interval is `[low / den, (low + range) / den)`.
#[derive(Clone, Debug)]
pub struct ExactEncoder {
    low: BigUint,
    range: BigUint,
    den: BigUint,
}

impl Default for ExactEncoder {
    fn default() -> Self {
        ExactEncoder { low: BigUint::default(), range: BigUint::one(), den: BigUint::one() }
    }
}

impl ExactEncoder {
    /// Narrows to the sub-interval `[cum, cum + weight)` out of `total`.
    pub fn encode(&mut self, cum: &BigUint, weight: &BigUint, total: &BigUint) {
        self.low = &self.low * total + &self.range * cum;
        self.range *= weight;
        self.den *= total;
    }

    /// Emits the shortest `k` in `L` bits with `[k, k+1) / 2^L` inside the
    /// final interval.
    pub fn finish(self) -> BitStream {
        let ExactEncoder { low, range, den } = self;
        let high = &low + &range;
        let mut len = den.bits().saturating_sub(range.bits() + 1);
        loop {
            let scaled_low = &low << len as usize;
            let (q, r) = (&scaled_low / &den, &scaled_low % &den);
            let k = if r.is_zero() { q } else { q + 1u32 };
            if (&k + 1u32) * &den <= &high << len as usize {
                let mut out = BitStream::new();
                for i in (0..len).rev() {
                    out.push(k.bit(i));
                }
                return out;
            }
            len += 1;
        }
    }
}

/// Exact decoder state: the code point sits at relative offset `diff / r`
/// inside the current interval.
#[derive(Clone, Debug)]
pub struct ExactDecoder {
    diff: BigUint,
    r: BigUint,
}

impl ExactDecoder {
    pub fn new(payload: &BitStream) -> Self {
        let mut k = BigUint::default();
        for b in payload.iter() {
            k <<= 1usize;
            if b {
                k += 1u32;
            }
        }
        ExactDecoder { diff: k, r: BigUint::one() << payload.len() as usize }
    }

    /// Scaled target `floor(offset * total)` in `[0, total)`.
    pub fn target(&self, total: &BigUint) -> BigUint {
        &self.diff * total / &self.r
    }

    pub fn consume(&mut self, cum: &BigUint, weight: &BigUint, total: &BigUint) {
        self.diff = &self.diff * total - cum * &self.r;
        self.r *= weight;
    }
}

const PRECISION: u32 = 62;
const HALF: u64 = 1 << (PRECISION - 1);
const QUARTER: u64 = 1 << (PRECISION - 2);
const MAX_CODE: u64 = (1 << PRECISION) - 1;
/// Quantized totals stay below `2^FREQ_BITS + 256`.
const FREQ_BITS: u64 = 31;

/// 62-bit arithmetic encoder with pending-bit carry handling.
#[derive(Clone, Debug)]
pub struct StreamEncoder {
    low: u64,
    high: u64,
    pending: u64,
    used: bool,
    out: BitStream,
}

impl Default for StreamEncoder {
    fn default() -> Self {
        StreamEncoder { low: 0, high: MAX_CODE, pending: 0, used: false, out: BitStream::new() }
    }
}

impl StreamEncoder {
    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    pub fn encode(&mut self, cum: u64, freq: u64, total: u64) {
        self.used = true;
        let range = u128::from(self.high - self.low) + 1;
        self.high = self.low + (range * u128::from(cum + freq) / u128::from(total)) as u64 - 1;
        self.low += (range * u128::from(cum) / u128::from(total)) as u64;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = self.high << 1 | 1;
        }
    }

    /// Flushes the final interval. A coder that never saw a symbol emits
    /// nothing.
    pub fn finish(mut self) -> BitStream {
        if !self.used {
            return self.out;
        }
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        self.out
    }
}

/// Mirror of [`StreamEncoder`]; reads zeros past the end of the payload.
#[derive(Clone, Debug)]
pub struct StreamDecoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    input: BitReader<'a>,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(payload: &'a BitStream) -> Self {
        let mut input = payload.reader();
        let mut value = 0;
        for _ in 0..PRECISION {
            value = value << 1 | u64::from(input.read_bit_or_zero());
        }
        StreamDecoder { low: 0, high: MAX_CODE, value, input }
    }

    /// Scaled target in `[0, total)`, or `None` if the code value has left
    /// the interval (corrupt input).
    pub fn target(&self, total: u64) -> Option<u64> {
        if self.value < self.low || self.value > self.high {
            return None;
        }
        let range = u128::from(self.high - self.low) + 1;
        Some(((u128::from(self.value - self.low + 1) * u128::from(total) - 1) / range) as u64)
    }

    pub fn consume(&mut self, cum: u64, freq: u64, total: u64) {
        let range = u128::from(self.high - self.low) + 1;
        self.high = self.low + (range * u128::from(cum + freq) / u128::from(total)) as u64 - 1;
        self.low += (range * u128::from(cum) / u128::from(total)) as u64;
        loop {
            if self.high < HALF {
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < HALF + QUARTER {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = self.high << 1 | 1;
            self.value = self.value << 1 | u64::from(self.input.read_bit_or_zero());
        }
    }
}

/// Frequencies the streaming coder uses for the current model.
///
/// Totals of at most 32 bits are used as they are. Larger tables are shifted
/// right so the total fits in 31 bits, and every member gets one extra count
/// so none rounds to zero.
fn quantization_shift<W: WeightValue>(table: &WeightTable<W>) -> u64 {
    let bits = table.total().bit_len();
    if bits <= FREQ_BITS + 1 {
        0
    } else {
        bits - FREQ_BITS
    }
}

fn quantized<W: WeightValue>(w: &W, shift: u64) -> u64 {
    if shift == 0 {
        w.shr_to_u64(0)
    } else {
        w.shr_to_u64(shift) + 1
    }
}

/// `(cum, freq, total)` of `symbol` in the quantized layout.
fn quantized_interval<W: WeightValue>(table: &WeightTable<W>, symbol: u8) -> (u64, u64, u64) {
    let shift = quantization_shift(table);
    let (mut cum, mut freq, mut total) = (0, 0, 0);
    for s in table.members() {
        let f = quantized(table.weight(s), shift);
        match s.cmp(&symbol) {
            Ordering::Less => cum += f,
            Ordering::Equal => freq = f,
            Ordering::Greater => {}
        }
        total += f;
    }
    (cum, freq, total)
}

/// Encodes `text` with an adaptive arithmetic coder driven by `variant`.
pub fn arith_encode(text: &[u8], variant: &Variant, mode: ArithMode) -> Result<Encoded> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let class = variant.weight_class(text.len() as u64)?;
    with_weight_class!(class, W => encode_with::<W>(text, variant, mode))
}

fn encode_with<W: WeightValue>(text: &[u8], variant: &Variant, mode: ArithMode) -> Result<Encoded> {
    let engine = Engine::Arithmetic(mode);
    let mut traj = Trajectory::<W>::for_text(text, variant, engine)?;
    let header = ModelHeader::new(engine, variant.clone(), text.len() as u64, Alphabet::of_text(text), traj.table());
    let payload = match mode {
        ArithMode::Exact => {
            let mut coder = ExactEncoder::default();
            for &s in text {
                if traj.needs_bits() {
                    let t = traj.table();
                    coder.encode(
                        &cumulative_below(t, s).to_biguint(),
                        &t.weight(s).to_biguint(),
                        &t.total().to_biguint(),
                    );
                }
                traj.advance(s)?;
            }
            coder.finish()
        }
        ArithMode::Streaming => {
            let mut coder = StreamEncoder::default();
            for &s in text {
                if traj.needs_bits() {
                    let (cum, freq, total) = quantized_interval(traj.table(), s);
                    if freq == 0 {
                        return Err(Error::WeightUnderflow { symbol: s });
                    }
                    coder.encode(cum, freq, total);
                }
                traj.advance(s)?;
            }
            coder.finish()
        }
    };
    Ok(Encoded { header, payload })
}

/// Inverts [`arith_encode`].
pub fn arith_decode(header: &ModelHeader, payload: &BitStream) -> Result<Vec<u8>> {
    let Engine::Arithmetic(mode) = header.engine else {
        return Err(Error::Unsupported("Huffman header given to the arithmetic decoder".into()));
    };
    let class = header.variant.weight_class(header.n)?;
    with_weight_class!(class, W => decode_with::<W>(header, payload, mode))
}

fn decode_with<W: WeightValue>(header: &ModelHeader, payload: &BitStream, mode: ArithMode) -> Result<Vec<u8>> {
    let table: WeightTable<W> = table_from_parts(&header.variant, header.engine, &header.alphabet, &header.weights)?;
    let mut traj = Trajectory::new(&header.variant, header.n, table)?;
    let mut text = Vec::with_capacity(header.n.min(1 << 24) as usize);
    let mut exact = (mode == ArithMode::Exact).then(|| ExactDecoder::new(payload));
    let mut stream = (mode == ArithMode::Streaming).then(|| StreamDecoder::new(payload));
    let desync = || Error::malformed("code point outside the model's interval");
    while !traj.is_finished() {
        let t = traj.table();
        let s = if !traj.needs_bits() {
            t.sole_member().ok_or_else(|| Error::malformed("model emptied before the end of the text"))?
        } else if let Some(dec) = exact.as_mut() {
            let total = t.total().to_biguint();
            let target = dec.target(&total);
            if target >= total {
                return Err(desync());
            }
            let mut cum = BigUint::default();
            let mut found = None;
            for s in t.members() {
                let w = t.weight(s).to_biguint();
                if target < &cum + &w {
                    found = Some((s, w));
                    break;
                }
                cum += w;
            }
            let (s, w) = found.ok_or_else(desync)?;
            dec.consume(&cum, &w, &total);
            s
        } else {
            let dec = stream.as_mut().expect("streaming decoder");
            let shift = quantization_shift(t);
            let total: u64 = t.members().map(|s| quantized(t.weight(s), shift)).sum();
            let target = dec.target(total).ok_or_else(desync)?;
            let mut cum = 0;
            let mut found = None;
            for s in t.members() {
                let f = quantized(t.weight(s), shift);
                if target < cum + f {
                    found = Some((s, f));
                    break;
                }
                cum += f;
            }
            let (s, f) = found.ok_or_else(desync)?;
            dec.consume(cum, f, total);
            s
        };
        text.push(s);
        traj.advance(s)?;
    }
    traj.check_drained()?;
    Ok(text)
}

/// A code length in bits, as a fixed-point base-2 logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct CodeLength(pub FixedLog);

impl CodeLength {
    pub fn bits(self) -> f64 {
        crate::numeric::fixed_to_f64(self.0)
    }

    /// Smallest integer not below the length (to the fixed-point resolution).
    pub fn ceil(self) -> u64 {
        let one = 1i128 << LOG_FRAC_BITS;
        ((self.0 + one - 1) >> LOG_FRAC_BITS) as u64
    }
}

fn log2_of<W: WeightValue>(w: &W) -> FixedLog {
    match w.to_u128() {
        Some(v) => log2_fixed_u128(v),
        None => log2_fixed(&w.to_biguint()),
    }
}

/// `-sum log2 q_i` over the positions where the model has at least two
/// members, with `q_i` the probability the arithmetic model assigns to the
/// symbol at position `i`.
pub fn ideal_code_length(text: &[u8], variant: &Variant) -> Result<CodeLength> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let class = variant.weight_class(text.len() as u64)?;
    with_weight_class!(class, W => {
        let mut traj = Trajectory::<W>::for_text(text, variant, Engine::Arithmetic(ArithMode::Exact))?;
        let mut sum: FixedLog = 0;
        for &s in text {
            if traj.needs_bits() {
                let t = traj.table();
                sum += log2_of(t.total()) - log2_of(t.weight(s));
            }
            traj.advance(s)?;
        }
        Ok(CodeLength(sum))
    })
}

/// The exact probability of a whole text under a model, `num / den`, left
/// unreduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityProduct {
    pub num: BigUint,
    pub den: BigUint,
}

impl ProbabilityProduct {
    /// Compares the two rationals exactly.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }

    /// `-log2(num / den)`.
    pub fn code_length(&self) -> CodeLength {
        CodeLength(log2_fixed(&self.den) - log2_fixed(&self.num))
    }
}

/// Product of the per-position probabilities behind [`ideal_code_length`].
pub fn probability_product(text: &[u8], variant: &Variant) -> Result<ProbabilityProduct> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let class = variant.weight_class(text.len() as u64)?;
    with_weight_class!(class, W => {
        let mut traj = Trajectory::<W>::for_text(text, variant, Engine::Arithmetic(ArithMode::Exact))?;
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for &s in text {
            if traj.needs_bits() {
                let t = traj.table();
                num *= t.weight(s).to_biguint();
                den *= t.total().to_biguint();
            }
            traj.advance(s)?;
        }
        Ok(ProbabilityProduct { num, den })
    })
}
