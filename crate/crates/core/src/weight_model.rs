//! Position weight functions and the symbol weight tables they induce.
//!
//! A weight function assigns every text position `i` in `1..=n` a nonnegative
//! weight `g(i)`. The weight of a symbol over a range of positions is the sum
//! of `g` over the positions in that range holding the symbol. Forward models
//! start from the sum over the whole text and subtract `g(i)` once position `i`
//! has been coded; backward models start empty and add.
//!
//! Weights are exact integers counted in units of `2^-unit_bits`. Every
//! family is exact except fractional polynomial exponents and non-integer
//! exponential bases, which use a fixed deterministic approximation so that
//! encoder and decoder always agree bit for bit.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::numeric::{big_pow, Float128, WeightClass, WeightValue};

/// Fractional bits carried by approximated polynomial weights.
pub const POLY_UNIT_BITS: u32 = 64;
/// Fractional bits carried by approximated exponential weights.
pub const EXP_UNIT_BITS: u32 = 72;

const MAX_EXPONENT_DEN: u64 = 1 << 10;

/// Declarative description of a position weight function `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WeightFunctionSpec {
    /// `g(i) = 1`.
    Constant,
    /// `g(i) = n - i + 1`.
    Positional,
    /// `g(i) = (n - i + 1)^k` for a nonnegative rational `k`.
    Polynomial { k: Ratio<u64> },
    /// `g(i) = base^(n - i)` for a rational `base > 1`.
    ExponentialBase { base: Ratio<u64> },
    /// `g(i) = 2^(n - i)`.
    ExponentialPow2,
    /// `g(i) = min(j, n - i + 1)`: constant `j` up to position `n - j + 1`,
    /// then linearly decreasing. `j = 1` is [`Constant`](Self::Constant) and
    /// `j = n` is [`Positional`](Self::Positional).
    Interpolated { j: u64 },
}

impl WeightFunctionSpec {
    pub fn polynomial(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidWeightFunction("zero denominator".into()));
        }
        let spec = WeightFunctionSpec::Polynomial { k: Ratio::new(num, den) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn exponential(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidWeightFunction("zero denominator".into()));
        }
        let spec = WeightFunctionSpec::ExponentialBase { base: Ratio::new(num, den) };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the parameter constraints that do not depend on the text length.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunctionSpec::Polynomial { k } => {
                if *k.denom() == 0 || *k.denom() > MAX_EXPONENT_DEN {
                    return Err(Error::InvalidWeightFunction(format!(
                        "exponent denominator must be in 1..={MAX_EXPONENT_DEN}"
                    )));
                }
                if *k.numer() > u64::from(u32::MAX) {
                    return Err(Error::InvalidWeightFunction("exponent too large".into()));
                }
            }
            WeightFunctionSpec::ExponentialBase { base } => {
                if *base.denom() == 0 || base.numer() <= base.denom() {
                    return Err(Error::InvalidWeightFunction("base must exceed 1".into()));
                }
            }
            WeightFunctionSpec::Interpolated { j } if *j == 0 => {
                return Err(Error::InvalidWeightFunction("j must be at least 1".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for WeightFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunctionSpec::Constant => write!(f, "const"),
            WeightFunctionSpec::Positional => write!(f, "pos"),
            WeightFunctionSpec::Polynomial { k } => write!(f, "poly:{}", fmt_ratio(k)),
            WeightFunctionSpec::ExponentialBase { base } => write!(f, "exp:{}", fmt_ratio(base)),
            WeightFunctionSpec::ExponentialPow2 => write!(f, "exp2"),
            WeightFunctionSpec::Interpolated { j } => write!(f, "interp:{j}"),
        }
    }
}

fn fmt_ratio(r: &Ratio<u64>) -> String {
    if *r.denom() == 1 {
        return r.numer().to_string();
    }
    // Prefer a terminating decimal when the denominator allows one.
    let mut den = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_multiple_of(2) {
        den /= 2;
        twos += 1;
    }
    while den.is_multiple_of(5) {
        den /= 5;
        fives += 1;
    }
    if den == 1 {
        let digits = twos.max(fives);
        let scale = 10u128.pow(digits);
        let scaled = u128::from(*r.numer()) * scale / u128::from(*r.denom());
        let int = scaled / scale;
        let frac = scaled % scale;
        return format!("{int}.{frac:0width$}", width = digits as usize);
    }
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"3"`, `"1.0004"` or `"5/2"` into an exact reduced ratio.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidWeightFunction(format!("not a nonnegative rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let frac = frac.trim_end_matches('0');
    let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let int_v: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int_v.checked_mul(den).and_then(|v| v.checked_add(frac_v)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

impl FromStr for WeightFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        let need = || arg.ok_or_else(|| Error::InvalidWeightFunction(format!("{name} needs a parameter")));
        let spec = match name {
            "const" | "constant" => WeightFunctionSpec::Constant,
            "pos" | "positional" => WeightFunctionSpec::Positional,
            "poly" => WeightFunctionSpec::Polynomial { k: parse_ratio(need()?)? },
            "exp" => WeightFunctionSpec::ExponentialBase { base: parse_ratio(need()?)? },
            "exp2" => WeightFunctionSpec::ExponentialPow2,
            "interp" => {
                let j = need()?
                    .parse()
                    .map_err(|_| Error::InvalidWeightFunction(format!("bad interpolation index in {s:?}")))?;
                WeightFunctionSpec::Interpolated { j }
            }
            _ => return Err(Error::InvalidWeightFunction(format!("unknown family {name:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Digit width of the exponential lookup tables.
const EXP_TABLE_BITS: u32 = 10;

#[derive(Clone, Debug)]
enum Kind {
    Constant,
    Positional,
    PolyInt(u32),
    PolyFrac {
        num: u32,
        den: u32,
    },
    ExpInt(u64),
    /// `levels[t][d] = base^(d * 1024^t)`.
    ExpFrac {
        levels: Vec<Vec<Float128>>,
    },
    Pow2,
    Interp(u64),
}

/// A weight function bound to a text length, ready to evaluate.
#[derive(Clone, Debug)]
pub struct WeightFunction {
    spec: WeightFunctionSpec,
    n: u64,
    kind: Kind,
}

impl WeightFunction {
    pub fn new(spec: &WeightFunctionSpec, n: u64) -> Result<Self> {
        spec.validate()?;
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let kind = match spec {
            WeightFunctionSpec::Constant => Kind::Constant,
            WeightFunctionSpec::Positional => Kind::Positional,
            WeightFunctionSpec::Polynomial { k } => {
                let num = *k.numer() as u32;
                if *k.denom() == 1 {
                    Kind::PolyInt(num)
                } else {
                    Kind::PolyFrac { num, den: *k.denom() as u32 }
                }
            }
            WeightFunctionSpec::ExponentialBase { base } => {
                if *base.denom() == 1 {
                    Kind::ExpInt(*base.numer())
                } else {
                    Kind::ExpFrac { levels: exp_tables(base, n) }
                }
            }
            WeightFunctionSpec::ExponentialPow2 => Kind::Pow2,
            WeightFunctionSpec::Interpolated { j } => {
                if *j > n {
                    return Err(Error::InvalidWeightFunction(format!(
                        "interpolation index {j} exceeds text length {n}"
                    )));
                }
                Kind::Interp(*j)
            }
        };
        Ok(WeightFunction { spec: spec.clone(), n, kind })
    }

    pub fn spec(&self) -> &WeightFunctionSpec {
        &self.spec
    }

    pub fn text_len(&self) -> u64 {
        self.n
    }

    /// Weights are integers counted in units of `2^-unit_bits`.
    pub fn unit_bits(&self) -> u32 {
        match self.kind {
            Kind::PolyFrac { .. } => POLY_UNIT_BITS,
            Kind::ExpFrac { .. } => EXP_UNIT_BITS,
            _ => 0,
        }
    }

    fn check(&self, i: u64) -> Result<()> {
        if i == 0 || i > self.n {
            Err(Error::PositionOutOfRange { position: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `g(i)` in weight units.
    pub fn eval(&self, i: u64) -> Result<BigUint> {
        self.check(i)?;
        Ok(self.eval_big(i))
    }

    /// `g(i)` as an exact rational (units divided by `2^unit_bits`).
    pub fn eval_rational(&self, i: u64) -> Result<BigRational> {
        let units = BigInt::from(self.eval(i)?);
        let den = BigInt::one() << self.unit_bits() as usize;
        Ok(BigRational::new(units, den))
    }

    /// `g(i)` in units, converted to the codec's integer type.
    pub fn eval_as<W: WeightValue>(&self, i: u64) -> Result<W> {
        self.check(i)?;
        if let Some(v) = self.eval_small(i) {
            if let Some(w) = W::from_u128(v) {
                return Ok(w);
            }
        }
        W::from_biguint(&self.eval_big(i))
            .ok_or_else(|| Error::Unsupported(format!("weight at position {i} exceeds the model width")))
    }

    /// Fast path for values that fit in 128 bits; `None` means "use the big path".
    fn eval_small(&self, i: u64) -> Option<u128> {
        let rest = self.n - i;
        match self.kind {
            Kind::Constant => Some(1),
            Kind::Positional => Some(u128::from(rest + 1)),
            Kind::PolyInt(k) => u128::from(rest + 1).checked_pow(k),
            Kind::Pow2 => (rest < 127).then(|| 1u128 << rest),
            Kind::Interp(j) => Some(u128::from(j.min(rest + 1))),
            Kind::ExpInt(b) => u32::try_from(rest).ok().and_then(|e| u128::from(b).checked_pow(e)),
            Kind::PolyFrac { .. } | Kind::ExpFrac { .. } => None,
        }
    }

    fn eval_big(&self, i: u64) -> BigUint {
        let rest = self.n - i;
        match &self.kind {
            Kind::PolyInt(k) => big_pow(rest + 1, u64::from(*k)),
            Kind::Pow2 => BigUint::one() << rest as usize,
            Kind::ExpInt(b) => big_pow(*b, rest),
            Kind::PolyFrac { num, den } => {
                // floor((n-i+1)^(num/den) * 2^64), computed as an exact integer root.
                let radicand = big_pow(rest + 1, u64::from(*num)) << (POLY_UNIT_BITS as usize * *den as usize);
                radicand.nth_root(*den)
            }
            Kind::ExpFrac { levels } => {
                let mut acc = Float128::ONE;
                let mut e = rest;
                for level in levels {
                    let digit = (e & ((1 << EXP_TABLE_BITS) - 1)) as usize;
                    if digit != 0 {
                        acc = acc.mul(level[digit]);
                    }
                    e >>= EXP_TABLE_BITS;
                }
                acc.floor_scaled(EXP_UNIT_BITS)
            }
            _ => BigUint::from(self.eval_small(i).expect("small family")),
        }
    }

    /// `g(1)`, the largest value the function takes (every family is
    /// nonincreasing in `i`).
    pub fn max_value(&self) -> BigUint {
        self.eval_big(1)
    }

    /// Upper bound on the bit length of `sum_i g(i)`.
    pub fn total_bits_bound(&self) -> u64 {
        let n_bits = 64 - u64::from(self.n.leading_zeros());
        self.max_value().bits() + n_bits
    }

    /// Integer width sufficient for every forward table over this function.
    pub fn weight_class(&self) -> WeightClass {
        WeightClass::for_total_bits(self.total_bits_bound())
    }
}

fn exp_tables(base: &Ratio<u64>, n: u64) -> Vec<Vec<Float128>> {
    let width = 1usize << EXP_TABLE_BITS;
    let max_exp = n.saturating_sub(1);
    let mut levels = Vec::new();
    let mut step = Float128::from_ratio(&BigUint::from(*base.numer()), &BigUint::from(*base.denom()));
    let mut covered: u128 = 1;
    loop {
        let mut level = Vec::with_capacity(width);
        let mut acc = Float128::ONE;
        for _ in 0..width {
            level.push(acc);
            acc = acc.mul(step);
        }
        levels.push(level);
        covered <<= EXP_TABLE_BITS;
        if covered > u128::from(max_exp) {
            break;
        }
        // acc == step^1024 is the unit of the next level.
        step = acc;
    }
    levels
}

/// Evaluates `g(i)` for a text of length `n` as an exact rational.
pub fn eval_g(spec: &WeightFunctionSpec, i: u64, n: u64) -> Result<BigRational> {
    WeightFunction::new(spec, n)?.eval_rational(i)
}

/// Set of symbols both sides of a codec agree on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    bits: [u64; 4],
}

impl Alphabet {
    pub fn empty() -> Self {
        Alphabet::default()
    }

    pub fn full() -> Self {
        Alphabet { bits: [u64::MAX; 4] }
    }

    pub fn of_text(text: &[u8]) -> Self {
        let mut a = Alphabet::empty();
        for &b in text {
            a.insert(b);
        }
        a
    }

    pub fn insert(&mut self, s: u8) {
        self.bits[usize::from(s >> 6)] |= 1 << (s & 63);
    }

    pub fn contains(&self, s: u8) -> bool {
        self.bits[usize::from(s >> 6)] >> (s & 63) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Symbols in ascending byte order.
    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().enumerate().flat_map(|(k, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let bit = rest.trailing_zeros();
                    rest &= rest - 1;
                    (k as u32 * 64 + bit) as u8
                })
            })
        })
    }

    pub fn remove(&mut self, s: u8) {
        self.bits[usize::from(s >> 6)] &= !(1 << (s & 63));
    }

    /// 32-byte bitmap, symbol `s` at bit `s % 8` of byte `s / 8`.
    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for s in self.iter() {
            out[usize::from(s >> 3)] |= 1 << (s & 7);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        let mut a = Alphabet::empty();
        for s in 0..=255u8 {
            if bytes[usize::from(s >> 3)] >> (s & 7) & 1 == 1 {
                a.insert(s);
            }
        }
        a
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<u8> for Alphabet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut a = Alphabet::empty();
        for s in iter {
            a.insert(s);
        }
        a
    }
}

/// Per-symbol weights of a coding model, with a cached total.
///
/// Symbols are *members* of the model while they can still be coded. Forward
/// tables drop a symbol as soon as its weight reaches zero; backward tables
/// keep every member of the agreed alphabet, including zero-weight ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable<W = BigUint> {
    weights: Vec<W>,
    member: Alphabet,
    total: W,
    active: usize,
    members: usize,
}

impl<W: WeightValue> WeightTable<W> {
    fn blank() -> Self {
        WeightTable {
            weights: vec![W::zero(); 256],
            member: Alphabet::empty(),
            total: W::zero(),
            active: 0,
            members: 0,
        }
    }

    /// Forward table at position 1: each symbol weighs the sum of `g` over
    /// its occurrences. Symbols absent from `text` are not members.
    #[doc(alias = "init_forward_table")]
    pub fn forward(text: &[u8], g: &WeightFunction) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyInput);
        }
        if text.len() as u64 != g.text_len() {
            return Err(Error::InvalidWeightFunction(format!(
                "function bound to length {} used on a text of length {}",
                g.text_len(),
                text.len()
            )));
        }
        let mut table = Self::blank();
        for (idx, &s) in text.iter().enumerate() {
            let w: W = g.eval_as(idx as u64 + 1)?;
            table.weights[usize::from(s)].add_assign_ref(&w);
            table.total.add_assign_ref(&w);
        }
        table.refresh_membership();
        Ok(table)
    }

    /// Backward table: every symbol of `alphabet` present with weight zero.
    #[doc(alias = "init_backward_table")]
    pub fn backward(alphabet: &Alphabet) -> Result<Self> {
        Self::uniform(alphabet, W::zero())
    }

    /// Every symbol of `alphabet` present with the same starting weight.
    pub fn uniform(alphabet: &Alphabet, initial: W) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut table = Self::blank();
        for s in alphabet.iter() {
            table.member.insert(s);
            table.weights[usize::from(s)] = initial.clone();
            table.total.add_assign_ref(&initial);
        }
        table.members = alphabet.len();
        if !initial.is_zero() {
            table.active = alphabet.len();
        }
        Ok(table)
    }

    /// Table from explicit positive weights; zero entries are ignored.
    pub fn from_weights<I: IntoIterator<Item = (u8, W)>>(entries: I) -> Self {
        let mut table = Self::blank();
        for (s, w) in entries {
            table.total.add_assign_ref(&w);
            table.weights[usize::from(s)].add_assign_ref(&w);
        }
        table.refresh_membership();
        table
    }

    fn refresh_membership(&mut self) {
        self.active = 0;
        for s in 0..256 {
            if self.weights[s].is_zero() {
                self.member.remove(s as u8);
            } else {
                self.member.insert(s as u8);
                self.active += 1;
            }
        }
        self.members = self.active;
    }

    /// Subtracts `delta` from a forward weight; a symbol reaching zero leaves
    /// the model.
    #[doc(alias = "update_forward")]
    pub fn decrease(&mut self, symbol: u8, delta: &W) -> Result<()> {
        let idx = usize::from(symbol);
        if !self.member.contains(symbol) {
            return Err(Error::WeightUnderflow { symbol });
        }
        let updated = self.weights[idx].checked_sub_ref(delta).ok_or(Error::WeightUnderflow { symbol })?;
        let was_zero = self.weights[idx].is_zero();
        self.weights[idx] = updated;
        self.total.sub_assign_ref(delta);
        if self.weights[idx].is_zero() {
            self.member.remove(symbol);
            self.members -= 1;
            if !was_zero {
                self.active -= 1;
            }
        }
        Ok(())
    }

    /// Adds `delta` to a backward weight.
    #[doc(alias = "update_backward")]
    pub fn increase(&mut self, symbol: u8, delta: &W) -> Result<()> {
        let idx = usize::from(symbol);
        if !self.member.contains(symbol) {
            return Err(Error::UnknownSymbol(symbol));
        }
        let was_zero = self.weights[idx].is_zero();
        self.weights[idx].add_assign_ref(delta);
        self.total.add_assign_ref(delta);
        if was_zero && !self.weights[idx].is_zero() {
            self.active += 1;
        }
        Ok(())
    }

    /// `weight(symbol) / total` as an exact rational.
    #[doc(alias = "probability_of")]
    pub fn probability(&self, symbol: u8) -> Result<BigRational> {
        if self.total.is_zero() {
            return Err(Error::EmptyModel);
        }
        Ok(BigRational::new(
            BigInt::from(self.weights[usize::from(symbol)].to_biguint()),
            BigInt::from(self.total.to_biguint()),
        ))
    }

    pub fn weight(&self, symbol: u8) -> &W {
        &self.weights[usize::from(symbol)]
    }

    pub fn total(&self) -> &W {
        &self.total
    }

    /// Number of symbols with positive weight.
    pub fn active_count(&self) -> usize {
        self.active
    }

    pub fn is_member(&self, symbol: u8) -> bool {
        self.member.contains(symbol)
    }

    /// Members in ascending byte order.
    pub fn members(&self) -> impl Iterator<Item = u8> + '_ {
        self.member.iter()
    }

    /// Number of symbols the model can currently code.
    pub fn member_count(&self) -> usize {
        self.members
    }

    /// The only member, if exactly one remains.
    pub fn sole_member(&self) -> Option<u8> {
        if self.members != 1 {
            return None;
        }
        self.members().next()
    }

    /// `(symbol, weight)` for every member, ascending.
    pub fn entries(&self) -> impl Iterator<Item = (u8, &W)> + '_ {
        self.members().map(move |s| (s, &self.weights[usize::from(s)]))
    }

    /// The only symbol with positive weight, if exactly one remains.
    pub fn sole_active(&self) -> Option<u8> {
        if self.active != 1 {
            return None;
        }
        (0..=255u8).find(|&s| !self.weights[usize::from(s)].is_zero())
    }

    /// Sum of the stored weights, recomputed from scratch.
    pub fn recomputed_total(&self) -> W {
        let mut t = W::zero();
        for w in &self.weights {
            t.add_assign_ref(w);
        }
        t
    }

    pub fn to_big(&self) -> WeightTable<BigUint> {
        WeightTable {
            weights: self.weights.iter().map(WeightValue::to_biguint).collect(),
            member: self.member,
            total: self.total.to_biguint(),
            active: self.active,
            members: self.members,
        }
    }

    /// Converts to another integer width; `None` if some value does not fit.
    pub fn convert<V: WeightValue>(&self) -> Option<WeightTable<V>> {
        let mut weights = Vec::with_capacity(256);
        for w in &self.weights {
            weights.push(V::from_biguint(&w.to_biguint())?);
        }
        Some(WeightTable {
            weights,
            member: self.member,
            total: V::from_biguint(&self.total.to_biguint())?,
            active: self.active,
            members: self.members,
        })
    }
}

/// Rational value of `units` for a function with the given unit.
pub fn units_to_rational(units: &BigUint, unit_bits: u32) -> BigRational {
    BigRational::new(BigInt::from(units.clone()), BigInt::one() << unit_bits as usize)
}

/// Approximate value of `units` as a float (reporting only).
pub fn units_to_f64(units: &BigUint, unit_bits: u32) -> f64 {
    let bits = units.bits();
    if bits <= 1000 {
        units.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(unit_bits as i32)
    } else {
        let shift = bits - 64;
        let top = (units >> shift as usize).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - unit_bits as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_g(&WeightFunctionSpec::Positional, 1, 10).unwrap(), r(10, 1));
        assert_eq!(eval_g(&WeightFunctionSpec::Constant, 7, 10).unwrap(), r(1, 1));
        assert_eq!(eval_g(&WeightFunctionSpec::Interpolated { j: 4 }, 8, 10).unwrap(), r(3, 1));
        assert_eq!(eval_g(&WeightFunctionSpec::ExponentialPow2, 3, 10).unwrap(), r(128, 1));
    }

    #[test]
    fn eval_rejects_bad_positions_and_specs() {
        assert!(matches!(eval_g(&WeightFunctionSpec::Positional, 0, 10), Err(Error::PositionOutOfRange { .. })));
        assert!(matches!(eval_g(&WeightFunctionSpec::Positional, 11, 10), Err(Error::PositionOutOfRange { .. })));
        assert!(WeightFunctionSpec::exponential(1, 1).is_err());
        assert!(WeightFunctionSpec::exponential(9, 10).is_err());
        assert!(eval_g(&WeightFunctionSpec::Interpolated { j: 11 }, 1, 10).is_err());
        assert!(eval_g(&WeightFunctionSpec::Interpolated { j: 0 }, 1, 10).is_err());
    }

    #[test]
    fn table_one_interpolation_rows() {
        // g_2 and g_3 rows for n = 10.
        let g2: Vec<_> = (1..=10).map(|i| eval_g(&WeightFunctionSpec::Interpolated { j: 2 }, i, 10).unwrap()).collect();
        assert_eq!(g2[8], r(2, 1));
        assert_eq!(g2[9], r(1, 1));
        let g3_9 = eval_g(&WeightFunctionSpec::Interpolated { j: 3 }, 9, 10).unwrap();
        assert_eq!(g3_9, r(2, 1));
    }

    #[test]
    fn fractional_polynomial_is_floor_of_true_root() {
        let g = WeightFunction::new(&WeightFunctionSpec::polynomial(1, 2).unwrap(), 4).unwrap();
        // i = 1: sqrt(4) = 2 exactly.
        assert_eq!(g.eval(1).unwrap(), BigUint::from(2u32) << 64);
        // i = 3: sqrt(2) * 2^64, floor.
        let v = g.eval(3).unwrap();
        let sq = &v * &v;
        let two = BigUint::from(2u32) << 128;
        let next = &v + 1u32;
        assert!(sq <= two && &next * &next > two);
    }

    #[test]
    fn exponential_base_relative_error() {
        let spec = WeightFunctionSpec::exponential(2501, 2500).unwrap();
        let n = 5000;
        let g = WeightFunction::new(&spec, n).unwrap();
        for i in [1u64, 17, 1023, 1024, 1025, 2049, 4999, 5000] {
            let got = g.eval(i).unwrap();
            let e = (n - i) as usize;
            let exact_num = big_pow(2501, e as u64) << EXP_UNIT_BITS as usize;
            let exact = exact_num / big_pow(2500, e as u64);
            // got <= exact floor, and within one part in 2^64.
            assert!(got <= exact, "i={i}");
            let diff = &exact - &got;
            assert!(diff << 64usize <= exact, "i={i}");
        }
        assert_eq!(g.eval(n).unwrap(), BigUint::one() << EXP_UNIT_BITS as usize);
    }

    #[test]
    fn integer_base_is_exact() {
        let spec = WeightFunctionSpec::exponential(2, 1).unwrap();
        let a = WeightFunction::new(&spec, 300).unwrap();
        let b = WeightFunction::new(&WeightFunctionSpec::ExponentialPow2, 300).unwrap();
        for i in [1, 2, 150, 300] {
            assert_eq!(a.eval(i).unwrap(), b.eval(i).unwrap());
        }
    }

    #[test]
    fn spec_parsing_round_trips() {
        for s in ["const", "pos", "poly:8", "poly:0.5", "poly:1.5", "exp:1.0004", "exp2", "interp:7"] {
            let spec: WeightFunctionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!(
            "exp:1.0004".parse::<WeightFunctionSpec>().unwrap(),
            WeightFunctionSpec::ExponentialBase { base: Ratio::new(2501, 2500) }
        );
        assert!("exp:1".parse::<WeightFunctionSpec>().is_err());
        assert!("poly:-1".parse::<WeightFunctionSpec>().is_err());
        assert!("nope".parse::<WeightFunctionSpec>().is_err());
    }

    #[test]
    fn forward_table_examples() {
        let text = b"ccabbbcaaa";
        let g = WeightFunction::new(&WeightFunctionSpec::Positional, 10).unwrap();
        let t = WeightTable::<u64>::forward(text, &g).unwrap();
        assert_eq!((*t.weight(b'a'), *t.weight(b'b'), *t.weight(b'c')), (14, 18, 23));
        assert_eq!(t.member_count(), 3);
        let g = WeightFunction::new(&WeightFunctionSpec::Constant, 10).unwrap();
        let t = WeightTable::<u64>::forward(text, &g).unwrap();
        assert_eq!((*t.weight(b'a'), *t.weight(b'b'), *t.weight(b'c')), (4, 3, 3));
        let g = WeightFunction::new(&WeightFunctionSpec::Positional, 4).unwrap();
        let t = WeightTable::<u64>::forward(b"aaaa", &g).unwrap();
        assert_eq!(*t.weight(b'a'), 10);
        assert!(matches!(WeightTable::<u64>::forward(b"", &g), Err(Error::EmptyInput)));
    }

    #[test]
    fn backward_table_examples() {
        let t = WeightTable::<u64>::backward(&Alphabet::of_text(b"abc")).unwrap();
        assert_eq!(t.member_count(), 3);
        assert_eq!(t.active_count(), 0);
        assert_eq!(*t.total(), 0);
        let t = WeightTable::<u64>::backward(&Alphabet::full()).unwrap();
        assert_eq!(t.member_count(), 256);
        assert!(matches!(WeightTable::<u64>::backward(&Alphabet::empty()), Err(Error::EmptyAlphabet)));
    }

    #[test]
    fn forward_updates() {
        let mut t = WeightTable::from_weights([(b'a', 14u64), (b'b', 18), (b'c', 23)]);
        t.decrease(b'c', &10).unwrap();
        assert_eq!(*t.weight(b'c'), 13);
        assert_eq!(*t.total(), 45);

        let mut t = WeightTable::from_weights([(b'a', 6u64), (b'b', 5), (b'c', 4)]);
        t.decrease(b'b', &5).unwrap();
        assert!(!t.is_member(b'b'));
        assert_eq!(t.active_count(), 2);

        let mut t = WeightTable::from_weights([(b'a', 1u64)]);
        t.decrease(b'a', &1).unwrap();
        assert_eq!(t.active_count(), 0);
        assert_eq!(t.member_count(), 0);

        let mut t = WeightTable::from_weights([(b'a', 3u64)]);
        assert!(matches!(t.decrease(b'a', &4), Err(Error::WeightUnderflow { symbol: b'a' })));
    }

    #[test]
    fn backward_updates() {
        let mut t = WeightTable::<u64>::backward(&Alphabet::of_text(b"abc")).unwrap();
        t.increase(b'c', &1).unwrap();
        assert_eq!((*t.weight(b'a'), *t.weight(b'c')), (0, 1));
        assert_eq!(t.active_count(), 1);
        let mut t = WeightTable::from_weights([(b'a', 1u64), (b'b', 2), (b'c', 2)]);
        t.increase(b'b', &1).unwrap();
        assert_eq!(*t.weight(b'b'), 3);
        assert!(matches!(t.increase(b'z', &1), Err(Error::UnknownSymbol(b'z'))));
    }

    #[test]
    fn probabilities() {
        let t = WeightTable::from_weights([(b'a', 14u64), (b'b', 18), (b'c', 23)]);
        assert_eq!(t.probability(b'c').unwrap(), r(23, 55));
        let t = WeightTable::from_weights([(b'x', 7u64)]);
        assert_eq!(t.probability(b'x').unwrap(), r(1, 1));
        let t = WeightTable::from_weights([(b'a', 1u64), (b'b', 1)]);
        assert_eq!(t.probability(b'a').unwrap(), r(1, 2));
        let t = WeightTable::<u64>::backward(&Alphabet::of_text(b"ab")).unwrap();
        assert!(matches!(t.probability(b'a'), Err(Error::EmptyModel)));
    }

    #[test]
    fn alphabet_bitmap_round_trip() {
        let a = Alphabet::of_text(b"hello world\x00\xff");
        assert_eq!(Alphabet::from_bytes(&a.to_bytes()), a);
        assert_eq!(a.len(), 10);
    }
}
