//! Coding variants and the model trajectory shared by every engine.
//!
//! A trajectory owns the live [`WeightTable`] and applies the variant's update
//! rule after each position. Huffman, arithmetic and the diagnostics all drive
//! the same trajectory, so the encoder, the decoder and the traces see exactly
//! the same sequence of models.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::numeric::{WeightClass, WeightValue};
use crate::weight_model::{Alphabet, WeightFunction, WeightFunctionSpec, WeightTable};

/// How the model evolves along the text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Occurrence counts of the whole text, never updated.
    Static,
    /// Counts of the symbols seen so far (classical adaptive coding).
    Backward,
    /// Counts of the symbols still to come.
    Forward,
    /// Forward weights under a position weight function.
    Weighted(WeightFunctionSpec),
}

impl Variant {
    pub fn positional() -> Self {
        Variant::Weighted(WeightFunctionSpec::Positional)
    }

    /// Whether the decoder needs the initial weights from the header.
    pub fn stores_weights(&self) -> bool {
        !matches!(self, Variant::Backward)
    }

    pub fn weight_function(&self, n: u64) -> Result<Option<WeightFunction>> {
        match self {
            Variant::Weighted(spec) => Ok(Some(WeightFunction::new(spec, n)?)),
            _ => Ok(None),
        }
    }

    /// Fractional bits of the weights this variant works with.
    pub fn unit_bits(&self, n: u64) -> Result<u32> {
        Ok(self.weight_function(n)?.map_or(0, |g| g.unit_bits()))
    }

    /// Narrowest integer width that holds every weight of the trajectory.
    pub fn weight_class(&self, n: u64) -> Result<WeightClass> {
        Ok(match self.weight_function(n)? {
            Some(g) => g.weight_class(),
            None => WeightClass::for_total_bits(65 - u64::from(n.leading_zeros())),
        })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Static => write!(f, "static"),
            Variant::Backward => write!(f, "backward"),
            Variant::Forward => write!(f, "forward"),
            Variant::Weighted(spec) => write!(f, "weighted:{spec}"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `static`, `backward`, `forward` and `weighted:<g>` where `<g>`
    /// is a [`WeightFunctionSpec`] string such as `pos` or `poly:8`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Variant::Static),
            "backward" => Ok(Variant::Backward),
            "forward" => Ok(Variant::Forward),
            _ => match s.strip_prefix("weighted:") {
                Some(g) => Ok(Variant::Weighted(g.parse()?)),
                None => Err(Error::InvalidWeightFunction(format!("unknown variant {s:?}"))),
            },
        }
    }
}

/// Arithmetic coder flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithMode {
    /// Unbounded-precision interval arithmetic.
    Exact,
    /// 62-bit renormalizing coder over quantized frequencies.
    Streaming,
}

/// Back end turning model probabilities into bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Huffman,
    Arithmetic(ArithMode),
}

impl Engine {
    /// Starting weight of every backward symbol. Arithmetic coding cannot give
    /// an unseen symbol probability zero, so it counts from one.
    pub(crate) fn backward_base(self) -> u64 {
        match self {
            Engine::Huffman => 0,
            Engine::Arithmetic(_) => 1,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Huffman => write!(f, "huffman"),
            Engine::Arithmetic(ArithMode::Exact) => write!(f, "arith-exact"),
            Engine::Arithmetic(ArithMode::Streaming) => write!(f, "arith-streaming"),
        }
    }
}

/// The change applied to one symbol's weight after a position is coded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Update<W> {
    None,
    Increase(W),
    Decrease(W),
}

#[derive(Clone, Debug)]
enum Rule {
    Fixed,
    Increment,
    DecrementOne,
    Decrement(WeightFunction),
}

/// Initial table an encoder derives from the text itself.
pub fn initial_table<W: WeightValue>(text: &[u8], variant: &Variant, engine: Engine) -> Result<WeightTable<W>> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = text.len() as u64;
    match variant {
        Variant::Static | Variant::Forward => {
            WeightTable::forward(text, &WeightFunction::new(&WeightFunctionSpec::Constant, n)?)
        }
        Variant::Backward => WeightTable::uniform(&Alphabet::of_text(text), W::from_u64(engine.backward_base())),
        Variant::Weighted(spec) => WeightTable::forward(text, &WeightFunction::new(spec, n)?),
    }
}

/// Initial table a decoder rebuilds from header data.
pub fn table_from_parts<W: WeightValue>(
    variant: &Variant,
    engine: Engine,
    alphabet: &Alphabet,
    weights: &[(u8, BigUint)],
) -> Result<WeightTable<W>> {
    if let Variant::Backward = variant {
        return WeightTable::uniform(alphabet, W::from_u64(engine.backward_base()));
    }
    let mut entries = Vec::with_capacity(weights.len());
    for (s, w) in weights {
        let w = W::from_biguint(w).ok_or_else(|| Error::malformed(format!("weight of symbol {s} too large")))?;
        entries.push((*s, w));
    }
    Ok(WeightTable::from_weights(entries))
}

/// A model moving along the text one position at a time.
#[derive(Clone, Debug)]
pub struct Trajectory<W> {
    table: WeightTable<W>,
    rule: Rule,
    n: u64,
    pos: u64,
    one: W,
}

impl<W: WeightValue> Trajectory<W> {
    pub fn new(variant: &Variant, n: u64, table: WeightTable<W>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let rule = match variant {
            Variant::Static => Rule::Fixed,
            Variant::Backward => Rule::Increment,
            Variant::Forward => Rule::DecrementOne,
            Variant::Weighted(spec) => Rule::Decrement(WeightFunction::new(spec, n)?),
        };
        Ok(Trajectory { table, rule, n, pos: 1, one: W::from_u64(1) })
    }

    /// Trajectory of an encoder over `text`.
    pub fn for_text(text: &[u8], variant: &Variant, engine: Engine) -> Result<Self> {
        let table = initial_table(text, variant, engine)?;
        Self::new(variant, text.len() as u64, table)
    }

    pub fn table(&self) -> &WeightTable<W> {
        &self.table
    }

    /// Next position to be coded, 1-based.
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn text_len(&self) -> u64 {
        self.n
    }

    pub fn is_finished(&self) -> bool {
        self.pos > self.n
    }

    /// Whether coding the current position costs any bits.
    pub fn needs_bits(&self) -> bool {
        self.table.member_count() >= 2
    }

    /// The update the variant applies after coding `symbol` at the current
    /// position, without applying it.
    pub fn pending_update(&self) -> Result<Update<W>> {
        Ok(match &self.rule {
            Rule::Fixed => Update::None,
            Rule::Increment => Update::Increase(self.one.clone()),
            Rule::DecrementOne => Update::Decrease(self.one.clone()),
            Rule::Decrement(g) => Update::Decrease(g.eval_as(self.pos)?),
        })
    }

    /// Records `symbol` at the current position and moves to the next one.
    /// Returns the update applied to the table.
    pub fn advance(&mut self, symbol: u8) -> Result<Update<W>> {
        if self.is_finished() {
            return Err(Error::PositionOutOfRange { position: self.pos, n: self.n });
        }
        if !self.table.is_member(symbol) {
            return Err(match self.rule {
                Rule::Increment => Error::UnknownSymbol(symbol),
                _ => Error::WeightUnderflow { symbol },
            });
        }
        let update = self.pending_update()?;
        match &update {
            Update::None => {}
            Update::Increase(d) => self.table.increase(symbol, d)?,
            Update::Decrease(d) => self.table.decrease(symbol, d)?,
        }
        self.pos += 1;
        Ok(update)
    }

    /// After the last position: forward-style models must have drained to zero.
    pub fn check_drained(&self) -> Result<()> {
        match self.rule {
            Rule::DecrementOne | Rule::Decrement(_) if !self.table.total().is_zero() => {
                Err(Error::malformed("model weights left over after the last position"))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_strings() {
        for s in ["static", "backward", "forward", "weighted:pos", "weighted:exp:1.0004"] {
            assert_eq!(s.parse::<Variant>().unwrap().to_string(), s);
        }
        assert!("sideways".parse::<Variant>().is_err());
    }

    #[test]
    fn positional_trajectory_drains() {
        let text = b"ccabbbcaaa";
        let mut t = Trajectory::<u64>::for_text(text, &Variant::positional(), Engine::Huffman).unwrap();
        for &s in text {
            t.advance(s).unwrap();
        }
        assert!(t.is_finished());
        assert_eq!(*t.table().total(), 0);
        t.check_drained().unwrap();
    }

    #[test]
    fn backward_smoothing_depends_on_engine() {
        let h = initial_table::<u64>(b"ab", &Variant::Backward, Engine::Huffman).unwrap();
        let a = initial_table::<u64>(b"ab", &Variant::Backward, Engine::Arithmetic(ArithMode::Exact)).unwrap();
        assert_eq!((*h.total(), *a.total()), (0, 2));
        assert_eq!(h.member_count(), 2);
    }

    #[test]
    fn foreign_symbol_is_rejected() {
        let mut t = Trajectory::<u64>::for_text(b"ab", &Variant::Forward, Engine::Huffman).unwrap();
        assert!(matches!(t.advance(b'z'), Err(Error::WeightUnderflow { symbol: b'z' })));
    }
}
