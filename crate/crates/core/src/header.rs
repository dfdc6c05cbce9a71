//! Container format: frame, model header and payload.
//!
//! The byte layout is documented in `FORMAT.md` at the repository root.
//! Parsing is strict: every accepted file is the canonical serialization of
//! the value it decodes to.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;

use crate::bits::BitStream;
use crate::error::{Error, Result};
use crate::model::{ArithMode, Engine, Variant};
use crate::numeric::WeightValue;
use crate::weight_model::{Alphabet, WeightFunction, WeightFunctionSpec, WeightTable};

pub const MAGIC: &[u8; 4] = b"WACx";
pub const VERSION: u8 = 1;
/// Largest text length a container may declare.
pub const MAX_LEN: u64 = (1 << 48) - 1;

/// Everything the decoder needs besides the payload bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelHeader {
    pub engine: Engine,
    pub variant: Variant,
    /// Text length.
    pub n: u64,
    /// Symbols agreed by both sides.
    pub alphabet: Alphabet,
    /// Initial weights in the units of the variant's weight function,
    /// ascending by symbol. Empty for backward variants.
    pub weights: Vec<(u8, BigUint)>,
}

impl ModelHeader {
    pub fn new<W: WeightValue>(
        engine: Engine,
        variant: Variant,
        n: u64,
        alphabet: Alphabet,
        table: &WeightTable<W>,
    ) -> Self {
        let weights = if variant.stores_weights() {
            table.entries().map(|(s, w)| (s, w.to_biguint())).collect()
        } else {
            Vec::new()
        };
        ModelHeader { engine, variant, n, alphabet, weights }
    }

    /// The model section: weight-function parameters and initial weights.
    pub fn model_section(&self) -> Vec<u8> {
        let mut out = Vec::new();
        if let Variant::Weighted(spec) = &self.variant {
            write_spec(&mut out, spec);
        }
        for (_, w) in &self.weights {
            let bytes = w.to_bytes_be();
            write_varint(&mut out, bytes.len() as u64);
            out.extend_from_slice(&bytes);
        }
        out
    }
}

/// A header and its payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoded {
    pub header: ModelHeader,
    pub payload: BitStream,
}

/// Bit accounting of a container.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct AccountedSizes {
    /// Coded text ("net" size).
    pub payload_bits: u64,
    /// Model section.
    pub header_bits: u64,
    /// Everything else: magic, version, tags, lengths, alphabet, padding.
    pub frame_bits: u64,
}

impl AccountedSizes {
    pub fn total_bits(&self) -> u64 {
        self.payload_bits + self.header_bits + self.frame_bits
    }

    /// Payload plus model section.
    pub fn combined_bits(&self) -> u64 {
        self.payload_bits + self.header_bits
    }
}

impl Encoded {
    /// Serializes to the container format.
    #[doc(alias = "serialize_header")]
    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let model = h.model_section();
        let mut out = Vec::with_capacity(64 + model.len() + self.payload.as_bytes().len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(engine_tag(h.engine));
        out.push(variant_tag(&h.variant));
        write_varint(&mut out, h.n);
        out.extend_from_slice(&h.alphabet.to_bytes());
        write_varint(&mut out, model.len() as u64 * 8);
        write_varint(&mut out, self.payload.len());
        out.extend_from_slice(&model);
        out.extend_from_slice(self.payload.as_bytes());
        out
    }

    /// Parses a container, rejecting anything non-canonical.
    #[doc(alias = "parse_header")]
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(parse(bytes)?.0)
    }

    /// Sizes this value has once serialized.
    pub fn sizes(&self) -> AccountedSizes {
        let total = self.to_bytes().len() as u64 * 8;
        let header_bits = self.header.model_section().len() as u64 * 8;
        AccountedSizes {
            payload_bits: self.payload.len(),
            header_bits,
            frame_bits: total - header_bits - self.payload.len(),
        }
    }
}

/// Bit accounting of a serialized container.
pub fn accounted_sizes(bytes: &[u8]) -> Result<AccountedSizes> {
    Ok(parse(bytes)?.1)
}

fn engine_tag(e: Engine) -> u8 {
    match e {
        Engine::Huffman => 0,
        Engine::Arithmetic(ArithMode::Exact) => 1,
        Engine::Arithmetic(ArithMode::Streaming) => 2,
    }
}

fn variant_tag(v: &Variant) -> u8 {
    match v {
        Variant::Static => 0,
        Variant::Backward => 1,
        Variant::Forward => 2,
        Variant::Weighted(_) => 3,
    }
}

fn write_spec(out: &mut Vec<u8>, spec: &WeightFunctionSpec) {
    match spec {
        WeightFunctionSpec::Constant => out.push(0),
        WeightFunctionSpec::Positional => out.push(1),
        WeightFunctionSpec::Polynomial { k } => {
            out.push(2);
            write_varint(out, *k.numer());
            write_varint(out, *k.denom());
        }
        WeightFunctionSpec::ExponentialBase { base } => {
            out.push(3);
            write_varint(out, *base.numer());
            write_varint(out, *base.denom());
        }
        WeightFunctionSpec::ExponentialPow2 => out.push(4),
        WeightFunctionSpec::Interpolated { j } => {
            out.push(5);
            write_varint(out, *j);
        }
    }
}

/// Appends `v` as an unsigned LEB128 varint.
pub fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < k {
            return Err(Error::TruncatedStream);
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v: u64 = 0;
        for k in 0..10 {
            let b = self.byte()?;
            let bits = u64::from(b & 0x7f);
            if k == 9 && bits > 1 {
                return Err(Error::malformed("varint overflows 64 bits"));
            }
            v |= bits << (7 * k);
            if b & 0x80 == 0 {
                if b == 0 && k > 0 {
                    return Err(Error::malformed("non-canonical varint"));
                }
                return Ok(v);
            }
        }
        Err(Error::malformed("varint too long"))
    }

    fn ratio(&mut self) -> Result<Ratio<u64>> {
        let num = self.varint()?;
        let den = self.varint()?;
        if den == 0 || num.gcd(&den) != 1 {
            return Err(Error::malformed("rational parameter not in lowest terms"));
        }
        Ok(Ratio::new_raw(num, den))
    }
}

fn parse(bytes: &[u8]) -> Result<(Encoded, AccountedSizes)> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::malformed("bad magic"));
    }
    let version = c.byte()?;
    if version != VERSION {
        return Err(Error::malformed(format!("unsupported version {version}")));
    }
    let engine = match c.byte()? {
        0 => Engine::Huffman,
        1 => Engine::Arithmetic(ArithMode::Exact),
        2 => Engine::Arithmetic(ArithMode::Streaming),
        t => return Err(Error::malformed(format!("unknown engine tag {t}"))),
    };
    let variant_tag = c.byte()?;
    let n = c.varint()?;
    if n == 0 || n > MAX_LEN {
        return Err(Error::malformed("text length out of range"));
    }
    let alphabet = Alphabet::from_bytes(c.take(32)?.try_into().expect("32 bytes"));
    if alphabet.is_empty() {
        return Err(Error::malformed("empty alphabet"));
    }
    let header_bits = c.varint()?;
    let payload_bits = c.varint()?;
    if header_bits % 8 != 0 {
        return Err(Error::malformed("model section is not byte aligned"));
    }
    let model_len = usize::try_from(header_bits / 8).map_err(|_| Error::TruncatedStream)?;
    let model = c.take(model_len)?;
    let payload_len = usize::try_from(payload_bits.div_ceil(8)).map_err(|_| Error::TruncatedStream)?;
    let payload_bytes = c.take(payload_len)?;
    if c.pos != bytes.len() {
        return Err(Error::malformed("trailing bytes after payload"));
    }
    let payload = BitStream::from_bytes(payload_bytes.to_vec(), payload_bits)?;

    let mut m = Cursor { bytes: model, pos: 0 };
    let variant = match variant_tag {
        0 => Variant::Static,
        1 => Variant::Backward,
        2 => Variant::Forward,
        3 => {
            let spec = match m.byte()? {
                0 => WeightFunctionSpec::Constant,
                1 => WeightFunctionSpec::Positional,
                2 => WeightFunctionSpec::Polynomial { k: m.ratio()? },
                3 => WeightFunctionSpec::ExponentialBase { base: m.ratio()? },
                4 => WeightFunctionSpec::ExponentialPow2,
                5 => WeightFunctionSpec::Interpolated { j: m.varint()? },
                t => return Err(Error::malformed(format!("unknown weight family {t}"))),
            };
            WeightFunction::new(&spec, n).map_err(|e| Error::malformed(e.to_string()))?;
            Variant::Weighted(spec)
        }
        t => return Err(Error::malformed(format!("unknown variant tag {t}"))),
    };
    let mut weights = Vec::new();
    if variant.stores_weights() {
        for s in alphabet.iter() {
            let len = usize::try_from(m.varint()?).map_err(|_| Error::TruncatedStream)?;
            let mag = m.take(len)?;
            if mag.first().is_none_or(|&b| b == 0) {
                return Err(Error::malformed("weight with leading zero byte"));
            }
            weights.push((s, BigUint::from_bytes_be(mag)));
        }
    }
    if m.pos != model.len() {
        return Err(Error::malformed("trailing bytes in model section"));
    }
    if matches!(variant, Variant::Static | Variant::Forward) {
        let sum: BigUint = weights.iter().map(|(_, w)| w).sum();
        if sum != BigUint::from(n) {
            return Err(Error::malformed("counts do not add up to the text length"));
        }
    }
    debug_assert!(weights.iter().all(|(_, w)| !w.is_zero()));
    let sizes =
        AccountedSizes { payload_bits, header_bits, frame_bits: bytes.len() as u64 * 8 - header_bits - payload_bits };
    let header = ModelHeader { engine, variant, n, alphabet, weights };
    Ok((Encoded { header, payload }, sizes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::huffman_encode;

    fn weights_of(e: &Encoded) -> Vec<(u8, u64)> {
        e.header.weights.iter().map(|(s, w)| (*s, u64::try_from(w).unwrap())).collect()
    }

    #[test]
    fn header_examples() {
        let text = b"ccabbbcaaa";
        let fwd = huffman_encode(text, &Variant::Forward).unwrap();
        assert_eq!(weights_of(&fwd), vec![(b'a', 4), (b'b', 3), (b'c', 3)]);
        let pos = huffman_encode(text, &Variant::positional()).unwrap();
        assert_eq!(weights_of(&pos), vec![(b'a', 14), (b'b', 18), (b'c', 23)]);
        let bwd = huffman_encode(text, &Variant::Backward).unwrap();
        assert!(bwd.header.weights.is_empty());
        assert!(bwd.header.model_section().is_empty());
    }

    #[test]
    fn sizes_examples() {
        let text = b"ccabbbcaaa";
        let pos = huffman_encode(text, &Variant::positional()).unwrap();
        let bytes = pos.to_bytes();
        let sizes = accounted_sizes(&bytes).unwrap();
        assert_eq!(sizes.payload_bits, 10);
        assert_eq!(sizes.total_bits(), bytes.len() as u64 * 8);
        assert_eq!(sizes, pos.sizes());
        let bwd = huffman_encode(text, &Variant::Backward).unwrap();
        assert_eq!(accounted_sizes(&bwd.to_bytes()).unwrap().header_bits, 0);
    }

    #[test]
    fn round_trip_and_canonical() {
        for v in [
            Variant::Static,
            Variant::Backward,
            Variant::Forward,
            Variant::positional(),
            "weighted:poly:1.5".parse().unwrap(),
            "weighted:exp:1.0004".parse().unwrap(),
            "weighted:interp:3".parse().unwrap(),
        ] {
            let e = huffman_encode(b"hello, world", &v).unwrap();
            let bytes = e.to_bytes();
            let parsed = Encoded::from_bytes(&bytes).unwrap();
            assert_eq!(parsed, e);
            assert_eq!(parsed.to_bytes(), bytes);
        }
    }

    #[test]
    fn strict_parse_rejections() {
        let bytes = huffman_encode(b"ccabbbcaaa", &Variant::positional()).unwrap().to_bytes();
        for cut in 0..bytes.len() {
            assert!(Encoded::from_bytes(&bytes[..cut]).is_err(), "prefix {cut}");
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Encoded::from_bytes(&bad).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Encoded::from_bytes(&extra).is_err());
        // A non-canonical varint for n (10 written as 0x8a 0x00).
        let mut nc = bytes[..7].to_vec();
        nc.extend_from_slice(&[0x8a, 0x00]);
        nc.extend_from_slice(&bytes[8..]);
        assert!(matches!(Encoded::from_bytes(&nc), Err(Error::Malformed(_))));
    }

    #[test]
    fn varint_encoding() {
        let mut out = Vec::new();
        write_varint(&mut out, 300);
        assert_eq!(out, [0xac, 0x02]);
        let mut c = Cursor { bytes: &out, pos: 0 };
        assert_eq!(c.varint().unwrap(), 300);
        let max = {
            let mut o = Vec::new();
            write_varint(&mut o, u64::MAX);
            o
        };
        assert_eq!(Cursor { bytes: &max, pos: 0 }.varint().unwrap(), u64::MAX);
    }
}
