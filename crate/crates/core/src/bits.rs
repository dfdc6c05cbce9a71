//! MSB-first bit sequences.

use std::fmt;

use crate::error::{Error, Result};

/// Append-only bit sequence, packed most significant bit first.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: u64,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Wraps `bytes`, keeping only the first `len` bits. Bits past `len` in
    /// the final byte must be zero.
    pub fn from_bytes(bytes: Vec<u8>, len: u64) -> Result<Self> {
        if (bytes.len() as u64) != len.div_ceil(8) {
            return Err(Error::malformed("payload length does not match its bit count"));
        }
        let rem = len % 8;
        if rem != 0 && bytes.last().is_some_and(|b| b & (0xff >> rem) != 0) {
            return Err(Error::malformed("nonzero padding bits"));
        }
        Ok(BitStream { bytes, len })
    }

    pub fn push(&mut self, bit: bool) {
        let idx = (self.len / 8) as usize;
        if idx == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[idx] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, count: u32) {
        for k in (0..count).rev() {
            self.push(value >> k & 1 == 1);
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: u64) -> Option<bool> {
        (i < self.len).then(|| self.bytes[(i / 8) as usize] & (0x80 >> (i % 8)) != 0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { stream: self, pos: 0 }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i).unwrap())
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "BitStream({s:?})")
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut s = BitStream::new();
        for b in iter {
            s.push(b);
        }
        s
    }
}

impl std::str::FromStr for BitStream {
    type Err = Error;

    /// Parses a string of `0`/`1` characters (other characters are ignored).
    fn from_str(s: &str) -> Result<Self> {
        Ok(s.chars()
            .filter_map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect())
    }
}

/// Cursor over a [`BitStream`].
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    stream: &'a BitStream,
    pos: u64,
}

impl BitReader<'_> {
    pub fn read_bit(&mut self) -> Result<bool> {
        let bit = self.stream.get(self.pos).ok_or(Error::TruncatedStream)?;
        self.pos += 1;
        Ok(bit)
    }

    /// Reads a bit, treating everything past the end as zero.
    pub fn read_bit_or_zero(&mut self) -> bool {
        let bit = self.stream.get(self.pos).unwrap_or(false);
        self.pos += 1;
        bit
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.stream.len.saturating_sub(self.pos)
    }
}
