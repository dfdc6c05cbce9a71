//! Weighted adaptive coding.
//!
//! A text is coded position by position under a model whose symbol weights
//! change along the way. Static, classical adaptive (backward), forward and
//! position-weighted forward models all fit one scheme: a weight function `g`
//! over positions, summed over each symbol's occurrences. The models drive a
//! dynamic Huffman coder or an arithmetic coder, and the result is stored in
//! a small self-describing container.
//!
//! ```
//! use wacode::{compress, decompress, Engine, Variant};
//!
//! let text = b"ccabbbcaaa";
//! let packed = compress(text, Engine::Huffman, &Variant::positional()).unwrap();
//! assert_eq!(packed.payload.len(), 10);
//! assert_eq!(decompress(&packed).unwrap(), text);
//! ```

pub mod arithmetic;
pub mod bits;
pub mod diagnostics;
pub mod error;
pub mod header;
pub mod huffman;
pub mod model;
pub mod numeric;
#[cfg(feature = "test-support")]
pub mod oracle;
pub mod report;
pub mod weight_model;

pub use arithmetic::{
    arith_decode, arith_encode, ideal_code_length, probability_product, CodeLength, ProbabilityProduct,
};
pub use bits::BitStream;
pub use error::{Error, Result};
pub use header::{accounted_sizes, AccountedSizes, Encoded, ModelHeader};
pub use huffman::{huffman_decode, huffman_encode, HuffmanTree};
pub use model::{ArithMode, Engine, Trajectory, Variant};
pub use weight_model::{eval_g, Alphabet, WeightFunction, WeightFunctionSpec, WeightTable};

/// Encodes `text` with the given engine and model variant.
pub fn compress(text: &[u8], engine: Engine, variant: &Variant) -> Result<Encoded> {
    match engine {
        Engine::Huffman => huffman_encode(text, variant),
        Engine::Arithmetic(mode) => arith_encode(text, variant, mode),
    }
}

/// Decodes a value produced by [`compress`].
pub fn decompress(encoded: &Encoded) -> Result<Vec<u8>> {
    match encoded.header.engine {
        Engine::Huffman => huffman_decode(&encoded.header, &encoded.payload),
        Engine::Arithmetic(_) => arith_decode(&encoded.header, &encoded.payload),
    }
}

/// Parses and decodes a serialized container.
pub fn decompress_bytes(bytes: &[u8]) -> Result<Vec<u8>> {
    decompress(&Encoded::from_bytes(bytes)?)
}
