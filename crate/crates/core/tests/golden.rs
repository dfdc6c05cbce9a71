use num_bigint::BigUint;
use num_rational::BigRational;

use wacode::diagnostics::trace_model;
use wacode::{
    accounted_sizes, compress, decompress_bytes, huffman::huffman_code_lengths, ideal_code_length, ArithMode, Encoded,
    Engine, HuffmanTree, Variant,
};

const TEXT: &[u8] = b"ccabbbcaaa";

fn bits(e: &Encoded) -> String {
    e.payload.iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn huffman(variant: &str) -> Encoded {
    compress(TEXT, Engine::Huffman, &variant.parse().unwrap()).unwrap()
}

fn weights(entries: &[(u8, BigUint)]) -> Vec<(char, u64)> {
    entries.iter().map(|(s, w)| (*s as char, w.try_into().unwrap())).collect()
}

#[test]
fn payload_sizes_of_the_three_techniques() {
    assert_eq!(huffman("weighted:pos").payload.len(), 10);
    assert_eq!(huffman("backward").payload.len(), 19);
    assert_eq!(huffman("forward").payload.len(), 12);
}

#[test]
fn codewords_of_the_three_techniques() {
    assert_eq!(bits(&huffman("weighted:pos")), "0101100110");
    assert_eq!(bits(&huffman("backward")), "1101110101111101010");
    assert_eq!(bits(&huffman("forward")), "111001111110");
}

#[test]
fn per_symbol_lengths() {
    let lengths = |v: &str| huffman_code_lengths(TEXT, &v.parse().unwrap()).unwrap();
    assert_eq!(lengths("weighted:pos"), vec![1, 2, 2, 1, 1, 2, 1, 0, 0, 0]);
    assert_eq!(lengths("backward"), vec![2, 1, 2, 2, 2, 2, 2, 2, 2, 2]);
    assert_eq!(lengths("forward"), vec![2, 2, 1, 2, 2, 2, 1, 0, 0, 0]);
    // One bit per symbol until only the final run is left.
    assert_eq!(lengths("weighted:exp2"), vec![1, 1, 1, 1, 1, 1, 1, 0, 0, 0]);
}

#[test]
fn positional_weight_columns() {
    let trace = trace_model(TEXT, &Variant::positional(), Engine::Huffman).unwrap();
    let column = |s: u8| -> Vec<u64> { trace.iter().map(|r| (&r.weight(s)).try_into().unwrap()).collect() };
    assert_eq!(column(b'a'), vec![14, 14, 14, 6, 6, 6, 6, 6, 3, 1]);
    assert_eq!(column(b'b'), vec![18, 18, 18, 18, 11, 5, 0, 0, 0, 0]);
    assert_eq!(column(b'c'), vec![23, 13, 4, 4, 4, 4, 4, 0, 0, 0]);
}

#[test]
fn forward_trace_starts_with_counts() {
    let trace = trace_model(TEXT, &Variant::Forward, Engine::Huffman).unwrap();
    assert_eq!(weights(&trace[0].weights), vec![('a', 4), ('b', 3), ('c', 3)]);
    let single = trace_model(b"x", &Variant::Forward, Engine::Huffman).unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].probability, Some(BigRational::from_integer(1.into())));
}

#[test]
fn initial_trees() {
    let tree = |w: &[(u8, u64)]| HuffmanTree::<u64>::from_weights(w.iter().copied()).unwrap();
    let lengths = |w: &[(u8, u64)]| tree(w).code_lengths();
    assert_eq!(lengths(&[(b'a', 14), (b'b', 18), (b'c', 23)]), vec![(b'a', 2), (b'b', 2), (b'c', 1)]);
    assert_eq!(lengths(&[(b'a', 4), (b'b', 3), (b'c', 3)]), vec![(b'a', 1), (b'b', 2), (b'c', 2)]);
    assert_eq!(lengths(&[(b'x', 1)]), vec![(b'x', 0)]);
    assert_eq!(tree(&[(b'a', 14), (b'b', 18), (b'c', 23)]).codeword(b'c').unwrap(), vec![false]);
    assert_eq!(tree(&[(b'a', 14), (b'b', 18), (b'c', 13)]).codeword(b'c').unwrap(), vec![true, false]);
}

#[test]
fn header_contents() {
    assert_eq!(weights(&huffman("forward").header.weights), vec![('a', 4), ('b', 3), ('c', 3)]);
    assert_eq!(weights(&huffman("weighted:pos").header.weights), vec![('a', 14), ('b', 18), ('c', 23)]);
    let backward = huffman("backward");
    assert!(backward.header.weights.is_empty());
    let sizes = accounted_sizes(&backward.to_bytes()).unwrap();
    assert_eq!(sizes.header_bits, 0);
    assert_eq!(sizes.payload_bits, 19);
    assert_eq!(accounted_sizes(&huffman("weighted:pos").to_bytes()).unwrap().payload_bits, 10);
}

#[test]
fn containers_round_trip() {
    for v in ["weighted:pos", "backward", "forward", "static", "weighted:exp2"] {
        for engine in [Engine::Huffman, Engine::Arithmetic(ArithMode::Exact), Engine::Arithmetic(ArithMode::Streaming)]
        {
            let bytes = compress(TEXT, engine, &v.parse().unwrap()).unwrap().to_bytes();
            assert_eq!(decompress_bytes(&bytes).unwrap(), TEXT, "{v} {engine}");
        }
    }
}

#[test]
fn positional_arithmetic_length() {
    // The seven positions with two or more symbols left, read off the weight
    // columns above.
    let factors = [(23u32, 55u32), (13, 45), (14, 36), (18, 28), (11, 21), (5, 15), (4, 10)];
    let expected: f64 = factors.iter().map(|&(w, t)| (f64::from(t) / f64::from(w)).log2()).sum();
    let ideal = ideal_code_length(TEXT, &Variant::positional()).unwrap().bits();
    assert!((ideal - expected).abs() < 1e-12, "{ideal} vs {expected}");
    let exact = compress(TEXT, Engine::Arithmetic(ArithMode::Exact), &Variant::positional()).unwrap();
    let len = exact.payload.len();
    assert!(expected.ceil() as u64 <= len && len <= expected.ceil() as u64 + 2, "{len}");
}

#[test]
fn forward_arithmetic_length() {
    let factors = [(3u32, 10u32), (2, 9), (4, 8), (3, 7), (2, 6), (1, 5), (1, 4)];
    let expected: f64 = factors.iter().map(|&(w, t)| (f64::from(t) / f64::from(w)).log2()).sum();
    let ideal = ideal_code_length(TEXT, &Variant::Forward).unwrap().bits();
    assert!((ideal - expected).abs() < 1e-12, "{ideal} vs {expected}");
}

#[test]
fn small_arithmetic_cases() {
    let ab = compress(b"ab", Engine::Arithmetic(ArithMode::Exact), &Variant::Static).unwrap();
    assert!(ab.payload.len() <= 4);
    assert!((ideal_code_length(b"ab", &Variant::Static).unwrap().bits() - 2.0).abs() < 1e-12);
    let run = compress(b"aaaa", Engine::Arithmetic(ArithMode::Exact), &Variant::Forward).unwrap();
    assert_eq!(run.payload.len(), 0);
    assert_eq!(decompress_bytes(&run.to_bytes()).unwrap(), b"aaaa");
}
