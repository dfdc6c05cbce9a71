//! Compresses a file (or a built-in sample) under every model variant and
//! both engines, checking that each container decodes back to the input.
//!
//! cargo run --example compress_roundtrip -- path/to/file

use wacode::{compress, decompress_bytes, ArithMode, Engine, Variant};

const SAMPLE: &str = "it was the best of times it was the worst of times it was the age of wisdom \
it was the age of foolishness it was the epoch of belief it was the epoch of incredulity";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path)?,
        None => SAMPLE.as_bytes().to_vec(),
    };
    let n = text.len() as f64;
    println!("{} bytes", text.len());
    println!("{:<10} {:<24} {:>10} {:>10} {:>10} {:>8}", "engine", "variant", "payload", "header", "frame", "net");
    let variants = ["static", "backward", "forward", "weighted:pos", "weighted:poly:8", "weighted:exp:1.0004"];
    for engine in [Engine::Huffman, Engine::Arithmetic(ArithMode::Streaming)] {
        for v in variants {
            let variant: Variant = v.parse()?;
            let packed = compress(&text, engine, &variant)?;
            let bytes = packed.to_bytes();
            assert_eq!(decompress_bytes(&bytes)?, text);
            let s = packed.sizes();
            println!(
                "{:<10} {:<24} {:>10} {:>10} {:>10} {:>8.5}",
                engine.to_string(),
                v,
                s.payload_bits,
                s.header_bits,
                s.frame_bits,
                s.payload_bits as f64 / (8.0 * n)
            );
        }
    }
    Ok(())
}
