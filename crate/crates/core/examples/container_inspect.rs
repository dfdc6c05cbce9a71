//! Serializes a compressed text, dumps the container bytes and parses them
//! back, showing where the bits go.

use wacode::{accounted_sizes, compress, Encoded, Engine, Variant};

fn main() -> Result<(), wacode::Error> {
    let text = b"ccabbbcaaa";
    for v in ["weighted:pos", "backward", "weighted:poly:1.5"] {
        let bytes = compress(text, Engine::Huffman, &v.parse::<Variant>()?)?.to_bytes();
        let sizes = accounted_sizes(&bytes)?;
        let hex: Vec<String> = bytes.iter().map(|b| format!("{b:02x}")).collect();
        println!("{v}: {} bytes", bytes.len());
        for line in hex.chunks(24) {
            println!("  {}", line.join(" "));
        }
        println!(
            "  payload {} bits, model header {} bits, frame {} bits",
            sizes.payload_bits, sizes.header_bits, sizes.frame_bits
        );
        let parsed = Encoded::from_bytes(&bytes)?;
        let weights: Vec<String> = parsed.header.weights.iter().map(|(s, w)| format!("{}:{w}", *s as char)).collect();
        println!(
            "  n = {}, alphabet size {}, weights [{}]",
            parsed.header.n,
            parsed.header.alphabet.len(),
            weights.join(" ")
        );
    }
    Ok(())
}
