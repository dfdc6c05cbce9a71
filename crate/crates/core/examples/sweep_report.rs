//! Runs a polynomial-exponent sweep over two in-memory texts and writes the
//! report as CSV to standard output.

use wacode::report::{sweep_texts, Family, SweepSpec};
use wacode::Engine;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let texts = vec![
        ("example".to_string(), b"ccabbbcaaa".to_vec()),
        (
            "pangrams".to_string(),
            b"The quick brown fox jumps over the lazy dog. Pack my box with five dozen liquor jugs!".repeat(20),
        ),
    ];
    let spec = SweepSpec {
        family: Family::Poly,
        grid: ["0", "0.5", "1", "2", "8"].map(String::from).to_vec(),
        engine: Engine::Huffman,
        strip_punct: true,
    };
    let report = sweep_texts(&texts, &spec)?;
    report.write_csv(std::io::stdout().lock())?;
    Ok(())
}
