//! Compares the two arithmetic coders with the ideal code length
//! `-sum log2 q_i` of each model on a pseudo-random skewed text.

use wacode::{compress, decompress, ideal_code_length, ArithMode, Engine, Variant};

fn main() -> Result<(), wacode::Error> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let text: Vec<u8> = (0..20_000)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            b'a' + (u * u * 20.0) as u8
        })
        .collect();

    println!("{:<22} {:>12} {:>8} {:>10}", "variant", "ideal", "exact", "streaming");
    for v in ["static", "backward", "forward", "weighted:pos", "weighted:poly:2", "weighted:exp:1.0004"] {
        let variant: Variant = v.parse()?;
        let ideal = ideal_code_length(&text, &variant)?.bits();
        let mut sizes = Vec::new();
        for mode in [ArithMode::Exact, ArithMode::Streaming] {
            let packed = compress(&text, Engine::Arithmetic(mode), &variant)?;
            assert_eq!(decompress(&packed)?, text);
            sizes.push(packed.payload.len());
        }
        println!("{v:<22} {ideal:>12.2} {:>8} {:>10}", sizes[0], sizes[1]);
    }
    Ok(())
}
