//! Traces the positional model on `ccabbbcaaa`: the weight of each symbol
//! before every position, and the codeword the dynamic Huffman coder sends.

use wacode::diagnostics::trace_model;
use wacode::{compress, Engine, Variant};

fn main() -> Result<(), wacode::Error> {
    let text = b"ccabbbcaaa";
    let variant = Variant::positional();
    let trace = trace_model(text, &variant, Engine::Huffman)?;

    print!("{:>6}", "i");
    trace.iter().for_each(|r| print!("{:>4}", r.position));
    print!("\n{:>6}", "T");
    trace.iter().for_each(|r| print!("{:>4}", r.symbol as char));
    for s in *b"abc" {
        print!("\n{:>6}", format!("p_{}", s as char));
        trace.iter().for_each(|r| print!("{:>4}", r.weight(s)));
    }
    print!("\n{:>6}", "bits");
    trace.iter().for_each(|r| print!("{:>4}", r.bits));
    println!();

    for v in ["weighted:pos", "backward", "forward"] {
        let packed = compress(text, Engine::Huffman, &v.parse()?)?;
        let bits: String = packed.payload.iter().map(|b| if b { '1' } else { '0' }).collect();
        println!("{v:<14} {:>2} bits  {bits}", packed.payload.len());
    }
    Ok(())
}
