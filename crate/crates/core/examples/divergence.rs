//! Entropy, cross-entropy and KL divergence between the empirical symbol
//! distribution of a text and the model a coder holds partway through it.

use wacode::diagnostics::{cross_entropy, entropy, kl_divergence, trace_model, Distribution};
use wacode::{Engine, Variant};

fn main() -> Result<(), wacode::Error> {
    let text = b"ccabbbcaaa";
    let p = Distribution::of_text(text)?;
    println!("H(P) = {:.6} bits", entropy(&p));

    for v in ["forward", "weighted:pos"] {
        let trace = trace_model(text, &v.parse::<Variant>()?, Engine::Huffman)?;
        let q = Distribution::from_weights(trace[0].weights.iter().cloned())?;
        println!(
            "{v:<13} first model: H(P,Q) = {:.6}, D(P||Q) = {:.6}",
            cross_entropy(&p, &q)?,
            kl_divergence(&p, &q)?
        );
    }

    let uniform = Distribution::from_weights([(b'a', 1u32.into()), (b'b', 1u32.into()), (b'c', 1u32.into())])?;
    println!("uniform model: D(P||U) = {:.6}", kl_divergence(&p, &uniform)?);
    Ok(())
}
