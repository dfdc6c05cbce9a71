#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use wacode::diagnostics::trace_model;
use wacode::oracle::{oracle_arith_length, oracle_huffman_cost, oracle_model, GValues};
use wacode::WeightFunctionSpec;
use wacode::{ideal_code_length, probability_product, ArithMode, Engine, HuffmanTree, Trajectory, Variant};

/// The variants of the round-trip grid.
pub const ROUNDTRIP_VARIANTS: [&str; 8] = [
    "static",
    "backward",
    "forward",
    "weighted:pos",
    "weighted:poly:2",
    "weighted:poly:8",
    "weighted:exp:1.0004",
    "weighted:exp2",
];

/// Every weight-function family, for oracle comparisons.
pub const FAMILIES: [&str; 13] = [
    "static",
    "backward",
    "forward",
    "weighted:const",
    "weighted:pos",
    "weighted:poly:2",
    "weighted:poly:0.5",
    "weighted:poly:1.5",
    "weighted:poly:8",
    "weighted:exp:1.0004",
    "weighted:exp:1.5",
    "weighted:exp:2",
    "weighted:exp2",
];

pub fn variants(names: &[&str]) -> Vec<Variant> {
    names.iter().map(|s| s.parse().unwrap()).collect()
}

pub fn engines() -> [Engine; 2] {
    [Engine::Huffman, Engine::Arithmetic(ArithMode::Streaming)]
}

fn log_uniform<R: Rng>(rng: &mut R, max: usize) -> usize {
    let x = (max as f64).powf(rng.gen_range(0.0..1.0));
    (x as usize).clamp(1, max)
}

/// Length log-uniform in `1..=max_n`, alphabet size log-uniform in
/// `1..=max_m` drawn from random byte values. Half the texts are uniform over
/// their alphabet, the other half strongly skewed.
pub fn random_text<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> Vec<u8> {
    let n = log_uniform(rng, max_n);
    let m = log_uniform(rng, max_m.min(256));
    let mut bytes: Vec<u8> = (0..=255).collect();
    bytes.shuffle(rng);
    let alphabet = &bytes[..m];
    let skewed = rng.gen_bool(0.5);
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(0.0..1.0);
            let k = if skewed { (u * u * u * m as f64) as usize } else { (u * m as f64) as usize };
            alphabet[k.min(m - 1)]
        })
        .collect()
}

/// Like [`random_text`] but with at least two distinct symbols.
pub fn random_text_multi<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> Vec<u8> {
    loop {
        let t = random_text(rng, max_n.max(2), max_m.max(2));
        if distinct(&t) >= 2 {
            return t;
        }
    }
}

pub fn distinct(text: &[u8]) -> usize {
    let mut seen = [false; 256];
    text.iter().for_each(|&s| seen[usize::from(s)] = true);
    seen.iter().filter(|&&b| b).count()
}

/// Weight functions whose codec values are approximations of the exact ones.
fn approximate(variant: &Variant) -> bool {
    matches!(variant, Variant::Weighted(WeightFunctionSpec::ExponentialBase { base }) if *base.denom() != 1)
}

fn scaled(map: &BTreeMap<u8, BigUint>, factor: &BigUint, keep_zero: bool) -> BTreeMap<u8, BigUint> {
    map.iter().filter(|(_, w)| keep_zero || !w.is_zero()).map(|(s, w)| (*s, w * factor)).collect()
}

/// Whether two weight maps share a support and agree within relative
/// `2^-bits` on every symbol.
fn close(a: &BTreeMap<u8, BigUint>, b: &BTreeMap<u8, BigUint>, bits: usize) -> bool {
    a.keys().eq(b.keys())
        && a.iter().all(|(s, x)| {
            let y = &b[s];
            let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
            ((hi - lo) << bits) <= *hi
        })
}

/// Compares the engines with the brute-force oracle on one instance: model
/// weights at every position (Huffman and arithmetic models), the weighted
/// cost of the incrementally maintained Huffman tree, and the exact
/// probability of the text under the arithmetic model.
pub fn check_oracle_equivalence(text: &[u8], variant: &Variant) -> Result<(), String> {
    let n = text.len() as u64;
    let approx = approximate(variant);
    let backward = matches!(variant, Variant::Backward);
    let unit_bits = variant.unit_bits(n).map_err(|e| e.to_string())?;
    let g = match variant {
        Variant::Weighted(spec) => Some(GValues::new(spec, n)),
        _ => None,
    };
    let den = g.as_ref().map_or_else(|| BigUint::from(1u32), |g| g.den.clone());
    let unit = BigUint::from(1u32) << unit_bits as usize;

    let oracle_at = |i: u64, smoothing: u64| match &g {
        Some(g) => wacode::oracle::oracle_weight_sums(text, g, i),
        None => oracle_model(text, variant, i, smoothing),
    };

    // Weights, both engines' models.
    for (engine, smoothing) in [(Engine::Huffman, 0), (Engine::Arithmetic(ArithMode::Exact), 1)] {
        let trace = trace_model(text, variant, engine).map_err(|e| e.to_string())?;
        for r in &trace {
            let ours: BTreeMap<u8, BigUint> = r.weights.iter().cloned().collect();
            let theirs = oracle_at(r.position, smoothing);
            let (ours_s, theirs_s) = (scaled(&ours, &den, backward), scaled(&theirs, &unit, backward));
            let ok = if approx { close(&ours_s, &theirs_s, 60) } else { ours_s == theirs_s };
            if !ok {
                return Err(format!("{engine} weights differ at position {}: {ours:?} vs {theirs:?}", r.position));
            }
        }
    }

    // Huffman cost of the incremental tree.
    let mut traj = Trajectory::<BigUint>::for_text(text, variant, Engine::Huffman).map_err(|e| e.to_string())?;
    let mut tree = HuffmanTree::build(traj.table()).map_err(|e| e.to_string())?;
    for &s in text {
        let i = traj.position();
        if traj.needs_bits() {
            tree.check_invariants().map_err(|e| format!("position {i}: {e}"))?;
            let cost = tree.weighted_cost();
            let ok = if approx {
                let own: Vec<BigUint> = tree.leaf_weights().into_iter().map(|(_, w)| w).collect();
                cost == oracle_huffman_cost(&own)
            } else {
                let weights: Vec<BigUint> =
                    oracle_at(i, 0).into_values().filter(|w| backward || !w.is_zero()).collect();
                &cost * &den == oracle_huffman_cost(&weights) * &unit
            };
            if !ok {
                return Err(format!("Huffman cost differs at position {i}: {cost}"));
            }
        }
        let update = traj.advance(s).map_err(|e| e.to_string())?;
        tree.apply(s, &update).map_err(|e| e.to_string())?;
    }

    // Arithmetic probability and ideal length.
    let (num, pden, len) = oracle_arith_length(text, variant).map_err(|e| e.to_string())?;
    let product = probability_product(text, variant).map_err(|e| e.to_string())?;
    let ideal = ideal_code_length(text, variant).map_err(|e| e.to_string())?.bits();
    if approx {
        if (product.code_length().bits() - len).abs() > 1e-6 {
            return Err(format!("code length {} vs oracle {len}", product.code_length().bits()));
        }
    } else if &product.num * &pden != &num * &product.den {
        return Err("probability product differs from the oracle".into());
    }
    if (ideal - len).abs() > 1e-6 * len.max(1.0) {
        return Err(format!("ideal length {ideal} vs oracle {len}"));
    }
    Ok(())
}
