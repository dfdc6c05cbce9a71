//! Entropy, divergence and per-position traces of a model run.
//!
//! Logarithms of rationals are taken as differences of fixed-point base-2
//! logarithms of numerator and denominator (64 fractional bits each), so a
//! term carries an absolute error of about `2^-63` before it is weighted by
//! its probability. Exact comparisons never go through these functions; see
//! [`probability_product`](crate::probability_product).

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::huffman::HuffmanTree;
use crate::model::{Engine, Trajectory, Variant};
use crate::numeric::{fixed_to_f64, log2_fixed, with_weight_class, FixedLog, WeightValue};

/// A probability distribution over bytes with exact rational masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    /// Positive masses, ascending by symbol.
    masses: Vec<(u8, BigRational)>,
}

impl Distribution {
    /// Checks that every mass is nonnegative and that they sum to one.
    /// Zero masses are dropped.
    pub fn new<I: IntoIterator<Item = (u8, BigRational)>>(masses: I) -> Result<Self> {
        let mut seen = [false; 256];
        let mut kept = Vec::new();
        let mut sum = BigRational::zero();
        for (s, p) in masses {
            if std::mem::replace(&mut seen[usize::from(s)], true) {
                return Err(Error::InvalidDistribution(format!("symbol {s} listed twice")));
            }
            if p.is_negative() {
                return Err(Error::InvalidDistribution(format!("negative mass for symbol {s}")));
            }
            sum += &p;
            if !p.is_zero() {
                kept.push((s, p));
            }
        }
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!("masses sum to {sum}")));
        }
        kept.sort_by_key(|&(s, _)| s);
        Ok(Distribution { masses: kept })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights<I: IntoIterator<Item = (u8, BigUint)>>(weights: I) -> Result<Self> {
        let weights: Vec<(u8, BigUint)> = weights.into_iter().collect();
        let total: BigUint = weights.iter().map(|(_, w)| w).sum();
        if Zero::is_zero(&total) {
            return Err(Error::InvalidDistribution("all weights are zero".into()));
        }
        let total = BigInt::from(total);
        Self::new(weights.into_iter().map(|(s, w)| (s, BigRational::new(BigInt::from(w), total.clone()))))
    }

    /// Empirical distribution of the bytes of `text`.
    pub fn of_text(text: &[u8]) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut counts = [0u64; 256];
        for &b in text {
            counts[usize::from(b)] += 1;
        }
        Self::from_weights((0..=255u8).map(|s| (s, BigUint::from(counts[usize::from(s)]))))
    }

    pub fn probability(&self, symbol: u8) -> BigRational {
        self.masses
            .binary_search_by_key(&symbol, |(s, _)| *s)
            .map_or_else(|_| BigRational::zero(), |i| self.masses[i].1.clone())
    }

    /// `(symbol, mass)` for every symbol of positive mass.
    pub fn iter(&self) -> impl Iterator<Item = (u8, &BigRational)> + '_ {
        self.masses.iter().map(|(s, p)| (*s, p))
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }
}

fn log2_ratio(p: &BigRational) -> FixedLog {
    let num = p.numer().magnitude();
    let den = p.denom().magnitude();
    log2_fixed(num) - log2_fixed(den)
}

fn to_f64(p: &BigRational) -> f64 {
    p.to_f64().unwrap_or(0.0)
}

/// `-sum p log2 p`, in bits.
pub fn entropy(p: &Distribution) -> f64 {
    -p.iter().map(|(_, m)| to_f64(m) * fixed_to_f64(log2_ratio(m))).sum::<f64>()
}

/// `-sum p log2 q`, in bits.
pub fn cross_entropy(p: &Distribution, q: &Distribution) -> Result<f64> {
    let mut sum = 0.0;
    for (s, m) in p.iter() {
        let qs = q.probability(s);
        if qs.is_zero() {
            return Err(Error::SupportMismatch(s));
        }
        sum -= to_f64(m) * fixed_to_f64(log2_ratio(&qs));
    }
    Ok(sum)
}

/// `sum p log2(p / q)`, in bits. Exactly zero when `p == q`; rounding can
/// only push a tiny positive value down to zero, never below.
#[doc(alias = "kl")]
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    let mut sum = 0.0;
    for (s, m) in p.iter() {
        let qs = q.probability(s);
        if qs.is_zero() {
            return Err(Error::SupportMismatch(s));
        }
        sum += to_f64(m) * fixed_to_f64(log2_ratio(m) - log2_ratio(&qs));
    }
    if p == q {
        return Ok(0.0);
    }
    Ok(sum.max(0.0))
}

/// The model state at one position of a run, just before the position's
/// symbol is coded.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    /// 1-based position.
    pub position: u64,
    pub symbol: u8,
    /// `(symbol, weight)` for every model member, ascending. Weights are in
    /// units of `2^-unit_bits`.
    pub weights: Vec<(u8, BigUint)>,
    pub unit_bits: u32,
    /// Probability of `symbol`; `None` while the model total is zero.
    pub probability: Option<BigRational>,
    /// Bits spent on the position: the Huffman codeword length, or
    /// `-log2 q` for arithmetic coding. Zero when only one member remains.
    pub bits: f64,
}

impl TraceRecord {
    /// Weight of `symbol`, zero for non-members.
    pub fn weight(&self, symbol: u8) -> BigUint {
        self.weights.iter().find(|(s, _)| *s == symbol).map_or_else(BigUint::default, |(_, w)| w.clone())
    }

    pub fn total(&self) -> BigUint {
        self.weights.iter().map(|(_, w)| w).sum()
    }
}

/// Replays the model of a coding run and records it at every position.
#[doc(alias = "trace")]
pub fn trace_model(text: &[u8], variant: &Variant, engine: Engine) -> Result<Vec<TraceRecord>> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = text.len() as u64;
    let unit_bits = variant.unit_bits(n)?;
    let class = variant.weight_class(n)?;
    with_weight_class!(class, W => {
        let mut traj = Trajectory::<W>::for_text(text, variant, engine)?;
        let mut tree = match engine {
            Engine::Huffman => Some(HuffmanTree::build(traj.table())?),
            Engine::Arithmetic(_) => None,
        };
        let mut records = Vec::with_capacity(text.len());
        for &s in text {
            let table = traj.table();
            let weights: Vec<(u8, BigUint)> = table.entries().map(|(t, w)| (t, w.to_biguint())).collect();
            let probability = (!WeightValue::is_zero(table.total())).then(|| {
                BigRational::new(BigInt::from(table.weight(s).to_biguint()), BigInt::from(table.total().to_biguint()))
            });
            let bits = match (&tree, traj.needs_bits()) {
                (_, false) => 0.0,
                (Some(t), true) => f64::from(t.depth(s)?),
                (None, true) => {
                    let q = probability.as_ref().ok_or(Error::EmptyModel)?;
                    -fixed_to_f64(log2_ratio(q))
                }
            };
            records.push(TraceRecord { position: traj.position(), symbol: s, weights, unit_bits, probability, bits });
            let update = traj.advance(s)?;
            if let Some(t) = tree.as_mut() {
                t.apply(s, &update)?;
            }
        }
        Ok(records)
    })
}

fn symbol_label(s: u8) -> String {
    if s.is_ascii_graphic() {
        (s as char).to_string()
    } else {
        format!("\\x{s:02x}")
    }
}

/// Writes a trace as CSV with columns `position,symbol,q,bits,total,weights`.
///
/// `symbol` is the printable character or a `\xHH` escape, `q` the symbol's
/// probability to 9 decimals (empty while the total is zero), and `weights`
/// a space-separated `symbol:weight` list in weight units.
pub fn write_trace_csv<Wr: Write>(records: &[TraceRecord], out: Wr) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["position", "symbol", "q", "bits", "total", "weights"])?;
    for r in records {
        let q = r.probability.as_ref().map_or_else(String::new, |q| format!("{:.9}", to_f64(q)));
        let weights: Vec<String> = r.weights.iter().map(|(s, x)| format!("{}:{x}", symbol_label(*s))).collect();
        w.write_record([
            r.position.to_string(),
            symbol_label(r.symbol),
            q,
            format!("{:.6}", r.bits),
            r.total().to_string(),
            weights.join(" "),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(ps: &[(u8, i64, i64)]) -> Distribution {
        Distribution::new(ps.iter().map(|&(s, a, b)| (s, BigRational::new(a.into(), b.into())))).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&dist(&[(0, 1, 2), (1, 1, 2)])) - 1.0).abs() < 1e-15);
        assert_eq!(entropy(&dist(&[(7, 1, 1)])), 0.0);
        let h = entropy(&dist(&[(b'a', 4, 10), (b'b', 3, 10), (b'c', 3, 10)]));
        let direct = -(0.4f64 * 0.4f64.log2() + 2.0 * 0.3 * 0.3f64.log2());
        assert!((h - direct).abs() < 1e-12);
        assert!((h - 1.5710).abs() < 5e-5);
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[(0, 1, 2), (1, 1, 2)]);
        let q = dist(&[(0, 1, 4), (1, 3, 4)]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let d = kl_divergence(&p, &q).unwrap();
        // 1/2 log2(2) + 1/2 log2(2/3)
        assert!((d - (2.0 - 3f64.log2()) / 2.0).abs() < 1e-12);
        let ce = cross_entropy(&p, &q).unwrap();
        assert!((ce - entropy(&p) - d).abs() < 1e-12);
        let r = dist(&[(0, 1, 1)]);
        assert_eq!(kl_divergence(&p, &r), Err(Error::SupportMismatch(1)));
    }

    #[test]
    fn invalid_distributions() {
        let half = BigRational::new(1.into(), 2.into());
        assert!(Distribution::new([(0, half.clone())]).is_err());
        assert!(Distribution::new([(0, half.clone()), (0, half.clone())]).is_err());
        assert!(
            Distribution::new([(0, -half.clone()), (1, half.clone() * BigRational::from_integer(3.into()))]).is_err()
        );
    }

    #[test]
    fn forward_trace_starts_at_counts() {
        let t = trace_model(b"ccabbbcaaa", &Variant::Forward, Engine::Huffman).unwrap();
        let first: Vec<u64> = b"abc".iter().map(|&s| t[0].weight(s).try_into().unwrap()).collect();
        assert_eq!(first, vec![4, 3, 3]);
        assert_eq!(t.len(), 10);
    }

    #[test]
    fn singleton_trace() {
        let t = trace_model(b"z", &Variant::positional(), Engine::Arithmetic(crate::ArithMode::Exact)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].probability, Some(BigRational::one()));
        assert_eq!(t[0].bits, 0.0);
    }

    #[test]
    fn csv_layout() {
        let t = trace_model(b"ab", &Variant::Static, Engine::Huffman).unwrap();
        let mut out = Vec::new();
        write_trace_csv(&t, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s.lines().next().unwrap(), "position,symbol,q,bits,total,weights");
        assert_eq!(s.lines().nth(1).unwrap(), "1,a,0.500000000,1.000000,2,a:1 b:1");
    }
}
