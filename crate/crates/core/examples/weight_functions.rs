//! Evaluates the weight-function families on a short text and prints the
//! initial forward weights each one yields.

use num_traits::ToPrimitive;
use wacode::{eval_g, WeightFunction, WeightFunctionSpec, WeightTable};

fn main() -> Result<(), wacode::Error> {
    let text = b"abracadabra";
    let n = text.len() as u64;
    let specs = ["const", "pos", "poly:0.5", "poly:2", "exp:1.5", "exp2", "interp:4"];

    println!("g(i) for n = {n}");
    for s in specs {
        let spec: WeightFunctionSpec = s.parse()?;
        let row: Vec<String> =
            (1..=n).map(|i| eval_g(&spec, i, n).map(|v| format!("{:.3}", ratio(&v)))).collect::<Result<_, _>>()?;
        println!("{s:<9} {}", row.join(" "));
    }

    println!("\ninitial weights W(g, s, 1, n)");
    for s in specs {
        let g = WeightFunction::new(&s.parse()?, n)?;
        let table = WeightTable::forward(text, &g)?;
        let scale = f64::powi(2.0, g.unit_bits() as i32);
        let cells: Vec<String> =
            table.entries().map(|(sym, w)| format!("{}:{:.3}", sym as char, to_f64(w) / scale)).collect();
        println!("{s:<9} {}", cells.join("  "));
    }
    Ok(())
}

fn ratio(v: &num_rational::BigRational) -> f64 {
    v.to_f64().expect("finite")
}

fn to_f64(v: &num_bigint::BigUint) -> f64 {
    v.to_f64().expect("finite")
}
