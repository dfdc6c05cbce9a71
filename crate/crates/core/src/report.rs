//! Parameter sweeps over a corpus and their reports.
//!
//! A sweep codes every corpus file under each grid value of one weight
//! function family, plus the static and backward baselines, and records bit
//! counts and ratios per file. The layout of the CSV and JSON output is
//! described in `docs/REPORT.md`.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Engine, Variant};
use crate::weight_model::WeightFunctionSpec;

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "WACODE_THREADS";

/// Weight function family swept by a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `g(i) = (n-i+1)^k`, grid over `k`.
    Poly,
    /// `g(i) = l^(n-i)`, grid over `l`.
    Exp,
    /// The interpolation family `g_j`, grid over `j`.
    Interp,
}

impl Family {
    /// The weight function for one grid value.
    pub fn spec(self, value: &str) -> Result<WeightFunctionSpec> {
        let prefix = match self {
            Family::Poly => "poly",
            Family::Exp => "exp",
            Family::Interp => "interp",
        };
        format!("{prefix}:{value}").parse()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Poly => "poly",
            Family::Exp => "exp",
            Family::Interp => "interp",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(Family::Poly),
            "exp" => Ok(Family::Exp),
            "interp" => Ok(Family::Interp),
            _ => Err(Error::InvalidWeightFunction(format!("unknown family {s:?}"))),
        }
    }
}

/// What to sweep.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub family: Family,
    /// Grid values as written on the command line, e.g. `"0.5"` or `"8"`.
    pub grid: Vec<String>,
    pub engine: Engine,
    /// Apply [`strip_punctuation`] to every file first.
    pub strip_punct: bool,
}

/// One coded file under one model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub file: String,
    /// `static`, `backward`, or the family name.
    pub kind: String,
    /// Grid value; empty for baselines.
    pub param: String,
    pub variant: String,
    /// Text length in bytes, after preprocessing.
    pub n: u64,
    pub payload_bits: u64,
    pub header_bits: u64,
    pub frame_bits: u64,
    /// `payload_bits / (8 n)`, rounded to 6 decimals.
    pub net_ratio: f64,
    /// `(payload_bits + header_bits) / (8 n)`, rounded to 6 decimals.
    pub combined_ratio: f64,
    /// Encoding time in milliseconds.
    pub runtime_ms: f64,
    /// Set when the file could not be coded; the counts are then zero.
    pub error: Option<String>,
}

/// A finished sweep.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine: String,
    pub family: Family,
    pub grid: Vec<String>,
    pub strip_punct: bool,
    pub rows: Vec<Row>,
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Keeps ASCII letters and digits, turns every run of ASCII whitespace into
/// one space, drops all other bytes and trims the ends.
pub fn strip_punctuation(text: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(text.len());
    let mut space = false;
    for &b in text {
        if b.is_ascii_alphanumeric() {
            if space && !out.is_empty() {
                out.push(b' ');
            }
            space = false;
            out.push(b);
        } else if b.is_ascii_whitespace() {
            space = true;
        }
    }
    out
}

/// Regular files under `path` (or `path` itself), sorted.
pub fn corpus_files(path: &Path) -> std::io::Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    let mut stack = vec![path.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.is_file() {
                files.push(p);
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

fn code_one(file: &str, text: &[u8], kind: &str, param: &str, variant: Variant, engine: Engine) -> Row {
    let n = text.len() as u64;
    let mut row = Row {
        file: file.to_string(),
        kind: kind.to_string(),
        param: param.to_string(),
        variant: variant.to_string(),
        n,
        payload_bits: 0,
        header_bits: 0,
        frame_bits: 0,
        net_ratio: 0.0,
        combined_ratio: 0.0,
        runtime_ms: 0.0,
        error: None,
    };
    let start = Instant::now();
    match crate::compress(text, engine, &variant) {
        Ok(enc) => {
            row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let sizes = enc.sizes();
            row.payload_bits = sizes.payload_bits;
            row.header_bits = sizes.header_bits;
            row.frame_bits = sizes.frame_bits;
            row.net_ratio = round6(sizes.payload_bits as f64 / (8 * n) as f64);
            row.combined_ratio = round6(sizes.combined_bits() as f64 / (8 * n) as f64);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs a sweep over in-memory texts, `(name, bytes)`.
pub fn sweep_texts(texts: &[(String, Vec<u8>)], spec: &SweepSpec) -> Result<Report> {
    // Reject a bad grid before doing any work.
    for v in &spec.grid {
        spec.family.spec(v)?;
    }
    let texts: Vec<(String, Vec<u8>)> = texts
        .iter()
        .map(|(name, t)| (name.clone(), if spec.strip_punct { strip_punctuation(t) } else { t.clone() }))
        .collect();
    let mut jobs: Vec<(usize, String, String, Option<Variant>)> = Vec::new();
    for idx in 0..texts.len() {
        jobs.push((idx, "static".into(), String::new(), Some(Variant::Static)));
        jobs.push((idx, "backward".into(), String::new(), Some(Variant::Backward)));
        for v in &spec.grid {
            let variant = spec.family.spec(v).ok().map(Variant::Weighted);
            jobs.push((idx, spec.family.to_string(), v.clone(), variant));
        }
    }
    let rows = jobs
        .into_par_iter()
        .map(|(idx, kind, param, variant)| {
            let (name, text) = &texts[idx];
            let variant = variant.expect("grid validated above");
            code_one(name, text, &kind, &param, variant, spec.engine)
        })
        .collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        engine: spec.engine.to_string(),
        family: spec.family,
        grid: spec.grid.clone(),
        strip_punct: spec.strip_punct,
        rows,
    })
}

/// Reads the corpus files and runs [`sweep_texts`] on at most `threads`
/// worker threads. Unreadable files produce error rows.
pub fn sweep(files: &[PathBuf], spec: &SweepSpec, threads: Option<usize>) -> Result<Report> {
    if files.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut texts = Vec::new();
    let mut failed = Vec::new();
    for f in files {
        let name = f.display().to_string();
        match std::fs::read(f) {
            Ok(t) => texts.push((name, t)),
            Err(e) => failed.push(error_row(name, format!("read failed: {e}"))),
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let mut report = pool.install(|| sweep_texts(&texts, spec))?;
    report.rows.extend(failed);
    Ok(report)
}

fn error_row(file: String, error: String) -> Row {
    Row {
        file,
        kind: String::new(),
        param: String::new(),
        variant: String::new(),
        n: 0,
        payload_bits: 0,
        header_bits: 0,
        frame_bits: 0,
        net_ratio: 0.0,
        combined_ratio: 0.0,
        runtime_ms: 0.0,
        error: Some(error),
    }
}

impl Report {
    pub fn write_json<W: Write>(&self, out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(std::io::Error::other)
    }

    /// One line per row; ratios with 6 decimals, runtime with 3.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "schema_version",
            "file",
            "kind",
            "param",
            "variant",
            "engine",
            "n",
            "payload_bits",
            "header_bits",
            "frame_bits",
            "net_ratio",
            "combined_ratio",
            "runtime_ms",
            "error",
        ])?;
        for r in &self.rows {
            w.write_record([
                SCHEMA_VERSION.to_string(),
                r.file.clone(),
                r.kind.clone(),
                r.param.clone(),
                r.variant.clone(),
                self.engine.clone(),
                r.n.to_string(),
                r.payload_bits.to_string(),
                r.header_bits.to_string(),
                r.frame_bits.to_string(),
                format!("{:.6}", r.net_ratio),
                format!("{:.6}", r.combined_ratio),
                format!("{:.3}", r.runtime_ms),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()
    }

    /// Rows of one file and kind, in grid order.
    pub fn rows_for<'a>(&'a self, file: &'a str, kind: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.file == file && r.kind == kind)
    }
}
