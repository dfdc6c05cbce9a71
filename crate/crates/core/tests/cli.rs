use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn wacode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wacode")).args(args).output().expect("run wacode")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn setup() -> (TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("example.txt");
    fs::write(&input, "ccabbbcaaa").unwrap();
    (dir, input)
}

fn compress(input: &Path, output: &Path, flags: &[&str]) -> Value {
    let mut args = vec!["compress", path(input), path(output)];
    args.extend_from_slice(flags);
    let out = wacode(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn compress_reports_net_bits() {
    let (dir, input) = setup();
    let packed = dir.path().join("out.wac");
    let stats = compress(&input, &packed, &["--variant", "weighted", "--g", "pos"]);
    assert_eq!(stats["net_bits"], 10);
    let stats = compress(&input, &packed, &["--variant", "backward"]);
    assert_eq!(stats["net_bits"], 19);
    assert_eq!(stats["header_bits"], 0);
    let stats = compress(&input, &packed, &["--variant", "forward"]);
    assert_eq!(stats["net_bits"], 12);
}

#[test]
fn decompress_restores_input() {
    let (dir, input) = setup();
    let packed = dir.path().join("out.wac");
    let restored = dir.path().join("back.txt");
    let mut noise: Vec<u8> = (0..5000u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
    noise.extend_from_slice(b"tail");
    let random = dir.path().join("random.bin");
    fs::write(&random, &noise).unwrap();
    for file in [&input, &random] {
        for flags in [
            &["--variant", "weighted", "--g", "poly:8"][..],
            &["--engine", "arith", "--variant", "backward"],
            &["--engine", "arith", "--mode", "exact", "--g", "exp:1.0004"],
            &["--variant", "static"],
        ] {
            compress(file, &packed, flags);
            let out = wacode(&["decompress", path(&packed), path(&restored)]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            assert_eq!(fs::read(&restored).unwrap(), fs::read(file).unwrap());
        }
    }
}

#[test]
fn exit_codes() {
    let (dir, input) = setup();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let packed = dir.path().join("out.wac");
    let out = wacode(&["compress", path(&empty), path(&packed)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty input"));

    let out = wacode(&["compress", path(&input), path(&packed), "--variant", "forward", "--g", "pos"]);
    assert_eq!(out.status.code(), Some(2));
    let out = wacode(&["compress", path(&input), path(&packed), "--g", "poly:-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = wacode(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    compress(&input, &packed, &[]);
    let bytes = fs::read(&packed).unwrap();
    let cut = dir.path().join("cut.wac");
    fs::write(&cut, &bytes[..bytes.len() - 1]).unwrap();
    let out = wacode(&["decompress", path(&cut), path(&dir.path().join("x"))]);
    assert_eq!(out.status.code(), Some(3));
    let out = wacode(&["decompress", path(&dir.path().join("missing")), path(&dir.path().join("x"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn inspect_prints_the_positional_table() {
    let (_dir, input) = setup();
    let out = wacode(&["inspect", path(&input), "--g", "pos"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "position,symbol,q,bits,total,weights");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("1,c,0.418181818,1.000000,55,a:14 b:18 c:23"), "{}", lines[1]);
    assert!(lines[8].ends_with("a:6"), "{}", lines[8]);

    let out = wacode(&["inspect", path(&input), "--variant", "forward"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with("a:4 b:3 c:3"));
}

#[test]
fn sweep_writes_reports() {
    let (dir, input) = setup();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::copy(&input, corpus.join("example.txt")).unwrap();
    fs::write(corpus.join("other.txt"), "Hello, world! Hello again, world.").unwrap();

    let json = dir.path().join("report.json");
    let out = wacode(&[
        "sweep",
        path(&corpus),
        "--family",
        "poly",
        "--grid",
        "0,1",
        "--engine",
        "arith",
        "--mode",
        "exact",
        "--report",
        path(&json),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let rows = report["rows"].as_array().unwrap();
    // Two baselines and two grid points per file.
    assert_eq!(rows.len(), 8);
    for file in ["example.txt", "other.txt"] {
        let ratio = |param: &str| {
            rows.iter().find(|r| r["file"].as_str().unwrap().ends_with(file) && r["param"] == param).unwrap()
                ["net_ratio"]
                .as_f64()
                .unwrap()
        };
        assert!(ratio("1") <= ratio("0"), "{file}");
    }

    let csv = dir.path().join("report.csv");
    let out = wacode(&[
        "sweep",
        path(&input),
        "--family",
        "interp",
        "--grid",
        "1,4,7,10",
        "--strip-punct",
        "--report",
        path(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("schema_version,file,kind,param,variant,engine,n,"));
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn sweeps_are_deterministic() {
    let (dir, input) = setup();
    let run = |name: &str, threads: &str| {
        let report = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_wacode"))
            .env("WACODE_THREADS", threads)
            .args(["sweep", path(&input), "--family", "exp", "--grid", "1.0004,2", "--report", path(&report)])
            .output()
            .unwrap();
        assert!(out.status.success());
        let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| (r["param"].clone(), r["payload_bits"].clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(run("a.json", "1"), run("b.json", "3"));
}
