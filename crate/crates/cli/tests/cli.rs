use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn opfimb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opfimb")).args(args).output().expect("binary runs")
}

/// 1069 rows, 57 of them `fault`, with one missing cell.
fn dga_like(dir: &Path) -> PathBuf {
    let path = dir.join("dga.csv");
    let mut text = String::from("h2,ch4,c2h2,label\n");
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for i in 0..1069 {
        let fault = i % 19 == 0 && i / 19 < 57;
        let shift = if fault { 1.5 } else { 0.0 };
        let a = if i == 3 { String::new() } else { format!("{:.3}", shift + next()) };
        text.push_str(&format!(
            "{a},{:.3},{:.3},{}\n",
            shift + next(),
            next(),
            if fault { "fault" } else { "normal" }
        ));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn counts(csv: &Path) -> (usize, usize, usize) {
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let label = header.iter().position(|h| *h == "label").unwrap();
    let flag = header.iter().position(|h| *h == "synthetic");
    let (mut normal, mut fault, mut synthetic) = (0, 0, 0);
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        match cells[label] {
            "fault" => fault += 1,
            _ => normal += 1,
        }
        if flag.is_some_and(|f| cells[f] == "true") {
            synthetic += 1;
        }
    }
    (normal, fault, synthetic)
}

fn resample(dir: &TempDir, input: &Path, method: &str, seed: &str) -> (Output, PathBuf) {
    let out = dir.path().join(format!("{method}-{seed}.csv"));
    let o = opfimb(&[
        "resample",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--method",
        method,
        "--seed",
        seed,
    ]);
    (o, out)
}

#[test]
fn opf_us_balances_to_minority_size() {
    let dir = TempDir::new().unwrap();
    let input = dga_like(dir.path());
    let (o, out) = resample(&dir, &input, "opf-us", "3");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(counts(&out), (57, 57, 0));
    let line = String::from_utf8(o.stdout).unwrap();
    assert!(line.contains("fault=57 normal=1012 -> fault=57 normal=57"), "{line}");
}

#[test]
fn original_keeps_feature_values() {
    let dir = TempDir::new().unwrap();
    let input = dga_like(dir.path());
    let (o, out) = resample(&dir, &input, "original", "1");
    assert!(o.status.success());
    let parse = |p: &Path| -> Vec<Vec<String>> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    };
    let (a, b) = (parse(&input), parse(&out));
    assert_eq!(a.len(), b.len());
    assert_eq!(b[0].len(), 4, "no synthetic column");
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        for j in 0..3 {
            if x[j].is_empty() {
                continue; // imputed
            }
            let (u, v): (f64, f64) = (x[j].parse().unwrap(), y[j].parse().unwrap());
            assert_eq!(u.to_bits(), v.to_bits(), "row {i}");
        }
        assert_eq!(x[3], y[3]);
    }
}

#[test]
fn oversampling_marks_synthetic_rows_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = dga_like(dir.path());
    let (o, first) = resample(&dir, &input, "o2pf", "9");
    assert!(o.status.success());
    assert_eq!(counts(&first), (1012, 1012, 955));
    let copy = dir.path().join("copy.csv");
    std::fs::copy(&first, &copy).unwrap();
    let (_, again) = resample(&dir, &input, "o2pf", "9");
    assert_eq!(std::fs::read(copy).unwrap(), std::fs::read(again).unwrap());
    let (_, other) = resample(&dir, &input, "o2pf", "10");
    assert_ne!(std::fs::read(&first).unwrap(), std::fs::read(other).unwrap());
}

#[test]
fn hybrids_and_smote_balance() {
    let dir = TempDir::new().unwrap();
    let input = dga_like(dir.path());
    for method in ["us1-o2pf", "us3-o2pf", "smote", "o2pf-wi"] {
        let (o, out) = resample(&dir, &input, method, "4");
        assert!(o.status.success(), "{method}");
        let (a, b, _) = counts(&out);
        assert_eq!(a, b, "{method}");
    }
}

#[test]
fn seed_is_required() {
    let dir = TempDir::new().unwrap();
    let input = dga_like(dir.path());
    let out = dir.path().join("x.csv");
    let o = opfimb(&[
        "resample",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--method",
        "o2pf",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["evaluate", "--input", "a.csv", "--methods", "o2pf,nope"][..],
        &["resample", "--input", "a.csv", "--output", "b.csv", "--method", "o3pf", "--seed", "1"],
        &["resample", "--input", "a.csv", "--output", "a.csv", "--method", "o2pf", "--seed", "1"],
        &["evaluate", "--input", "a.csv", "--bogus-flag"],
    ] {
        let o = opfimb(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_with_one_and_leave_no_file() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("one_class.csv");
    std::fs::write(&input, "a,label\n1,x\n2,x\n3,x\n").unwrap();
    let (o, out) = resample(&dir, &input, "o2pf", "1");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 distinct values"));
    assert!(!out.exists());
    let missing = dir.path().join("missing.csv");
    let (o, _) = resample(&dir, &missing, "o2pf", "1");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn evaluate_smoke_and_report_agree_with_table() {
    let dir = TempDir::new().unwrap();
    let input = dga_like(dir.path());
    let prefix = dir.path().join("rep");
    let o = opfimb(&[
        "evaluate",
        "--input",
        input.to_str().unwrap(),
        "--runs",
        "1",
        "--methods",
        "original",
        "--report",
        prefix.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let report = opf_imbalance::evaluation::ExperimentReport::from_toml(
        &std::fs::read_to_string(dir.path().join("rep.toml")).unwrap(),
    )
    .unwrap();
    assert_eq!(report.runs.len(), 1);
    assert!(report.config.flags.iter().any(|f| f == "--runs=1"));
    let s = &report.summaries[0];
    let row = stdout.lines().find(|l| l.starts_with("original")).unwrap();
    assert!(row.contains(&format!("{:.4}", s.mean)), "{row}");
    let csv = std::fs::read_to_string(dir.path().join("rep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("method,run,seed,f1"));
}
