//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod oracles;
mod reproduction;
mod shapes;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use opf_imbalance::clustering::{best_k, build_knn_graph};
use opf_imbalance::evaluation::{f1_score, wilcoxon_signed_rank};
use opf_imbalance::{supervised, Dataset, Euclidean, RandomSource, Rng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 supervised OPF matches minimax oracle", supervised_oracle, Duration::from_secs(10)),
        ("2 clustering density and two-blob separation", clustering_oracle, Duration::from_secs(30)),
        ("3 balance on 18 dataset shapes", shapes::balance, Duration::from_secs(300)),
        ("4 quantitative reproduction", reproduction::check, Duration::from_secs(1200)),
        ("5 Wilcoxon and F1 against oracles", statistics, Duration::from_secs(60)),
        ("6 CLI output is byte-identical across invocations", determinism, Duration::from_secs(300)),
        ("7 training time scales quadratically", scaling, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({:.1}s): {detail}", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.1}s): {detail}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn supervised_oracle() -> Outcome {
    let mut rng = Rng::new(1);
    for case in 0..100 {
        let n = 2 + rng.below(11);
        let d = 1 + rng.below(3);
        let ds = oracles::random_labelled(&mut rng, n, d);
        let model = supervised::fit(&ds, &Euclidean).map_err(|e| e.to_string())?;
        let closure = oracles::minimax_closure(&ds);
        for (u, &cost) in model.cost.iter().enumerate() {
            let want = model.prototypes.iter().map(|&p| closure[p][u]).fold(f64::INFINITY, f64::min);
            if cost != want {
                return Err(format!("case {case} node {u}: cost {cost} vs oracle {want}"));
            }
        }
    }
    Ok("100 datasets, exact cost equality".into())
}

fn clustering_oracle() -> Outcome {
    let mut rng = Rng::new(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = 3 + rng.below(40);
        let d = 1 + rng.below(4);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.standard_normal()).collect()).collect();
        let ds = Dataset::from_rows(&rows, vec![1; n]).map_err(|e| e.to_string())?;
        let k = 1 + rng.below(n - 1);
        let g = build_knn_graph(&ds, k, &Euclidean).map_err(|e| e.to_string())?;
        for (q, want) in oracles::literal_density(&ds, k).into_iter().enumerate() {
            worst = worst.max((g.density[q] - want).abs() / want);
        }
    }
    if worst > 1e-12 {
        return Err(format!("density relative error {worst:e} exceeds 1e-12"));
    }
    for seed in 0..20 {
        let ds = oracles::two_blobs(seed);
        let best = best_k(&ds, 6, &Euclidean).map_err(|e| e.to_string())?;
        let label = &best.forest.label;
        let split = label[..5].iter().all(|&l| l == label[0])
            && label[5..].iter().all(|&l| l == label[5])
            && label[0] != label[5];
        if best.forest.n_clusters() != 2 || !split {
            return Err(format!("seed {seed}: {} clusters at k* = {}", best.forest.n_clusters(), best.k));
        }
    }
    Ok(format!("max density relative error {worst:.1e}; 20/20 two-blob seeds give 2 clusters"))
}

fn statistics() -> Outcome {
    let mut rng = Rng::new(5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = 1 + rng.below(10);
        let coarse = rng.below(2) == 0;
        let draw = |rng: &mut Rng| {
            let v = rng.next_f64();
            if coarse {
                (v * 6.0).floor() / 6.0
            } else {
                v
            }
        };
        let a: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let got = wilcoxon_signed_rank(&a, &b, 0.05).map_err(|e| e.to_string())?.p_value;
        worst = worst.max((got - oracles::wilcoxon_enumerated(&a, &b)).abs());
    }
    if worst > 1e-12 {
        return Err(format!("Wilcoxon p differs from enumeration by {worst:e}"));
    }
    for case in 0..50 {
        let (tp, fp, fn_, tn) = (rng.below(15), rng.below(15), rng.below(15), 1 + rng.below(15));
        let (truth, pred) = oracles::confusion_vectors(tp, fp, fn_, tn);
        let got = f1_score(&truth, &pred, 1).map_err(|e| e.to_string())?;
        let want = oracles::f1_by_hand(tp, fp, fn_);
        if (got - want).abs() > 1e-12 {
            return Err(format!("confusion case {case}: F1 {got} vs {want}"));
        }
    }
    Ok(format!("200 Wilcoxon cases (max |dp| {worst:.1e}), 50 F1 cases"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_opfimb");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("input.csv");
    shapes::write_shape_csv(&input, 1069, 57, 5, 11).map_err(|e| e.to_string())?;
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        if out.status.success() {
            Ok(())
        } else {
            Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))
        }
    };
    let read = |name: &str| std::fs::read(dir.path().join(name)).map_err(|e| e.to_string());
    let input_arg = input.to_str().expect("utf-8 path");
    for method in ["o2pf", "opf-us", "us2-o2pf"] {
        for copy in ["a", "b"] {
            let out = dir.path().join(format!("{method}-{copy}.csv"));
            run(&[
                "resample",
                "--input",
                input_arg,
                "--output",
                out.to_str().unwrap(),
                "--method",
                method,
                "--seed",
                "42",
            ])?;
        }
        if read(&format!("{method}-a.csv"))? != read(&format!("{method}-b.csv"))? {
            return Err(format!("resample --method {method} differs between invocations"));
        }
    }
    for copy in ["a", "b"] {
        let prefix = dir.path().join(format!("report-{copy}"));
        run(&[
            "evaluate",
            "--input",
            input_arg,
            "--runs",
            "3",
            "--seed",
            "7",
            "--methods",
            "o2pf,opf-us2,us1-o2pf,smote",
            "--kmax-grid",
            "5,10",
            "--report",
            prefix.to_str().unwrap(),
        ])?;
    }
    for ext in ["toml", "csv"] {
        if read(&format!("report-a.{ext}"))? != read(&format!("report-b.{ext}"))? {
            return Err(format!("evaluate report .{ext} differs between invocations"));
        }
    }
    Ok("3 resample methods and one evaluate report, byte-identical".into())
}

fn scaling() -> Outcome {
    let time_fit = |n: usize, trial: u64| -> Result<f64, String> {
        let mut rng = Rng::new(1000 + trial);
        let ds = oracles::random_labelled(&mut rng, n, 10);
        let start = Instant::now();
        let model = supervised::fit(&ds, &Euclidean).map_err(|e| e.to_string())?;
        let t = start.elapsed().as_secs_f64();
        std::hint::black_box(model);
        Ok(t)
    };
    let median = |n: usize| -> Result<f64, String> {
        let mut times = (0..5).map(|t| time_fit(n, t)).collect::<Result<Vec<_>, _>>()?;
        times.sort_by(f64::total_cmp);
        Ok(times[2])
    };
    // warm-up so allocator and caches are in a steady state
    time_fit(1000, 99)?;
    let small = median(1000)?;
    let large = median(2000)?;
    let ratio = large / small;
    let detail = format!("median fit {small:.4}s at N=1000, {large:.4}s at N=2000, ratio {ratio:.2}");
    if (3.0..=6.0).contains(&ratio) {
        Ok(detail)
    } else {
        Err(format!("{detail}, outside [3, 6]"))
    }
}
