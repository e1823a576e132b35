//! Repeated-holdout runs on the public datasets in `data/`.

use std::path::PathBuf;

use opf_imbalance::dataset::{load_csv, CsvOptions, LabelColumn};
use opf_imbalance::evaluation::{run_experiment, ExperimentConfig, Method};

use super::Outcome;

struct Check {
    dataset: &'static str,
    file: &'static str,
    label: &'static str,
    method: Method,
    reference: f64,
    tolerance: f64,
    /// Resampled mean must not fall more than 0.02 below ORIGINAL.
    directional: bool,
}

const CHECKS: [Check; 4] = [
    Check {
        dataset: "WBCD Diagnostic I",
        file: "wdbc.csv",
        label: "diagnosis",
        method: Method::Original,
        reference: 0.9290,
        tolerance: 0.05,
        directional: false,
    },
    Check {
        dataset: "Vertebral Column",
        file: "vertebral_column.csv",
        label: "last",
        method: Method::Original,
        reference: 0.6557,
        tolerance: 0.10,
        directional: false,
    },
    Check {
        dataset: "WBCD Diagnostic II",
        file: "breast_cancer_wisconsin_original.csv",
        label: "class",
        method: Method::O2pf,
        reference: 0.9240,
        tolerance: 0.05,
        directional: true,
    },
    Check {
        dataset: "Mammographic Mass",
        file: "mammographic_masses.csv",
        label: "severity",
        method: Method::OpfUs2,
        reference: 0.7223,
        tolerance: 0.07,
        directional: true,
    },
];

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn check() -> Outcome {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for c in &CHECKS {
        match run_check(c) {
            Ok(line) => lines.push(line),
            Err(line) => failures.push(line),
        }
    }
    let all: Vec<String> = failures.iter().chain(&lines).cloned().collect();
    if failures.is_empty() {
        Ok(all.join("; "))
    } else {
        Err(all.join("; "))
    }
}

fn run_check(c: &Check) -> Result<String, String> {
    let path = data_dir().join(c.file);
    if !path.exists() {
        return Err(format!("{}: data file {} not found", c.dataset, path.display()));
    }
    let options = CsvOptions {
        label_column: c.label.parse::<LabelColumn>().expect("infallible"),
        positive_label: None,
    };
    let ds = load_csv(&path, &options).map_err(|e| format!("{}: {e}", c.dataset))?;
    let cfg = ExperimentConfig { dataset: c.file.into(), ..ExperimentConfig::default() };
    let report = run_experiment(&ds, &[c.method], &cfg).map_err(|e| format!("{}: {e}", c.dataset))?;
    let mean = report.summary(c.method).expect("evaluated").mean;
    let original = report.summary(Method::Original).expect("always evaluated").mean;
    let mut line = format!(
        "{} {} mean F1 {mean:.4} (reference {:.4} ± {:.2})",
        c.dataset, c.method, c.reference, c.tolerance
    );
    let mut ok = (mean - c.reference).abs() <= c.tolerance;
    if c.directional {
        line.push_str(&format!(", original {original:.4}"));
        ok &= mean >= original - 0.02;
    }
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}
