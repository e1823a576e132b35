//! Synthetic stand-ins with the sizes, class counts and dimensions of the
//! benchmark datasets.

use std::io::Write;
use std::path::Path;

use opf_imbalance::dataset::split;
use opf_imbalance::hybrid::{hybrid_resample, HybridPolicy};
use opf_imbalance::oversampling::{oversample, OverPolicy, OverVariant};
use opf_imbalance::undersampling::{undersample, UnderPolicy};
use opf_imbalance::{Dataset, Euclidean, RandomSource, Rng, SplitSpec};

use super::Outcome;

/// (name, majority, minority, features)
const SHAPES: [(&str, usize, usize, usize); 18] = [
    ("1069_5gt", 1012, 57, 5),
    ("1069_7gt", 1012, 57, 7),
    ("1086_5ge", 1012, 74, 5),
    ("1086_7ge", 1012, 74, 7),
    ("1143_5gte", 1012, 131, 5),
    ("1143_7gte", 1012, 131, 7),
    ("prognostic", 151, 47, 32),
    ("diagnostic-i", 357, 212, 30),
    ("diagnostic-ii", 458, 241, 9),
    ("drd", 611, 540, 19),
    ("cervical-cancer", 803, 55, 32),
    ("mammographic-mass", 516, 445, 6),
    ("indian-liver", 416, 167, 10),
    ("secom", 1463, 104, 591),
    ("seismic-bumps", 2414, 170, 19),
    ("spam", 2788, 1813, 57),
    ("vertebral-column", 210, 100, 6),
    ("wilt", 4578, 261, 5),
];

const K_MAX: usize = 10;

/// Majority class 0 around the origin, minority class 1 shifted by one unit
/// along every axis; minority rows come first.
pub fn synthetic(majority: usize, minority: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = Rng::new(seed);
    let mut rows = Vec::with_capacity(majority + minority);
    let mut labels = Vec::with_capacity(majority + minority);
    for i in 0..majority + minority {
        let label = u8::from(i < minority);
        let shift = f64::from(label);
        rows.push((0..d).map(|_| shift + rng.standard_normal()).collect());
        labels.push(label);
    }
    Dataset::from_rows(&rows, labels).expect("valid rows")
}

pub fn write_shape_csv(path: &Path, n: usize, minority: usize, d: usize, seed: u64) -> std::io::Result<()> {
    let ds = synthetic(n - minority, minority, d, seed);
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header: Vec<String> = (0..d).map(|j| format!("f{j}")).chain(["label".into()]).collect();
    writeln!(f, "{}", header.join(","))?;
    for (row, label) in ds.rows().zip(ds.labels()) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(f, "{},{}", cells.join(","), if *label == 1 { "fault" } else { "normal" })?;
    }
    f.flush()
}

pub fn balance() -> Outcome {
    let mut checked = 0;
    let mut guarded = Vec::new();
    for (s, &(name, majority, minority, d)) in SHAPES.iter().enumerate() {
        let ds = synthetic(majority, minority, d, s as u64);
        let parts = split(&ds, &SplitSpec::default(), &mut Rng::new(s as u64)).map_err(|e| e.to_string())?;
        let (train, val) = (&parts.train, &parts.val);
        let gap = train.majority_count() - train.minority_count();
        let rng = Rng::new(100 + s as u64);
        let fail =
            |method: &str, out: &Dataset| format!("{name} {method}: class counts {:?}", out.class_counts());

        let us =
            undersample(train, val, UnderPolicy::Us, &Euclidean).map_err(|e| format!("{name} US: {e}"))?;
        if us.guard_triggered {
            guarded.push(format!("{name} US"));
        } else if !balanced(&us.data) {
            return Err(fail("OPF-US", &us.data));
        }
        checked += 1;

        for variant in OverVariant::ALL {
            let policy = OverPolicy::new(variant, K_MAX).map_err(|e| e.to_string())?;
            let out = oversample(train, gap, policy, &rng.child(variant as u64), &Euclidean)
                .map_err(|e| format!("{name} {variant:?}: {e}"))?;
            if !balanced(&out.data) {
                return Err(fail(variant.name(), &out.data));
            }
            checked += 1;
        }

        for under in [UnderPolicy::Us1, UnderPolicy::Us2, UnderPolicy::Us3] {
            let over = OverPolicy::new(OverVariant::O2pf, K_MAX).map_err(|e| e.to_string())?;
            let policy = HybridPolicy::new(under, over).map_err(|e| e.to_string())?;
            let out = hybrid_resample(train, val, policy, &rng.child(10 + under as u64), &Euclidean)
                .map_err(|e| format!("{name} {under}-O2PF: {e}"))?;
            if out.guard_triggered {
                guarded.push(format!("{name} {under}-O2PF"));
            }
            if !balanced(&out.data) {
                return Err(fail(&format!("{under}-O2PF"), &out.data));
            }
            checked += 1;
        }
    }
    let note = if guarded.is_empty() {
        "no guard cases".to_string()
    } else {
        format!("guard flagged on {}", guarded.join(", "))
    };
    Ok(format!("{checked} method/shape pairs balanced; {note}"))
}

fn balanced(ds: &Dataset) -> bool {
    let [a, b] = ds.class_counts();
    a == b
}
