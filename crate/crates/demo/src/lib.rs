//! Browser bindings: generate a 2-D imbalanced point cloud, resample it with
//! any method, and paint the decision regions of an OPF classifier.
//!
//! Points cross the boundary as flat `f64` arrays: `[x, y, label]` triples
//! going in, `[x, y, label, synthetic]` quadruples coming out of
//! [`resample`].

use opf_imbalance::dataset::split_holdout;
use opf_imbalance::evaluation::{Method, Resampler};
use opf_imbalance::{supervised, Dataset, Euclidean, RandomSource, Rng};
use wasm_bindgen::prelude::*;

/// Share of the points held out to score samples for score-based methods.
const VAL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    pub xy: Vec<[f64; 2]>,
    pub labels: Vec<u8>,
    pub synthetic: Vec<bool>,
}

impl Cloud {
    fn from_triples(flat: &[f64]) -> Result<Self, String> {
        if !flat.len().is_multiple_of(3) {
            return Err("expected x, y, label triples".into());
        }
        let mut cloud = Cloud { xy: Vec::new(), labels: Vec::new(), synthetic: Vec::new() };
        for t in flat.chunks_exact(3) {
            if t[2] != 0.0 && t[2] != 1.0 {
                return Err(format!("label {} is not 0 or 1", t[2]));
            }
            cloud.xy.push([t[0], t[1]]);
            cloud.labels.push(t[2] as u8);
            cloud.synthetic.push(false);
        }
        Ok(cloud)
    }

    fn to_quads(&self) -> Vec<f64> {
        self.xy
            .iter()
            .zip(&self.labels)
            .zip(&self.synthetic)
            .flat_map(|((p, &l), &s)| [p[0], p[1], f64::from(l), f64::from(u8::from(s))])
            .collect()
    }

    fn dataset(&self) -> Result<Dataset, String> {
        let rows: Vec<Vec<f64>> = self.xy.iter().map(|p| p.to_vec()).collect();
        Dataset::from_rows(&rows, self.labels.clone()).map_err(|e| e.to_string())
    }

    fn push_dataset(&mut self, ds: &Dataset) {
        for i in 0..ds.len() {
            self.xy.push([ds.row(i)[0], ds.row(i)[1]]);
            self.labels.push(ds.label(i));
            self.synthetic.push(ds.is_synthetic(i));
        }
    }
}

/// Majority class 0: a wide blob at the origin. Minority class 1: two small
/// blobs, one of them overlapping the majority.
pub fn make_blobs(seed: u64, majority: usize, minority: usize) -> Cloud {
    let mut rng = Rng::new(seed);
    let mut cloud = Cloud { xy: Vec::new(), labels: Vec::new(), synthetic: Vec::new() };
    for _ in 0..majority {
        cloud.xy.push([1.2 * rng.standard_normal(), 1.2 * rng.standard_normal()]);
        cloud.labels.push(0);
    }
    for i in 0..minority {
        let (cx, cy) = if i % 3 == 0 { (0.8, 0.8) } else { (2.8, -2.2) };
        cloud.xy.push([cx + 0.45 * rng.standard_normal(), cy + 0.45 * rng.standard_normal()]);
        cloud.labels.push(1);
    }
    cloud.synthetic = vec![false; cloud.xy.len()];
    cloud
}

/// Resamples the cloud. Score-based methods hold out a stratified slice to
/// score the rest; the slice is returned unchanged after the resampled part.
pub fn resample_cloud(cloud: &Cloud, method: &str, param: usize, seed: u64) -> Result<Cloud, String> {
    let method: Method = method.parse().map_err(|e: opf_imbalance::OpfError| e.to_string())?;
    let ds = cloud.dataset()?;
    let rng = Rng::new(seed);
    let (train, val) = if method.needs_validation() {
        split_holdout(&ds, VAL_FRACTION, &mut rng.child(0)).map_err(|e| e.to_string())?
    } else {
        (ds.clone(), ds.clone())
    };
    let out = method
        .resample(&train, &val, param.max(1), &rng.child(method.stream_id()))
        .map_err(|e| e.to_string())?;
    let mut result = Cloud { xy: Vec::new(), labels: Vec::new(), synthetic: Vec::new() };
    result.push_dataset(&out);
    if method.needs_validation() {
        result.push_dataset(&val);
    }
    Ok(result)
}

/// Labels a `width` x `height` grid of cell centres spanning `bounds`
/// (`[x_min, x_max, y_min, y_max]`), row by row from the top.
pub fn classify_grid(
    cloud: &Cloud,
    width: usize,
    height: usize,
    bounds: [f64; 4],
) -> Result<Vec<u8>, String> {
    let model = supervised::fit(&cloud.dataset()?, &Euclidean).map_err(|e| e.to_string())?;
    let [x0, x1, y0, y1] = bounds;
    let mut out = Vec::with_capacity(width * height);
    for r in 0..height {
        let y = y1 - (r as f64 + 0.5) / height as f64 * (y1 - y0);
        for c in 0..width {
            let x = x0 + (c as f64 + 0.5) / width as f64 * (x1 - x0);
            out.push(model.classify(&[x, y], &Euclidean).label);
        }
    }
    Ok(out)
}

/// `[x, y, label]` triples of a fresh point cloud.
#[wasm_bindgen]
pub fn blobs(seed: u32, majority: u32, minority: u32) -> Vec<f64> {
    let cloud = make_blobs(u64::from(seed), majority as usize, minority as usize);
    cloud.to_quads().chunks_exact(4).flat_map(|q| [q[0], q[1], q[2]]).collect()
}

/// Resamples `[x, y, label]` triples; returns `[x, y, label, synthetic]`.
#[wasm_bindgen]
pub fn resample(points: &[f64], method: &str, param: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    let cloud = Cloud::from_triples(points).map_err(|e| JsError::new(&e))?;
    resample_cloud(&cloud, method, param as usize, u64::from(seed))
        .map(|c| c.to_quads())
        .map_err(|e| JsError::new(&e))
}

/// Class of each grid cell under an OPF trained on `[x, y, label]` triples.
#[wasm_bindgen]
pub fn decision_grid(
    points: &[f64],
    width: u32,
    height: u32,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
) -> Result<Vec<u8>, JsError> {
    let cloud = Cloud::from_triples(points).map_err(|e| JsError::new(&e))?;
    classify_grid(&cloud, width as usize, height as usize, [x_min, x_max, y_min, y_max])
        .map_err(|e| JsError::new(&e))
}

/// Method names accepted by [`resample`], comma separated.
#[wasm_bindgen]
pub fn methods() -> String {
    Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")
}
