//! Binary-labelled datasets, CSV ingestion, preprocessing and stratified
//! splitting.
//!
//! Features are stored row-major. A missing cell is held as `NaN` until
//! [`impute_mean`] replaces it; every algorithm downstream calls
//! [`Dataset::ensure_complete`] first.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{OpfError, Result};
use crate::rng::RandomSource;

/// Column names and the raw label values, kept so output files carry the
/// input's schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub feature_names: Vec<String>,
    pub label_name: String,
    /// Position of the label column among all input columns.
    pub label_position: usize,
    /// Raw label text for class 0 and class 1.
    pub class_names: [String; 2],
}

impl Schema {
    fn generic(n_features: usize) -> Self {
        Self {
            feature_names: (0..n_features).map(|j| format!("x{j}")).collect(),
            label_name: "label".to_string(),
            label_position: n_features,
            class_names: ["0".to_string(), "1".to_string()],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<u8>,
    ids: Vec<u64>,
    synthetic: Vec<bool>,
    /// Smallest id never used by this dataset or any dataset it was cut
    /// from, so generated samples never reuse an id of a held-out sample.
    next_id: u64,
    schema: Arc<Schema>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.n_features == other.n_features
            && self.labels == other.labels
            && self.ids == other.ids
            && self.synthetic == other.synthetic
            && self.features.len() == other.features.len()
            && self.features.iter().zip(&other.features).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Dataset {
    /// Builds a dataset from row vectors. Ids are the row positions.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_features) {
            return Err(OpfError::InvalidDataset("rows have different lengths".into()));
        }
        let features = rows.iter().flatten().copied().collect();
        Self::from_flat(features, n_features, labels)
    }

    /// Builds a dataset from a row-major feature buffer.
    pub fn from_flat(features: Vec<f64>, n_features: usize, labels: Vec<u8>) -> Result<Self> {
        let ids = (0..labels.len() as u64).collect();
        Self::with_ids(features, n_features, labels, ids)
    }

    pub fn with_ids(features: Vec<f64>, n_features: usize, labels: Vec<u8>, ids: Vec<u64>) -> Result<Self> {
        let n = labels.len();
        let next_id = ids.iter().max().map_or(0, |m| m + 1);
        let ds = Self {
            features,
            n_features,
            synthetic: vec![false; n],
            labels,
            ids,
            next_id,
            schema: Arc::new(Schema::generic(n_features)),
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 || self.n_features == 0 {
            return Err(OpfError::InvalidDataset("need at least one sample and one feature".into()));
        }
        if self.features.len() != n * self.n_features {
            return Err(OpfError::InvalidDataset(format!(
                "{} feature values for {n} samples of dimension {}",
                self.features.len(),
                self.n_features
            )));
        }
        if self.ids.len() != n || self.synthetic.len() != n {
            return Err(OpfError::InvalidDataset("ids/labels length mismatch".into()));
        }
        if let Some(bad) = self.labels.iter().find(|&&l| l > 1) {
            return Err(OpfError::InvalidDataset(format!("label {bad} is not 0 or 1")));
        }
        let unique: BTreeSet<_> = self.ids.iter().collect();
        if unique.len() != n {
            return Err(OpfError::InvalidDataset("sample ids are not unique".into()));
        }
        if self.features.iter().any(|v| v.is_infinite()) {
            return Err(OpfError::InvalidDataset("infinite feature value".into()));
        }
        Ok(())
    }

    pub fn with_schema(mut self, schema: Schema) -> Result<Self> {
        if schema.feature_names.len() != self.n_features {
            return Err(OpfError::InvalidDataset("schema width mismatch".into()));
        }
        self.schema = Arc::new(schema);
        Ok(self)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> u64 {
        self.ids[i]
    }

    pub fn is_synthetic(&self, i: usize) -> bool {
        self.synthetic[i]
    }

    pub fn synthetic_count(&self) -> usize {
        self.synthetic.iter().filter(|&&s| s).count()
    }

    /// Sample counts for class 0 and class 1.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    /// Label of the larger class; class 0 on a tie.
    pub fn majority_label(&self) -> u8 {
        let [c0, c1] = self.class_counts();
        u8::from(c1 > c0)
    }

    /// Label of the smaller class; class 1 on a tie.
    pub fn minority_label(&self) -> u8 {
        1 - self.majority_label()
    }

    pub fn majority_count(&self) -> usize {
        self.class_counts()[self.majority_label() as usize]
    }

    pub fn minority_count(&self) -> usize {
        self.class_counts()[self.minority_label() as usize]
    }

    pub fn has_both_classes(&self) -> bool {
        let [c0, c1] = self.class_counts();
        c0 > 0 && c1 > 0
    }

    pub fn has_missing(&self) -> bool {
        self.features.iter().any(|v| v.is_nan())
    }

    pub fn ensure_complete(&self) -> Result<()> {
        if self.has_missing() {
            Err(OpfError::MissingValues)
        } else {
            Ok(())
        }
    }

    /// Positions of samples carrying `label`.
    pub fn indices_of(&self, label: u8) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Samples at `positions`, in the given order, keeping ids and flags.
    pub fn subset(&self, positions: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(positions.len() * self.n_features);
        for &p in positions {
            features.extend_from_slice(self.row(p));
        }
        Dataset {
            features,
            n_features: self.n_features,
            labels: positions.iter().map(|&p| self.labels[p]).collect(),
            ids: positions.iter().map(|&p| self.ids[p]).collect(),
            synthetic: positions.iter().map(|&p| self.synthetic[p]).collect(),
            next_id: self.next_id,
            schema: Arc::clone(&self.schema),
        }
    }

    /// Appends generated samples of class `label`; they receive fresh ids
    /// above every id of the dataset this one was cut from, and are flagged
    /// synthetic.
    pub fn with_synthetic(&self, rows: &[Vec<f64>], label: u8) -> Result<Dataset> {
        let mut out = self.clone();
        let mut next_id = self.next_id;
        for row in rows {
            if row.len() != self.n_features {
                return Err(OpfError::LengthMismatch(row.len(), self.n_features));
            }
            out.features.extend_from_slice(row);
            out.labels.push(label);
            out.ids.push(next_id);
            out.synthetic.push(true);
            next_id += 1;
        }
        out.next_id = next_id;
        Ok(out)
    }

    fn map_features(&self, mut f: impl FnMut(usize, f64) -> f64) -> Dataset {
        let d = self.n_features;
        let features = self.features.iter().enumerate().map(|(k, &v)| f(k % d, v)).collect();
        Dataset { features, ..self.clone() }
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Name(String),
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// A bare integer selects by index, `last` the last column, anything
    /// else a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    /// Raw label value to map to class 1. By default the lexicographically
    /// larger value is class 1.
    pub positive_label: Option<String>,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("nan") || cell == "?"
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|source| OpfError::Io { path: path.to_path_buf(), source })?;
    read_csv(file, options)
}

pub fn read_csv(reader: impl Read, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.len() < 2 {
        return Err(OpfError::InvalidDataset("need at least one feature column and a label column".into()));
    }
    let label_position = match &options.label_column {
        LabelColumn::Last => headers.len() - 1,
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => return Err(OpfError::UnknownLabelColumn(i.to_string())),
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| OpfError::UnknownLabelColumn(name.clone()))?,
    };
    let feature_names: Vec<String> =
        headers.iter().enumerate().filter(|&(j, _)| j != label_position).map(|(_, h)| h.clone()).collect();

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        for (j, cell) in record.iter().enumerate() {
            if j == label_position {
                raw_labels.push(cell.to_string());
            } else if is_missing(cell) {
                features.push(f64::NAN);
            } else {
                let v: f64 = cell.parse().map_err(|_| OpfError::NonNumeric {
                    row: row + 1,
                    column: headers[j].clone(),
                    value: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(OpfError::NonNumeric {
                        row: row + 1,
                        column: headers[j].clone(),
                        value: cell.to_string(),
                    });
                }
                features.push(v);
            }
        }
    }

    let distinct: BTreeSet<&String> = raw_labels.iter().collect();
    if distinct.len() != 2 {
        return Err(OpfError::LabelCount {
            found: distinct.len(),
            values: distinct.into_iter().cloned().collect(),
        });
    }
    let mut class_names: Vec<String> = distinct.into_iter().cloned().collect();
    if let Some(pos) = &options.positive_label {
        match class_names.iter().position(|c| c == pos) {
            Some(0) => class_names.swap(0, 1),
            Some(_) => {}
            None => {
                return Err(OpfError::InvalidArgument(format!(
                    "positive label '{pos}' does not occur in the label column"
                )))
            }
        }
    }
    let labels = raw_labels.iter().map(|l| u8::from(*l == class_names[1])).collect();
    let schema = Schema {
        feature_names,
        label_name: headers[label_position].clone(),
        label_position,
        class_names: [class_names[0].clone(), class_names[1].clone()],
    };
    let n_features = schema.feature_names.len();
    Dataset::from_flat(features, n_features, labels)?.with_schema(schema)
}

/// Writes `ds` with the input schema. A trailing `synthetic` column is added
/// when the dataset holds generated samples.
pub fn write_csv(ds: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let schema = ds.schema();
    let with_flag = ds.synthetic_count() > 0;
    let width = ds.n_features() + 1;

    let mut header: Vec<&str> = Vec::with_capacity(width + 1);
    let mut names = schema.feature_names.iter();
    for j in 0..width {
        if j == schema.label_position {
            header.push(&schema.label_name);
        } else {
            header.push(names.next().expect("schema width"));
        }
    }
    if with_flag {
        header.push("synthetic");
    }
    w.write_record(&header)?;

    let mut record: Vec<String> = Vec::with_capacity(width + 1);
    for i in 0..ds.len() {
        record.clear();
        let mut values = ds.row(i).iter();
        for j in 0..width {
            if j == schema.label_position {
                record.push(schema.class_names[ds.label(i) as usize].clone());
            } else {
                let v = *values.next().expect("row width");
                record.push(if v.is_nan() { String::new() } else { v.to_string() });
            }
        }
        if with_flag {
            record.push(ds.is_synthetic(i).to_string());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|source| OpfError::Io { path: "<csv output>".into(), source })?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

/// Replaces each missing cell by the mean of the observed values in its
/// column.
pub fn impute_mean(ds: &Dataset) -> Result<Dataset> {
    let d = ds.n_features();
    let mut sums = vec![0.0; d];
    let mut counts = vec![0usize; d];
    for row in ds.rows() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_nan() {
                sums[j] += v;
                counts[j] += 1;
            }
        }
    }
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(OpfError::AllMissing(ds.schema().feature_names[j].clone()));
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    Ok(ds.map_features(|j, v| if v.is_nan() { means[j] } else { v }))
}

/// Per-column affine standardisation with population statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardScaler {
    pub mean: Vec<f64>,
    /// Population standard deviation; zero-variance columns store 0 and are
    /// only centred.
    pub scale: Vec<f64>,
}

impl StandardScaler {
    pub fn fit(ds: &Dataset) -> Result<Self> {
        ds.ensure_complete()?;
        if ds.len() < 2 {
            return Err(OpfError::InvalidDataset("scaler needs at least 2 samples".into()));
        }
        let n = ds.len() as f64;
        let d = ds.n_features();
        let mut mean = vec![0.0; d];
        for row in ds.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in ds.rows() {
            for j in 0..d {
                var[j] += (row[j] - mean[j]).powi(2);
            }
        }
        let scale = var
            .iter()
            .zip(&mean)
            .map(|(v, m)| {
                let s = (v / n).sqrt();
                if s <= 1e-12 * m.abs().max(1.0) {
                    0.0
                } else {
                    s
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.n_features() != self.mean.len() {
            return Err(OpfError::LengthMismatch(ds.n_features(), self.mean.len()));
        }
        ds.ensure_complete()?;
        Ok(ds.map_features(|j, v| {
            let centred = v - self.mean[j];
            if self.scale[j] > 0.0 {
                centred / self.scale[j]
            } else {
                centred
            }
        }))
    }

    /// Maps one scaled row back to input units.
    pub fn inverse_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| {
                let s = if self.scale[j] > 0.0 { self.scale[j] } else { 1.0 };
                v * s + self.mean[j]
            })
            .collect()
    }
}

/// Fits the scaler on `fit_on` and applies it to `apply_to`.
pub fn standard_scale(fit_on: &Dataset, apply_to: &Dataset) -> Result<Dataset> {
    StandardScaler::fit(fit_on)?.transform(apply_to)
}

/// Mean imputation followed by standard scaling fitted on the same data.
pub fn preprocess(ds: &Dataset) -> Result<Dataset> {
    let imputed = impute_mean(ds)?;
    standard_scale(&imputed, &imputed)
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_fraction: 0.70, val_fraction: 0.15, test_fraction: 0.15 }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, val_fraction: f64, test_fraction: f64) -> Result<Self> {
        let spec = Self { train_fraction, val_fraction, test_fraction };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let parts = [self.train_fraction, self.val_fraction, self.test_fraction];
        if parts.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
            return Err(OpfError::InvalidArgument(
                "split fractions must lie strictly between 0 and 1".into(),
            ));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(OpfError::InvalidArgument("split fractions must sum to 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

/// Stratified 3-way split. Partition sizes are `round(N * f)` for the
/// validation and test parts, with the remainder going to training.
pub fn split(ds: &Dataset, spec: &SplitSpec, rng: &mut impl RandomSource) -> Result<Split> {
    spec.validate()?;
    if ds.len() < 10 {
        return Err(OpfError::InvalidDataset(format!(
            "splitting needs at least 10 samples, got {}",
            ds.len()
        )));
    }
    let mut parts = stratified_partition(ds, &[spec.val_fraction, spec.test_fraction], rng)?.into_iter();
    let (train, val, test) =
        (parts.next().expect("3 parts"), parts.next().expect("3 parts"), parts.next().expect("3 parts"));
    Ok(Split { train, val, test })
}

/// Stratified 2-way split returning `(rest, holdout)`.
pub fn split_holdout(
    ds: &Dataset,
    holdout_fraction: f64,
    rng: &mut impl RandomSource,
) -> Result<(Dataset, Dataset)> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(OpfError::InvalidArgument("holdout fraction must lie strictly between 0 and 1".into()));
    }
    let mut parts = stratified_partition(ds, &[holdout_fraction], rng)?.into_iter();
    Ok((parts.next().expect("2 parts"), parts.next().expect("2 parts")))
}

/// Splits into `1 + fractions.len()` parts; part 0 receives the remainder.
/// Every part holds at least one sample of each class.
fn stratified_partition(
    ds: &Dataset,
    fractions: &[f64],
    rng: &mut impl RandomSource,
) -> Result<Vec<Dataset>> {
    let n = ds.len();
    let counts = ds.class_counts();
    let n_parts = fractions.len() + 1;
    if counts.iter().any(|&c| c < n_parts) {
        return Err(OpfError::SingleClass(format!(
            "each class needs at least {n_parts} samples to split, class counts are {counts:?}"
        )));
    }

    // quota[part][class] for the non-remainder parts, apportioned on
    // cumulative totals so rounding surpluses alternate between classes
    let mut quotas: Vec<[usize; 2]> = Vec::with_capacity(fractions.len());
    let mut cumulative_total = 0;
    let mut previous = [0usize; 2];
    for &f in fractions {
        cumulative_total += (n as f64 * f).round() as usize;
        let mut cum = class_quotas(cumulative_total, counts, n);
        for c in 0..2 {
            if cum[c] < previous[c] {
                cum[1 - c] -= previous[c] - cum[c];
                cum[c] = previous[c];
            }
        }
        quotas.push([cum[0] - previous[0], cum[1] - previous[1]]);
        previous = cum;
    }
    for class in 0..2 {
        for q in quotas.iter_mut() {
            if q[class] == 0 {
                let other = 1 - class;
                if q[other] > 1 {
                    q[other] -= 1;
                }
                q[class] = 1;
            }
        }
        let taken: usize = quotas.iter().map(|q| q[class]).sum();
        if taken >= counts[class] {
            return Err(OpfError::SingleClass(format!(
                "class {class} has too few samples ({}) for the requested split",
                counts[class]
            )));
        }
    }

    let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); n_parts];
    for class in 0..2u8 {
        let mut members = ds.indices_of(class);
        rng.shuffle(&mut members);
        let mut cursor = 0;
        for (p, q) in quotas.iter().enumerate() {
            let take = q[class as usize];
            assignment[p + 1].extend_from_slice(&members[cursor..cursor + take]);
            cursor += take;
        }
        assignment[0].extend_from_slice(&members[cursor..]);
    }
    Ok(assignment
        .into_iter()
        .map(|mut idx| {
            idx.sort_unstable();
            ds.subset(&idx)
        })
        .collect())
}

/// Largest-remainder apportionment of `total` slots over the two classes.
fn class_quotas(total: usize, counts: [usize; 2], n: usize) -> [usize; 2] {
    let exact = counts.map(|c| c as f64 * total as f64 / n as f64);
    let mut quota = exact.map(|e| e.floor() as usize);
    let mut remaining = total.saturating_sub(quota[0] + quota[1]);
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &c in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        quota[c] += 1;
        remaining -= 1;
    }
    quota
}
