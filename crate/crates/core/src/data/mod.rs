//! Labeled, group-annotated tabular data.
//!
//! Cells are kept as strings; learners ask for numeric views through
//! [`Dataset::numeric_column`], which is parsed once and cached.

pub mod synthetic;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::max_bracket;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: label `{value}` is not 0 or 1")]
    BadLabel { row: usize, value: String },
    #[error("row {row}: empty group value")]
    EmptyGroup { row: usize },
    #[error("need at least 2 distinct groups, found {0}")]
    TooFewGroups(usize),
    #[error("invalid split fractions {0:?}: must be positive and sum to 1")]
    BadFractions((f64, f64, f64)),
    #[error("{partition} partition would receive no {class} rows")]
    EmptyPartitionClass { partition: &'static str, class: &'static str },
    #[error("invalid ladder parameters R={max_budget}, eta={eta}")]
    BadLadderParams { max_budget: f64, eta: f64 },
    #[error("training set too small for the budget ladder: needs at least one row of each class")]
    TrainTooSmall,
    #[error("budget {0} is not a level of this ladder")]
    UnknownBudget(f64),
    #[error("row width mismatch: expected {expected} cells, got {got}")]
    RowWidth { expected: usize, got: usize },
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Also expose the group column as a feature.
    pub group_as_feature: bool,
}

/// A binary-labeled table with one sensitive-attribute column.
#[derive(Debug, Clone)]
pub struct Dataset {
    feature_columns: Vec<String>,
    label_column: String,
    group_column: String,
    features: Vec<Vec<String>>,
    labels: Vec<u8>,
    groups: Vec<String>,
    numeric: OnceLock<Vec<Vec<Option<f64>>>>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.feature_columns == other.feature_columns
            && self.label_column == other.label_column
            && self.group_column == other.group_column
            && self.features == other.features
            && self.labels == other.labels
            && self.groups == other.groups
    }
}

impl Dataset {
    /// Builds a dataset from already-separated parts.
    pub fn from_parts(
        feature_columns: Vec<String>,
        label_column: impl Into<String>,
        group_column: impl Into<String>,
        features: Vec<Vec<String>>,
        labels: Vec<u8>,
        groups: Vec<String>,
    ) -> Result<Self, DataError> {
        for (row, cells) in features.iter().enumerate() {
            if cells.len() != feature_columns.len() {
                return Err(DataError::RowWidth { expected: feature_columns.len(), got: cells.len() });
            }
            if groups[row].is_empty() {
                return Err(DataError::EmptyGroup { row });
            }
        }
        if let Some(row) = labels.iter().position(|&l| l > 1) {
            return Err(DataError::BadLabel { row, value: labels[row].to_string() });
        }
        assert_eq!(features.len(), labels.len());
        assert_eq!(features.len(), groups.len());
        let ds = Dataset {
            feature_columns,
            label_column: label_column.into(),
            group_column: group_column.into(),
            features,
            labels,
            groups,
            numeric: OnceLock::new(),
        };
        let distinct = ds.group_names().len();
        if distinct < 2 {
            return Err(DataError::TooFewGroups(distinct));
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_columns(&self) -> &[String] {
        &self.feature_columns
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn group_column(&self) -> &str {
        &self.group_column
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn row(&self, index: usize) -> &[String] {
        &self.features[index]
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn positive_rate(&self) -> f64 {
        self.positives() as f64 / self.len() as f64
    }

    /// Sorted distinct group values.
    pub fn group_names(&self) -> Vec<String> {
        self.groups.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_columns.iter().position(|c| c == name)
    }

    /// Column `col` parsed as numbers; `None` for empty or non-numeric cells.
    pub fn numeric_column(&self, col: usize) -> &[Option<f64>] {
        let parsed = self.numeric.get_or_init(|| {
            (0..self.feature_columns.len())
                .map(|c| {
                    self.features
                        .iter()
                        .map(|row| row[c].trim().parse::<f64>().ok().filter(|x| x.is_finite()))
                        .collect()
                })
                .collect()
        });
        &parsed[col]
    }

    /// The rows at `indices`, in that order, as a new dataset. Group
    /// coverage is not re-checked.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_columns: self.feature_columns.clone(),
            label_column: self.label_column.clone(),
            group_column: self.group_column.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            groups: indices.iter().map(|&i| self.groups[i].clone()).collect(),
            numeric: OnceLock::new(),
        }
    }

    /// A copy that also exposes the group column as the last feature.
    /// Unchanged when it already is one.
    pub fn with_group_feature(&self) -> Dataset {
        if self.feature_index(&self.group_column).is_some() {
            return self.clone();
        }
        let mut out = self.subset(&(0..self.len()).collect::<Vec<_>>());
        out.feature_columns.push(self.group_column.clone());
        for (row, g) in out.features.iter_mut().zip(&self.groups) {
            row.push(g.clone());
        }
        out
    }

    /// Hex SHA-256 over schema and contents; equal datasets share it.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let mut field = |s: &str| {
            h.update((s.len() as u64).to_le_bytes());
            h.update(s.as_bytes());
        };
        for c in &self.feature_columns {
            field(c);
        }
        field(&self.label_column);
        field(&self.group_column);
        for r in 0..self.len() {
            for cell in &self.features[r] {
                field(cell);
            }
            field(&self.groups[r]);
            field(if self.labels[r] == 1 { "1" } else { "0" });
        }
        hex::encode(h.finalize())
    }

    /// Writes `indices` as CSV: feature columns, the group column and, when
    /// `with_label` is set, the label column.
    pub fn write_csv(&self, path: &Path, indices: &[usize], with_label: bool) -> Result<(), DataError> {
        let io_err = |source| DataError::Io { path: path.display().to_string(), source };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
        let mut header: Vec<&str> = self.feature_columns.iter().map(String::as_str).collect();
        if !self.feature_columns.contains(&self.group_column) {
            header.push(&self.group_column);
        }
        if with_label {
            header.push(&self.label_column);
        }
        writer.write_record(&header)?;
        let group_is_feature = self.feature_columns.contains(&self.group_column);
        for &i in indices {
            let mut record: Vec<&str> = self.features[i].iter().map(String::as_str).collect();
            if !group_is_feature {
                record.push(&self.groups[i]);
            }
            let label = self.labels[i].to_string();
            if with_label {
                record.push(&label);
            }
            writer.write_record(&record)?;
        }
        writer.flush().map_err(io_err)?;
        let mut inner = writer.into_inner().map_err(|e| io_err(e.into_error()))?;
        inner.flush().map_err(io_err)
    }
}

pub fn load_csv(path: &Path, label_column: &str, group_column: &str) -> Result<Dataset, DataError> {
    load_csv_with(path, label_column, group_column, &LoadOptions::default())
}

pub fn load_csv_with(
    path: &Path,
    label_column: &str,
    group_column: &str,
    options: &LoadOptions,
) -> Result<Dataset, DataError> {
    let file = std::fs::File::open(path)
        .map_err(|source| DataError::Io { path: path.display().to_string(), source })?;
    read_csv(file, label_column, group_column, options)
}

pub fn read_csv<R: std::io::Read>(
    reader: R,
    label_column: &str,
    group_column: &str,
    options: &LoadOptions,
) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let label_idx = find(label_column)?;
    let group_idx = find(group_column)?;
    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&i| i != label_idx && (i != group_idx || options.group_as_feature))
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let raw_label = record.get(label_idx).unwrap_or("").trim();
        let label = match raw_label {
            "0" => 0,
            "1" => 1,
            other => return Err(DataError::BadLabel { row, value: other.to_string() }),
        };
        let group = record.get(group_idx).unwrap_or("").trim().to_string();
        features.push(
            feature_idx
                .iter()
                .map(|&i| record.get(i).unwrap_or("").to_string())
                .collect(),
        );
        labels.push(label);
        groups.push(group);
    }
    let feature_columns = feature_idx.iter().map(|&i| headers[i].clone()).collect();
    Dataset::from_parts(feature_columns, label_column, group_column, features, labels, groups)
}

/// Disjoint train/validation/test partitions of one dataset.
#[derive(Debug, Clone)]
pub struct SplitSet {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
    /// Source-row indices of each partition, ascending.
    pub indices: [Vec<usize>; 3],
}

pub(crate) fn round_half_up(x: f64) -> usize {
    // b/R·N products like 123.45 carry float noise around the .5 boundary
    (x + 0.5 + 1e-9).floor().max(0.0) as usize
}

fn seeded_shuffle(mut items: Vec<usize>, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items.shuffle(&mut rng);
    items
}

fn class_indices(labels: &[u8], rows: impl Iterator<Item = usize>) -> (Vec<usize>, Vec<usize>) {
    rows.partition(|&i| labels[i] == 1)
}

/// Stratified random split by label; deterministic given `seed`.
pub fn split(ds: &Dataset, fractions: (f64, f64, f64), seed: u64) -> Result<SplitSet, DataError> {
    let (ft, fv, fs) = fractions;
    if !(ft > 0.0 && fv > 0.0 && fs > 0.0) || ((ft + fv + fs) - 1.0).abs() > 1e-9 {
        return Err(DataError::BadFractions(fractions));
    }
    let (pos, neg) = class_indices(&ds.labels, 0..ds.len());
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (class, members, salt) in [("positive", pos, 0u64), ("negative", neg, 1u64)] {
        let n = members.len();
        let order = seeded_shuffle(members, seed.wrapping_mul(2).wrapping_add(salt));
        let n_train = round_half_up(ft * n as f64).min(n);
        let n_val = round_half_up(fv * n as f64).min(n - n_train);
        let cuts = [0, n_train, n_train + n_val, n];
        for (p, name) in ["train", "validation", "test"].into_iter().enumerate() {
            if cuts[p + 1] == cuts[p] {
                return Err(DataError::EmptyPartitionClass { partition: name, class });
            }
            parts[p].extend_from_slice(&order[cuts[p]..cuts[p + 1]]);
        }
    }
    for part in parts.iter_mut() {
        part.sort_unstable();
    }
    Ok(SplitSet {
        train: ds.subset(&parts[0]),
        validation: ds.subset(&parts[1]),
        test: ds.subset(&parts[2]),
        indices: parts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLevel {
    pub budget_units: f64,
    /// Row indices into the training dataset, ascending.
    pub rows: Vec<usize>,
}

/// Nested, stratified training slices, one per distinct rung budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLadder {
    levels: Vec<BudgetLevel>,
    total_units: f64,
}

pub const BUDGET_TOLERANCE: f64 = 1e-9;

impl BudgetLadder {
    /// Levels at `R·eta^-s` for `s = s_max..=0`, where slice sizes are
    /// `round(b/R·|train|)` with at least one row per class, built as prefixes
    /// of one seeded shuffle per class so smaller slices nest in larger ones.
    pub fn build(train: &Dataset, max_budget: f64, eta: f64, seed: u64) -> Result<Self, DataError> {
        if !(max_budget >= 1.0 && eta > 1.0 && max_budget.is_finite() && eta.is_finite()) {
            return Err(DataError::BadLadderParams { max_budget, eta });
        }
        let (pos, neg) = class_indices(&train.labels, 0..train.len());
        if pos.is_empty() || neg.is_empty() {
            return Err(DataError::TrainTooSmall);
        }
        let n = train.len() as f64;
        let pos_rate = pos.len() as f64 / n;
        let pos_order = seeded_shuffle(pos, seed.wrapping_mul(2));
        let neg_order = seeded_shuffle(neg, seed.wrapping_mul(2).wrapping_add(1));

        let s_max = max_bracket(max_budget, eta);
        let mut levels = Vec::with_capacity(s_max as usize + 1);
        let (mut prev_pos, mut prev_neg) = (0usize, 0usize);
        for s in (0..=s_max).rev() {
            let budget = max_budget * eta.powi(-(s as i32));
            let frac = if s == 0 { 1.0 } else { budget / max_budget };
            let total = round_half_up(frac * n);
            let n_pos = round_half_up(total as f64 * pos_rate)
                .clamp(1, pos_order.len())
                .max(prev_pos);
            let n_neg = total
                .saturating_sub(n_pos)
                .clamp(1, neg_order.len())
                .max(prev_neg);
            let mut rows: Vec<usize> = pos_order[..n_pos]
                .iter()
                .chain(&neg_order[..n_neg])
                .copied()
                .collect();
            rows.sort_unstable();
            levels.push(BudgetLevel { budget_units: budget, rows });
            prev_pos = n_pos;
            prev_neg = n_neg;
        }
        Ok(BudgetLadder { levels, total_units: max_budget })
    }

    pub fn levels(&self) -> &[BudgetLevel] {
        &self.levels
    }

    pub fn total_units(&self) -> f64 {
        self.total_units
    }

    pub fn level(&self, budget_units: f64) -> Result<&BudgetLevel, DataError> {
        self.levels
            .iter()
            .find(|l| (l.budget_units - budget_units).abs() <= BUDGET_TOLERANCE * l.budget_units.max(1.0))
            .ok_or(DataError::UnknownBudget(budget_units))
    }

    /// The training-row index set for budget `r`.
    pub fn slice_for_budget(&self, r: f64) -> Result<&[usize], DataError> {
        self.level(r).map(|l| l.rows.as_slice())
    }
}

/// Keeps every positive row and drops negatives at random until the positive
/// rate reaches `target_positive_rate`. Identity when the rate is already at
/// or above the target. Output preserves input order.
pub fn undersample(labels: &[u8], rows: &[usize], target_positive_rate: f64, seed: u64) -> Vec<usize> {
    let (pos, neg) = class_indices(labels, rows.iter().copied());
    let total = rows.len();
    if pos.is_empty()
        || neg.is_empty()
        || !(target_positive_rate > 0.0 && target_positive_rate < 1.0)
        || pos.len() as f64 / total as f64 >= target_positive_rate
    {
        return rows.to_vec();
    }
    let keep_neg = round_half_up(pos.len() as f64 * (1.0 - target_positive_rate) / target_positive_rate)
        .min(neg.len());
    let kept: BTreeSet<usize> = seeded_shuffle(neg, seed).into_iter().take(keep_neg).collect();
    rows.iter()
        .copied()
        .filter(|i| labels[*i] == 1 || kept.contains(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, positives: usize) -> Dataset {
        let features = (0..n).map(|i| vec![i.to_string()]).collect();
        let labels = (0..n).map(|i| u8::from(i < positives)).collect();
        let groups = (0..n).map(|i| if i % 2 == 0 { "a" } else { "b" }.to_string()).collect();
        Dataset::from_parts(vec!["x".into()], "y", "g", features, labels, groups).unwrap()
    }

    #[test]
    fn loads_small_csv() {
        let text = "x,y,g\n1.0,0,a\n2.0,1,a\n3.0,0,b\n4.0,1,b\n";
        let ds = read_csv(text.as_bytes(), "y", "g", &LoadOptions::default()).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.labels(), &[0, 1, 0, 1]);
        assert_eq!(ds.group_names(), vec!["a", "b"]);
        assert_eq!(ds.feature_columns(), &["x".to_string()]);
        assert_eq!(ds.numeric_column(0), &[Some(1.0), Some(2.0), Some(3.0), Some(4.0)]);
    }

    #[test]
    fn group_feature_flag() {
        let text = "x,y,g\n1.0,0,a\n2.0,1,b\n";
        let opts = LoadOptions { group_as_feature: true };
        let ds = read_csv(text.as_bytes(), "y", "g", &opts).unwrap();
        assert_eq!(ds.feature_columns(), &["x".to_string(), "g".to_string()]);

        let plain = read_csv(text.as_bytes(), "y", "g", &LoadOptions::default()).unwrap();
        let widened = plain.with_group_feature();
        assert_eq!(widened, ds);
        assert_eq!(widened.with_group_feature(), ds);
        assert_ne!(plain.fingerprint(), ds.fingerprint());
    }

    #[test]
    fn load_errors() {
        let opts = LoadOptions::default();
        let missing = read_csv("x,y\n1,0\n".as_bytes(), "y", "g", &opts);
        assert!(matches!(missing, Err(DataError::MissingColumn(c)) if c == "g"));
        let bad = read_csv("x,y,g\n1,2,a\n".as_bytes(), "y", "g", &opts);
        assert!(matches!(bad, Err(DataError::BadLabel { row: 0, .. })));
        let one_group = read_csv("x,y,g\n1,0,a\n2,1,a\n".as_bytes(), "y", "g", &opts);
        assert!(matches!(one_group, Err(DataError::TooFewGroups(1))));
    }

    #[test]
    fn split_is_stratified() {
        let ds = toy(100, 50);
        let s = split(&ds, (0.6, 0.2, 0.2), 7).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (60, 20, 20));
        for part in [&s.train, &s.validation, &s.test] {
            let diff = (part.positive_rate() - 0.5).abs();
            assert!(diff <= 1.0 / part.len() as f64);
        }
        let mut all: Vec<usize> = s.indices.concat();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn split_deterministic() {
        let ds = toy(100, 30);
        let a = split(&ds, (0.6, 0.2, 0.2), 3).unwrap();
        let b = split(&ds, (0.6, 0.2, 0.2), 3).unwrap();
        assert_eq!(a.indices, b.indices);
        let c = split(&ds, (0.6, 0.2, 0.2), 4).unwrap();
        assert_ne!(a.indices, c.indices);
    }

    #[test]
    fn split_rejects_empty_class_partition() {
        let ds = toy(10, 1);
        assert!(matches!(
            split(&ds, (0.9, 0.05, 0.05), 1),
            Err(DataError::EmptyPartitionClass { class: "positive", .. })
        ));
        assert!(matches!(split(&ds, (0.5, 0.5, 0.1), 1), Err(DataError::BadFractions(_))));
    }

    #[test]
    fn ladder_budgets_for_r100_eta3() {
        let ds = toy(10_000, 1_000);
        let ladder = BudgetLadder::build(&ds, 100.0, 3.0, 1).unwrap();
        let budgets: Vec<f64> = ladder.levels().iter().map(|l| l.budget_units).collect();
        assert_eq!(budgets.len(), 5);
        for (b, s) in budgets.iter().zip([4, 3, 2, 1, 0]) {
            let e = 100.0 / 3f64.powi(s);
            assert!((b - e).abs() < 1e-9, "{b} vs {e}");
        }
        let smallest = &ladder.levels()[0];
        assert_eq!(smallest.rows.len(), 123);
        let pos = smallest.rows.iter().filter(|&&i| ds.labels()[i] == 1).count();
        assert!((pos as f64 / 123.0 - 0.1).abs() <= 1.0 / 123.0);
        assert_eq!(ladder.levels()[4].rows, (0..10_000).collect::<Vec<_>>());
    }

    #[test]
    fn ladder_is_nested_and_stratified() {
        let ds = toy(777, 91);
        let ladder = BudgetLadder::build(&ds, 100.0, 3.0, 5).unwrap();
        let levels = ladder.levels();
        for pair in levels.windows(2) {
            let big: BTreeSet<usize> = pair[1].rows.iter().copied().collect();
            assert!(pair[0].rows.iter().all(|i| big.contains(i)));
            assert!(pair[0].rows.len() < pair[1].rows.len());
        }
        for level in levels {
            let pos = level.rows.iter().filter(|&&i| ds.labels()[i] == 1).count();
            let rate = pos as f64 / level.rows.len() as f64;
            assert!((rate - ds.positive_rate()).abs() <= 1.0 / level.rows.len() as f64);
        }
    }

    #[test]
    fn ladder_with_unit_budget_is_single_level() {
        let ds = toy(50, 10);
        let ladder = BudgetLadder::build(&ds, 1.0, 3.0, 0).unwrap();
        assert_eq!(ladder.levels().len(), 1);
        assert_eq!(ladder.levels()[0].rows.len(), 50);
    }

    #[test]
    fn ladder_clamps_tiny_levels_to_one_row_per_class() {
        let ds = toy(30, 3);
        let ladder = BudgetLadder::build(&ds, 100.0, 3.0, 0).unwrap();
        let smallest = &ladder.levels()[0];
        let pos = smallest.rows.iter().filter(|&&i| ds.labels()[i] == 1).count();
        assert_eq!(pos, 1);
        assert!(smallest.rows.len() > pos);
    }

    #[test]
    fn slice_lookup() {
        let ds = toy(1000, 100);
        let ladder = BudgetLadder::build(&ds, 100.0, 3.0, 2).unwrap();
        assert_eq!(ladder.slice_for_budget(100.0).unwrap().len(), 1000);
        let mid = ladder.slice_for_budget(100.0 / 9.0).unwrap();
        let small = ladder.slice_for_budget(100.0 / 27.0).unwrap();
        assert!(small.iter().all(|i| mid.contains(i)));
        assert!(matches!(ladder.slice_for_budget(50.0), Err(DataError::UnknownBudget(_))));
        // r_i computed as r·eta^i lands within tolerance of R·eta^-s
        let r = 100.0 * 3f64.powi(-4);
        assert!(ladder.slice_for_budget(r * 3f64.powi(2)).is_ok());
    }

    #[test]
    fn undersample_targets() {
        // 1 positive, 99 negatives, 5% target keeps 19 negatives.
        let labels: Vec<u8> = (0..100).map(|i| u8::from(i == 0)).collect();
        let rows: Vec<usize> = (0..100).collect();
        let out = undersample(&labels, &rows, 0.05, 1);
        assert_eq!(out.len(), 20);
        assert!(out.contains(&0));

        let labels: Vec<u8> = (0..1000).map(|i| u8::from(i % 100 == 0)).collect();
        let rows: Vec<usize> = (0..1000).collect();
        let out = undersample(&labels, &rows, 0.10, 9);
        let pos = out.iter().filter(|&&i| labels[i] == 1).count();
        assert_eq!((pos, out.len() - pos), (10, 90));
        assert_eq!(out, undersample(&labels, &rows, 0.10, 9));

        let balanced: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        let rows: Vec<usize> = (0..10).collect();
        assert_eq!(undersample(&balanced, &rows, 0.2, 1), rows);
    }

    #[test]
    fn write_csv_round_trip() {
        let ds = toy(6, 3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        ds.write_csv(&path, &[0, 2, 5], true).unwrap();
        let back = load_csv(&path, "y", "g").unwrap();
        assert_eq!(back, ds.subset(&[0, 2, 5]));
        ds.write_csv(&path, &[0, 1], false).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x,g\n0,a\n1,b\n");
    }
}
