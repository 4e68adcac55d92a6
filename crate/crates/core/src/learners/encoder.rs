use crate::data::Dataset;

use super::LearnerError;

#[derive(Debug, Clone, PartialEq)]
enum Column {
    Numeric { col: usize, mean: f64, scale: f64 },
    OneHot { col: usize, categories: Vec<String> },
}

/// Turns string cells into a dense, standardized design matrix.
///
/// A column is numeric when every non-empty cell of the fitting rows parses
/// as a number; missing numeric cells take the column mean. Other columns are
/// one-hot encoded over the categories seen while fitting, and unseen
/// categories encode as all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureEncoder {
    names: Vec<String>,
    columns: Vec<Column>,
    width: usize,
}

impl FeatureEncoder {
    pub fn fit(ds: &Dataset, rows: &[usize]) -> Self {
        let mut columns = Vec::with_capacity(ds.feature_columns().len());
        for col in 0..ds.feature_columns().len() {
            let parsed = ds.numeric_column(col);
            let numeric = rows
                .iter()
                .all(|&r| parsed[r].is_some() || ds.row(r)[col].trim().is_empty());
            if numeric {
                let values: Vec<f64> = rows.iter().filter_map(|&r| parsed[r]).collect();
                let n = values.len().max(1) as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                let scale = if var > 1e-24 { var.sqrt() } else { 1.0 };
                columns.push(Column::Numeric { col, mean, scale });
            } else {
                let mut categories: Vec<String> = rows.iter().map(|&r| ds.row(r)[col].clone()).collect();
                categories.sort();
                categories.dedup();
                columns.push(Column::OneHot { col, categories });
            }
        }
        let width = columns
            .iter()
            .map(|c| match c {
                Column::Numeric { .. } => 1,
                Column::OneHot { categories, .. } => categories.len(),
            })
            .sum();
        FeatureEncoder { names: ds.feature_columns().to_vec(), columns, width }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn check_schema(&self, ds: &Dataset) -> Result<(), LearnerError> {
        if ds.feature_columns() != self.names.as_slice() {
            return Err(LearnerError::SchemaMismatch {
                expected: self.names.clone(),
                got: ds.feature_columns().to_vec(),
            });
        }
        Ok(())
    }

    /// Row-major matrix of `rows.len() × width()`.
    pub fn transform(&self, ds: &Dataset, rows: &[usize]) -> Result<Vec<f64>, LearnerError> {
        self.check_schema(ds)?;
        let mut out = vec![0.0; rows.len() * self.width];
        for (k, &r) in rows.iter().enumerate() {
            let dst = &mut out[k * self.width..(k + 1) * self.width];
            let mut offset = 0;
            for column in &self.columns {
                match column {
                    Column::Numeric { col, mean, scale } => {
                        let x = ds.numeric_column(*col)[r].unwrap_or(*mean);
                        dst[offset] = (x - mean) / scale;
                        offset += 1;
                    }
                    Column::OneHot { col, categories } => {
                        if let Ok(pos) = categories.binary_search(&ds.row(r)[*col]) {
                            dst[offset + pos] = 1.0;
                        }
                        offset += categories.len();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transform_all(&self, ds: &Dataset) -> Result<Vec<f64>, LearnerError> {
        let rows: Vec<usize> = (0..ds.len()).collect();
        self.transform(ds, &rows)
    }
}
