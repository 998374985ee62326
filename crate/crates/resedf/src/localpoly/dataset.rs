//! The observed sample `(X_j, delta_j * Y_j, delta_j)`.

use crate::{Error, Result};

/// One observation: covariates, stored response, and the observation
/// indicator. When `observed` is false the stored response is a placeholder
/// (conventionally 0) and no estimator in this crate reads it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRow {
    pub x: Vec<f64>,
    pub y: f64,
    pub observed: bool,
}

impl DataRow {
    pub fn observed(x: Vec<f64>, y: f64) -> Self {
        Self { x, y, observed: true }
    }

    pub fn missing(x: Vec<f64>) -> Self {
        Self { x, y: 0.0, observed: false }
    }
}

/// An immutable sample with per-coordinate domain bounds.
#[derive(Debug, Clone)]
pub struct Dataset {
    rows: Vec<DataRow>,
    dimension: usize,
    bounds: Vec<(f64, f64)>,
}

impl Dataset {
    /// Builds a dataset, inferring the covariate dimension from the first row
    /// and the bounds from the coordinate-wise range of the data.
    pub fn new(rows: Vec<DataRow>) -> Result<Self> {
        let bounds = Self::data_bounds(&rows)?;
        Self::with_bounds(rows, bounds)
    }

    /// As [`Dataset::new`] but with explicit domain bounds.
    pub fn with_bounds(rows: Vec<DataRow>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let dimension = match rows.first() {
            Some(row) => row.x.len(),
            None => {
                return Err(Error::InvalidConfig(
                    "dataset must contain at least one row".into(),
                ))
            }
        };
        if dimension == 0 {
            return Err(Error::InvalidConfig(
                "covariates must have at least one coordinate".into(),
            ));
        }
        for row in &rows {
            if row.x.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: row.x.len(),
                });
            }
        }
        if bounds.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                got: bounds.len(),
            });
        }
        Ok(Self { rows, dimension, bounds })
    }

    fn data_bounds(rows: &[DataRow]) -> Result<Vec<(f64, f64)>> {
        let first = rows.first().ok_or_else(|| {
            Error::InvalidConfig("dataset must contain at least one row".into())
        })?;
        let mut bounds: Vec<(f64, f64)> = first.x.iter().map(|&v| (v, v)).collect();
        for row in rows {
            for (b, &v) in bounds.iter_mut().zip(&row.x) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        Ok(bounds)
    }

    pub fn rows(&self) -> &[DataRow] {
        &self.rows
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows with `delta = 1`, the only rows estimators may read responses from.
    pub fn complete_cases(&self) -> impl Iterator<Item = &DataRow> {
        self.rows.iter().filter(|r| r.observed)
    }

    /// `N`, the number of complete cases.
    pub fn complete_case_count(&self) -> usize {
        self.rows.iter().filter(|r| r.observed).count()
    }
}
