//! Dense feature matrices and per-dataset score matrices.

use crate::error::{Error, Result};

/// Row-major dense matrix of features, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// Per-feature `(min, max)` over all rows.
    pub fn column_bounds(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); self.cols];
        for row in self.iter_rows() {
            for (b, &v) in bounds.iter_mut().zip(row) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        bounds
    }

    /// Feature-wise min-max scaling into `[0, 1]`. Constant features map to 0.
    pub fn min_max_scaled(&self) -> Matrix {
        let bounds = self.column_bounds();
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                let (lo, hi) = bounds[j];
                *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.0 };
            }
        }
        out
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Raw outlier scores of every pool model on one dataset. Column `i` holds
/// model `i`'s scores; higher always means more anomalous.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub dataset_id: String,
    model_ids: Vec<String>,
    columns: Vec<Vec<f64>>,
    degenerate: Vec<bool>,
    repaired: Vec<usize>,
}

impl ScoreMatrix {
    /// Ingests raw columns. Non-finite entries are replaced by the column's
    /// finite minimum and counted in [`ScoreMatrix::repaired`].
    pub fn new(
        dataset_id: impl Into<String>,
        model_ids: Vec<String>,
        columns: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if model_ids.len() != columns.len() {
            return Err(Error::ShapeMismatch {
                expected: model_ids.len(),
                actual: columns.len(),
            });
        }
        let n = columns.first().map_or(0, Vec::len);
        let mut repaired = Vec::with_capacity(columns.len());
        let mut cleaned = Vec::with_capacity(columns.len());
        for col in columns {
            if col.len() != n {
                return Err(Error::ShapeMismatch {
                    expected: n,
                    actual: col.len(),
                });
            }
            let (col, fixed) = repair_column(col);
            repaired.push(fixed);
            cleaned.push(col);
        }
        let degenerate = cleaned.iter().map(|c| is_constant(c)).collect();
        Ok(Self {
            dataset_id: dataset_id.into(),
            model_ids,
            columns: cleaned,
            degenerate,
            repaired,
        })
    }

    /// Columns with generated ids `m0, m1, ...`; each id is its own family.
    pub fn from_columns(dataset_id: impl Into<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..columns.len()).map(|i| format!("m{i}")).collect();
        Self::new(dataset_id, ids, columns)
    }

    pub fn n_samples(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_models(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn model_id(&self, i: usize) -> &str {
        &self.model_ids[i]
    }

    /// Detector family of model `i`: the id prefix before the first `|`.
    pub fn family_of(&self, i: usize) -> &str {
        family_of_id(&self.model_ids[i])
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate[i]
    }

    /// Number of non-finite entries replaced during ingestion, per column.
    pub fn repaired(&self) -> &[usize] {
        &self.repaired
    }

    pub fn position(&self, model_id: &str) -> Option<usize> {
        self.model_ids.iter().position(|m| m == model_id)
    }

    /// Appends a column; errors if the id already exists or lengths differ.
    pub fn push_column(&mut self, model_id: String, column: Vec<f64>) -> Result<()> {
        if self.n_models() > 0 && column.len() != self.n_samples() {
            return Err(Error::ShapeMismatch {
                expected: self.n_samples(),
                actual: column.len(),
            });
        }
        if self.position(&model_id).is_some() {
            return Err(Error::FormatError(format!("duplicate column `{model_id}`")));
        }
        let (column, fixed) = repair_column(column);
        self.degenerate.push(is_constant(&column));
        self.repaired.push(fixed);
        self.columns.push(column);
        self.model_ids.push(model_id);
        Ok(())
    }

    /// Same matrix with columns reordered by `order` (indices into self).
    pub fn reordered(&self, order: &[usize]) -> ScoreMatrix {
        ScoreMatrix {
            dataset_id: self.dataset_id.clone(),
            model_ids: order.iter().map(|&i| self.model_ids[i].clone()).collect(),
            columns: order.iter().map(|&i| self.columns[i].clone()).collect(),
            degenerate: order.iter().map(|&i| self.degenerate[i]).collect(),
            repaired: order.iter().map(|&i| self.repaired[i]).collect(),
        }
    }
}

fn repair_column(mut col: Vec<f64>) -> (Vec<f64>, usize) {
    let min = col
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::INFINITY, f64::min);
    let fill = if min.is_finite() { min } else { 0.0 };
    let mut fixed = 0;
    for v in &mut col {
        if !v.is_finite() {
            *v = fill;
            fixed += 1;
        }
    }
    (col, fixed)
}

/// Family part of a model id: the prefix before the first `|`.
pub fn family_of_id(id: &str) -> &str {
    id.split('|').next().unwrap_or(id)
}

pub(crate) fn is_constant(col: &[f64]) -> bool {
    col.windows(2).all(|w| w[0] == w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_scores_become_column_minimum() {
        let m = ScoreMatrix::from_columns("d", vec![vec![3.0, f64::NAN, 1.0, f64::INFINITY]]).unwrap();
        assert_eq!(m.column(0), &[3.0, 1.0, 1.0, 1.0]);
        assert_eq!(m.repaired(), &[2]);
    }

    #[test]
    fn constant_columns_are_flagged() {
        let m = ScoreMatrix::from_columns("d", vec![vec![2.0; 4], vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        assert!(m.is_degenerate(0));
        assert!(!m.is_degenerate(1));
    }

    #[test]
    fn family_is_id_prefix() {
        let m = ScoreMatrix::new(
            "d",
            vec!["lof|n_neighbors=5|distance=euclidean".into(), "solo".into()],
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        )
        .unwrap();
        assert_eq!(m.family_of(0), "lof");
        assert_eq!(m.family_of(1), "solo");
    }

    #[test]
    fn ragged_columns_are_rejected() {
        let err = ScoreMatrix::from_columns("d", vec![vec![1.0, 2.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn min_max_scaling_handles_constant_features() {
        let x = Matrix::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let s = x.min_max_scaled();
        assert_eq!(s.row(0), &[0.0, 0.0]);
        assert_eq!(s.row(1), &[1.0, 0.0]);
    }
}
