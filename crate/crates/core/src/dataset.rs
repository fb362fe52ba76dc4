//! Datasets: feature matrix plus optional 0/1 labels.
//!
//! CSV layout: a header row, numeric feature columns, and optionally a final
//! column named `label` holding 0 or 1.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub name: String,
    pub x: Matrix,
    pub labels: Option<Vec<u8>>,
}

/// One row of the dataset manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub name: String,
    pub n: usize,
    pub d: usize,
    /// Outlier percentage, `None` without labels.
    pub outlier_pct: Option<f64>,
}

impl DatasetBundle {
    pub fn new(name: impl Into<String>, x: Matrix, labels: Option<Vec<u8>>) -> Result<Self> {
        let name = name.into();
        if x.rows() < 2 || x.cols() < 1 {
            return Err(Error::NotEnoughData(format!(
                "{name}: need n >= 2 and d >= 1, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != x.rows() {
                return Err(Error::ShapeMismatch {
                    expected: x.rows(),
                    actual: l.len(),
                });
            }
            if l.iter().any(|&v| v > 1) {
                return Err(Error::FormatError(format!("{name}: labels must be 0 or 1")));
            }
            let o = l.iter().filter(|&&v| v == 1).count();
            if o == 0 || o == l.len() {
                return Err(Error::DegenerateLabels);
            }
        }
        Ok(Self { name, x, labels })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    /// Number of labelled outliers.
    pub fn outlier_count(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().filter(|&&v| v == 1).count())
    }

    /// Labels as booleans (outlier = true).
    pub fn label_flags(&self) -> Option<Vec<bool>> {
        self.labels.as_ref().map(|l| l.iter().map(|&v| v == 1).collect())
    }

    pub fn manifest_row(&self) -> ManifestRow {
        ManifestRow {
            name: self.name.clone(),
            n: self.n(),
            d: self.d(),
            outlier_pct: self.outlier_count().map(|o| 100.0 * o as f64 / self.n() as f64),
        }
    }

    /// Reads a dataset CSV; the name is the file stem.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(name, file)
    }

    pub fn from_reader<R: std::io::Read>(name: String, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| Error::FormatError(format!("{name}: {e}")))?
            .clone();
        let has_label = header.iter().next_back().is_some_and(|h| h.eq_ignore_ascii_case("label"));
        let d = header.len() - usize::from(has_label);
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::FormatError(format!("{name}: {e}")))?;
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::FormatError(format!(
                        "{name}: row {}, column `{}`: `{field}` is not a number",
                        line + 1,
                        &header[j]
                    ))
                })?;
                if j < d {
                    if !v.is_finite() {
                        return Err(Error::FormatError(format!(
                            "{name}: row {}, column `{}` is not finite",
                            line + 1,
                            &header[j]
                        )));
                    }
                    data.push(v);
                } else if v == 0.0 || v == 1.0 {
                    labels.push(v as u8);
                } else {
                    return Err(Error::FormatError(format!(
                        "{name}: row {}, column `label` must be 0 or 1",
                        line + 1
                    )));
                }
            }
        }
        let n = data.len() / d.max(1);
        let x = Matrix::new(n, d, data)?;
        Self::new(name, x, has_label.then_some(labels))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::FormatError(e.to_string()))?;
        let mut header: Vec<String> = (0..self.d()).map(|j| format!("x{j}")).collect();
        if self.labels.is_some() {
            header.push("label".into());
        }
        w.write_record(&header).map_err(|e| Error::FormatError(e.to_string()))?;
        for (i, row) in self.x.iter_rows().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            if let Some(l) = &self.labels {
                rec.push(l[i].to_string());
            }
            w.write_record(&rec).map_err(|e| Error::FormatError(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_labels_and_counts_outliers() {
        let csv = "a,b,label\n1,2,0\n3,4,1\n5,6,0\n";
        let ds = DatasetBundle::from_reader("t".into(), csv.as_bytes()).unwrap();
        assert_eq!((ds.n(), ds.d()), (3, 2));
        assert_eq!(ds.outlier_count(), Some(1));
        assert_eq!(ds.x.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn unlabeled_is_fine() {
        let ds = DatasetBundle::from_reader("t".into(), "a\n1\n2\n".as_bytes()).unwrap();
        assert!(ds.labels.is_none());
        assert_eq!(ds.manifest_row().outlier_pct, None);
    }

    #[test]
    fn bad_cells_name_the_column() {
        let err = DatasetBundle::from_reader("t".into(), "a,b\n1,x\n2,3\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("`b`"), "{err}");
    }

    #[test]
    fn all_inlier_labels_rejected() {
        let r = DatasetBundle::from_reader("t".into(), "a,label\n1,0\n2,0\n".as_bytes());
        assert!(matches!(r, Err(Error::DegenerateLabels)));
    }
}
