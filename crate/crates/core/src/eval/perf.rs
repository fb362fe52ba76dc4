//! Per-dataset performance tables.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::family_of_id;

/// Metric values of several methods across datasets: `values[t][m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfTable {
    datasets: Vec<String>,
    methods: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl PerfTable {
    pub fn new(datasets: Vec<String>, methods: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != datasets.len() {
            return Err(Error::ShapeMismatch {
                expected: datasets.len(),
                actual: values.len(),
            });
        }
        for (t, row) in values.iter().enumerate() {
            if row.len() != methods.len() {
                return Err(Error::ShapeMismatch {
                    expected: methods.len(),
                    actual: row.len(),
                });
            }
            if let Some(m) = row.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::FormatError(format!(
                    "dataset `{}`, method `{}`: value {} outside [0, 1]",
                    datasets[t], methods[m], row[m]
                )));
            }
        }
        Ok(Self { datasets, methods, values })
    }

    /// Skips the range check; for derived tables such as differences.
    pub(crate) fn unchecked(datasets: Vec<String>, methods: Vec<String>, values: Vec<Vec<f64>>) -> Self {
        Self { datasets, methods, values }
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn get(&self, t: usize, m: usize) -> f64 {
        self.values[t][m]
    }

    pub fn method_index(&self, name: &str) -> Option<usize> {
        self.methods.iter().position(|m| m == name)
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[m]).collect()
    }

    pub fn column_by_name(&self, name: &str) -> Result<Vec<f64>> {
        let m = self
            .method_index(name)
            .ok_or_else(|| Error::ConfigError(format!("no method `{name}` in performance table")))?;
        Ok(self.column(m))
    }

    /// Appends a method column.
    pub fn push_method(&mut self, name: impl Into<String>, column: &[f64]) -> Result<()> {
        if column.len() != self.datasets.len() {
            return Err(Error::ShapeMismatch {
                expected: self.datasets.len(),
                actual: column.len(),
            });
        }
        if let Some(v) = column.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::FormatError(format!("value {v} outside [0, 1]")));
        }
        self.methods.push(name.into());
        for (row, &v) in self.values.iter_mut().zip(column) {
            row.push(v);
        }
        Ok(())
    }

    /// Mean and population standard deviation of a method across datasets.
    pub fn mean_std(&self, m: usize) -> (f64, f64) {
        mean_std(&self.column(m))
    }

    /// Wide CSV: a `dataset` column followed by one column per method.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::FormatError(e.to_string()))?.clone();
        if header.get(0) != Some("dataset") {
            return Err(Error::FormatError("first column must be `dataset`".into()));
        }
        let methods: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let (mut datasets, mut values) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::FormatError(e.to_string()))?;
            datasets.push(rec[0].to_string());
            let row = rec
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, f)| {
                    f.parse::<f64>().map_err(|_| {
                        Error::FormatError(format!("column `{}`: `{f}` is not a number", &header[j]))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Self::new(datasets, methods, values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let fmt_err = |e: csv::Error| Error::FormatError(e.to_string());
        let mut header = vec!["dataset".to_string()];
        header.extend(self.methods.iter().cloned());
        w.write_record(&header).map_err(fmt_err)?;
        for (name, row) in self.datasets.iter().zip(&self.values) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| format!("{v:.16e}")));
            w.write_record(&rec).map_err(fmt_err)?;
        }
        w.flush().map_err(|e| Error::FormatError(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.to_writer(std::io::BufWriter::new(file))
    }
}

/// Metric value of every pool member on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolPerf {
    pub dataset: String,
    pub model_ids: Vec<String>,
    pub values: Vec<f64>,
}

impl PoolPerf {
    pub fn new(dataset: impl Into<String>, model_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if model_ids.len() != values.len() {
            return Err(Error::ShapeMismatch {
                expected: model_ids.len(),
                actual: values.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            dataset: dataset.into(),
            model_ids,
            values,
        })
    }

    /// Values sorted best first.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Values of the models whose id belongs to `family`.
    pub fn family_values(&self, family: &str) -> Vec<f64> {
        self.model_ids
            .iter()
            .zip(&self.values)
            .filter(|(id, _)| family_of_id(id) == family)
            .map(|(_, &v)| v)
            .collect()
    }

    /// Families in order of first appearance.
    pub fn families(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for id in &self.model_ids {
            let f = family_of_id(id);
            if !out.iter().any(|x| x == f) {
                out.push(f.to_string());
            }
        }
        out
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
