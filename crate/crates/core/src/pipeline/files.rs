//! On-disk artifacts: score matrices and small CSV tables, written
//! atomically with a fixed number format.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Shortest format that round-trips every `f64` (17 significant digits).
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::FormatError(format!("{}: {e}", path.display()))
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("partial");
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Renders a CSV table in memory.
pub fn csv_bytes<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::FormatError(e.to_string());
    w.write_record(header.iter().map(|h| h.as_ref())).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::FormatError(e.to_string()))
}

pub fn write_table<S: AsRef<str>>(path: &Path, header: &[S], rows: &[Vec<String>]) -> Result<()> {
    write_atomic(path, &csv_bytes(header, rows)?)
}

/// A CSV table as header plus string rows.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = rdr.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(csv_err(path)))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok((header, rows))
}

/// Score columns keyed by model id, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreColumns {
    pub ids: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl ScoreColumns {
    pub fn n_samples(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn get(&self, id: &str) -> Option<&Vec<f64>> {
        self.ids.iter().position(|x| x == id).map(|i| &self.columns[i])
    }
}

/// Reads a score CSV: one column per model, one row per sample. Every cell
/// must be a number (`nan`/`inf` allowed, repaired downstream).
pub fn read_scores(path: &Path) -> Result<ScoreColumns> {
    let (ids, rows) = read_table(path)?;
    let mut columns = vec![Vec::with_capacity(rows.len()); ids.len()];
    for (r, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                Error::FormatError(format!(
                    "{}: row {}, column `{}`: `{cell}` is not a number",
                    path.display(),
                    r + 1,
                    ids[j]
                ))
            })?;
            columns[j].push(v);
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(Error::FormatError(format!("{}: duplicate column `{dup}`", path.display())));
    }
    Ok(ScoreColumns { ids, columns })
}

pub fn write_scores(path: &Path, scores: &ScoreColumns) -> Result<()> {
    let n = scores.n_samples();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| scores.columns.iter().map(|c| fmt_num(c[i])).collect())
        .collect();
    write_table(path, &scores.ids, &rows)
}

/// Standard locations inside a run directory.
#[derive(Debug, Clone)]
pub struct RunLayout {
    pub root: PathBuf,
}

impl RunLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.csv")
    }

    pub fn scores(&self, dataset: &str) -> PathBuf {
        self.root.join("scores").join(format!("{dataset}.csv"))
    }

    pub fn failures(&self, dataset: &str) -> PathBuf {
        self.root.join("scores").join(format!("{dataset}.failures.csv"))
    }

    pub fn measures(&self, dataset: &str) -> PathBuf {
        self.root.join("select").join("measures").join(format!("{dataset}.csv"))
    }

    pub fn selection(&self) -> PathBuf {
        self.root.join("select").join("selection.csv")
    }

    pub fn pool_perf(&self) -> PathBuf {
        self.root.join("select").join("pool_perf.csv")
    }

    pub fn compare_dir(&self, metric: &str) -> PathBuf {
        self.root.join("compare").join(metric)
    }

    pub fn report_dir(&self) -> PathBuf {
        self.root.join("report")
    }
}
