//! Observation × measure matrices and their CSV form.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{fmt_f64, write_atomic};
use crate::measures::{FeatureVector, MEASURE_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ids: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    /// Per row: assortativity was undefined and imputed as 0.
    assort_undef: Vec<bool>,
    standardized: bool,
}

impl FeatureMatrix {
    pub fn new(ids: Vec<String>, columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::invalid("one id per row required"));
        }
        if rows.iter().any(|r| r.len() != columns.len()) {
            return Err(Error::invalid("ragged feature matrix"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix holds a non-finite value"));
        }
        let mut sorted = columns.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != columns.len() {
            return Err(Error::invalid("duplicate column name"));
        }
        let n = ids.len();
        Ok(FeatureMatrix {
            ids,
            columns,
            rows,
            assort_undef: vec![false; n],
            standardized: false,
        })
    }

    pub fn from_vectors<I>(rows: I) -> Self
    where
        I: IntoIterator<Item = (String, FeatureVector)>,
    {
        let mut ids = Vec::new();
        let mut values = Vec::new();
        let mut undef = Vec::new();
        for (id, fv) in rows {
            ids.push(id);
            values.push(fv.values().to_vec());
            undef.push(fv.assortativity_undefined());
        }
        FeatureMatrix {
            ids,
            columns: MEASURE_NAMES.iter().map(|s| s.to_string()).collect(),
            rows: values,
            assort_undef: undef,
            standardized: false,
        }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn assort_undefined(&self) -> &[bool] {
        &self.assort_undef
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    /// Subset of rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            columns: self.columns.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            assort_undef: idx.iter().map(|&i| self.assort_undef[i]).collect(),
            standardized: self.standardized,
        }
    }

    /// Copy with column `c` removed.
    pub fn drop_column(&self, c: usize) -> FeatureMatrix {
        let mut out = self.clone();
        out.columns.remove(c);
        for r in out.rows.iter_mut() {
            r.remove(c);
        }
        out
    }

    /// Z-scores every column with the sample standard deviation.
    /// Zero-variance columns become all zero; their names are returned.
    pub fn standardize(&self) -> Result<(FeatureMatrix, Vec<String>)> {
        let n = self.n_rows();
        if n < 2 {
            return Err(Error::invalid(
                "standardizing needs at least two observations",
            ));
        }
        let mut out = self.clone();
        let mut constant = Vec::new();
        for c in 0..self.n_cols() {
            let col = self.column(c);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let sd = var.sqrt();
            if sd <= 1e-12 * mean.abs().max(1.0) {
                constant.push(self.columns[c].clone());
                out.rows.iter_mut().for_each(|r| r[c] = 0.0);
            } else {
                for (r, x) in out.rows.iter_mut().zip(&col) {
                    r[c] = (x - mean) / sd;
                }
            }
        }
        out.standardized = true;
        Ok((out, constant))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["user_id".to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("assort_undef".into());
        w.write_record(&header)?;
        for ((id, row), undef) in self.ids.iter().zip(&self.rows).zip(&self.assort_undef) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|&v| fmt_f64(v)));
            rec.push(u8::from(*undef).to_string());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        write_atomic(path, &bytes)
    }

    /// Reads a feature CSV. An `assort_undef` column, if present, is read as
    /// the imputation flag rather than as a measure.
    pub fn read_csv(path: &Path) -> Result<FeatureMatrix> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = csv::Reader::from_reader(file);
        let header = rdr.headers()?.clone();
        if header.get(0) != Some("user_id") {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: "first column must be user_id".into(),
            });
        }
        let flag_col = header.iter().position(|h| h == "assort_undef");
        let columns: Vec<String> = header
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(i, _)| Some(*i) != flag_col)
            .map(|(_, h)| h.to_string())
            .collect();
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        let mut undef = Vec::new();
        for (lineno, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = lineno + 2;
            let bad = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line,
                msg,
            };
            if rec.len() != header.len() {
                return Err(bad(format!(
                    "expected {} fields, got {}",
                    header.len(),
                    rec.len()
                )));
            }
            ids.push(rec[0].to_string());
            let mut row = Vec::with_capacity(columns.len());
            for (i, field) in rec.iter().enumerate().skip(1) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("not a number: `{field}`")))?;
                if Some(i) == flag_col {
                    undef.push(v != 0.0);
                } else {
                    row.push(v);
                }
            }
            rows.push(row);
        }
        if ids.is_empty() {
            return Err(Error::EmptyInput(path.to_path_buf()));
        }
        let mut fm = FeatureMatrix::new(ids, columns, rows)?;
        if flag_col.is_some() {
            fm.assort_undef = undef;
        }
        Ok(fm)
    }
}
