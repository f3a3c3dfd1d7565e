//! Labelled training data and its CSV form (`x_1,…,x_N,y`).

use std::io::Read;
use std::path::{Path, PathBuf};

use crate::encoding::DataPoint;
use crate::error::{Error, Result};

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_shortest(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<DataPoint>,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<DataPoint>, labels: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidArgument("dataset has no rows".into()));
        }
        if inputs.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                actual: labels.len(),
            });
        }
        Ok(Self { inputs, labels })
    }

    /// Real-valued inputs given as plain rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        Self::new(rows.into_iter().map(DataPoint::new).collect(), labels)
    }

    pub fn inputs(&self) -> &[DataPoint] {
        &self.inputs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Feature count of the first input.
    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn check_binary_labels(&self) -> Result<()> {
        match self.labels.iter().position(|&y| y != 1.0 && y != -1.0) {
            None => Ok(()),
            Some(m) => Err(Error::InvalidArgument(format!(
                "label {} of row {} is not -1 or +1",
                self.labels[m],
                m + 1
            ))),
        }
    }

    /// Reads a CSV file with a header row. The `y` column holds labels; every
    /// other column is a feature, in header order.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file, path)
    }

    /// As [`Dataset::load`]; `origin` is only used in error messages.
    pub fn from_reader<R: Read>(reader: R, origin: impl AsRef<Path>) -> Result<Self> {
        let origin: PathBuf = origin.as_ref().to_path_buf();
        let fail = |message: String| Error::Dataset {
            path: origin.clone(),
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| fail(format!("unreadable header: {e}")))?
            .clone();
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(fail("missing header row".into()));
        }
        let y_col = header
            .iter()
            .position(|h| h == "y")
            .ok_or_else(|| fail("missing y column".into()))?;
        let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != y_col).collect();
        if feature_cols.is_empty() {
            return Err(fail("no feature columns".into()));
        }

        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let line = i + 2;
            let record = record.map_err(|e| fail(format!("row {row} (line {line}): {e}")))?;
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            if record.len() != header.len() {
                return Err(fail(format!(
                    "row {row} (line {line}) has {} fields, header has {}",
                    record.len(),
                    header.len()
                )));
            }
            let cell = |c: usize| -> Result<f64> {
                record[c].parse::<f64>().map_err(|_| {
                    fail(format!(
                        "row {row} (line {line}), column {} '{}': not a number: '{}'",
                        c + 1,
                        &header[c],
                        &record[c]
                    ))
                })
            };
            let x = feature_cols.iter().map(|&c| cell(c)).collect::<Result<Vec<_>>>()?;
            labels.push(cell(y_col)?);
            inputs.push(DataPoint::new(x));
        }
        if inputs.is_empty() {
            return Err(fail("no rows".into()));
        }
        Self::new(inputs, labels)
    }

    /// Writes the dataset back in the CSV form read by [`Dataset::load`].
    /// Complex inputs are rejected.
    pub fn to_csv_string(&self) -> Result<String> {
        let n = self.input_dim();
        let mut out = (1..=n).map(|k| format!("x_{k},")).collect::<String>();
        out.push_str("y\n");
        for (x, y) in self.inputs.iter().zip(&self.labels) {
            for v in x.real_values()? {
                out.push_str(&format_shortest(v));
                out.push(',');
            }
            out.push_str(&format_shortest(*y));
            out.push('\n');
        }
        Ok(out)
    }
}
