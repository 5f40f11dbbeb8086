//! Dataset loading, validation, and the preprocessing used by the benchmark
//! protocol: categorical expansion into binary indicators, then mean
//! centering and scaling every column to unit (population) variance.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

/// An n x d feature matrix with optional labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Option<Array1<f64>>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(features: Array2<f64>, labels: Option<Array1<f64>>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::invalid_argument(
                "dataset must have at least one row",
            ));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_argument(
                "dataset contains non-finite entries",
            ));
        }
        if let Some(ref l) = labels {
            if l.len() != features.nrows() {
                return Err(Error::invalid_argument(format!(
                    "labels length {} does not match n = {}",
                    l.len(),
                    features.nrows()
                )));
            }
        }
        Ok(Dataset {
            features,
            labels,
            feature_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = Some(names);
        self
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn d(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> Option<&Array1<f64>> {
        self.labels.as_ref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Copy of the rows at the given indices, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Array2<f64> {
        let d = self.d();
        let mut out = Array2::zeros((rows.len(), d));
        for (dst, &src) in rows.iter().enumerate() {
            out.row_mut(dst).assign(&self.features.row(src));
        }
        out
    }

    /// Dataset restricted to the given rows (labels follow).
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let features = self.select_rows(rows);
        let labels = self
            .labels
            .as_ref()
            .map(|l| rows.iter().map(|&i| l[i]).collect::<Array1<f64>>());
        Dataset::new(features, labels)
    }
}

/// What `preprocess` did, so the identical transform can be applied to
/// held-out points.
#[derive(Debug, Clone)]
pub struct PreprocessReport {
    /// Per-column mean subtracted after categorical expansion.
    pub mean: Vec<f64>,
    /// Per-column scale divided out; constant columns keep scale 1.
    pub scale: Vec<f64>,
    /// (original column index, number of indicator columns it expanded into).
    pub expanded_categoricals: Vec<(usize, usize)>,
    /// Population variance convention (divide by n).
    pub population_variance: bool,
}

fn parse_cell(tok: &str, line: usize) -> Result<f64> {
    tok.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{}` as a number", tok.trim()),
    })
}

/// Load a comma-separated file. An optional header row is detected by a
/// non-numeric first line. `label_column` extracts that column as labels.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<usize>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path.as_ref())?;
    load_csv_str(&text, label_column)
}

pub fn load_csv_str(text: &str, label_column: Option<usize>) -> Result<Dataset> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut names: Option<Vec<String>> = None;
    let mut width: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if rows.is_empty() && names.is_none() {
            // Header detection: first row with any non-numeric cell.
            if cells.iter().any(|c| c.trim().parse::<f64>().is_err()) {
                names = Some(cells.iter().map(|c| c.trim().to_string()).collect());
                width = Some(cells.len());
                continue;
            }
        }
        if let Some(w) = width {
            if cells.len() != w {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("expected {} columns, found {}", w, cells.len()),
                });
            }
        } else {
            width = Some(cells.len());
        }
        let parsed: Vec<f64> = cells
            .iter()
            .map(|c| parse_cell(c, line_no))
            .collect::<Result<_>>()?;
        rows.push(parsed);
    }
    let w = width.ok_or_else(|| Error::invalid_argument("empty csv input"))?;
    if rows.is_empty() {
        return Err(Error::invalid_argument("csv input has no data rows"));
    }
    let (features, labels, names) = split_label(rows, w, label_column, names)?;
    let mut ds = Dataset::new(features, labels)?;
    if let Some(n) = names {
        ds = ds.with_feature_names(n);
    }
    Ok(ds)
}

type SplitParts = (Array2<f64>, Option<Array1<f64>>, Option<Vec<String>>);

fn split_label(
    rows: Vec<Vec<f64>>,
    width: usize,
    label_column: Option<usize>,
    names: Option<Vec<String>>,
) -> Result<SplitParts> {
    let n = rows.len();
    match label_column {
        None => {
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            let features = Array2::from_shape_vec((n, width), flat).expect("uniform rows");
            Ok((features, None, names))
        }
        Some(col) => {
            if col >= width {
                return Err(Error::invalid_argument(format!(
                    "label column {col} out of range for width {width}"
                )));
            }
            let mut labels = Vec::with_capacity(n);
            let mut flat = Vec::with_capacity(n * (width - 1));
            for row in rows {
                for (j, v) in row.into_iter().enumerate() {
                    if j == col {
                        labels.push(v);
                    } else {
                        flat.push(v);
                    }
                }
            }
            let features = Array2::from_shape_vec((n, width - 1), flat).expect("uniform rows");
            let names = names.map(|mut v| {
                v.remove(col);
                v
            });
            Ok((features, Some(Array1::from(labels)), names))
        }
    }
}

/// Load a sparse `<label> <idx>:<val> ...` file with 1-based, strictly
/// increasing indices per line. Absent indices are zero; d is the maximum
/// index seen anywhere.
pub fn load_libsvm(path: impl AsRef<Path>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path.as_ref())?;
    load_libsvm_str(&text)
}

pub fn load_libsvm_str(text: &str) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut d = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        labels.push(parse_cell(label_tok, line_no)?);
        let mut entries = Vec::new();
        let mut prev_index = 0usize;
        for tok in tokens {
            let (is, vs) = tok.split_once(':').ok_or_else(|| Error::Format {
                line: line_no,
                message: format!("expected idx:value, found `{tok}`"),
            })?;
            let index: usize = is.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad feature index `{is}`"),
            })?;
            if index == 0 {
                return Err(Error::Format {
                    line: line_no,
                    message: "feature indices are 1-based".into(),
                });
            }
            if index <= prev_index {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("index {index} not strictly increasing after {prev_index}"),
                });
            }
            prev_index = index;
            let value = parse_cell(vs, line_no)?;
            d = d.max(index);
            entries.push((index - 1, value));
        }
        sparse_rows.push(entries);
    }
    if sparse_rows.is_empty() {
        return Err(Error::invalid_argument("libsvm input has no rows"));
    }
    // A label-only file still yields rows; give them a single zero column so
    // the dense matrix is well-formed.
    let d = d.max(1);
    let n = sparse_rows.len();
    let mut features = Array2::zeros((n, d));
    for (i, entries) in sparse_rows.into_iter().enumerate() {
        for (j, v) in entries {
            features[[i, j]] = v;
        }
    }
    Dataset::new(features, Some(Array1::from(labels)))
}

/// Serialize to the libsvm format, omitting zeros. If the last column is
/// entirely zero an explicit `d:0` entry is kept on the first row so a
/// round trip preserves the dense shape.
pub fn save_libsvm(data: &Dataset) -> Result<String> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::invalid_argument("libsvm output requires labels"))?;
    let d = data.d();
    let last_col_nonzero = (0..data.n()).any(|i| data.features()[[i, d - 1]] != 0.0);
    let mut out = String::new();
    for i in 0..data.n() {
        let _ = write!(out, "{}", labels[i]);
        for j in 0..d {
            let v = data.features()[[i, j]];
            if v != 0.0 || (i == 0 && j == d - 1 && !last_col_nonzero) {
                let _ = write!(out, " {}:{}", j + 1, v);
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Expand categorical columns into 0/1 indicators (one per distinct value,
/// ascending), then center every column and scale to unit population
/// variance. Constant columns get scale 1 instead of being dropped.
pub fn preprocess(
    data: &Dataset,
    categorical_columns: &BTreeSet<usize>,
) -> Result<(Dataset, PreprocessReport)> {
    let n = data.n();
    let d = data.d();
    for &c in categorical_columns {
        if c >= d {
            return Err(Error::invalid_argument(format!(
                "categorical column {c} out of range for d = {d}"
            )));
        }
    }
    let mut columns: Vec<Array1<f64>> = Vec::new();
    let mut expanded = Vec::new();
    for j in 0..d {
        let col = data.features().column(j).to_owned();
        if categorical_columns.contains(&j) {
            let mut values: Vec<f64> = col.to_vec();
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            values.dedup();
            expanded.push((j, values.len()));
            for v in &values {
                columns.push(col.mapv(|x| if x == *v { 1.0 } else { 0.0 }));
            }
        } else {
            columns.push(col);
        }
    }
    let width = columns.len();
    let mut features = Array2::zeros((n, width));
    let mut mean = Vec::with_capacity(width);
    let mut scale = Vec::with_capacity(width);
    for (j, col) in columns.into_iter().enumerate() {
        let mu = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n as f64;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        mean.push(mu);
        scale.push(sd);
        for i in 0..n {
            features[[i, j]] = (col[i] - mu) / sd;
        }
    }
    let out = Dataset::new(features, data.labels().cloned())?;
    Ok((
        out,
        PreprocessReport {
            mean,
            scale,
            expanded_categoricals: expanded,
            population_variance: true,
        },
    ))
}

/// Apply a recorded preprocessing transform to new points (no categorical
/// expansion; widths must already agree).
pub fn apply_preprocess(report: &PreprocessReport, features: &Array2<f64>) -> Result<Array2<f64>> {
    if features.ncols() != report.mean.len() {
        return Err(Error::invalid_argument("apply_preprocess: width mismatch"));
    }
    let mut out = features.clone();
    for j in 0..report.mean.len() {
        for i in 0..out.nrows() {
            out[[i, j]] = (out[[i, j]] - report.mean[j]) / report.scale[j];
        }
    }
    Ok(out)
}

/// Benchmark dataset metadata (name, points, features).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub n: usize,
    pub d: usize,
}

/// The benchmark datasets this toolkit targets. Download is out of scope;
/// the registry documents expected shapes for the bench command.
pub const DATASET_REGISTRY: [DatasetInfo; 4] = [
    DatasetInfo {
        name: "YearPredictionMSD",
        n: 515_345,
        d: 90,
    },
    DatasetInfo {
        name: "Covertype",
        n: 581_012,
        d: 54,
    },
    DatasetInfo {
        name: "Cod-RNA",
        n: 331_152,
        d: 8,
    },
    DatasetInfo {
        name: "Adult",
        n: 48_842,
        d: 110,
    },
];
