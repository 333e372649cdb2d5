use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Column holding truth labels, by header name or zero-based position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: Option<LabelColumn>,
    /// Feature columns to keep (zero-based positions in the file, label
    /// column excluded); all remaining columns when `None`.
    pub columns: Option<Vec<usize>>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            label_column: None,
            columns: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadedCsv {
    pub data: Dataset,
    pub truth: Option<Partition>,
    /// Names of the feature columns, when the file has a header.
    pub feature_names: Option<Vec<String>>,
}

/// Reads a comma-separated numeric table. Row and column numbers in errors
/// are one-based positions in the file.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<LoadedCsv> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |row: usize, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        column,
        message,
    };

    let header: Option<Vec<String>> = if options.has_header {
        let h = reader.headers().map_err(|e| parse_err(1, 0, e.to_string()))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };
    let label_pos = match &options.label_column {
        None => None,
        Some(LabelColumn::Index(i)) => Some(*i),
        Some(LabelColumn::Name(name)) => {
            let h = header
                .as_ref()
                .ok_or_else(|| Error::Config(format!("label column `{name}` given by name but the file has no header")))?;
            Some(
                h.iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::Config(format!("no column named `{name}` in {}", path.display())))?,
            )
        }
    };

    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    let mut features: Option<Vec<usize>> = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0;
    for (r, record) in reader.records().enumerate() {
        let line = r + 1 + options.has_header as usize;
        let record = record.map_err(|e| parse_err(line, 0, e.to_string()))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(parse_err(line, record.len().min(w) + 1, format!("expected {w} fields, found {}", record.len())));
        }
        let cols = match &features {
            Some(c) => c,
            None => {
                if let Some(lp) = label_pos {
                    if lp >= w {
                        return Err(Error::Config(format!("label column {lp} out of range for {w} columns")));
                    }
                }
                let all: Vec<usize> = (0..w).filter(|&c| Some(c) != label_pos).collect();
                let chosen = match &options.columns {
                    None => all,
                    Some(sel) => {
                        for c in sel {
                            if !all.contains(c) {
                                return Err(Error::Config(format!("feature column {c} is not a feature column of {w}")));
                            }
                        }
                        sel.clone()
                    }
                };
                if chosen.is_empty() {
                    return Err(Error::Config("no feature columns selected".into()));
                }
                features.insert(chosen)
            }
        };
        for &c in cols.iter() {
            let cell = &record[c];
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, c + 1, format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(line, c + 1, format!("`{cell}` is not finite")));
            }
            values.push(v);
        }
        if let Some(lp) = label_pos {
            labels.push(record[lp].to_string());
        }
        n += 1;
    }
    let cols = features.ok_or_else(|| Error::EmptyInput(format!("{} has no data rows", path.display())))?;
    let data = Dataset::from_flat(values, cols.len())?;
    debug_assert_eq!(data.n(), n);
    let truth = if label_pos.is_some() { Some(Partition::from_labels(&labels.iter().map(String::as_str).collect::<Vec<_>>())?) } else { None };
    let feature_names = header.map(|h| cols.iter().map(|&c| h[c].clone()).collect());
    Ok(LoadedCsv {
        data,
        truth,
        feature_names,
    })
}
