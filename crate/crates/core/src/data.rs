use crate::error::{Error, Result};

/// An `n × p` matrix of finite observations stored row-major.
///
/// Rows are points, columns are features. Duplicate rows are allowed (bootstrap
/// resamples produce them).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    p: usize,
    row_ids: Option<Vec<String>>,
}

impl Dataset {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::EmptyInput("dataset has no rows".into()))?;
        let p = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * p);
        for row in rows {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::Dimension {
                    context: "dataset row",
                    expected: p,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, p)
    }

    /// Builds a dataset from row-major values with `p` columns.
    pub fn from_flat(values: Vec<f64>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::EmptyInput("dataset has no columns".into()));
        }
        if values.is_empty() {
            return Err(Error::EmptyInput("dataset has no rows".into()));
        }
        if !values.len().is_multiple_of(p) {
            return Err(Error::Dimension {
                context: "flat dataset length",
                expected: (values.len() / p + 1) * p,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / p,
                column: pos % p,
            });
        }
        let n = values.len() / p;
        Ok(Self {
            values,
            n,
            p,
            row_ids: None,
        })
    }

    pub fn with_row_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::Dimension {
                context: "row ids",
                expected: self.n,
                found: ids.len(),
            });
        }
        self.row_ids = Some(ids);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row_ids(&self) -> Option<&[String]> {
        self.row_ids.as_deref()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows at `indices`, in that order; repeats allowed.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("row selection is empty".into()));
        }
        let mut values = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            if i >= self.n {
                return Err(Error::Dimension {
                    context: "row index",
                    expected: self.n,
                    found: i,
                });
            }
            values.extend_from_slice(self.row(i));
        }
        let row_ids = self
            .row_ids
            .as_ref()
            .map(|ids| indices.iter().map(|&i| ids[i].clone()).collect());
        Ok(Self {
            values,
            n: indices.len(),
            p: self.p,
            row_ids,
        })
    }

    /// Projection onto the given feature columns, in that order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput("column selection is empty".into()));
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= self.p) {
            return Err(Error::Dimension {
                context: "column index",
                expected: self.p,
                found: c,
            });
        }
        let mut values = Vec::with_capacity(self.n * columns.len());
        for row in self.rows() {
            values.extend(columns.iter().map(|&c| row[c]));
        }
        Ok(Self {
            values,
            n: self.n,
            p: columns.len(),
            row_ids: self.row_ids.clone(),
        })
    }

    /// Applies `f(row, column, value)` to every entry, producing a new dataset.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(pos, &v)| f(pos / self.p, pos % self.p, v))
            .collect();
        let mut out = Self::from_flat(values, self.p)?;
        out.row_ids = self.row_ids.clone();
        Ok(out)
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.p];
        for row in self.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.n as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Unbiased per-column sample variances (zero when `n == 1`).
    pub fn column_variances(&self) -> Vec<f64> {
        let means = self.column_means();
        let mut vars = vec![0.0; self.p];
        if self.n < 2 {
            return vars;
        }
        for row in self.rows() {
            for ((acc, v), m) in vars.iter_mut().zip(row).zip(&means) {
                *acc += (v - m) * (v - m);
            }
        }
        let denom = (self.n - 1) as f64;
        vars.iter_mut().for_each(|v| *v /= denom);
        vars
    }

    pub(crate) fn check_dim(&self, p: usize, context: &'static str) -> Result<()> {
        if self.p != p {
            return Err(Error::Dimension {
                context,
                expected: p,
                found: self.p,
            });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(matches!(
            Dataset::from_rows(&[vec![0.0, 1.0], vec![2.0]]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            Dataset::from_rows(&[vec![0.0, f64::NAN]]),
            Err(Error::NonFinite { row: 0, column: 1 })
        ));
        assert!(matches!(
            Dataset::from_rows::<Vec<f64>>(&[]),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn select_keeps_duplicates_and_ids() {
        let x = Dataset::from_rows(&[[0.0], [1.0], [2.0]])
            .unwrap()
            .with_row_ids(vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        let s = x.select(&[2, 2, 0]).unwrap();
        assert_eq!(s.values(), &[2.0, 2.0, 0.0]);
        assert_eq!(s.row_ids().unwrap(), &["c", "c", "a"]);
    }

    #[test]
    fn column_statistics() {
        let x = Dataset::from_rows(&[[0.0, 1.0], [2.0, 1.0], [4.0, 1.0]]).unwrap();
        assert_eq!(x.column_means(), vec![2.0, 1.0]);
        assert_eq!(x.column_variances(), vec![4.0, 0.0]);
        assert_eq!(x.select_columns(&[1]).unwrap().values(), &[1.0, 1.0, 1.0]);
    }
}
