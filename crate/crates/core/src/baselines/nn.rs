use crate::data::{squared_euclidean, Dataset};
use crate::error::{Error, Result};

/// Nearest other row of every row: `(index, Euclidean distance)`.
///
/// Rows are sorted by their first coordinate and each search stops once that
/// coordinate alone rules out any closer candidate. Ties go to the lowest
/// row index; duplicates of a row count as neighbours at distance zero.
pub fn nearest_neighbors(x: &Dataset) -> Result<Vec<(usize, f64)>> {
    let n = x.n();
    if n < 2 {
        return Err(Error::EmptyInput("nearest neighbours need at least two rows".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x.row(a)[0].total_cmp(&x.row(b)[0]).then(a.cmp(&b)));
    let mut out = vec![(usize::MAX, f64::INFINITY); n];
    for (pos, &i) in order.iter().enumerate() {
        let xi = x.row(i);
        let mut best = (f64::INFINITY, usize::MAX);
        let mut consider = |j: usize| -> bool {
            let gap = x.row(j)[0] - xi[0];
            if gap * gap > best.0 {
                return false;
            }
            let d = squared_euclidean(xi, x.row(j));
            if (d, j) < best {
                best = (d, j);
            }
            true
        };
        for &j in order[pos + 1..].iter() {
            if !consider(j) {
                break;
            }
        }
        for &j in order[..pos].iter().rev() {
            if !consider(j) {
                break;
            }
        }
        out[i] = (best.1, best.0.sqrt());
    }
    Ok(out)
}
