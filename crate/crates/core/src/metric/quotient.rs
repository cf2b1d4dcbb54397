//! The largest metric below a symmetric, nonnegative "distance" table:
//! `d(p, q) = inf over chains p = x₀, …, x_N = q of Σ F(x_i, x_{i+1})`.

use crate::error::{HsError, Result};

fn check(table: &[Vec<f64>]) -> Result<()> {
    let n = table.len();
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(HsError::InvalidTable(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if row[i] != 0.0 {
            return Err(HsError::InvalidTable(format!("diagonal entry {i} is {}", row[i])));
        }
        for (j, &v) in row.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(HsError::InvalidTable(format!("entry ({i},{j}) = {v}")));
            }
            if v != table[j][i] {
                return Err(HsError::InvalidTable(format!("entry ({i},{j}) = {v} but ({j},{i}) = {}", table[j][i])));
            }
        }
    }
    Ok(())
}

/// Chains of at most `max_links` links; `None` means unrestricted
/// (Floyd–Warshall).
pub fn quotient_metric(table: &[Vec<f64>], max_links: Option<usize>) -> Result<Vec<Vec<f64>>> {
    check(table)?;
    let n = table.len();
    match max_links {
        Some(k) if k + 1 < n => {
            let mut d = table.to_vec();
            for _ in 1..k.max(1) {
                let prev = d.clone();
                for i in 0..n {
                    for j in 0..n {
                        for m in 0..n {
                            let via = prev[i][m] + table[m][j];
                            if via < d[i][j] {
                                d[i][j] = via;
                            }
                        }
                    }
                }
            }
            Ok(d)
        }
        _ => {
            let mut d = table.to_vec();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = d[i][k] + d[k][j];
                        if via < d[i][j] {
                            d[i][j] = via;
                        }
                    }
                }
            }
            Ok(d)
        }
    }
}

/// Build the table from a point set and a pairwise function first.
pub fn quotient_metric_of<T>(points: &[T], f: impl Fn(&T, &T) -> f64, max_links: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let n = points.len();
    let mut table = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = f(&points[i], &points[j]);
            table[i][j] = v;
            table[j][i] = v;
        }
    }
    quotient_metric(&table, max_links)
}
