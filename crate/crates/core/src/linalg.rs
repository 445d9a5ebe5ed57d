//! Small dense least squares via Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub(crate) struct LeastSquares {
    pub coef: Vec<f64>,
    /// Standard errors, `sigma^2 (X'X)^-1` with `sigma^2 = rss / (n - k)`.
    pub std_err: Vec<f64>,
    pub rss: f64,
    /// Centered total sum of squares of the response.
    pub tss: f64,
    /// Uncentered sum of squares of the response.
    pub yy: f64,
}

impl LeastSquares {
    pub fn r_squared(&self) -> f64 {
        1.0 - self.rss / self.tss
    }
}

/// Solves `min ||X b - y||` where `columns` holds the regressors of `X`.
pub(crate) fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let n = y.len();
    let k = columns.len();
    if k == 0 || n <= k {
        return Err(Error::TooShort {
            what: "regression",
            required: k + 1,
            available: n,
        });
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::Misaligned {
            expected: n,
            found: c.len(),
        });
    }

    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut qty = y.to_vec();
    let col_norms: Vec<f64> = a
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|v| v * v).sum::<f64>()))
        .collect();
    let max_norm = col_norms.iter().cloned().fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Err(Error::Degenerate("all regressors are zero"));
    }

    let mut rdiag = vec![0.0; k];
    for j in 0..k {
        let norm = libm::sqrt(a[j][j..].iter().map(|v| v * v).sum::<f64>());
        if norm <= 1e-10 * max_norm.max(col_norms[j]) {
            return Err(Error::Degenerate("singular regressor matrix"));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in a[j][j..]
        a[j][j] -= alpha;
        let vnorm2: f64 = a[j][j..].iter().map(|v| v * v).sum();
        let (head, tail) = a.split_at_mut(j + 1);
        let v = &head[j][j..];
        for col in tail.iter_mut() {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(p, q)| p * q).sum();
            let s = 2.0 * dot / vnorm2;
            for (c, vi) in col[j..].iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
        let dot: f64 = v.iter().zip(&qty[j..]).map(|(p, q)| p * q).sum();
        let s = 2.0 * dot / vnorm2;
        for (c, vi) in qty[j..].iter_mut().zip(v) {
            *c -= s * vi;
        }
        rdiag[j] = alpha;
    }
    if rdiag.iter().any(|d| libm::fabs(*d) <= 1e-10 * max_norm) {
        return Err(Error::Degenerate("singular regressor matrix"));
    }

    // R is upper triangular: R[i][j] = a[j][i] for i < j, R[j][j] = rdiag[j].
    let r = |i: usize, j: usize| if i == j { rdiag[j] } else { a[j][i] };
    let mut coef = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for j in i + 1..k {
            s -= r(i, j) * coef[j];
        }
        coef[i] = s / r(i, i);
    }
    let rss: f64 = qty[k..].iter().map(|v| v * v).sum();

    // Rows of R^-1; (X'X)^-1 = R^-1 R^-T.
    let mut rinv = vec![vec![0.0; k]; k];
    for j in 0..k {
        rinv[j][j] = 1.0 / r(j, j);
        for i in (0..j).rev() {
            let mut s = 0.0;
            for m in i + 1..=j {
                s += r(i, m) * rinv[m][j];
            }
            rinv[i][j] = -s / r(i, i);
        }
    }
    let sigma2 = rss / (n - k) as f64;
    let std_err = (0..k)
        .map(|i| libm::sqrt(sigma2 * rinv[i].iter().map(|v| v * v).sum::<f64>()))
        .collect();

    let mean = y.iter().sum::<f64>() / n as f64;
    let tss = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let yy = y.iter().map(|v| v * v).sum();
    Ok(LeastSquares {
        coef,
        std_err,
        rss,
        tss,
        yy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_is_recovered() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let fit = least_squares(&[vec![1.0; 10], x], &y).unwrap();
        assert!((fit.coef[0] - 2.0).abs() < 1e-12);
        assert!((fit.coef[1] + 0.5).abs() < 1e-12);
        assert!(fit.rss < 1e-20);
    }

    #[test]
    fn standard_errors_match_simple_regression_formula() {
        let x = [1.0, 2.0, 4.0, 5.0, 7.0, 8.0];
        let y = [1.2, 1.9, 4.4, 4.8, 7.5, 7.7];
        let fit = least_squares(&[vec![1.0; 6], x.to_vec()], &y).unwrap();
        let n = 6.0;
        let xm = x.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
        let s2 = fit.rss / (n - 2.0);
        assert!((fit.std_err[1] - (s2 / sxx).sqrt()).abs() < 1e-12);
        let se0 = (s2 * (1.0 / n + xm * xm / sxx)).sqrt();
        assert!((fit.std_err[0] - se0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_are_rejected() {
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let x2: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let y = x.clone();
        assert!(least_squares(&[x, x2], &y).is_err());
    }
}
