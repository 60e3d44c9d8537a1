//! Least-squares polynomial fitting via normal equations.
//!
//! The abscissa is centered and scaled before building the Vandermonde
//! system so the normal equations stay well conditioned at the low degrees
//! used here; coefficients are mapped back to the original abscissa.

use crate::error::{Error, Result};

/// A fitted polynomial with coefficients in ascending power of x.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub r2: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        // Horner
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Fits `ys` against `xs` with a degree-`degree` polynomial.
///
/// Needs at least `degree + 1` distinct abscissa values.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "xs has {} points, ys has {}",
            xs.len(),
            ys.len()
        )));
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < degree + 1 {
        return Err(Error::invalid(format!(
            "degree {degree} fit needs {} distinct x values, got {}",
            degree + 1,
            distinct.len()
        )));
    }

    let n = xs.len();
    let mean: f64 = xs.iter().sum::<f64>() / n as f64;
    let scale = xs
        .iter()
        .map(|x| (x - mean).abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let ts: Vec<f64> = xs.iter().map(|x| (x - mean) / scale).collect();

    // normal equations A c = b with A = V^T V on the scaled abscissa
    let m = degree + 1;
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for (t, &y) in ts.iter().zip(ys) {
        let mut powers = vec![1.0; m];
        for j in 1..m {
            powers[j] = powers[j - 1] * t;
        }
        for i in 0..m {
            b[i] += powers[i] * y;
            for j in 0..m {
                a[i][j] += powers[i] * powers[j];
            }
        }
    }
    let scaled_coeffs = solve(&mut a, &mut b)?;

    // residuals evaluated on the scaled abscissa
    let mean_y: f64 = ys.iter().sum::<f64>() / n as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (t, &y) in ts.iter().zip(ys) {
        let fitted = scaled_coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot == 0.0 {
        if ss_res <= 1e-12 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };

    Ok(PolyFit {
        degree,
        coefficients: unscale_coefficients(&scaled_coeffs, mean, scale),
        r2,
    })
}

/// Expands `sum c_j ((x - mean)/scale)^j` into ascending powers of `x`.
fn unscale_coefficients(c: &[f64], mean: f64, scale: f64) -> Vec<f64> {
    let m = c.len();
    let mut out = vec![0.0; m];
    // binomial table up to degree
    let mut binom = vec![vec![0.0f64; m]; m];
    for j in 0..m {
        binom[j][0] = 1.0;
        for r in 1..=j {
            binom[j][r] = binom[j - 1][r - 1] + if r < j { binom[j - 1][r] } else { 0.0 };
        }
    }
    for (j, &cj) in c.iter().enumerate() {
        let s = cj / scale.powi(j as i32);
        for r in 0..=j {
            out[r] += s * binom[j][r] * (-mean).powi((j - r) as i32);
        }
    }
    out
}

/// Gaussian elimination with partial pivoting on a small SPD-ish system.
#[allow(clippy::needless_range_loop)]
fn solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::numeric(
                "singular normal equations; abscissa too degenerate",
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        let mut acc = b[col];
        for k in col + 1..m {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}
