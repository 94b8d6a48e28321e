//! Stein-kernelized RKHS kernels built from an RBF base kernel and a score.
//!
//! The base kernel is `k(x,x') = exp(-||x-x'||^2 / h1)` where `h1` is the
//! squared-scale parameter (the median of pairwise squared distances under the
//! median heuristic). Applying the Stein operator of a target to both
//! arguments yields
//!
//! ```text
//! k0(x,x') = div_x div_x' k + u(x).grad_x' k + u(x').grad_x k + u(x).u(x') k
//! ```
//!
//! whose RKHS contains only mean-zero functions under the target, and
//! `k_plus = 1 + k0` which adds constants back.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scored::ScoredTarget;

/// Base RBF kernel with squared-scale parameter `h_sq`.
pub fn rbf(x: &[f64], y: &[f64], h_sq: f64) -> f64 {
    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    (-r2 / h_sq).exp()
}

/// Median-heuristic squared-scale: the median of the `n(n-1)/2` pairwise
/// squared distances. Even pair counts take the mean of the two middle order
/// statistics.
pub fn median_bandwidth(points: &[Vec<f64>]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "median bandwidth needs at least 2 points".into(),
        ));
    }
    let mut d2 = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            d2.push(
                points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>(),
            );
        }
    }
    d2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = d2.len();
    let med = if m % 2 == 1 {
        d2[m / 2]
    } else {
        0.5 * (d2[m / 2 - 1] + d2[m / 2])
    };
    if med <= 0.0 {
        return Err(Error::InvalidParameter(
            "all points identical: median pairwise distance is 0".into(),
        ));
    }
    Ok(med)
}

/// Stein kernel for a fixed target score and RBF squared-scale.
#[derive(Debug, Clone)]
pub struct SteinKernel {
    h_sq: f64,
    target: ScoredTarget,
}

/// Gram matrices of `k0` and `k_plus` on a point set.
#[derive(Debug, Clone)]
pub struct GramPair {
    pub k0: DMatrix<f64>,
    pub kplus: DMatrix<f64>,
    pub points: Vec<Vec<f64>>,
}

impl SteinKernel {
    pub fn new(h_sq: f64, target: ScoredTarget) -> Result<Self> {
        if !(h_sq > 0.0) {
            return Err(Error::InvalidParameter("bandwidth h_sq must be > 0".into()));
        }
        Ok(Self { h_sq, target })
    }

    pub fn h_sq(&self) -> f64 {
        self.h_sq
    }

    pub fn target(&self) -> &ScoredTarget {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    /// Closed-form `k0(x,x')` with analytic RBF derivatives.
    pub fn k0(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let ux = self.target.score(x)?;
        let uy = self.target.score(y)?;
        Ok(self.k0_with_scores(x, y, &ux, &uy))
    }

    /// `k_plus(x,x') = 1 + k0(x,x')`.
    pub fn k_plus(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(1.0 + self.k0(x, y)?)
    }

    fn k0_with_scores(&self, x: &[f64], y: &[f64], ux: &[f64], uy: &[f64]) -> f64 {
        let h = self.h_sq;
        let d = x.len() as f64;
        let mut r2 = 0.0;
        let mut diff_dot_ux = 0.0;
        let mut diff_dot_uy = 0.0;
        let mut ux_dot_uy = 0.0;
        for i in 0..x.len() {
            let diff = x[i] - y[i];
            r2 += diff * diff;
            diff_dot_ux += diff * ux[i];
            diff_dot_uy += diff * uy[i];
            ux_dot_uy += ux[i] * uy[i];
        }
        let k = (-r2 / h).exp();
        // div_x div_x' k = (2d/h - 4 r2/h^2) k
        // u(x).grad_x' k = (2/h)(u(x).diff) k,  u(x').grad_x k = -(2/h)(u(x').diff) k
        k * (2.0 * d / h - 4.0 * r2 / (h * h) + 2.0 / h * (diff_dot_ux - diff_dot_uy)
            + ux_dot_uy)
    }

    /// `k0(x,x')` with the base-kernel derivatives replaced by central
    /// differences of step `step`. Reference path for validating the closed
    /// form; never used in production Gram assembly.
    pub fn k0_fd_oracle(&self, x: &[f64], y: &[f64], step: f64) -> Result<f64> {
        if !(step > 0.0 && step <= 1e-3) {
            return Err(Error::InvalidParameter("fd step must be in (0, 1e-3]".into()));
        }
        let ux = self.target.score(x)?;
        let uy = self.target.score(y)?;
        let h = self.h_sq;
        let d = x.len();
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        let mut total = ux
            .iter()
            .zip(&uy)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * rbf(x, y, h);
        for i in 0..d {
            xp[i] = x[i] + step;
            xm[i] = x[i] - step;
            yp[i] = y[i] + step;
            ym[i] = y[i] - step;
            // second mixed derivative d^2 k / dx_i dx'_i
            let mixed = (rbf(&xp, &yp, h) - rbf(&xp, &ym, h) - rbf(&xm, &yp, h)
                + rbf(&xm, &ym, h))
                / (4.0 * step * step);
            // first derivatives in x'_i and x_i
            let dy = (rbf(x, &yp, h) - rbf(x, &ym, h)) / (2.0 * step);
            let dx = (rbf(&xp, y, h) - rbf(&xm, y, h)) / (2.0 * step);
            total += mixed + ux[i] * dy + uy[i] * dx;
            xp[i] = x[i];
            xm[i] = x[i];
            yp[i] = y[i];
            ym[i] = y[i];
        }
        Ok(total)
    }

    /// Gram matrices of `k0` and `k_plus`. Scores are evaluated once per
    /// point; only the upper triangle is computed and mirrored, so the output
    /// is exactly symmetric and independent of evaluation order.
    pub fn gram(&self, points: &[Vec<f64>]) -> Result<GramPair> {
        let n = points.len();
        let scores: Vec<Vec<f64>> = points
            .iter()
            .map(|p| self.target.score(p))
            .collect::<Result<_>>()?;
        let mut k0 = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.k0_with_scores(&points[i], &points[j], &scores[i], &scores[j]);
                k0[(i, j)] = v;
                k0[(j, i)] = v;
            }
        }
        let kplus = k0.map(|v| v + 1.0);
        Ok(GramPair {
            k0,
            kplus,
            points: points.to_vec(),
        })
    }

    /// Cross Gram block `k_plus(train_i, eval_j)`.
    pub fn kplus_cross(&self, train: &[Vec<f64>], eval: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let ts: Vec<Vec<f64>> = train
            .iter()
            .map(|p| self.target.score(p))
            .collect::<Result<_>>()?;
        let es: Vec<Vec<f64>> = eval
            .iter()
            .map(|p| self.target.score(p))
            .collect::<Result<_>>()?;
        let mut out = DMatrix::zeros(train.len(), eval.len());
        for i in 0..train.len() {
            for j in 0..eval.len() {
                out[(i, j)] =
                    1.0 + self.k0_with_scores(&train[i], &eval[j], &ts[i], &es[j]);
            }
        }
        Ok(out)
    }
}
