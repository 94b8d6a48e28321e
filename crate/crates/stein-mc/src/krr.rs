//! Kernel ridge regression on the augmented Stein RKHS.
//!
//! Fitting solves `(K_plus + lambda m I) beta = z` by Cholesky factorization.
//! The fitted surrogate is `s_m(x) = beta^T kplus_hat(x)`; because every
//! non-constant component of the RKHS has zero mean under the target, the
//! exact target mean of `s_m` is simply `sum(beta)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::SteinKernel;

/// A fitted KRR surrogate with analytically known target mean.
#[derive(Debug, Clone)]
pub struct KrrModel {
    beta: DVector<f64>,
    train_x: Vec<Vec<f64>>,
    lambda: f64,
    kernel: SteinKernel,
}

impl KrrModel {
    /// Fits the ridge system on the given training block.
    pub fn fit(
        train_x: &[Vec<f64>],
        train_z: &[f64],
        kernel: &SteinKernel,
        lambda: f64,
    ) -> Result<Self> {
        let kplus = kernel.gram(train_x)?.kplus;
        Self::fit_with_gram(&kplus, train_x, train_z, kernel, lambda)
    }

    /// Fits using a precomputed `K_plus` Gram block over `train_x`.
    pub fn fit_with_gram(
        kplus: &DMatrix<f64>,
        train_x: &[Vec<f64>],
        train_z: &[f64],
        kernel: &SteinKernel,
        lambda: f64,
    ) -> Result<Self> {
        let m = train_x.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty training set".into()));
        }
        if train_z.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: train_z.len(),
            });
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(
                "ridge parameter lambda must be > 0".into(),
            ));
        }
        if train_z.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite regression target".into(),
            ));
        }
        let mut a = kplus.clone();
        let shift = lambda * m as f64;
        for i in 0..m {
            a[(i, i)] += shift;
        }
        let z = DVector::from_column_slice(train_z);
        let chol = a
            .clone()
            .cholesky()
            .ok_or_else(|| Error::LinearSolve("ridge system not positive definite".into()))?;
        let beta = chol.solve(&z);
        Ok(Self {
            beta,
            train_x: train_x.to_vec(),
            lambda,
            kernel: kernel.clone(),
        })
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn train_len(&self) -> usize {
        self.train_x.len()
    }

    /// `s_m(x) = beta^T kplus_hat(x)`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let cross = self.kernel.kplus_cross(&self.train_x, &[x.to_vec()])?;
        Ok((cross.transpose() * &self.beta)[0])
    }

    /// Surrogate values at many points.
    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let cross = self.kernel.kplus_cross(&self.train_x, xs)?;
        Ok((cross.transpose() * &self.beta).iter().cloned().collect())
    }

    /// Exact target mean of the surrogate: `mu_X(s_m) = sum(beta)`.
    pub fn target_mean(&self) -> f64 {
        self.beta.sum()
    }

    /// CF-adjusted values `z_j - s_m(x_j) + mu_X(s_m)`.
    pub fn cf_adjust(&self, eval_x: &[Vec<f64>], eval_z: &[f64]) -> Result<Vec<f64>> {
        if eval_x.len() != eval_z.len() {
            return Err(Error::DimensionMismatch {
                expected: eval_x.len(),
                got: eval_z.len(),
            });
        }
        let s = self.predict_many(eval_x)?;
        let mu = self.target_mean();
        Ok(eval_z
            .iter()
            .zip(s)
            .map(|(z, sj)| z - sj + mu)
            .collect())
    }

    /// CF adjustment from precomputed surrogate values.
    pub fn cf_adjust_precomputed(&self, surrogate: &[f64], eval_z: &[f64]) -> Vec<f64> {
        let mu = self.target_mean();
        eval_z
            .iter()
            .zip(surrogate)
            .map(|(z, sj)| z - sj + mu)
            .collect()
    }

    /// Residual of the defining linear system, relative to `||z||`.
    pub fn system_residual(&self, train_z: &[f64]) -> Result<f64> {
        let kplus = self.kernel.gram(&self.train_x)?.kplus;
        let m = self.train_x.len();
        let mut a = kplus;
        for i in 0..m {
            a[(i, i)] += self.lambda * m as f64;
        }
        let z = DVector::from_column_slice(train_z);
        let r = &a * &self.beta - &z;
        Ok(r.norm() / z.norm().max(f64::MIN_POSITIVE))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scored::ScoredTarget;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn kernel_1d(h_sq: f64) -> SteinKernel {
        SteinKernel::new(h_sq, ScoredTarget::gaussian_iso(&[0.0], 1).unwrap()).unwrap()
    }

    #[test]
    fn scalar_system() {
        let k = kernel_1d(1.0);
        let x = vec![vec![0.7]];
        let c = k.k_plus(&[0.7], &[0.7]).unwrap();
        let lambda = 0.3;
        let model = KrrModel::fit(&x, &[2.0], &k, lambda).unwrap();
        assert_abs_diff_eq!(model.beta()[0], 2.0 / (c + lambda), epsilon = 1e-12);
        assert_abs_diff_eq!(
            model.predict(&[0.7]).unwrap(),
            c * 2.0 / (c + lambda),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(model.target_mean(), 2.0 / (c + lambda), epsilon = 1e-12);
    }

    #[test]
    fn zero_targets_give_zero_model() {
        let k = kernel_1d(1.0);
        let x = vec![vec![0.0], vec![1.0], vec![-1.0]];
        let model = KrrModel::fit(&x, &[0.0; 3], &k, 0.1).unwrap();
        assert!(model.beta().iter().all(|b| b.abs() < 1e-14));
        assert_abs_diff_eq!(model.predict(&[0.3]).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(model.target_mean(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = kernel_1d(1.0);
        assert!(KrrModel::fit(&[vec![0.0]], &[1.0], &k, 0.0).is_err());
        assert!(KrrModel::fit(&[vec![0.0]], &[1.0], &k, -0.5).is_err());
        assert!(KrrModel::fit(&[vec![0.0]], &[f64::NAN], &k, 0.1).is_err());
        assert!(KrrModel::fit(&[], &[], &k, 0.1).is_err());
    }

    #[test]
    fn matches_independent_dense_solve() {
        let k = kernel_1d(1.4);
        let mut rng = crate::seeds::rng(9, &[]);
        let m = 20;
        let x: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.gen_range(-2.0..2.0)]).collect();
        let z: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = 0.05;
        let model = KrrModel::fit(&x, &z, &k, lambda).unwrap();

        // independent route: LU solve of the same system
        let kplus = k.gram(&x).unwrap().kplus;
        let mut a = kplus;
        for i in 0..m {
            a[(i, i)] += lambda * m as f64;
        }
        let zref = DVector::from_column_slice(&z);
        let lu = a.lu();
        let beta_ref = lu.solve(&zref).unwrap();
        let rel = (model.beta() - &beta_ref).norm() / beta_ref.norm();
        assert!(rel <= 1e-8, "rel error {rel}");
        assert!(model.system_residual(&z).unwrap() <= 1e-8);
    }

    #[test]
    fn near_interpolation_at_tiny_lambda() {
        let k = kernel_1d(1.0);
        let x = vec![vec![-1.0], vec![0.0], vec![1.0], vec![2.0]];
        let z = vec![0.3, -0.2, 0.9, 0.1];
        let model = KrrModel::fit(&x, &z, &k, 1e-10).unwrap();
        for (xi, zi) in x.iter().zip(&z) {
            assert!((model.predict(xi).unwrap() - zi).abs() < 1e-4);
        }
    }

    #[test]
    fn cf_adjust_identity_for_zero_model() {
        let k = kernel_1d(1.0);
        let model = KrrModel::fit(&[vec![0.0]], &[0.0], &k, 0.1).unwrap();
        let eval_x = vec![vec![0.5], vec![1.5]];
        let eval_z = vec![3.0, -1.0];
        assert_eq!(model.cf_adjust(&eval_x, &eval_z).unwrap(), eval_z);
    }

    #[test]
    fn constant_integrand_adjusts_to_zero_variance() {
        // With constant targets the adjusted samples collapse to a single
        // value (the surrogate mean), so the control-functional variance on
        // the training points is essentially zero.
        let k = kernel_1d(2.0);
        let x = vec![vec![-1.0], vec![-0.3], vec![0.4], vec![1.1]];
        let c = 2.5;
        let z = vec![c; 4];
        let model = KrrModel::fit(&x, &z, &k, 1e-10).unwrap();
        let adjusted = model.cf_adjust(&x, &z).unwrap();
        let mean = adjusted.iter().sum::<f64>() / adjusted.len() as f64;
        for a in &adjusted {
            assert!((a - mean).abs() < 1e-6, "adjusted {a} vs mean {mean}");
        }
        assert!((mean - model.target_mean()).abs() < 1e-6);
        assert!((mean - c).abs() < 0.5, "mean {mean} far from {c}");
    }

    #[test]
    fn fit_is_linear_in_targets() {
        let k = kernel_1d(1.0);
        let mut rng = crate::seeds::rng(10, &[]);
        let x: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.gen_range(-2.0..2.0)]).collect();
        let z1: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z2: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let zsum: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| a + b).collect();
        let m1 = KrrModel::fit(&x, &z1, &k, 0.07).unwrap();
        let m2 = KrrModel::fit(&x, &z2, &k, 0.07).unwrap();
        let ms = KrrModel::fit(&x, &zsum, &k, 0.07).unwrap();
        for i in 0..12 {
            assert_abs_diff_eq!(
                ms.beta()[i],
                m1.beta()[i] + m2.beta()[i],
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn ridge_objective_dominance() {
        // the fitted coefficients minimize the finite-dimensional objective
        let k = kernel_1d(1.0);
        let mut rng = crate::seeds::rng(11, &[]);
        let m = 10;
        let x: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.gen_range(-2.0..2.0)]).collect();
        let z: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = 0.05;
        let model = KrrModel::fit(&x, &z, &k, lambda).unwrap();
        let kp = k.gram(&x).unwrap().kplus;
        let zv = DVector::from_column_slice(&z);
        let obj = |b: &DVector<f64>| {
            let pred = &kp * b;
            let res = (&zv - &pred).norm_squared() / m as f64;
            res + lambda * (b.transpose() * &kp * b)[0]
        };
        let base = obj(model.beta());
        for _ in 0..100 {
            let delta = DVector::from_iterator(m, (0..m).map(|_| rng.gen_range(-0.1..0.1)));
            let perturbed = model.beta() + delta;
            assert!(obj(&perturbed) >= base - 1e-10);
        }
    }
}
