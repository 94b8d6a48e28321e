//! Target and proposal distributions known up to normalization.
//!
//! A [`ScoredTarget`] exposes the unnormalized log-density, the score function
//! `u(x) = grad log pi(x)`, the support, and (for every family here) an exact
//! seeded sampler. All families are products of one-dimensional marginals, so
//! the joint score is the concatenation of marginal scores.

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Gamma as GammaDist, StandardNormal, StudentT};

use crate::error::{Error, Result};

/// Support of a target density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    FullSpace,
    PositiveOrthant,
    UnitCube,
}

#[derive(Debug, Clone)]
enum Family {
    /// Isotropic unit-variance Gaussian centered at `mean`.
    GaussianIso { mean: Vec<f64> },
    /// Product of identical one-dimensional Gaussian mixtures.
    GaussianMixtureProduct {
        weights: Vec<f64>,
        means: Vec<f64>,
        variances: Vec<f64>,
    },
    /// Product of generalized Student-t marginals `loc + scale * t_dof`.
    StudentTProduct { dof: f64, loc: f64, scale: f64 },
    /// Product of Gamma(shape_i, rate_i) marginals.
    GammaProduct { shapes: Vec<f64>, rates: Vec<f64> },
    /// Product of Beta(alpha_i, beta_i) marginals.
    BetaProduct { alphas: Vec<f64>, betas: Vec<f64> },
}

/// A distribution known up to a normalizing constant, with computable score.
///
/// Immutable after construction; all evaluation methods are reentrant.
#[derive(Debug, Clone)]
pub struct ScoredTarget {
    dim: usize,
    support: Support,
    family: Family,
}

impl ScoredTarget {
    /// Isotropic unit-variance Gaussian `N(mean, I_d)`.
    pub fn gaussian_iso(mean: &[f64], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dim must be >= 1".into()));
        }
        if mean.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: mean.len(),
            });
        }
        Ok(Self {
            dim,
            support: Support::FullSpace,
            family: Family::GaussianIso {
                mean: mean.to_vec(),
            },
        })
    }

    /// Product of `dim` identical one-dimensional Gaussian mixtures.
    pub fn gaussian_mixture_product(
        weights: &[f64],
        means: &[f64],
        variances: &[f64],
        dim: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dim must be >= 1".into()));
        }
        if weights.len() != means.len() || weights.len() != variances.len() || weights.is_empty() {
            return Err(Error::InvalidParameter(
                "weights/means/variances must have equal nonzero length".into(),
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "mixture weights must sum to 1".into(),
            ));
        }
        if variances.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter(
                "mixture variances must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            support: Support::FullSpace,
            family: Family::GaussianMixtureProduct {
                weights: weights.to_vec(),
                means: means.to_vec(),
                variances: variances.to_vec(),
            },
        })
    }

    /// Product of generalized Student-t marginals `loc + scale * t_dof`.
    pub fn student_t_product(dof: f64, loc: f64, scale: f64, dim: usize) -> Result<Self> {
        if dim == 0 || dof <= 0.0 || scale <= 0.0 {
            return Err(Error::InvalidParameter(
                "require dim >= 1, dof > 0, scale > 0".into(),
            ));
        }
        Ok(Self {
            dim,
            support: Support::FullSpace,
            family: Family::StudentTProduct { dof, loc, scale },
        })
    }

    /// Product of Gamma(shape_i, rate_i) marginals on the positive orthant.
    pub fn gamma_product(shapes: &[f64], rates: &[f64]) -> Result<Self> {
        if shapes.is_empty() || shapes.len() != rates.len() {
            return Err(Error::InvalidParameter(
                "shapes/rates must have equal nonzero length".into(),
            ));
        }
        if shapes.iter().chain(rates.iter()).any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter(
                "Gamma shapes and rates must be positive".into(),
            ));
        }
        Ok(Self {
            dim: shapes.len(),
            support: Support::PositiveOrthant,
            family: Family::GammaProduct {
                shapes: shapes.to_vec(),
                rates: rates.to_vec(),
            },
        })
    }

    /// Product of Beta(alpha_i, beta_i) marginals on the unit cube.
    pub fn beta_product(alphas: &[f64], betas: &[f64]) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != betas.len() {
            return Err(Error::InvalidParameter(
                "alphas/betas must have equal nonzero length".into(),
            ));
        }
        if alphas.iter().chain(betas.iter()).any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter(
                "Beta parameters must be positive".into(),
            ));
        }
        Ok(Self {
            dim: alphas.len(),
            support: Support::UnitCube,
            family: Family::BetaProduct {
                alphas: alphas.to_vec(),
                betas: betas.to_vec(),
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::GaussianIso { .. } => "gaussian_iso",
            Family::GaussianMixtureProduct { .. } => "gaussian_mixture_product",
            Family::StudentTProduct { .. } => "student_t_product",
            Family::GammaProduct { .. } => "gamma_product",
            Family::BetaProduct { .. } => "beta_product",
        }
    }

    /// Whether `x` lies strictly inside the support.
    pub fn is_interior(&self, x: &[f64]) -> bool {
        match self.support {
            Support::FullSpace => x.iter().all(|v| v.is_finite()),
            Support::PositiveOrthant => x.iter().all(|&v| v.is_finite() && v > 0.0),
            Support::UnitCube => x.iter().all(|&v| v.is_finite() && v > 0.0 && v < 1.0),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !self.is_interior(x) {
            return Err(Error::OutsideSupport(format!(
                "{} evaluated at {:?}",
                self.name(),
                x
            )));
        }
        Ok(())
    }

    /// Unnormalized log-density. Errors outside the open support.
    pub fn log_density_unnorm(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let v = match &self.family {
            Family::GaussianIso { mean } => {
                -0.5 * x
                    .iter()
                    .zip(mean)
                    .map(|(xi, mi)| (xi - mi).powi(2))
                    .sum::<f64>()
            }
            Family::GaussianMixtureProduct {
                weights,
                means,
                variances,
            } => x
                .iter()
                .map(|&xi| mixture_log_pdf(xi, weights, means, variances))
                .sum(),
            Family::StudentTProduct { dof, loc, scale } => x
                .iter()
                .map(|&xi| {
                    let t = (xi - loc) / scale;
                    -0.5 * (dof + 1.0) * (1.0 + t * t / dof).ln()
                })
                .sum(),
            Family::GammaProduct { shapes, rates } => x
                .iter()
                .zip(shapes.iter().zip(rates))
                .map(|(&xi, (&a, &b))| (a - 1.0) * xi.ln() - b * xi)
                .sum(),
            Family::BetaProduct { alphas, betas } => x
                .iter()
                .zip(alphas.iter().zip(betas))
                .map(|(&xi, (&a, &b))| (a - 1.0) * xi.ln() + (b - 1.0) * (1.0 - xi).ln())
                .sum(),
        };
        Ok(v)
    }

    /// Score `u(x) = grad log pi(x)`. Errors outside the open support.
    pub fn score(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let v = match &self.family {
            Family::GaussianIso { mean } => {
                x.iter().zip(mean).map(|(xi, mi)| mi - xi).collect()
            }
            Family::GaussianMixtureProduct {
                weights,
                means,
                variances,
            } => x
                .iter()
                .map(|&xi| mixture_score(xi, weights, means, variances))
                .collect(),
            Family::StudentTProduct { dof, loc, scale } => x
                .iter()
                .map(|&xi| {
                    let u = xi - loc;
                    -(dof + 1.0) * u / (dof * scale * scale + u * u)
                })
                .collect(),
            Family::GammaProduct { shapes, rates } => x
                .iter()
                .zip(shapes.iter().zip(rates))
                .map(|(&xi, (&a, &b))| (a - 1.0) / xi - b)
                .collect(),
            Family::BetaProduct { alphas, betas } => x
                .iter()
                .zip(alphas.iter().zip(betas))
                .map(|(&xi, (&a, &b))| (a - 1.0) / xi - (b - 1.0) / (1.0 - xi))
                .collect(),
        };
        Ok(v)
    }

    /// One exact draw. Every family here has an exact sampler.
    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.family {
            Family::GaussianIso { mean } => mean
                .iter()
                .map(|mi| mi + rng.sample::<f64, _>(StandardNormal))
                .collect(),
            Family::GaussianMixtureProduct {
                weights,
                means,
                variances,
            } => (0..self.dim)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut c = weights.len() - 1;
                    for (i, &w) in weights.iter().enumerate() {
                        acc += w;
                        if u <= acc {
                            c = i;
                            break;
                        }
                    }
                    means[c] + variances[c].sqrt() * rng.sample::<f64, _>(StandardNormal)
                })
                .collect(),
            Family::StudentTProduct { dof, loc, scale } => {
                let t = StudentT::new(*dof).expect("validated dof");
                (0..self.dim).map(|_| loc + scale * t.sample(rng)).collect()
            }
            Family::GammaProduct { shapes, rates } => shapes
                .iter()
                .zip(rates)
                .map(|(&a, &b)| GammaDist::new(a, 1.0 / b).expect("validated").sample(rng))
                .collect(),
            Family::BetaProduct { alphas, betas } => alphas
                .iter()
                .zip(betas)
                .map(|(&a, &b)| BetaDist::new(a, b).expect("validated").sample(rng))
                .collect(),
        }
    }

    /// `n` exact i.i.d. draws.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// Marginal mean per coordinate (exact, for diagnostics and MH tuning).
    pub fn marginal_mean(&self) -> Vec<f64> {
        match &self.family {
            Family::GaussianIso { mean } => mean.clone(),
            Family::GaussianMixtureProduct { weights, means, .. } => {
                let m: f64 = weights.iter().zip(means).map(|(w, mu)| w * mu).sum();
                vec![m; self.dim]
            }
            Family::StudentTProduct { loc, .. } => vec![*loc; self.dim],
            Family::GammaProduct { shapes, rates } => {
                shapes.iter().zip(rates).map(|(a, b)| a / b).collect()
            }
            Family::BetaProduct { alphas, betas } => alphas
                .iter()
                .zip(betas)
                .map(|(a, b)| a / (a + b))
                .collect(),
        }
    }

    /// Marginal standard deviation per coordinate.
    pub fn marginal_std(&self) -> Vec<f64> {
        match &self.family {
            Family::GaussianIso { .. } => vec![1.0; self.dim],
            Family::GaussianMixtureProduct {
                weights,
                means,
                variances,
            } => {
                let m1: f64 = weights.iter().zip(means).map(|(w, mu)| w * mu).sum();
                let m2: f64 = weights
                    .iter()
                    .zip(means.iter().zip(variances))
                    .map(|(w, (mu, v))| w * (v + mu * mu))
                    .sum();
                vec![(m2 - m1 * m1).sqrt(); self.dim]
            }
            Family::StudentTProduct { dof, scale, .. } => {
                let s = if *dof > 2.0 {
                    scale * (dof / (dof - 2.0)).sqrt()
                } else {
                    *scale
                };
                vec![s; self.dim]
            }
            Family::GammaProduct { shapes, rates } => shapes
                .iter()
                .zip(rates)
                .map(|(a, b)| a.sqrt() / b)
                .collect(),
            Family::BetaProduct { alphas, betas } => alphas
                .iter()
                .zip(betas)
                .map(|(a, b)| (a * b / ((a + b).powi(2) * (a + b + 1.0))).sqrt())
                .collect(),
        }
    }
}

fn mixture_log_pdf(x: f64, weights: &[f64], means: &[f64], variances: &[f64]) -> f64 {
    // log-sum-exp over components of log(w_c) - (x-m_c)^2/(2 v_c) - log(sqrt(v_c))
    let logs: Vec<f64> = weights
        .iter()
        .zip(means.iter().zip(variances))
        .map(|(&w, (&m, &v))| w.ln() - (x - m).powi(2) / (2.0 * v) - 0.5 * v.ln())
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

fn mixture_score(x: f64, weights: &[f64], means: &[f64], variances: &[f64]) -> f64 {
    // responsibility-weighted average of component scores -(x-m_c)/v_c
    let logs: Vec<f64> = weights
        .iter()
        .zip(means.iter().zip(variances))
        .map(|(&w, (&m, &v))| w.ln() - (x - m).powi(2) / (2.0 * v) - 0.5 * v.ln())
        .collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let resp: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = resp.iter().sum();
    resp.iter()
        .zip(means.iter().zip(variances))
        .map(|(r, (&m, &v))| r / total * (-(x - m) / v))
        .sum()
}

/// Additive aleatory noise on the simulation output.
#[derive(Debug, Clone)]
pub enum NoiseModel {
    /// No noise term.
    None,
    /// `N(0, sigma^2)`, conditionally mean-zero given x.
    Gaussian { sigma: f64 },
    /// `N(0, sigma^2) + coeffs . x`.
    GaussianPlusLinear { sigma: f64, coeffs: Vec<f64> },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::None => Ok(()),
            NoiseModel::Gaussian { sigma } | NoiseModel::GaussianPlusLinear { sigma, .. } => {
                if *sigma < 0.0 {
                    Err(Error::InvalidParameter("noise sigma must be >= 0".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// One realization of the additive noise term at `x`.
    pub fn sample<R: Rng>(&self, x: &[f64], rng: &mut R) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseModel::GaussianPlusLinear { sigma, coeffs } => {
                sigma * rng.sample::<f64, _>(StandardNormal)
                    + coeffs.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>()
            }
        }
    }
}

/// One noise realization from an explicit seed.
pub fn apply_noise(model: &NoiseModel, x: &[f64], seed: u64) -> f64 {
    let mut rng = crate::seeds::rng(seed, &[]);
    model.sample(x, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Central-difference gradient of the unnormalized log-density.
    fn fd_score(t: &ScoredTarget, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let h = 1e-5 * (1.0 + x[i].abs());
                let mut lo = x.to_vec();
                let mut hi = x.to_vec();
                lo[i] -= h;
                hi[i] += h;
                (t.log_density_unnorm(&hi).unwrap() - t.log_density_unnorm(&lo).unwrap())
                    / (2.0 * h)
            })
            .collect()
    }

    fn assert_score_matches_fd(t: &ScoredTarget, points: &[Vec<f64>]) {
        for x in points {
            let s = t.score(x).unwrap();
            let fd = fd_score(t, x);
            for (a, b) in s.iter().zip(&fd) {
                assert!(
                    (a - b).abs() <= 1e-5 * (1.0 + a.abs().max(b.abs())),
                    "score {a} vs fd {b} at {x:?}"
                );
            }
        }
    }

    fn interior_points(t: &ScoredTarget, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::seeds::rng(seed, &[7]);
        t.sample(n, &mut rng)
    }

    #[test]
    fn gaussian_score_examples() {
        let t = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        assert_abs_diff_eq!(t.score(&[2.0]).unwrap()[0], -2.0);
        let t = ScoredTarget::gaussian_iso(&[0.5, 0.5], 2).unwrap();
        assert_eq!(t.score(&[0.5, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn mixture_reduces_to_single_component() {
        let t = ScoredTarget::gaussian_mixture_product(&[1.0], &[2.0], &[1.0], 1).unwrap();
        assert_abs_diff_eq!(t.score(&[0.3]).unwrap()[0], 2.0 - 0.3, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_mixture_score_zero_at_origin() {
        let t =
            ScoredTarget::gaussian_mixture_product(&[0.5, 0.5], &[-1.5, 1.5], &[1.0, 1.0], 1)
                .unwrap();
        assert_abs_diff_eq!(t.score(&[0.0]).unwrap()[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn mixture_score_matches_fd_at_example_point() {
        let t = ScoredTarget::gaussian_mixture_product(&[0.7, 0.3], &[2.0, 1.0], &[1.0, 1.0], 1)
            .unwrap();
        let s = t.score(&[1.5]).unwrap()[0];
        let fd = fd_score(&t, &[1.5])[0];
        assert!((s - fd).abs() < 1e-6, "{s} vs {fd}");
    }

    #[test]
    fn student_t_score_examples() {
        let t = ScoredTarget::student_t_product(3.0, 1.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(t.score(&[1.0]).unwrap()[0], 0.0);
        // u(2) = -(3+1)*(2-1)/(3*1 + 1) = -1
        assert_abs_diff_eq!(t.score(&[2.0]).unwrap()[0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn student_t_large_dof_approaches_gaussian() {
        let t = ScoredTarget::student_t_product(1e6, 0.0, 1.0, 1).unwrap();
        let g = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        for i in 0..10 {
            let x = -1.0 + 0.2 * i as f64;
            let a = t.score(&[x]).unwrap()[0];
            let b = g.score(&[x]).unwrap()[0];
            assert!((a - b).abs() < 1e-3, "{a} vs {b} at {x}");
        }
    }

    #[test]
    fn gamma_score_examples() {
        let t = ScoredTarget::gamma_product(&[1.0], &[2.5]).unwrap();
        assert_abs_diff_eq!(t.score(&[0.7]).unwrap()[0], -2.5);
        let t = ScoredTarget::gamma_product(&[50.0], &[65.0]).unwrap();
        assert_abs_diff_eq!(t.score(&[0.5]).unwrap()[0], 49.0 / 0.5 - 65.0, epsilon = 1e-10);
        assert!(t.score(&[0.0]).is_err());
        assert!(t.score(&[-1.0]).is_err());
    }

    #[test]
    fn beta_score_examples() {
        let t = ScoredTarget::beta_product(&[1.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(t.score(&[0.42]).unwrap()[0], 0.0);
        let t = ScoredTarget::beta_product(&[2.0], &[2.0]).unwrap();
        assert_abs_diff_eq!(t.score(&[0.5]).unwrap()[0], 0.0);
        assert!(t.score(&[0.0]).is_err());
        assert!(t.score(&[1.0]).is_err());
    }

    #[test]
    fn score_matches_finite_differences_all_families() {
        let targets = vec![
            ScoredTarget::gaussian_iso(&[0.0, 0.0], 2).unwrap(),
            ScoredTarget::gaussian_mixture_product(&[0.7, 0.3], &[2.0, 1.0], &[1.0, 1.0], 2)
                .unwrap(),
            ScoredTarget::student_t_product(3.0, 1.0, 1.0, 2).unwrap(),
            ScoredTarget::gamma_product(&[50.0, 20.0], &[10.0, 4.0]).unwrap(),
            ScoredTarget::beta_product(&[3.0, 2.0], &[9.0, 4.0]).unwrap(),
        ];
        for (i, t) in targets.iter().enumerate() {
            let pts = interior_points(t, 100 + i, 42);
            assert_score_matches_fd(t, &pts);
        }
    }

    #[test]
    fn product_score_is_concatenation_of_marginals() {
        let t2 = ScoredTarget::gamma_product(&[50.0, 20.0], &[10.0, 4.0]).unwrap();
        let m1 = ScoredTarget::gamma_product(&[50.0], &[10.0]).unwrap();
        let m2 = ScoredTarget::gamma_product(&[20.0], &[4.0]).unwrap();
        let x = [1.2, 3.4];
        let s = t2.score(&x).unwrap();
        assert_abs_diff_eq!(s[0], m1.score(&[1.2]).unwrap()[0]);
        assert_abs_diff_eq!(s[1], m2.score(&[3.4]).unwrap()[0]);
    }

    #[test]
    fn product_score_coordinate_independence() {
        let t = ScoredTarget::gaussian_mixture_product(&[0.7, 0.3], &[2.0, 1.0], &[1.0, 1.0], 3)
            .unwrap();
        let a = t.score(&[1.5, 0.0, 2.0]).unwrap();
        let b = t.score(&[1.5, 9.0, -4.0]).unwrap();
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-14);
    }

    /// One-dimensional KS check of each exact sampler against its own CDF,
    /// via large-sample comparison of the empirical CDF evaluated through
    /// numerically integrated densities is overkill; instead compare the
    /// sampler's first coordinate against an independent reference sampler
    /// stream and check the two-sample KS statistic.
    #[test]
    fn exact_sampler_matches_density_ks() {
        let n = 100_000usize;
        // 1% critical value for the one-sample KS statistic
        let crit = 1.63 / (n as f64).sqrt();
        // Gaussian: exact CDF available.
        let t = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        let mut rng = crate::seeds::rng(5, &[]);
        let mut draws: Vec<f64> = t.sample(n, &mut rng).into_iter().map(|p| p[0]).collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let phi = |x: f64| 0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2));
        let mut ks: f64 = 0.0;
        for (i, &x) in draws.iter().enumerate() {
            let f = phi(x);
            ks = ks
                .max((f - i as f64 / n as f64).abs())
                .max(((i + 1) as f64 / n as f64 - f).abs());
        }
        assert!(ks < crit, "KS={ks} crit={crit}");
    }

    // Abramowitz-Stegun 7.1.26 approximation; plenty for a 1% KS gate.
    fn erf(x: f64) -> f64 {
        let sign = x.signum();
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let y = 1.0
            - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
                + 0.254829592)
                * t
                * (-x * x).exp();
        sign * y
    }

    #[test]
    fn noise_model_examples() {
        assert_eq!(apply_noise(&NoiseModel::None, &[1.0], 3), 0.0);
        assert_eq!(apply_noise(&NoiseModel::Gaussian { sigma: 0.0 }, &[1.0], 3), 0.0);
        let m = NoiseModel::Gaussian { sigma: 0.1 };
        let mut rng = crate::seeds::rng(11, &[]);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| m.sample(&[0.0], &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var - 0.01).abs() < 0.0005, "var={var}");
    }

    #[test]
    fn linear_noise_conditional_mean() {
        let m = NoiseModel::GaussianPlusLinear {
            sigma: 0.1,
            coeffs: vec![1.0, 1.0],
        };
        let mut rng = crate::seeds::rng(12, &[]);
        let x = [0.5, -0.25];
        let n = 50_000;
        let mean = (0..n).map(|_| m.sample(&x, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() < 0.005, "mean={mean}");
    }
}
