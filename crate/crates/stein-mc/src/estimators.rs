//! Point estimators of `theta = E_pi[f(X,Y)]`.
//!
//! Six estimators composed from the KRR surrogate and the capped-simplex
//! importance weights: naive Monte Carlo, CF, SimCF, BBIS, DRSK, and DRSK-R.
//! All methods share one Gram computation per dataset when run together.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{GramPair, SteinKernel};
use crate::krr::KrrModel;
use crate::simplex;

/// Estimation method identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Naive,
    Cf,
    SimCf,
    Bbis,
    Drsk,
    DrskR,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Naive,
        Method::Cf,
        Method::SimCf,
        Method::Bbis,
        Method::Drsk,
        Method::DrskR,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Naive => "naive",
            Method::Cf => "cf",
            Method::SimCf => "simcf",
            Method::Bbis => "bbis",
            Method::Drsk => "drsk",
            Method::DrskR => "drsk-r",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "cf" => Ok(Method::Cf),
            "simcf" => Ok(Method::SimCf),
            "bbis" => Ok(Method::Bbis),
            "drsk" => Ok(Method::Drsk),
            "drsk-r" | "drskr" => Ok(Method::DrskR),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Input sample: points and integrand evaluations `z_j = f(x_j, y_j)`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub z: Vec<f64>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, z: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        if z.iter().any(|v| !v.is_finite())
            || x.iter().any(|p| p.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::InvalidParameter("non-finite dataset entry".into()));
        }
        Ok(Self {
            x,
            z,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Declarative regularization rule `lambda(m) = multiplier * m^exponent`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LambdaRule {
    pub multiplier: f64,
    pub exponent: f64,
}

impl Default for LambdaRule {
    fn default() -> Self {
        Self {
            multiplier: 0.01,
            exponent: -0.5,
        }
    }
}

impl LambdaRule {
    pub fn evaluate(&self, m: usize) -> f64 {
        self.multiplier * (m as f64).powf(self.exponent)
    }
}

/// Shared estimator hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyper {
    /// Split fraction: `m = floor(alpha * n)`, clamped to `[1, n-1]`.
    pub alpha: f64,
    pub lambda: LambdaRule,
    /// Weight-cap numerator; `f64::INFINITY` recovers the uncapped QP.
    pub b0: f64,
    pub qp_tol: f64,
    pub qp_max_iter: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            lambda: LambdaRule::default(),
            b0: 50.0,
            qp_tol: 1e-8,
            qp_max_iter: 50_000,
        }
    }
}

impl Hyper {
    pub fn split(&self, n: usize) -> usize {
        ((self.alpha * n as f64).floor() as usize).clamp(1, n.saturating_sub(1).max(1))
    }
}

/// Per-method diagnostics; present only when the method computes them.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub ksd: Option<f64>,
    pub kkt_residual: Option<f64>,
    pub max_weight: Option<f64>,
    pub mu_s_m: Option<f64>,
    pub split_m: Option<usize>,
    pub qp_converged: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct EstimatorResult {
    pub method: Method,
    pub estimate: f64,
    pub diagnostics: Diagnostics,
}

/// `theta_hat = mean(z)`.
pub fn naive_mc(d: &Dataset) -> Result<EstimatorResult> {
    if d.is_empty() {
        return Err(Error::InvalidParameter("empty dataset".into()));
    }
    Ok(EstimatorResult {
        method: Method::Naive,
        estimate: d.z.iter().sum::<f64>() / d.len() as f64,
        diagnostics: Diagnostics::default(),
    })
}

fn fit_on_block(
    d: &Dataset,
    kernel: &SteinKernel,
    gram: &GramPair,
    m: usize,
    hyper: &Hyper,
) -> Result<KrrModel> {
    let kplus = gram.kplus.view((0, 0), (m, m)).into_owned();
    let lambda = hyper.lambda.evaluate(m);
    KrrModel::fit_with_gram(&kplus, &d.x[..m], &d.z[..m], kernel, lambda)
}

/// Surrogate values on columns `[lo, hi)` from the shared Gram.
fn surrogate_from_gram(gram: &GramPair, model: &KrrModel, lo: usize, hi: usize) -> Vec<f64> {
    let m = model.train_len();
    let cross = gram.kplus.view((0, lo), (m, hi - lo));
    (cross.transpose() * model.beta()).iter().cloned().collect()
}

fn cf_with_gram(
    d: &Dataset,
    kernel: &SteinKernel,
    gram: &GramPair,
    hyper: &Hyper,
) -> Result<EstimatorResult> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "CF needs n >= 2; use SimCF for a single point".into(),
        ));
    }
    let m = hyper.split(n);
    let model = fit_on_block(d, kernel, gram, m, hyper)?;
    let s = surrogate_from_gram(gram, &model, m, n);
    let adjusted = model.cf_adjust_precomputed(&s, &d.z[m..]);
    let estimate = adjusted.iter().sum::<f64>() / adjusted.len() as f64;
    Ok(EstimatorResult {
        method: Method::Cf,
        estimate,
        diagnostics: Diagnostics {
            mu_s_m: Some(model.target_mean()),
            split_m: Some(m),
            ..Default::default()
        },
    })
}

fn simcf_with_gram(
    d: &Dataset,
    kernel: &SteinKernel,
    gram: &GramPair,
    hyper: &Hyper,
) -> Result<EstimatorResult> {
    let n = d.len();
    let lambda = hyper.lambda.evaluate(n);
    let model = KrrModel::fit_with_gram(&gram.kplus, &d.x, &d.z, kernel, lambda)?;
    Ok(EstimatorResult {
        method: Method::SimCf,
        estimate: model.target_mean(),
        diagnostics: Diagnostics {
            mu_s_m: Some(model.target_mean()),
            split_m: Some(n),
            ..Default::default()
        },
    })
}

fn weights_on_block(
    gram: &GramPair,
    lo: usize,
    hi: usize,
    hyper: &Hyper,
) -> Result<simplex::WeightVector> {
    let k0 = gram.k0.view((lo, lo), (hi - lo, hi - lo)).into_owned();
    let cap = if hyper.b0.is_finite() {
        hyper.b0 / (hi - lo) as f64
    } else {
        f64::INFINITY
    };
    simplex::solve(&k0, cap, hyper.qp_tol, hyper.qp_max_iter)
}

fn weight_diagnostics(w: &simplex::WeightVector) -> Diagnostics {
    Diagnostics {
        ksd: Some(w.ksd),
        kkt_residual: Some(w.kkt_residual),
        max_weight: Some(w.w.iter().cloned().fold(0.0, f64::max)),
        qp_converged: Some(w.converged),
        ..Default::default()
    }
}

fn bbis_with_gram(d: &Dataset, gram: &GramPair, hyper: &Hyper) -> Result<EstimatorResult> {
    let n = d.len();
    let weights = weights_on_block(gram, 0, n, hyper)?;
    let estimate = weights.w.iter().zip(&d.z).map(|(w, z)| w * z).sum();
    Ok(EstimatorResult {
        method: Method::Bbis,
        estimate,
        diagnostics: weight_diagnostics(&weights),
    })
}

fn drsk_with_gram(
    d: &Dataset,
    kernel: &SteinKernel,
    gram: &GramPair,
    hyper: &Hyper,
) -> Result<EstimatorResult> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InvalidParameter("DRSK needs n >= 2".into()));
    }
    let m = hyper.split(n);
    let model = fit_on_block(d, kernel, gram, m, hyper)?;
    let s = surrogate_from_gram(gram, &model, m, n);
    let adjusted = model.cf_adjust_precomputed(&s, &d.z[m..]);
    let weights = weights_on_block(gram, m, n, hyper)?;
    let estimate = weights
        .w
        .iter()
        .zip(&adjusted)
        .map(|(w, f)| w * f)
        .sum();
    let mut diagnostics = weight_diagnostics(&weights);
    diagnostics.mu_s_m = Some(model.target_mean());
    diagnostics.split_m = Some(m);
    Ok(EstimatorResult {
        method: Method::Drsk,
        estimate,
        diagnostics,
    })
}

fn drsk_reuse_with_gram(
    d: &Dataset,
    kernel: &SteinKernel,
    gram: &GramPair,
    hyper: &Hyper,
) -> Result<EstimatorResult> {
    let n = d.len();
    let lambda = hyper.lambda.evaluate(n);
    let model = KrrModel::fit_with_gram(&gram.kplus, &d.x, &d.z, kernel, lambda)?;
    let s = surrogate_from_gram(gram, &model, 0, n);
    let adjusted = model.cf_adjust_precomputed(&s, &d.z);
    let weights = weights_on_block(gram, 0, n, hyper)?;
    let estimate = weights
        .w
        .iter()
        .zip(&adjusted)
        .map(|(w, f)| w * f)
        .sum();
    let mut diagnostics = weight_diagnostics(&weights);
    diagnostics.mu_s_m = Some(model.target_mean());
    diagnostics.split_m = Some(n);
    Ok(EstimatorResult {
        method: Method::DrskR,
        estimate,
        diagnostics,
    })
}

/// CF with a fresh Gram computation.
pub fn cf_estimate(d: &Dataset, kernel: &SteinKernel, hyper: &Hyper) -> Result<EstimatorResult> {
    cf_with_gram(d, kernel, &kernel.gram(&d.x)?, hyper)
}

/// SimCF with a fresh Gram computation.
pub fn simcf_estimate(
    d: &Dataset,
    kernel: &SteinKernel,
    hyper: &Hyper,
) -> Result<EstimatorResult> {
    simcf_with_gram(d, kernel, &kernel.gram(&d.x)?, hyper)
}

/// BBIS with a fresh Gram computation.
pub fn bbis_estimate(d: &Dataset, kernel: &SteinKernel, hyper: &Hyper) -> Result<EstimatorResult> {
    bbis_with_gram(d, &kernel.gram(&d.x)?, hyper)
}

/// DRSK with a fresh Gram computation.
pub fn drsk_estimate(d: &Dataset, kernel: &SteinKernel, hyper: &Hyper) -> Result<EstimatorResult> {
    drsk_with_gram(d, kernel, &kernel.gram(&d.x)?, hyper)
}

/// DRSK-R with a fresh Gram computation.
pub fn drsk_reuse_estimate(
    d: &Dataset,
    kernel: &SteinKernel,
    hyper: &Hyper,
) -> Result<EstimatorResult> {
    drsk_reuse_with_gram(d, kernel, &kernel.gram(&d.x)?, hyper)
}

/// Runs the requested methods on one dataset, computing the Gram pair once
/// and slicing blocks out of it. Results are keyed by method.
pub fn run_methods(
    d: &Dataset,
    kernel: &SteinKernel,
    hyper: &Hyper,
    methods: &[Method],
) -> Result<BTreeMap<Method, EstimatorResult>> {
    let mut out = BTreeMap::new();
    let needs_gram = methods.iter().any(|m| *m != Method::Naive);
    let gram = if needs_gram {
        Some(kernel.gram(&d.x)?)
    } else {
        None
    };
    for &method in methods {
        let result = match method {
            Method::Naive => naive_mc(d)?,
            Method::Cf => cf_with_gram(d, kernel, gram.as_ref().unwrap(), hyper)?,
            Method::SimCf => simcf_with_gram(d, kernel, gram.as_ref().unwrap(), hyper)?,
            Method::Bbis => bbis_with_gram(d, gram.as_ref().unwrap(), hyper)?,
            Method::Drsk => drsk_with_gram(d, kernel, gram.as_ref().unwrap(), hyper)?,
            Method::DrskR => drsk_reuse_with_gram(d, kernel, gram.as_ref().unwrap(), hyper)?,
        };
        out.insert(method, result);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scored::ScoredTarget;
    use approx::assert_abs_diff_eq;

    fn kernel_1d() -> SteinKernel {
        SteinKernel::new(1.0, ScoredTarget::gaussian_iso(&[0.0], 1).unwrap()).unwrap()
    }

    fn sample_dataset(n: usize, seed: u64) -> Dataset {
        let t = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        let mut rng = crate::seeds::rng(seed, &[]);
        let x = t.sample(n, &mut rng);
        let z: Vec<f64> = x.iter().map(|p| (std::f64::consts::PI * p[0]).sin()).collect();
        Dataset::new(x, z, "test").unwrap()
    }

    #[test]
    fn naive_examples() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0.0, 2.0], "t").unwrap();
        assert_abs_diff_eq!(naive_mc(&d).unwrap().estimate, 1.0);
        let d = Dataset::new(vec![vec![0.0]; 3], vec![7.0; 3], "t").unwrap();
        assert_abs_diff_eq!(naive_mc(&d).unwrap().estimate, 7.0);
        assert!(naive_mc(&Dataset::new(vec![], vec![], "t").unwrap()).is_err());
    }

    #[test]
    fn naive_linearity() {
        let d = sample_dataset(20, 1);
        let base = naive_mc(&d).unwrap().estimate;
        let scaled = Dataset::new(
            d.x.clone(),
            d.z.iter().map(|z| 3.0 * z + 2.0).collect(),
            "t",
        )
        .unwrap();
        assert_abs_diff_eq!(naive_mc(&scaled).unwrap().estimate, 3.0 * base + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn cf_matches_manual_recomposition() {
        let k = kernel_1d();
        let d = sample_dataset(14, 9);
        let hyper = Hyper::default();
        let m = hyper.split(14);
        let model = KrrModel::fit(
            &d.x[..m],
            &d.z[..m],
            &k,
            hyper.lambda.evaluate(m),
        )
        .unwrap();
        let adjusted = model.cf_adjust(&d.x[m..], &d.z[m..]).unwrap();
        let manual = adjusted.iter().sum::<f64>() / adjusted.len() as f64;
        let r = cf_estimate(&d, &k, &hyper).unwrap();
        assert_abs_diff_eq!(r.estimate, manual, epsilon = 1e-10);
    }

    #[test]
    fn cf_huge_lambda_reduces_to_naive_on_d1() {
        let k = kernel_1d();
        let d = sample_dataset(16, 2);
        let hyper = Hyper {
            lambda: LambdaRule {
                multiplier: 1e12,
                exponent: 0.0,
            },
            ..Default::default()
        };
        let m = hyper.split(16);
        let r = cf_estimate(&d, &k, &hyper).unwrap();
        let naive_d1 = d.z[m..].iter().sum::<f64>() / (16 - m) as f64;
        assert!((r.estimate - naive_d1).abs() < 1e-6);
    }

    #[test]
    fn cf_rejects_single_point() {
        let k = kernel_1d();
        let d = Dataset::new(vec![vec![0.0]], vec![1.0], "t").unwrap();
        assert!(cf_estimate(&d, &k, &Hyper::default()).is_err());
    }

    #[test]
    fn simcf_definitional() {
        let k = kernel_1d();
        let d = sample_dataset(12, 3);
        let hyper = Hyper::default();
        let r = simcf_estimate(&d, &k, &hyper).unwrap();
        let model = KrrModel::fit(&d.x, &d.z, &k, hyper.lambda.evaluate(12)).unwrap();
        assert_abs_diff_eq!(r.estimate, model.target_mean(), epsilon = 1e-12);

        let zero = Dataset::new(d.x.clone(), vec![0.0; 12], "t").unwrap();
        assert_abs_diff_eq!(simcf_estimate(&zero, &k, &hyper).unwrap().estimate, 0.0);
    }

    #[test]
    fn bbis_shift_equivariance() {
        let k = kernel_1d();
        let d = sample_dataset(24, 4);
        let hyper = Hyper::default();
        let base = bbis_estimate(&d, &k, &hyper).unwrap().estimate;
        let shifted = Dataset::new(d.x.clone(), d.z.iter().map(|z| z + 5.0).collect(), "t").unwrap();
        let s = bbis_estimate(&shifted, &k, &hyper).unwrap().estimate;
        assert_abs_diff_eq!(s, base + 5.0, epsilon = 1e-8);
    }

    #[test]
    fn naive_and_bbis_shift_equivariant() {
        // weight-based estimators are exactly equivariant because the weights
        // ignore the integrand and sum to one; the regression-based ones are
        // only approximately so at finite lambda
        let k = kernel_1d();
        let d = sample_dataset(20, 5);
        let hyper = Hyper::default();
        let c = -3.0;
        let shifted =
            Dataset::new(d.x.clone(), d.z.iter().map(|z| z + c).collect(), "t").unwrap();
        let base = run_methods(&d, &k, &hyper, &Method::ALL).unwrap();
        let moved = run_methods(&shifted, &k, &hyper, &Method::ALL).unwrap();
        for m in [Method::Naive, Method::Bbis] {
            assert!(
                (moved[&m].estimate - base[&m].estimate - c).abs() < 1e-8,
                "{m}: {} vs {}",
                moved[&m].estimate,
                base[&m].estimate
            );
        }
        for m in [Method::Cf, Method::SimCf, Method::Drsk, Method::DrskR] {
            assert!(
                (moved[&m].estimate - base[&m].estimate - c).abs() < 1.0,
                "{m}: {} vs {}",
                moved[&m].estimate,
                base[&m].estimate
            );
        }
    }

    #[test]
    fn drsk_zero_surrogate_is_bbis_on_d1() {
        let k = kernel_1d();
        let n = 16;
        let hyper = Hyper::default();
        let full = sample_dataset(n, 6);
        let m = hyper.split(n);
        // zero targets on D0 force beta = 0, so f_m = z on D1
        let mut z = full.z.clone();
        for zi in z.iter_mut().take(m) {
            *zi = 0.0;
        }
        let d = Dataset::new(full.x.clone(), z, "t").unwrap();
        let drsk = drsk_estimate(&d, &k, &hyper).unwrap();

        let d1 = Dataset::new(
            full.x[m..].to_vec(),
            d.z[m..].to_vec(),
            "t",
        )
        .unwrap();
        let bbis = bbis_estimate(&d1, &k, &hyper).unwrap();
        assert_abs_diff_eq!(drsk.estimate, bbis.estimate, epsilon = 1e-8);
    }

    #[test]
    fn drsk_decomposition_identity() {
        let k = kernel_1d();
        let d = sample_dataset(18, 7);
        let hyper = Hyper::default();
        let n = d.len();
        let m = hyper.split(n);
        let r = drsk_estimate(&d, &k, &hyper).unwrap();

        // recompute the two terms of the decomposition independently
        let model = KrrModel::fit(&d.x[..m], &d.z[..m], &k, hyper.lambda.evaluate(m)).unwrap();
        let gram = k.gram(&d.x).unwrap();
        let k0 = gram.k0.view((m, m), (n - m, n - m)).into_owned();
        let weights =
            simplex::solve(&k0, hyper.b0 / (n - m) as f64, hyper.qp_tol, hyper.qp_max_iter)
                .unwrap();
        let s = model.predict_many(&d.x[m..]).unwrap();
        let residual_term: f64 = weights
            .w
            .iter()
            .zip(d.z[m..].iter().zip(&s))
            .map(|(w, (z, sj))| w * (z - sj))
            .sum();
        assert_abs_diff_eq!(
            r.estimate,
            model.target_mean() + residual_term,
            epsilon = 1e-10
        );
    }

    #[test]
    fn drsk_reuse_singleton() {
        let k = kernel_1d();
        let d = Dataset::new(vec![vec![0.4]], vec![1.7], "t").unwrap();
        let hyper = Hyper::default();
        let r = drsk_reuse_estimate(&d, &k, &hyper).unwrap();
        let model = KrrModel::fit(&d.x, &d.z, &k, hyper.lambda.evaluate(1)).unwrap();
        let expected = d.z[0] - model.predict(&d.x[0]).unwrap() + model.target_mean();
        assert_abs_diff_eq!(r.estimate, expected, epsilon = 1e-10);
    }

    #[test]
    fn run_methods_matches_individual_paths() {
        let k = kernel_1d();
        let d = sample_dataset(20, 8);
        let hyper = Hyper::default();
        let all = run_methods(&d, &k, &hyper, &Method::ALL).unwrap();
        assert_abs_diff_eq!(
            all[&Method::Naive].estimate,
            naive_mc(&d).unwrap().estimate
        );
        assert_abs_diff_eq!(
            all[&Method::Cf].estimate,
            cf_estimate(&d, &k, &hyper).unwrap().estimate,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            all[&Method::SimCf].estimate,
            simcf_estimate(&d, &k, &hyper).unwrap().estimate,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            all[&Method::Bbis].estimate,
            bbis_estimate(&d, &k, &hyper).unwrap().estimate,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            all[&Method::Drsk].estimate,
            drsk_estimate(&d, &k, &hyper).unwrap().estimate,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            all[&Method::DrskR].estimate,
            drsk_reuse_estimate(&d, &k, &hyper).unwrap().estimate,
            epsilon = 1e-10
        );
    }

    #[test]
    fn determinism() {
        let k = kernel_1d();
        let d = sample_dataset(20, 9);
        let hyper = Hyper::default();
        let a = run_methods(&d, &k, &hyper, &Method::ALL).unwrap();
        let b = run_methods(&d, &k, &hyper, &Method::ALL).unwrap();
        for m in Method::ALL {
            assert_eq!(a[&m].estimate.to_bits(), b[&m].estimate.to_bits());
        }
    }

    #[test]
    fn method_parsing_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_str(m.as_str()).unwrap(), m);
        }
        assert!(Method::from_str("bogus").is_err());
    }
}
