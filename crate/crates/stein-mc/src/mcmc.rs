//! Parallel Metropolis-Hastings sample generator.
//!
//! Runs `n` independent chains, one per output point: each chain starts at a
//! prior draw, takes a fixed number of symmetric Gaussian-proposal steps on
//! the unnormalized target density, and emits its endpoint. With a small
//! iteration budget the endpoints follow a biased distribution `q_X` rather
//! than the target, which is precisely the generator the biased-sample
//! experiments need.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scored::ScoredTarget;
use crate::seeds;

/// Configuration for the parallel MH generator.
#[derive(Debug, Clone)]
pub struct ParallelMhConfig {
    /// Unnormalized target (e.g. a posterior).
    pub target: ScoredTarget,
    /// Prior used to initialize each chain; must have an exact sampler.
    pub prior: ScoredTarget,
    /// Isotropic Gaussian proposal standard deviation per coordinate.
    pub proposal_sd: Vec<f64>,
    pub iterations: usize,
    /// Number of chains = number of output points.
    pub n: usize,
    pub seed: u64,
}

impl ParallelMhConfig {
    /// Default proposal scale: half the prior marginal standard deviation.
    pub fn with_default_proposal(
        target: ScoredTarget,
        prior: ScoredTarget,
        iterations: usize,
        n: usize,
        seed: u64,
    ) -> Self {
        let proposal_sd = prior.marginal_std().iter().map(|s| 0.5 * s).collect();
        Self {
            target,
            prior,
            proposal_sd,
            iterations,
            n,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("need at least one chain".into()));
        }
        if self.proposal_sd.len() != self.target.dim()
            || self.proposal_sd.iter().any(|&s| s <= 0.0)
        {
            return Err(Error::InvalidParameter(
                "proposal_sd must be positive with one entry per dimension".into(),
            ));
        }
        if self.prior.dim() != self.target.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.target.dim(),
                got: self.prior.dim(),
            });
        }
        Ok(())
    }
}

fn run_chain(config: &ParallelMhConfig, chain: usize) -> Result<(Vec<f64>, usize)> {
    let mut rng = seeds::rng(config.seed, &[0x6d68, chain as u64]);
    let mut state = config.prior.sample_one(&mut rng);
    if !config.target.is_interior(&state) {
        return Err(Error::OutsideSupport(format!(
            "prior emitted a point outside the target support: {state:?}"
        )));
    }
    let mut log_p = config.target.log_density_unnorm(&state)?;
    let mut accepted = 0usize;
    for _ in 0..config.iterations {
        let proposal: Vec<f64> = state
            .iter()
            .zip(&config.proposal_sd)
            .map(|(xi, sd)| xi + sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        // proposals outside the support have density 0 and are rejected
        if config.target.is_interior(&proposal) {
            let log_p_new = config.target.log_density_unnorm(&proposal)?;
            let log_alpha = log_p_new - log_p;
            if log_alpha >= 0.0 || rng.gen::<f64>() < log_alpha.exp() {
                state = proposal;
                log_p = log_p_new;
                accepted += 1;
            }
        }
    }
    Ok((state, accepted))
}

fn run_all(config: &ParallelMhConfig) -> Result<(Vec<Vec<f64>>, usize)> {
    config.validate()?;
    let results: Vec<(Vec<f64>, usize)> = (0..config.n)
        .into_par_iter()
        .map(|i| run_chain(config, i))
        .collect::<Result<_>>()?;
    let total_accepted = results.iter().map(|(_, a)| a).sum();
    Ok((results.into_iter().map(|(s, _)| s).collect(), total_accepted))
}

/// One endpoint per chain; chain `i` depends only on `(seed, i)`.
pub fn parallel_mh(config: &ParallelMhConfig) -> Result<Vec<Vec<f64>>> {
    Ok(run_all(config)?.0)
}

/// Average acceptance fraction across all chains and iterations.
pub fn acceptance_rate(config: &ParallelMhConfig) -> Result<f64> {
    if config.iterations == 0 {
        return Err(Error::InvalidParameter(
            "acceptance rate undefined with 0 iterations".into(),
        ));
    }
    let (_, accepted) = run_all(config)?;
    Ok(accepted as f64 / (config.n * config.iterations) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_config(iterations: usize, n: usize, proposal_sd: f64) -> ParallelMhConfig {
        let target = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        let prior = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        ParallelMhConfig {
            target,
            prior,
            proposal_sd: vec![proposal_sd],
            iterations,
            n,
            seed: 99,
        }
    }

    #[test]
    fn zero_iterations_returns_prior_draws() {
        let config = gauss_config(0, 50, 1.0);
        let pts = parallel_mh(&config).unwrap();
        let mut direct = Vec::new();
        for i in 0..50 {
            let mut rng = seeds::rng(99, &[0x6d68, i]);
            direct.push(config.prior.sample_one(&mut rng));
        }
        assert_eq!(pts, direct);
    }

    #[test]
    fn determinism_per_seed_and_chain() {
        let config = gauss_config(20, 30, 0.8);
        let a = parallel_mh(&config).unwrap();
        let b = parallel_mh(&config).unwrap();
        assert_eq!(a, b);
        // chain i unchanged when n grows
        let bigger = ParallelMhConfig {
            n: 40,
            ..config.clone()
        };
        let c = parallel_mh(&bigger).unwrap();
        assert_eq!(&c[..30], &a[..]);
    }

    #[test]
    fn long_run_converges_to_gaussian_target() {
        // overdispersed prior, long budget: endpoints should match the target
        let target = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        let prior = ScoredTarget::gaussian_mixture_product(&[1.0], &[3.0], &[4.0], 1).unwrap();
        let n = 4000;
        let config = ParallelMhConfig {
            target,
            prior,
            proposal_sd: vec![1.0],
            iterations: 10_000,
            n,
            seed: 7,
        };
        let mut draws: Vec<f64> = parallel_mh(&config)
            .unwrap()
            .into_iter()
            .map(|p| p[0])
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let phi = |x: f64| 0.5 * (1.0 + libm_erf(x / std::f64::consts::SQRT_2));
        let mut ks: f64 = 0.0;
        for (i, &x) in draws.iter().enumerate() {
            let f = phi(x);
            ks = ks
                .max((f - i as f64 / n as f64).abs())
                .max(((i + 1) as f64 / n as f64 - f).abs());
        }
        let crit = 1.63 / (n as f64).sqrt();
        assert!(ks < crit, "KS={ks} crit={crit}");
    }

    fn libm_erf(x: f64) -> f64 {
        let sign = x.signum();
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.3275911 * x);
        sign * (1.0
            - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
                + 0.254829592)
                * t
                * (-x * x).exp())
    }

    #[test]
    fn chains_are_uncorrelated() {
        let config = gauss_config(50, 2000, 1.0);
        let pts = parallel_mh(&config).unwrap();
        let a: Vec<f64> = pts.iter().step_by(2).map(|p| p[0]).collect();
        let b: Vec<f64> = pts.iter().skip(1).step_by(2).map(|p| p[0]).collect();
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
        let sa = (a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n).sqrt();
        let sb = (b.iter().map(|x| (x - mb).powi(2)).sum::<f64>() / n).sqrt();
        let corr = cov / (sa * sb);
        let se = 1.0 / n.sqrt();
        assert!(corr.abs() < 4.0 * se, "corr={corr}");
    }

    #[test]
    fn acceptance_rate_limits() {
        let tiny = gauss_config(50, 100, 1e-6);
        assert!(acceptance_rate(&tiny).unwrap() > 0.99);
        let huge = gauss_config(50, 100, 1e4);
        assert!(acceptance_rate(&huge).unwrap() < 0.01);
        let tuned = gauss_config(50, 200, 1.0);
        let r = acceptance_rate(&tuned).unwrap();
        assert!(r > 0.1 && r < 0.9, "rate={r}");
        assert!(acceptance_rate(&gauss_config(0, 10, 1.0)).is_err());
    }

    #[test]
    fn short_budget_endpoints_are_biased() {
        // overdispersed prior, tiny budget: endpoint mean stays away from 0
        let target = ScoredTarget::gaussian_iso(&[0.0], 1).unwrap();
        let prior = ScoredTarget::gaussian_mixture_product(&[1.0], &[4.0], &[1.0], 1).unwrap();
        let n = 2000;
        let config = ParallelMhConfig {
            target,
            prior,
            proposal_sd: vec![0.3],
            iterations: 5,
            n,
            seed: 13,
        };
        let draws: Vec<f64> = parallel_mh(&config)
            .unwrap()
            .into_iter()
            .map(|p| p[0])
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!(mean.abs() > 4.0 * se, "mean={mean} se={se}");
    }
}
