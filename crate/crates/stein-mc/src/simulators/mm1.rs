//! M/M/1 first-customers waiting time via the Lindley recursion.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::seeds;

/// M/M/1 simulation configuration.
#[derive(Debug, Clone)]
pub struct Mm1Config {
    pub arrival_rate: f64,
    pub n_customers: usize,
    pub replications: usize,
    pub seed: u64,
}

impl Default for Mm1Config {
    fn default() -> Self {
        Self {
            arrival_rate: 1.0,
            n_customers: 10,
            replications: 1,
            seed: 0,
        }
    }
}

/// Mean waiting time of the first `n_customers` customers, averaged over
/// replications. Waits follow `W_{k+1} = max(0, W_k + S_k - A_{k+1})` with
/// `W_1 = 0`, interarrivals `Exp(arrival_rate)`, services `Exp(service_rate)`.
pub fn mm1_mean_wait(service_rate: f64, config: &Mm1Config) -> Result<f64> {
    if !(service_rate > 0.0) {
        return Err(Error::InvalidParameter("service rate must be > 0".into()));
    }
    if !(config.arrival_rate > 0.0) || config.n_customers == 0 || config.replications == 0 {
        return Err(Error::InvalidParameter(
            "arrival rate, customer count, and replications must be positive".into(),
        ));
    }
    let total: f64 = (0..config.replications)
        .map(|rep| {
            let mut rng = seeds::rng(config.seed, &[0x6d6d31, rep as u64]);
            single_replication(service_rate, config, &mut rng)
        })
        .sum();
    Ok(total / config.replications as f64)
}

fn single_replication<R: Rng>(service_rate: f64, config: &Mm1Config, rng: &mut R) -> f64 {
    let arrival = Exp::new(config.arrival_rate).expect("validated");
    let service = Exp::new(service_rate).expect("validated");
    let mut wait = 0.0f64;
    let mut sum = 0.0;
    for k in 0..config.n_customers {
        sum += wait;
        if k + 1 < config.n_customers {
            let s: f64 = service.sample(rng);
            let a: f64 = arrival.sample(rng);
            wait = (wait + s - a).max(0.0);
        }
    }
    sum / config.n_customers as f64
}
