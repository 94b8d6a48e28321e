//! Configuration-driven experiment runner: replicated estimation against a
//! Monte Carlo ground truth, empirical MSE aggregation, log-log slope fits,
//! and CSV/JSON report emission.
//!
//! Experiments are declared as JSON ([`ExperimentConfig`]) or selected from
//! the named presets in [`preset`]. Within a repetition every method sees the
//! same dataset; repetition seeds derive from the master seed and indices
//! only, so reports are bit-identical across runs and parallel schedules.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{run_methods, Dataset, Hyper, Method};
use crate::kernel::{median_bandwidth, SteinKernel};
use crate::mcmc::{parallel_mh, ParallelMhConfig};
use crate::scored::{NoiseModel, ScoredTarget};
use crate::seeds;
use crate::simulators::mm1::{mm1_mean_wait, Mm1Config};
use crate::simulators::network::{network_mean_delay, NetworkConfig, TableSetting, PAIRS};

const TAG_GROUND_TRUTH: u64 = 0x6774;
const TAG_DATA: u64 = 0x64617461;
const TAG_NOISE: u64 = 0x6e7a;
const TAG_SIM: u64 = 0x73696d;
const TAG_MH: u64 = 0x6d63;

/// Target distribution specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSpec {
    /// `N(mean, I_d)` with `d = mean.len()`.
    Gaussian { mean: Vec<f64> },
    /// Product of `d` identical one-dimensional Gaussian mixtures.
    GaussianMixture {
        weights: Vec<f64>,
        means: Vec<f64>,
        variances: Vec<f64>,
        d: usize,
    },
    /// Product of generalized Student-t marginals `loc + scale * t_dof`.
    StudentT {
        dof: f64,
        loc: f64,
        scale: f64,
        d: usize,
    },
    Gamma { shapes: Vec<f64>, rates: Vec<f64> },
    Beta { alphas: Vec<f64>, betas: Vec<f64> },
    /// Gamma posterior over the 12 network arrival rates for a data setting.
    NetworkPosterior { setting: String },
}

impl TargetSpec {
    pub fn build(&self) -> Result<ScoredTarget> {
        match self {
            TargetSpec::Gaussian { mean } => ScoredTarget::gaussian_iso(mean, mean.len()),
            TargetSpec::GaussianMixture {
                weights,
                means,
                variances,
                d,
            } => ScoredTarget::gaussian_mixture_product(weights, means, variances, *d),
            TargetSpec::StudentT { dof, loc, scale, d } => {
                ScoredTarget::student_t_product(*dof, *loc, *scale, *d)
            }
            TargetSpec::Gamma { shapes, rates } => ScoredTarget::gamma_product(shapes, rates),
            TargetSpec::Beta { alphas, betas } => ScoredTarget::beta_product(alphas, betas),
            TargetSpec::NetworkPosterior { setting } => {
                parse_setting(setting)?.posterior()
            }
        }
    }
}

fn parse_setting(name: &str) -> Result<TableSetting> {
    match name.to_ascii_lowercase().as_str() {
        "a" => Ok(TableSetting::A),
        "b" => Ok(TableSetting::B),
        "c" => Ok(TableSetting::C),
        other => Err(Error::Config(format!("unknown network setting '{other}'"))),
    }
}

/// Sample generator specification (the distribution `q`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Draw from the target itself.
    Exact,
    /// Draw from `N(mean, I_d)` regardless of the target.
    Shifted { mean: Vec<f64> },
    /// Endpoints of independent Metropolis-Hastings chains started from the
    /// prior; `proposal_sd = None` uses half the prior marginal std.
    ParallelMh {
        prior: TargetSpec,
        iterations: usize,
        #[serde(default)]
        proposal_sd: Option<Vec<f64>>,
    },
}

/// Additive noise on the integrand output.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseSpec {
    #[default]
    None,
    Gaussian { sigma: f64 },
    /// `N(0, sigma^2) + coeffs . x`.
    GaussianLinear { sigma: f64, coeffs: Vec<f64> },
}

impl NoiseSpec {
    pub fn build(&self) -> NoiseModel {
        match self {
            NoiseSpec::None => NoiseModel::None,
            NoiseSpec::Gaussian { sigma } => NoiseModel::Gaussian { sigma: *sigma },
            NoiseSpec::GaussianLinear { sigma, coeffs } => NoiseModel::GaussianPlusLinear {
                sigma: *sigma,
                coeffs: coeffs.clone(),
            },
        }
    }
}

/// Named integrand `f(x)`; simulator-backed variants consume a derived seed
/// per evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IntegrandSpec {
    /// `sin(pi/d * sum(x))`.
    SinMean,
    /// `cos(pi/d * sum(x))`.
    CosMean,
    /// Mean of the coordinates of `x`.
    CoordinateMean,
    Zero,
    /// M/M/1 mean wait of the first customers; `x = (service_rate,)`.
    Mm1 {
        n_customers: usize,
        replications: usize,
    },
    /// Communication network mean delay; `x` is the 12-vector of rates.
    Network {
        n_messages: usize,
        replications: usize,
    },
}

impl IntegrandSpec {
    pub fn eval(&self, x: &[f64], seed: u64) -> Result<f64> {
        let d = x.len() as f64;
        match self {
            IntegrandSpec::SinMean => {
                Ok((std::f64::consts::PI / d * x.iter().sum::<f64>()).sin())
            }
            IntegrandSpec::CosMean => {
                Ok((std::f64::consts::PI / d * x.iter().sum::<f64>()).cos())
            }
            IntegrandSpec::CoordinateMean => Ok(x.iter().sum::<f64>() / d),
            IntegrandSpec::Zero => Ok(0.0),
            IntegrandSpec::Mm1 {
                n_customers,
                replications,
            } => {
                if x.len() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: x.len(),
                    });
                }
                mm1_mean_wait(
                    x[0],
                    &Mm1Config {
                        n_customers: *n_customers,
                        replications: *replications,
                        seed,
                        ..Default::default()
                    },
                )
            }
            IntegrandSpec::Network {
                n_messages,
                replications,
            } => {
                if x.len() != PAIRS {
                    return Err(Error::DimensionMismatch {
                        expected: PAIRS,
                        got: x.len(),
                    });
                }
                network_mean_delay(
                    x,
                    &NetworkConfig {
                        n_messages: *n_messages,
                        replications: *replications,
                        seed,
                        ..Default::default()
                    },
                )
            }
        }
    }
}

fn default_ground_truth_n() -> usize {
    1_000_000
}

/// Declarative description of one replicated MSE experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub target: TargetSpec,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub integrand: IntegrandSpec,
    pub n_grid: Vec<usize>,
    pub repetitions: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub hyper: Hyper,
    pub seed: u64,
    #[serde(default = "default_ground_truth_n")]
    pub ground_truth_n: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be nonempty and ascending".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Config("sample sizes must be at least 2".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.ground_truth_n == 0 {
            return Err(Error::Config("ground_truth_n must be >= 1".into()));
        }
        self.noise.build().validate()?;
        self.target.build()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// One (method, n, repetition) outcome; failed cells keep their diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRecord {
    pub method: Method,
    pub n: usize,
    pub rep: usize,
    pub estimate: Option<f64>,
    pub error: Option<String>,
}

/// Aggregated row of the long-form report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MseRow {
    pub method: Method,
    pub n: usize,
    pub mse: f64,
    pub se: f64,
    pub estimate: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeRow {
    pub method: Method,
    pub slope: f64,
    pub se: f64,
}

/// Full experiment outcome: ground truth, per-(method, n) aggregates, fitted
/// slopes, and the raw per-repetition cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MseReport {
    pub config: ExperimentConfig,
    pub theta: f64,
    pub theta_se: f64,
    pub rows: Vec<MseRow>,
    pub slopes: Vec<SlopeRow>,
    pub cells: Vec<CellRecord>,
}

impl MseReport {
    /// Squared errors of the successful cells for one (method, n).
    pub fn squared_errors(&self, method: Method, n: usize) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.method == method && c.n == n)
            .filter_map(|c| c.estimate)
            .map(|e| (e - self.theta).powi(2))
            .collect()
    }
}

/// Monte Carlo ground truth with its standard error.
pub fn ground_truth(
    target: &ScoredTarget,
    noise: &NoiseModel,
    integrand: &IntegrandSpec,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    noise.validate()?;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds::rng(seed, &[TAG_GROUND_TRUTH, i as u64]);
            let x = target.sample_one(&mut rng);
            let y = noise.sample(&x, &mut rng);
            let sim_seed = seeds::derive(seed, &[TAG_GROUND_TRUTH, TAG_SIM, i as u64]);
            integrand.eval(&x, sim_seed).map(|f| f + y)
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Ok((mean, (var / n as f64).sqrt()))
}

fn generate_dataset(config: &ExperimentConfig, n: usize, rep: usize) -> Result<Dataset> {
    let target = config.target.build()?;
    let tags = [TAG_DATA, n as u64, rep as u64];
    let x = match &config.generator {
        GeneratorSpec::Exact => {
            let mut rng = seeds::rng(config.seed, &tags);
            target.sample(n, &mut rng)
        }
        GeneratorSpec::Shifted { mean } => {
            if mean.len() != target.dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.dim(),
                    got: mean.len(),
                });
            }
            let q = ScoredTarget::gaussian_iso(mean, mean.len())?;
            let mut rng = seeds::rng(config.seed, &tags);
            q.sample(n, &mut rng)
        }
        GeneratorSpec::ParallelMh {
            prior,
            iterations,
            proposal_sd,
        } => {
            let prior = prior.build()?;
            let mh_seed = seeds::derive(config.seed, &[TAG_MH, n as u64, rep as u64]);
            let mut mh = ParallelMhConfig::with_default_proposal(
                target.clone(),
                prior,
                *iterations,
                n,
                mh_seed,
            );
            if let Some(sd) = proposal_sd {
                mh.proposal_sd = sd.clone();
            }
            parallel_mh(&mh)?
        }
    };
    let noise = config.noise.build();
    let mut noise_rng = seeds::rng(config.seed, &[TAG_NOISE, n as u64, rep as u64]);
    let mut z = Vec::with_capacity(n);
    for (i, xi) in x.iter().enumerate() {
        let sim_seed = seeds::derive(config.seed, &[TAG_SIM, n as u64, rep as u64, i as u64]);
        z.push(config.integrand.eval(xi, sim_seed)? + noise.sample(xi, &mut noise_rng));
    }
    Dataset::new(x, z, config.name.clone())
}

fn run_cell(config: &ExperimentConfig, n: usize, rep: usize) -> Vec<CellRecord> {
    let outcome = (|| {
        let d = generate_dataset(config, n, rep)?;
        let h_sq = median_bandwidth(&d.x)?;
        let kernel = SteinKernel::new(h_sq, config.target.build()?)?;
        run_methods(&d, &kernel, &config.hyper, &config.methods)
    })();
    match outcome {
        Ok(results) => config
            .methods
            .iter()
            .map(|&m| CellRecord {
                method: m,
                n,
                rep,
                estimate: results.get(&m).map(|r| r.estimate),
                error: None,
            })
            .collect(),
        Err(e) => config
            .methods
            .iter()
            .map(|&m| CellRecord {
                method: m,
                n,
                rep,
                estimate: None,
                error: Some(e.to_string()),
            })
            .collect(),
    }
}

/// Runs the full replicated experiment and aggregates per-(method, n) MSEs.
///
/// Individual failed cells are recorded with their error message; only a
/// failed ground-truth computation aborts the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MseReport> {
    config.validate()?;
    let target = config.target.build()?;
    let (theta, theta_se) = ground_truth(
        &target,
        &config.noise.build(),
        &config.integrand,
        config.ground_truth_n,
        config.seed,
    )?;

    let jobs: Vec<(usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.repetitions).map(move |rep| (n, rep)))
        .collect();
    let cells: Vec<CellRecord> = jobs
        .par_iter()
        .flat_map_iter(|&(n, rep)| run_cell(config, n, rep))
        .collect();

    let mut rows = Vec::new();
    for &m in &config.methods {
        for &n in &config.n_grid {
            let group: Vec<&CellRecord> = cells
                .iter()
                .filter(|c| c.method == m && c.n == n)
                .collect();
            let ok: Vec<f64> = group.iter().filter_map(|c| c.estimate).collect();
            let failures = group.len() - ok.len();
            let (mse, se, estimate) = if ok.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let sq: Vec<f64> = ok.iter().map(|e| (e - theta).powi(2)).collect();
                let mse = sq.iter().sum::<f64>() / sq.len() as f64;
                let var = if sq.len() > 1 {
                    sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (sq.len() - 1) as f64
                } else {
                    0.0
                };
                (
                    mse,
                    (var / sq.len() as f64).sqrt(),
                    ok.iter().sum::<f64>() / ok.len() as f64,
                )
            };
            rows.push(MseRow {
                method: m,
                n,
                mse,
                se,
                estimate,
                failures,
            });
        }
    }

    let mut slopes = Vec::new();
    for &m in &config.methods {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.method == m && r.mse.is_finite() && r.mse > 0.0)
            .map(|r| (r.n as f64, r.mse))
            .collect();
        if let Ok((slope, se)) = fit_slope(&points) {
            slopes.push(SlopeRow { method: m, slope, se });
        }
    }

    Ok(MseReport {
        config: config.clone(),
        theta,
        theta_se,
        rows,
        slopes,
        cells,
    })
}

/// Ordinary least squares of `log(mse)` on `log(n)`; returns the slope and
/// its standard error. Requires at least three points with positive MSE.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(
            "slope fit needs at least 3 points".into(),
        ));
    }
    if points.iter().any(|&(n, mse)| !(n > 0.0) || !(mse > 0.0)) {
        return Err(Error::InvalidParameter(
            "slope fit needs positive n and mse".into(),
        ));
    }
    let k = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, m)| (n.ln(), m.ln())).collect();
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter(
            "slope fit needs distinct n values".into(),
        ));
    }
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let sigma_sq = ssr / (k - 2.0);
    Ok((slope, (sigma_sq / sxx).sqrt()))
}

/// Writes `mse.csv` (long form) and `summary.json` under `dir`; returns both
/// paths. Output is byte-deterministic for a fixed report.
pub fn emit_report(report: &MseReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("mse.csv");
    let mut writer = csv::Writer::from_path(&csv_path)?;
    writer.write_record(["method", "n", "mse", "se", "estimate"])?;
    for row in &report.rows {
        writer.write_record([
            row.method.as_str().to_string(),
            row.n.to_string(),
            format!("{}", row.mse),
            format!("{}", row.se),
            format!("{}", row.estimate),
        ])?;
    }
    writer.flush()?;
    let json_path = dir.join("summary.json");
    fs::write(&json_path, serde_json::to_string_pretty(report)?)?;
    Ok((csv_path, json_path))
}

/// Re-reads a long-form CSV emitted by [`emit_report`].
pub fn read_report_csv(path: &Path) -> Result<Vec<MseRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 5 {
            return Err(Error::Config(format!(
                "expected 5 columns, got {}",
                record.len()
            )));
        }
        let parse = |idx: usize| -> Result<f64> {
            record[idx]
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad float '{}': {e}", &record[idx])))
        };
        rows.push(MseRow {
            method: record[0].parse()?,
            n: record[1]
                .parse()
                .map_err(|e| Error::Config(format!("bad n '{}': {e}", &record[1])))?,
            mse: parse(2)?,
            se: parse(3)?,
            estimate: parse(4)?,
            failures: 0,
        });
    }
    Ok(rows)
}

/// Fits per-method slopes from a long-form CSV.
pub fn slopes_from_csv(path: &Path) -> Result<Vec<SlopeRow>> {
    let rows = read_report_csv(path)?;
    let mut grouped: BTreeMap<Method, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        if row.mse.is_finite() && row.mse > 0.0 {
            grouped.entry(row.method).or_default().push((row.n as f64, row.mse));
        }
    }
    let mut out = Vec::new();
    for (method, points) in grouped {
        let (slope, se) = fit_slope(&points)?;
        out.push(SlopeRow { method, slope, se });
    }
    Ok(out)
}

const CONJUGATE_NOISE_SIGMA: f64 = 3.1622776601683795e-5; // std of N(0, 0.001^3)

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &[
    "illustration-a1",
    "illustration-a2",
    "illustration-a3",
    "illustration-b1",
    "illustration-b2",
    "illustration-b3",
    "illustration-c1",
    "illustration-c2",
    "illustration-c3",
    "mixture",
    "student-t",
    "gamma-conjugate",
    "beta-conjugate",
    "mm1",
    "network-a",
    "network-b",
    "network-c",
    "smoke",
];

/// Builds a named experiment preset.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let full_grid = vec![64, 128, 256, 512, 1024];
    let base = |name: &str| ExperimentConfig {
        name: name.to_string(),
        target: TargetSpec::Gaussian { mean: vec![0.0; 4] },
        generator: GeneratorSpec::Exact,
        noise: NoiseSpec::None,
        integrand: IntegrandSpec::SinMean,
        n_grid: full_grid.clone(),
        repetitions: 50,
        methods: Method::ALL.to_vec(),
        hyper: Hyper::default(),
        seed: 17,
        ground_truth_n: default_ground_truth_n(),
    };

    let lower = name.to_ascii_lowercase();
    if let Some(code) = lower.strip_prefix("illustration-") {
        let mut chars = code.chars();
        let (bias, noise) = (chars.next(), chars.next());
        if chars.next().is_some() {
            return Err(Error::Config(format!("unknown preset '{name}'")));
        }
        let mut config = base(&lower);
        config.generator = match bias {
            Some('a') => GeneratorSpec::Exact,
            Some('b') => GeneratorSpec::Shifted { mean: vec![0.5; 4] },
            Some('c') => GeneratorSpec::Shifted { mean: vec![1.0; 4] },
            _ => return Err(Error::Config(format!("unknown preset '{name}'"))),
        };
        config.noise = match noise {
            Some('1') => NoiseSpec::None,
            Some('2') => NoiseSpec::GaussianLinear {
                sigma: 0.1,
                coeffs: vec![1.0; 4],
            },
            Some('3') => NoiseSpec::Gaussian { sigma: 0.1 },
            _ => return Err(Error::Config(format!("unknown preset '{name}'"))),
        };
        return Ok(config);
    }

    match lower.as_str() {
        "mixture" => {
            let mut config = base("mixture");
            config.target = TargetSpec::GaussianMixture {
                weights: vec![0.7, 0.3],
                means: vec![2.0, 1.0],
                variances: vec![1.0, 1.0],
                d: 2,
            };
            config.generator = GeneratorSpec::Shifted { mean: vec![1.0; 2] };
            config.noise = NoiseSpec::Gaussian {
                sigma: CONJUGATE_NOISE_SIGMA,
            };
            Ok(config)
        }
        "student-t" => {
            let mut config = base("student-t");
            config.target = TargetSpec::StudentT {
                dof: 3.0,
                loc: 1.0,
                scale: 1.0,
                d: 2,
            };
            config.generator = GeneratorSpec::Shifted { mean: vec![1.0; 2] };
            config.noise = NoiseSpec::Gaussian {
                sigma: CONJUGATE_NOISE_SIGMA,
            };
            config.integrand = IntegrandSpec::CosMean;
            Ok(config)
        }
        "gamma-conjugate" => {
            let mut config = base("gamma-conjugate");
            // posterior for Gamma(4, x) likelihood, L=12 observations summing
            // to 8, under a Gamma(2, 2) prior
            config.target = TargetSpec::Gamma {
                shapes: vec![50.0],
                rates: vec![10.0],
            };
            config.generator = GeneratorSpec::ParallelMh {
                prior: TargetSpec::Gamma {
                    shapes: vec![2.0],
                    rates: vec![2.0],
                },
                iterations: 50,
                proposal_sd: None,
            };
            config.noise = NoiseSpec::Gaussian {
                sigma: CONJUGATE_NOISE_SIGMA,
            };
            Ok(config)
        }
        "beta-conjugate" => {
            let mut config = base("beta-conjugate");
            // posterior for Bernoulli(x) likelihood, L=11 trials with 2
            // successes, under a Beta(1, 1) prior
            config.target = TargetSpec::Beta {
                alphas: vec![3.0],
                betas: vec![10.0],
            };
            config.generator = GeneratorSpec::ParallelMh {
                prior: TargetSpec::Beta {
                    alphas: vec![1.0],
                    betas: vec![1.0],
                },
                iterations: 50,
                proposal_sd: None,
            };
            config.noise = NoiseSpec::Gaussian {
                sigma: CONJUGATE_NOISE_SIGMA,
            };
            config.integrand = IntegrandSpec::CosMean;
            Ok(config)
        }
        "mm1" => {
            let mut config = base("mm1");
            // service-rate posterior from 20 observed exponential service
            // times summing to 9.5, under a Gamma(1, 0.5) prior
            config.target = TargetSpec::Gamma {
                shapes: vec![21.0],
                rates: vec![10.0],
            };
            config.generator = GeneratorSpec::ParallelMh {
                prior: TargetSpec::Gamma {
                    shapes: vec![1.0],
                    rates: vec![0.5],
                },
                iterations: 50,
                proposal_sd: None,
            };
            config.integrand = IntegrandSpec::Mm1 {
                n_customers: 10,
                replications: 10,
            };
            config.n_grid = vec![32, 64, 128, 256];
            config.repetitions = 20;
            config.ground_truth_n = 20_000;
            Ok(config)
        }
        "network-a" | "network-b" | "network-c" => {
            let setting = lower.strip_prefix("network-").expect("matched").to_string();
            let mut config = base(&lower);
            config.target = TargetSpec::NetworkPosterior {
                setting: setting.clone(),
            };
            config.generator = GeneratorSpec::ParallelMh {
                prior: TargetSpec::Gamma {
                    shapes: vec![10.0; PAIRS],
                    rates: vec![0.1; PAIRS],
                },
                iterations: 50,
                proposal_sd: None,
            };
            config.integrand = IntegrandSpec::Network {
                n_messages: 30,
                replications: 100,
            };
            config.n_grid = vec![32, 64, 128];
            config.repetitions = 10;
            config.ground_truth_n = 2_000;
            Ok(config)
        }
        "smoke" => {
            let mut config = base("smoke");
            config.target = TargetSpec::Gaussian { mean: vec![0.0] };
            config.integrand = IntegrandSpec::SinMean;
            config.n_grid = vec![16, 32, 64];
            config.repetitions = 5;
            config.ground_truth_n = 50_000;
            Ok(config)
        }
        other => Err(Error::Config(format!("unknown preset '{other}'"))),
    }
}
