//! Stein-kernelized Monte Carlo error reduction.
//!
//! This crate implements a family of weighted Monte Carlo estimators for
//! `theta = E_pi[f(X,Y)]` when the sampling distribution may be biased and the
//! simulation output carries aleatory noise:
//!
//! - naive Monte Carlo,
//! - control functionals (CF) and the simplified variant (SimCF), built on
//!   kernel ridge regression over a Stein-kernelized RKHS,
//! - capped black-box importance sampling (BBIS), built on a kernelized Stein
//!   discrepancy quadratic program over the capped simplex,
//! - the doubly robust combinations DRSK and DRSK-R.
//!
//! Supporting machinery includes scored target distributions, parallel
//! Metropolis-Hastings sample generators, two discrete-event simulators
//! (an M/M/1 queue and a four-node communication network), and a
//! configuration-driven experiment harness with CSV/JSON reporting.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod kernel;
pub mod krr;
pub mod mcmc;
pub mod scored;
pub mod seeds;
pub mod simplex;
pub mod simulators;

pub use error::{Error, Result};
pub use estimators::{Dataset, EstimatorResult, Hyper, Method};
pub use kernel::{GramPair, SteinKernel};
pub use krr::KrrModel;
pub use scored::{NoiseModel, ScoredTarget, Support};
pub use simplex::WeightVector;
