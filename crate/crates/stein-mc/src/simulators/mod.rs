//! Black-box aleatory simulators used as integrands.

pub mod mm1;
pub mod network;

pub use mm1::{mm1_mean_wait, Mm1Config};
pub use network::{network_mean_delay, network_posterior, NetworkConfig, TableSetting};
