//! Monte Carlo reproduction of the block-transmission experiment
//! `y = H·G·d + v`. Everything here runs in `f64`.

pub mod channel;
pub mod config;
pub mod histogram;
pub mod output;
pub mod random;
pub mod rng;
pub mod run;

pub use channel::{gen_channel, gen_generator, ChannelSpec, GeneratorSpec};
pub use config::{HistogramSpec, SimConfig};
pub use histogram::{EstimateHistogram, SymbolHistogram};
pub use random::{llr_check, random_model, EstimatorPair, LlrCheckReport, LlrCheckSpec};
pub use run::{
    dry_run, histogram_estimates, noise_variance, propriety_ratio, run_trials, BankSet, Link, PointReport, RunReport,
    TrialReport, ESTIMATORS,
};
