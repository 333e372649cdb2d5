//! Replicability of cluster analyses within one study and across studies.
//!
//! The crate is organised bottom-up:
//!
//! * [`data`], [`partition`], [`function`], [`rng`]: datasets, partitions,
//!   clustering functions and seeded random streams.
//! * [`algos`]: k-means, mini-batch k-means, Ward agglomeration and DBSCAN.
//! * [`metrics`]: RI, MI, ARI, AMI, minimal matching distance, Jaccard.
//! * [`replicability`]: bootstrap estimates of the global, multi-study and
//!   local cross-study replicability indices.
//! * [`baselines`]: perturbation stability scores, prediction strength, IGP
//!   and a nearest-neighbour significance test.
//! * [`synthdata`]: Gaussian-mixture scenarios, CSV loading and splitting.
//!
//! Labels are zero-based throughout: a partition with `k` blocks uses `0..k`.

pub mod algos;
pub mod baselines;
pub mod data;
pub mod error;
pub mod exec;
pub mod function;
pub mod metrics;
pub mod partition;
pub mod replicability;
pub mod rng;
pub mod stats;
pub mod synthdata;

pub use algos::{fit, AlgoConfig};
pub use data::Dataset;
pub use error::{Error, Result};
pub use exec::Execution;
pub use function::{
    binary_partition, partition_of, predict, AlgorithmKind, BinaryCoClustering,
    ClusteringFunction, DistanceMetric,
};
pub use metrics::ScoreKind;
pub use partition::Partition;
pub use rng::{Role, SeededRng};
