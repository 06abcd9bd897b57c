pub mod certify;
pub mod combinatorics;
pub mod counts;
pub mod distinguishability;
pub mod engine;
pub mod error;
pub mod group;
pub mod lattice;
pub mod networks;
pub mod oracle;
pub mod permanent;
pub mod scalar;
pub mod search;
pub mod studies;
pub mod unitaries;
pub mod witnesses;

pub use error::{Error, Result};

pub type Unitary64 = unitaries::Unitary<f64>;
pub type Unitary32 = unitaries::Unitary<f32>;
pub type GiVector64 = distinguishability::GiVector<f64>;
pub type GiVector32 = distinguishability::GiVector<f32>;
pub type GramMatrix64 = distinguishability::GramMatrix<f64>;
pub type GramMatrix32 = distinguishability::GramMatrix<f32>;
pub type PartitionMixture64 = distinguishability::PartitionMixture<f64>;
pub type PartitionMixture32 = distinguishability::PartitionMixture<f32>;
pub type InternalModel64 = distinguishability::InternalModel<f64>;
pub type InternalModel32 = distinguishability::InternalModel<f32>;
pub type ExperimentSpec64 = engine::ExperimentSpec<f64>;
pub type ExperimentSpec32 = engine::ExperimentSpec<f32>;
pub type OutputDistribution64 = engine::OutputDistribution<f64>;
pub type OutputDistribution32 = engine::OutputDistribution<f32>;
