pub mod dataset;
pub mod consensus;
pub mod detectors;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod pipeline;
pub mod standalone;
pub mod rank;
pub mod strategy;
pub mod synthetic;

pub use dataset::DatasetBundle;
pub use error::{Error, Result};
pub use matrix::{Matrix, ScoreMatrix};
pub use rank::{to_rank_vector, RankVector, Similarity};
