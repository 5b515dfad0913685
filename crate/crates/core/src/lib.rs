//! Graph serialization, task solving, spectral ground truth and evaluation
//! metrics for probing language models on graph reasoning.

pub mod algo;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod serialize;
pub mod spectral;
pub mod tasks;
