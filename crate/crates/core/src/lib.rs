//! Fairness-aware bandit hyperparameter search.
//!
//! [`engine`] runs Hyperband-style brackets that rank configurations by a
//! weighted sum of an accuracy metric and a group-fairness metric, with the
//! weight optionally adapted per rung. [`analysis`] turns finished runs into
//! Pareto frontiers and comparison tables.

pub mod analysis;
pub mod data;
pub mod engine;
pub mod learners;
pub mod metrics;
pub mod space;
