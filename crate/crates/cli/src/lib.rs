//! Config-driven front end for the `fairband` search engine.

pub mod commands;
pub mod config;
pub mod pipeline;
