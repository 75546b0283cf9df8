//! Experiment driver for the autodrive benchmark.
//!
//! Generates tracks, runs seeded Q-learning and NEAT experiments, writes CSV
//! metrics, renders SVG charts and compares the two learners.

pub mod cli;
pub mod compare;
pub mod config;
pub mod experiment;
pub mod maps;
pub mod plot;
pub mod records;
