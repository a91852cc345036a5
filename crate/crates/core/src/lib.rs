//! Sense-annotation and word-sense-disambiguation workbench.
//!
//! Tokens are annotated by scoring *every* candidate sense of their lemma in
//! two sense inventories with one of six ordered categories
//! ([`model::ScoreCategory`]). On top of that data model the crate provides:
//!
//! - [`validation`]: automatic consistency flags, corpus statistics and
//!   lexicon coverage reports;
//! - [`iaa`]: Cohen's kappa, linear and quadratic weighted kappa, MAE and
//!   RMSE between annotator pairs;
//! - [`wsd`]: a three-phase disambiguation pipeline (candidate lookup,
//!   target-sense-verification scoring, gloss ranking) over a pluggable
//!   [`wsd::TsvScorer`];
//! - [`evaluation`]: Top-k accuracy sweeps over window sizes and inventories;
//! - [`service`]: the HTTP backend of the annotation tool, with an
//!   append-only, crash-safe annotation store.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod evaluation;
pub mod formats;
pub mod iaa;
pub mod model;
pub mod render;
pub mod service;
pub mod synthetic;
pub mod validation;
pub mod wsd;
