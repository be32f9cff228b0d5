//! Library half of the `quasikit` command-line driver.
//!
//! The binary stays thin: it parses arguments and delegates to these
//! modules, which load and validate experiment configs, execute the
//! commands against `quasikit-core`, and serialize reports whose result
//! payloads depend only on the configuration.

pub mod config;
pub mod report;
pub mod run;
