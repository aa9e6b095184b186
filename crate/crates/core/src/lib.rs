//! Deterministic household load scheduling against time-of-use tariffs.
//!
//! The crate models a day of 24 hourly slots. Appliances are fixed,
//! uninterruptible, or interruptible; a scenario binds them to a baseline
//! schedule and precedence constraints. Optimizers rearrange the flexible
//! appliances to cut the bill, an attack engine forges the price signal,
//! and the experiment harness scores how well a schedule survives forged
//! prices via a resilience index.
//!
//! All arithmetic on money is exact integer arithmetic, and every seeded
//! algorithm draws from one pinned generator, so identical inputs produce
//! byte-identical outputs on every platform.

pub mod attack;
pub mod builtin;
pub mod commands;
pub mod config;
pub mod files;
pub mod harness;
pub mod model;
pub mod money;
pub mod optim;
pub mod report;
pub mod rng;
