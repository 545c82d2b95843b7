//! Downlink transmit power setting for two-tier cellular networks with
//! carrier aggregation, modeled as a competitive game between teams of
//! base stations.
//!
//! A *team* is one macro base station plus the micro base stations inside
//! its cell, acting as a single player led by the macro. Each team picks a
//! discrete power fraction for every one of its stations (*locations*) on
//! every component carrier. Teams maximize a payoff combining a sigmoid
//! utility of per-tile SINR, a price on received power, and a price on the
//! fraction of users left below an SINR threshold.
//!
//! The crate is split into:
//! - [`scenario`]: deterministic world construction (hex layout, tiles,
//!   user distribution, attenuation tensor),
//! - [`game`]: interference, SINR, utility, cost and payoff math,
//! - [`solver`]: per-carrier best-reply dynamics and the descending
//!   frequency multi-carrier sequence,
//! - [`baselines`]: fixed-power and ABS-muting comparison strategies,
//! - [`oracle`]: brute-force ground truth for toy-sized instances,
//! - [`metrics`]: throughput mapping, CDFs and run reports,
//! - [`toy`]: small randomized instances used for verification.
//!
//! The library is `no_std` (with `alloc`); all IO lives in the companion
//! `capow` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod baselines;
pub mod game;
pub mod metrics;
pub mod oracle;
pub mod scenario;
pub mod solver;
pub mod toy;

pub use game::{GameParams, PowerLevelSet, Strategy, StrategyProfile, XiPrice};
pub use scenario::{BaseStation, BsKind, CarrierSpec, Scenario, ScenarioSpec, Team, Tile};
pub use solver::{GameTrace, SolverError};
