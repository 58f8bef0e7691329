//! Trailer routing over scheduled tractor legs.
//!
//! A set of schedules (tractor tours made of timed legs between hubs) is
//! given, together with trailer requests that must travel from an origin
//! hub to a destination hub inside a time window. The solver picks one path
//! per request and the set of schedules to run so that schedule activation
//! cost plus trailer-mile cost is minimal.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the domain types, validators, metrics and JSON I/O.
//! * [`reduction`] computes, per request, the exact set of legs that lie on
//!   some time-feasible path (earliest-arrival / latest-start labelling).
//! * [`pricing`] solves the time-dependent shortest path pricing problem on
//!   dual-adjusted leg costs, with critical-leg pruning.
//! * [`simplex`] is a bounded-variable revised simplex used by the master.
//! * [`colgen`] assembles the restricted master, runs column generation
//!   (optionally stabilised), finishes with branch-and-bound on schedule
//!   variables, and supports real-time insertion of new requests.
//! * [`bounds`] evaluates the Lagrangian relaxation and ascends its dual.
//! * [`oracle`] is a brute-force exact solver for desk-scale instances.
//! * [`generator`], [`report`] and [`cli`] provide instance generation,
//!   plot-ready reports and the command-line front end.

pub mod bounds;
pub mod cli;
pub mod colgen;
mod error;
pub mod generator;
pub mod model;
pub mod oracle;
pub mod pricing;
pub mod reduction;
pub mod report;
pub mod samples;
pub mod simplex;

pub use error::{Error, Result};
pub use model::{
    add_dummy_schedules, compute_metrics, read_instance, read_solution, validate_instance, validate_path,
    validate_solution, write_instance, write_solution, DummyConfig, Hub, HubId, Instance, Leg, LegId, Metrics, Path,
    Request, RequestId, Schedule, ScheduleId, Solution,
};
