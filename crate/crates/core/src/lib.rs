//! Discrete-event simulation of randomized work stealing with communication
//! latency on a divisible load, with an analytic makespan model, fitting and
//! root-finding helpers, and a parallel sweep harness.

pub mod cli;
pub mod engine;
pub mod error;
pub mod expio;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod trace;
pub mod workstealing;
