//! Synthesis and simulation toolkit for output synchronization of
//! heterogeneous linear multi-agent networks.
//!
//! Each agent tracks the output of a shared marginally-stable exosystem that
//! is synchronized across the network through a directed graph. Local
//! controllers are synthesized in one of three flavors:
//!
//! * exact synchronization (`exs`): regulator equations, zero stationary error;
//! * optimal stationary synchronization (`oss`): infinite-horizon LQ tracking
//!   with a stationary Hamiltonian–Sylvester solution;
//! * error-bounded optimal synchronization (`eboss`): an inverse design that
//!   searches for a tracking weight whose optimal controller respects
//!   per-output stationary error bounds, via LMI feasibility problems and a
//!   trust-region path-following loop around the bilinear constraint.
//!
//! The crate is `no_std`-compatible (`alloc` required, `libm` for float math
//! when `std` is disabled); all IO, file formats and the CLI live in the
//! companion crate `lqsync-cli`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod fp;

pub mod conic;
pub mod eboss;
pub mod exocore;
pub mod matkit;
pub mod model;
pub mod netgraph;
pub mod oss;
pub mod sim;
