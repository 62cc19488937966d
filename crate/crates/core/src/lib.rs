//! Exact characteristic-speed engine for the N-moment extended thermodynamics
//! model of ultrarelativistic gases.
//!
//! The characteristic system splits into independent blocks indexed by the
//! rank `p` of 2D trace-less unknowns. Each block is assembled from exact
//! rational coefficient tables ([`charsys`]), reduced to closure-independent
//! subsystems, and solved exactly ([`solver`]). Every claim is cross-checked
//! by an independent route: dense Minkowski tensor algebra for the projector
//! identities ([`tensor`]) and a direct 4D kinetic matrix pencil for the
//! speeds themselves ([`kinetic`]).

#![allow(clippy::needless_range_loop)]

pub mod charsys;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod kinetic;
pub mod linalg;
pub mod poly;
pub mod real;
pub mod report;
pub mod solver;
pub mod subluminal;
pub mod tensor;

pub use error::{Error, Result};
