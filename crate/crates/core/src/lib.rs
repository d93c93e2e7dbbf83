//! Security estimates for pairing-friendly curves.
//!
//! The field side is estimated with a special extended tower number field
//! sieve (SexTNFS) cost model: Monte-Carlo norm sizes, Dickman smoothness
//! probabilities and an (A, B) parameter search. The curve side is the
//! Pollard rho cost on the order-r subgroup. On top of that the crate
//! provides curve-vs-field sweeps, minimum-characteristic search per
//! security level, and an operation-count model of pairing evaluation.

pub mod asymptotic;
pub mod config;
pub mod cost;
pub mod dickman;
pub mod error;
pub mod families;
pub mod intpoly;
pub mod modp;
pub mod norms;
pub mod pairing;
pub mod primes;
pub mod report;
pub mod security;
pub mod setup;

pub use error::{Error, Result};
pub use intpoly::{BiPoly, Integer, UniPoly};
