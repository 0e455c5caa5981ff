//! Monte Carlo laboratory for interlacing geometric line ensembles.
//!
//! The crate is organized around five subsystems:
//!
//! - [`lattice`]: exact combinatorics of increasing integer paths and
//!   partitions — validation, path counting, interlacing predicates, and
//!   exact uniform bridge sampling.
//! - [`gibbs`]: the interlacing configuration space with its maximal
//!   element, single-site Glauber dynamics whose invariant law is uniform,
//!   monotone coupled chains, and exact small-instance oracles
//!   (enumeration, rational transition matrices).
//! - [`brownian`]: continuum reference laws — Brownian bridges of
//!   prescribed variance, rejection-sampled avoiding Brownian line
//!   ensembles, corridor functions, and the modulus of continuity.
//! - [`schur`]: ascending Schur processes — exact weights, Schur
//!   polynomial evaluation, an RSK-based sampler, spiked parameter
//!   schedules, and the embedding into geometric line ensembles.
//! - [`stats`]: diffusive scaling transforms and empirical estimators for
//!   the measurable events the theory quantifies, plus KS/chi-square/TV
//!   distances.
//!
//! [`verify`] packages the acceptance checks that gate the whole artifact;
//! they are also exposed through the CLI.
//!
//! All samplers take an explicit seeded stream (see [`rng`]) so that
//! replicas on different threads use disjoint, reproducible streams.

pub mod brownian;
mod error;
pub mod gibbs;
pub mod lattice;
pub mod rng;
pub mod schur;
pub mod stats;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
