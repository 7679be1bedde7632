//! Compound geometric approximation of nonnegative integer-valued random
//! variables, with certified total-variation error bounds derived from
//! failure-rate information.
//!
//! The library is organised around a single currency type, [`DiscretePmf`]:
//! a truncated probability mass function on `{0, 1, 2, ...}` that carries
//! its unassigned tail mass explicitly. Metrics between truncated pmfs are
//! interval-valued, so every comparison made downstream stays certified
//! rather than approximate.
//!
//! Modules:
//! - [`pmf`] — construction and arithmetic of pmfs (geometric, compound
//!   geometric, Pólya, mixed Poisson).
//! - [`reliability`] — failure rates, IFR/DFR classification, stochastic
//!   and hazard-rate order predicates, TP₂ checks.
//! - [`metrics`] — total variation, Kolmogorov and Wasserstein distances
//!   as intervals.
//! - [`bounds`] — the closed-form approximation bounds and their validity
//!   diagnostics.
//! - [`queueing`] — M/G/1 equilibrium and busy-period analytics.
//! - [`markov`] — hitting times, quasi-stationary distributions and
//!   birth-death (Karlin–McGregor) quantities.
//! - [`stein`] — numerical solution of the Stein equation and the
//!   solver-smoothness lemma.
//! - [`montecarlo`] — seeded simulation oracles.
//! - [`tables`] — reference-table generation used by the CLI.
//! - [`verify`] — the property suites behind `geombound verify`.

pub mod bounds;
mod error;
pub mod markov;
pub mod metrics;
pub mod montecarlo;
pub mod pmf;
pub(crate) mod par;
pub mod queueing;
pub mod reliability;
pub mod stein;
pub mod tables;
pub mod verify;

pub use error::Error;
pub use pmf::{CompoundGeometricSpec, DiscretePmf};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Maximum pmf length used when extending truncations automatically.
///
/// Overridable through the `GEOMBOUND_TRUNCATION_CAP` environment variable.
pub fn truncation_cap() -> usize {
    std::env::var("GEOMBOUND_TRUNCATION_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1_000_000)
}
