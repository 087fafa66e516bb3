//! Numerical laboratory for continuous-variable Bell-type inequalities.
//!
//! The crate evaluates the wave-like correlation
//! `(⟨X₁X₂⟩+⟨Y₁Y₂⟩)² + (⟨X₁Y₂⟩−⟨Y₁X₂⟩)²` against intensity-based bounds on
//! truncated Fock-space states, and contrasts the quantum violation with
//! local-hidden-variable ensembles with and without the local constraint
//! `X² + Y² = N`.
//!
//! - [`fock`]: modes, operators, states, loss channel, partial-transpose witness
//! - [`inequality`]: correlators, left- and right-hand sides, violation reports
//! - [`lhv`]: local-hidden-variable ensembles, sampling, adversarial search
//! - [`scenario`]: configuration, sweeps and report files behind the `cvbell` CLI

pub mod error;
pub mod fock;
pub mod inequality;
pub mod lhv;
pub mod scenario;

pub use error::{Error, Result};
