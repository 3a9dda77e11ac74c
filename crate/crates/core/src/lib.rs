//! Exact computation in finitely presented groups defined by commutator
//! relators.
//!
//! Provides:
//! - [`words`]: free-group word arithmetic and the word grammar
//! - [`basic`]: Hall basic sequences and Witt rank counts
//! - [`magnus`]: the power-series embedding, word weights, Lyndon-basis
//!   leading Lie elements, and the primitivity check
//! - [`nq`]: nilpotent quotients as consistent weighted polycyclic
//!   presentations, with collection-based normal forms
//! - [`lcs`]: lower-central factor structures, element orders, identity
//!   verification and torsion probes
//! - [`hydra`]: free-by-cyclic normal forms for the groups `G(k,a,t)`
//! - [`fixtures`]: named presentations and identity scripts shipped with
//!   the crate

pub mod basic;
pub mod error;
pub mod fixtures;
pub mod hydra;
pub mod lcs;
pub mod magnus;
pub mod matrix;
pub mod nq;
pub mod words;

pub use error::{Error, Result};
