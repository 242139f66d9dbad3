//! Numerical toolkit for the trade-off between local indistinguishability
//! and circuit complexity in approximate quantum error-correcting codes.
//!
//! The crate has three layers:
//!
//! 1. **Probabilistic bounds** ([`lll`]): symmetric and asymmetric local-lemma
//!    engines with exact brute-force cross-checks, plus verification of the
//!    lopsided dependency condition on explicit joint distributions.
//! 2. **Quantum kernels** ([`circuit`], [`aqec`], [`wstate`]): statevector
//!    simulation with light-cone tracking, subsystem-variance analysis of
//!    small codes, constructive distinguishing operators, and closed-form
//!    W-state results checked against the numerics.
//! 3. **Tensor networks** ([`mps`], [`lsm`]): transfer-matrix analysis of
//!    matrix-product states, clustering constants, ring truncations, and
//!    filling-constraint checks for translation-invariant states.
//!
//! Everything is deterministic: stochastic searches take explicit seeds and
//! the solvers in [`linalg`] use fixed shift schedules, so identical inputs
//! produce identical reports.

// Validation guards are written as negated comparisons (`!(x >= 1.0)`) so
// NaN parameters fail closed; the positive form would silently accept them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;

pub mod aqec;
pub mod circuit;
pub mod cli;
pub mod linalg;
pub mod lll;
pub mod lsm;
pub mod mps;
pub mod wstate;

pub use error::{Error, Result};

// Every fenced Rust block in the guide compiles and runs as a doc-test, so
// the book cannot drift from the API it documents.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(intro, "../../../book/src/intro.md");
    chapter!(lll, "../../../book/src/lll.md");
    chapter!(circuits, "../../../book/src/circuits.md");
    chapter!(codes, "../../../book/src/codes.md");
    chapter!(wstate, "../../../book/src/wstate.md");
    chapter!(mps, "../../../book/src/mps.md");
    chapter!(lsm, "../../../book/src/lsm.md");
    chapter!(cli, "../../../book/src/cli.md");
}
