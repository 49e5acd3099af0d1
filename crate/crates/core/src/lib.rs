//! Numerics for loop groups and loop-space bundles at finite Fourier
//! truncation.
//!
//! The crate is organised bottom-up:
//!
//! - [`loops`]: truncated Laurent series and the basic circle operators.
//! - [`lie`]: spectral calculus in `U_n`, `SU_n`, `SO_n`.
//! - [`paths`]: paths of the form `exp(tξ)·γ(t)` with `γ` a polynomial loop,
//!   and local sections of their projection to the group.
//! - [`holonomy`]: parallel transport along a loop, its covariant
//!   derivative and the polynomial eigenbasis it defines.
//! - [`weights`]: circle-invariant inner products on distributions as
//!   weight sequences.
//! - [`fock`]: truncated fermionic Fock space and Clifford multiplication.
//! - [`dirac`]: the flat-model Dirac operator on polynomial sections.
//! - [`scenarios`]: random inputs shared by suites, examples and tests.
//! - [`verify`]: property suites with machine-readable reports.

pub mod dirac;
pub mod error;
pub mod fock;
pub mod holonomy;
pub mod io;
pub mod lie;
pub mod loops;
pub mod paths;
pub mod sample;
pub mod scenarios;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use loops::{CMatrix, FourierLoop, TruncationConfig, C64};
