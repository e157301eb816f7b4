//! Inner-product leakage-resilient storage over prime fields.
//!
//! A secret `s` in `F_p` is stored as two share vectors `L, R` with nonzero
//! coordinates and `<L, R> = s`. [`refresh`] replaces them with a fresh pair
//! of the same secret by a two-party protocol with `O(n)` field operations,
//! helped by a trusted sampler of orthogonal vectors ([`oracle`]).
//! [`reconstruct`] recreates both protocol views from the old and new shares
//! without interaction, and [`experiments`] checks that this recreation has
//! the same distribution as a real run. [`leakage`] implements the bounded
//! leakage game on the stored shares.

pub mod channel;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod field;
pub mod leakage;
pub mod oracle;
pub mod reconstruct;
pub mod refresh;
pub mod rng;

pub use error::{Error, Result};
