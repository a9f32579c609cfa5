//! Nearly optimal codebooks from generalized Jacobi sums.
//!
//! The crate is layered bottom-up:
//!
//! - [`field`]: deterministic GF(p^n) with exp/log tables, traces and
//!   subfield embeddings.
//! - [`characters`]: additive and multiplicative characters evaluated by
//!   table lookup, with multiplicative characters extended to zero.
//! - [`sums`]: Gauss sums, Jacobi sums, the generalized sums over trace
//!   defining sets, their closed-form magnitudes and an exhaustive checker.
//! - [`codebook`]: the two codebook constructions, exhaustive maximum
//!   cross-correlation, Welch and Levenshtein bounds.
//! - [`cli`]: the `codebook` command-line front end.
//!
//! ```
//! use jacobi_codebook::codebook::{build_codebook, classify, compute_imax, ScanOptions};
//! use jacobi_codebook::sums::{Tower, Variant};
//!
//! let tower = Tower::new(2, 2, &[1, 2])?;
//! let cb = build_codebook(&tower, Variant::Hat, tower.base().generator())?;
//! let imax = compute_imax(&cb, &ScanOptions::default())?;
//! let report = classify(&tower.shape(), Variant::Hat, Some(imax.value))?;
//! assert_eq!((report.n, report.k), (61, 16));
//! assert!((imax.value - 16.0 / 44.0).abs() < 1e-12);
//! # Ok::<(), jacobi_codebook::Error>(())
//! ```

pub mod characters;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod field;
pub mod sums;

pub use error::{Error, Result};
