//! Directed Cayley graphs on the plane over F_q and Z_m, generated by level
//! sets of bivariate polynomials, with exact spectra from character sums and
//! exhaustive checks of the mixing, decomposition and sum-product
//! inequalities built on them.
//!
//! Module map:
//! - [`algebra`]: ring arithmetic, traces, additive characters, tau/gamma/g.
//! - [`bipoly`]: bivariate polynomials, parsing, the Q(L) degeneracy test,
//!   linear factors, bad level values, root sets.
//! - [`cayley`]: Cayley digraphs, normality, spectra (direct and FFT).
//! - [`mixing`]: edge counts, the mixing inequality, the decomposition bound.
//! - [`charsums`]: Gauss, Kloosterman and root-set sums, quadratic forms,
//!   the Z_m spectral bound.
//! - [`experiments`]: set generators, sum/product/image/distance sets and
//!   the theorem-level inequality checks with delta calibration.
//!
//! Heavy loops go through an internal data-parallel layer backed by rayon
//! when the `parallel` feature (on by default) is enabled.

pub mod algebra;
pub mod bipoly;
pub mod cayley;
pub mod charsums;
pub mod config;
pub mod error;
pub mod experiments;
pub mod mixing;
mod par;

pub use algebra::{arith_functions, Elem, Point, RingCtx, RingKind};
pub use bipoly::{BiPoly, Degeneracy, LinearForm, UniPoly};
pub use cayley::{CayleyDigraph, Spectrum, SpectrumMethod};
pub use error::{Error, Result};
pub use par::is_parallel;
