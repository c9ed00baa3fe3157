//! Monte Carlo laboratory for fast times of Brownian motion with variable
//! drift.
//!
//! Paths live on the dyadic grid of `[0, 2]`. Detectors flag dyadic
//! subintervals of `[0, 1]`; counts of flagged intervals across levels give
//! box-counting estimates of the dimension of fast-time sets, which
//! [`scaling`] compares against closed-form dimension formulas.
//!
//! ```
//! use fastpoints::{detector, path};
//!
//! let b = path::sample_bm(7, 12).unwrap();
//! let flags = detector::l_flags(&b, 10, 0.5, 0.0).unwrap();
//! assert!(detector::count(&flags) <= 1 << 10);
//! ```

pub mod detector;
pub mod drift;
pub mod ensemble;
pub mod error;
pub mod fbm;
pub mod gaussian;
pub mod harness;
pub mod limsup;
pub mod measure;
pub mod path;
pub mod rng;
pub mod scaling;
pub mod textio;

pub use error::{Error, Result};
