//! The Pólya-Aeppli (geometric compound Poisson) distribution.
//!
//! `X = Y_1 + ... + Y_N` with `N ~ Poisson(lambda)` and i.i.d. shifted
//! geometric `Y_i` on `{1, 2, ...}`, `P(Y = y) = p^(y-1) (1 - p)`.
//!
//! Mass and both distribution tails are computed by recurrences on their
//! logarithms, so values stay accurate far into either tail:
//!
//! ```
//! use polya_aeppli::{cdf, params_from_moments, Moments};
//!
//! let params = params_from_moments(Moments::new(4000.0, 4050.0)?)?;
//! let log_sf = cdf(&[7800.0], params, false, true)?.values[0];
//! assert!(log_sf.is_finite() && log_sf < -1000.0);
//! # Ok::<(), polya_aeppli::Error>(())
//! ```

pub mod check;
pub mod dist;
mod error;
pub mod kernel;
pub mod oracle;
pub mod sample;

pub use dist::{cdf, moments, params_from_moments, pmf, quantile, Evaluated, Moments, ProbQuery, Warning, WarningKind};
pub use error::{Error, Result};
pub use kernel::{DistParams, LogPmfTable, TailTables};
pub use sample::{sample, PolyaAeppli, SampleSpec};
