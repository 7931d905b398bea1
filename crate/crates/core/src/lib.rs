//! Exact q-series toolkit for septic theta functions.
//!
//! The crate builds the septic, quintic and cubic theta functions, eta
//! quotients, Lambert series and Eisenstein series as truncated
//! Laurent–Puiseux series with exact rational or cyclotomic coefficients, and
//! checks the identities and differential systems relating them by exact
//! vanishing of residual series.

pub mod checks;
pub mod constants;
pub mod constructors;
pub mod report;
pub mod ring;
pub mod series;

pub use ring::{CycElement, CycField, Rational, RingElement, RingError, TrigKind};
pub use series::{QSeries, Ring, SeriesError, ZeroTest};
