//! Yearly inter-country connection-strength modeling from geotagged event
//! records.
//!
//! The pipeline has four stages, each its own module:
//!
//! 1. [`event_ingest`] — stream-parse delimiter-separated event rows and
//!    keep the ones pairing a target country with a distinct partner.
//! 2. [`connection`] — aggregate records into yearly dyad frequencies,
//!    normalize them into connection strengths, rank partners, and build
//!    per-partner yearly series.
//! 3. [`arima`] — fit ARIMA(p,d,q) models to the series by conditional sum
//!    of squares, select orders by AICc, and forecast ahead.
//! 4. [`validation`] — hold out the final years, score forecasts with MAPE,
//!    and assemble a per-country report.
//!
//! [`numopt`] supplies the deterministic Nelder–Mead minimizer behind the
//! ARIMA estimation.

pub mod arima;
pub mod connection;
pub mod country;
pub mod event_ingest;
pub mod numopt;
pub mod validation;

pub use country::CountryCode;
