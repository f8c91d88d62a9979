//! Electricity demand models driven by customers' risk-aversion coefficients.
//!
//! The crate calibrates exponential and quadratic utility functions to an
//! observed operating point (demand, price), derives single-period demand and
//! welfare curves, allocates a fixed budget across tariff periods, and
//! computes the resulting own-price, cross-price and income elasticities.
//! [`scenario`] binds sector portfolios to a load curve and a time-of-use
//! tariff and evaluates price/income shocks.
//!
//! ```
//! use riskload::{single_period, UtilityModel};
//!
//! let model = UtilityModel::exponential(0.82).unwrap();
//! let sp = single_period::SinglePeriodModel::new(model, 1.0, 260.0).unwrap();
//! let e = single_period::own_price_elasticity(&sp);
//! assert!((e + 1.0 / 0.82).abs() < 1e-12);
//! ```

pub mod case_study;
pub mod error;
pub mod io;
pub mod multi_period;
pub mod scenario;
pub mod single_period;
pub mod utility;

pub use error::{Error, Result};
pub use multi_period::{Allocation, ElasticityReport, MultiPeriodProfile, PeriodModel};
pub use scenario::{BaselineState, LoadCurve, Scenario, ScenarioReport, SectorProfile, Tariff};
pub use single_period::{ElasticityClass, SinglePeriodModel};
pub use utility::{Family, PeriodCalibration, UtilityModel};

/// Half-width of the band used when classifying elasticities at their
/// boundaries (0, -1, 1).
pub const CLASS_BAND: f64 = 1e-9;
