//! Input parsing (load curve, tariff, portfolio) and report serialization.
//!
//! Formats:
//!
//! * load curve: delimited `hour,mw` rows, hours 0-23 each exactly once, an
//!   optional `hour,mw` header, `#` comments;
//! * tariff and portfolio: TOML documents (see the repository's
//!   `FORMATS.md`);
//! * reports: delimited text (6 significant digits) or JSON (17 significant
//!   digits).

mod curve;
mod portfolio;
mod report;
mod tariff;

pub use curve::{parse_load_curve, write_load_curve};
pub use portfolio::{parse_portfolio, CoefficientSource, PortfolioConfig, SectorConfig};
pub use report::{
    calibration_table, elasticity_table, format_significant, parse_structured, write_report, CalibrationRow,
    CalibrationTable, ElasticityTable, Format, Report, SectorElasticity,
};
pub use tariff::{parse_tariff, write_tariff};

use crate::error::Error;

/// Maps a TOML error to a line-numbered parse error.
pub(crate) fn toml_error(text: &str, err: toml::de::Error) -> Error {
    let line = err
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    Error::Parse {
        line,
        message: err.message().trim().to_string(),
    }
}
