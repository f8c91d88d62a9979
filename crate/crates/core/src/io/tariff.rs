use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::toml_error;
use crate::scenario::{Tariff, TariffPeriod};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TariffDoc {
    #[serde(default)]
    currency: Option<String>,
    period: Vec<PeriodDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodDoc {
    label: String,
    start: u8,
    end: u8,
    price: f64,
}

/// Parses a TOML tariff made of `[[period]]` tables with `label`, `start`,
/// `end` and `price`.
pub fn parse_tariff(text: &str) -> Result<Tariff> {
    let doc: TariffDoc = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    Tariff::new(
        doc.period
            .into_iter()
            .map(|p| TariffPeriod {
                label: p.label,
                start: p.start,
                end: p.end,
                price: p.price,
            })
            .collect(),
    )
}

pub fn write_tariff(tariff: &Tariff) -> String {
    let doc = TariffDoc {
        currency: None,
        period: tariff
            .periods()
            .iter()
            .map(|p| PeriodDoc {
                label: p.label.clone(),
                start: p.start,
                end: p.end,
                price: p.price,
            })
            .collect(),
    };
    toml::to_string(&doc).expect("tariff serializes")
}
