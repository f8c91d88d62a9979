//! Reference case study: a three-period time-of-use tariff, five customer
//! sectors, their elasticities and the coefficients derived from them.

use crate::scenario::{Tariff, TariffPeriod};

pub const PERIOD_LABELS: [&str; 3] = ["off-peak", "mid-peak", "peak"];

/// Rial/kW per period.
pub const PRICES: [f64; 3] = [260.0, 520.0, 1040.0];

/// `(start, end)` hours; the peak window closes at 23:00.
pub const HOURS: [(u8, u8); 3] = [(0, 8), (8, 17), (17, 23)];

pub const SECTORS: [&str; 5] = ["residential", "industrial", "agricultural", "public", "commercial"];

/// Own-price elasticity magnitudes per sector and period.
pub const ELASTICITIES: [[f64; 3]; 5] = [
    [1.21, 0.64, 1.01],
    [1.72, 4.5, 0.53],
    [0.87, 0.46, 0.56],
    [1.57, 2.87, 1.05],
    [1.1, 1.99, 1.6],
];

/// Share of total demand per sector.
pub const SHARES: [f64; 5] = [0.34, 0.31, 0.17, 0.09, 0.09];

/// Published risk-aversion coefficients (two decimals).
pub const COEFFICIENTS: [[f64; 3]; 5] = [
    [0.82, 1.56, 0.99],
    [0.58, 0.22, 1.89],
    [1.15, 2.17, 1.78],
    [0.64, 0.35, 0.95],
    [0.91, 0.5, 0.62],
];

/// Published multi-period income elasticities per sector.
pub const INCOME_ELASTICITIES: [[f64; 3]; 5] = [
    [1.3, 0.68, 1.08],
    [0.933, 2.4, 0.286],
    [1.50, 0.80, 0.97],
    [0.952, 1.74, 0.641],
    [0.684, 1.24, 0.957],
];

pub fn tariff() -> Tariff {
    let periods = PERIOD_LABELS
        .iter()
        .zip(HOURS)
        .zip(PRICES)
        .map(|((label, (start, end)), price)| TariffPeriod {
            label: label.to_string(),
            start,
            end,
            price,
        })
        .collect();
    Tariff::new(periods).expect("reference tariff is valid")
}
