//! Inputs shared by the benchmarks.

use riskload::case_study::{COEFFICIENTS, SECTORS, SHARES};
use riskload::scenario::{build_baseline, Coverage};
use riskload::{BaselineState, Family, LoadCurve, MultiPeriodProfile, SectorProfile, UtilityModel};

pub fn case_sectors() -> Vec<SectorProfile> {
    SECTORS
        .iter()
        .zip(SHARES)
        .zip(COEFFICIENTS)
        .map(|((name, share), c)| SectorProfile {
            name: name.to_string(),
            share,
            family: Family::Exponential,
            coefficients: c.to_vec(),
            budget: None,
        })
        .collect()
}

pub fn case_baseline() -> BaselineState {
    let hourly = (0..24)
        .map(|h| 30000.0 + 6000.0 * ((h as f64 - 5.0) * std::f64::consts::PI / 12.0).sin().powi(2))
        .collect();
    let curve = LoadCurve::new(hourly).expect("valid curve");
    build_baseline(
        &case_sectors(),
        &curve,
        &riskload::case_study::tariff(),
        Coverage::IgnoreUncovered,
    )
    .expect("valid baseline")
}

/// A `t`-period profile with coefficients cycling through `[0.5, 2)`.
pub fn synthetic_profile(family: Family, t: usize) -> MultiPeriodProfile {
    let parts: Vec<_> = (0..t)
        .map(|i| {
            let a = 0.5 + 1.5 * ((i * 7) % 11) as f64 / 11.0;
            let model = match family {
                Family::Exponential => UtilityModel::exponential(a),
                Family::Quadratic => UtilityModel::quadratic(a / 2.5),
            }
            .expect("positive coefficient");
            (model, 1.0, 100.0 * (1.0 + i as f64))
        })
        .collect();
    MultiPeriodProfile::from_parts(&parts).expect("valid profile")
}
