//! Sector portfolios bound to a daily load curve and a time-of-use tariff,
//! and the price/income shocks applied to them.
//!
//! Sector coefficients are per-unit (`d0 = 1`). A sector's physical baseline
//! in period `p` is `share * sum(hourly MW over p)`, and its coefficient is
//! rescaled to `a_pu / D0_phys` so that `a * d0`, and with it every
//! elasticity, is unchanged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_period::{solve_allocation_numeric, MultiPeriodProfile, PeriodModel};
use crate::utility::{self, Family, UtilityModel};

/// Tolerance on the sum of sector shares.
pub const SHARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffPeriod {
    pub label: String,
    /// First hour of the window.
    pub start: u8,
    /// Hour at which the window closes (exclusive).
    pub end: u8,
    pub price: f64,
}

impl TariffPeriod {
    pub fn hours(&self) -> std::ops::Range<usize> {
        self.start as usize..self.end as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tariff {
    periods: Vec<TariffPeriod>,
}

impl Tariff {
    pub fn new(periods: Vec<TariffPeriod>) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::Config("tariff has no periods".into()));
        }
        let mut owner: [Option<usize>; 24] = [None; 24];
        for (i, p) in periods.iter().enumerate() {
            if p.label.trim().is_empty() {
                return Err(Error::Config(format!("tariff period {} has an empty label", i + 1)));
            }
            if periods[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::Config(format!("duplicate tariff period `{}`", p.label)));
            }
            if !(p.start < p.end && p.end <= 24) {
                return Err(Error::Config(format!(
                    "tariff period `{}` has invalid hours {}..{}",
                    p.label, p.start, p.end
                )));
            }
            if !(p.price.is_finite() && p.price > 0.0) {
                return Err(Error::Config(format!(
                    "tariff period `{}` has non-positive price {}",
                    p.label, p.price
                )));
            }
            for h in p.hours() {
                if let Some(j) = owner[h] {
                    return Err(Error::Config(format!(
                        "tariff periods `{}` and `{}` overlap at hour {h}",
                        periods[j].label, p.label
                    )));
                }
                owner[h] = Some(i);
            }
        }
        Ok(Self { periods })
    }

    pub fn periods(&self) -> &[TariffPeriod] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.periods.iter().map(|p| p.label.clone()).collect()
    }

    pub fn prices(&self) -> Vec<f64> {
        self.periods.iter().map(|p| p.price).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.periods.iter().position(|p| p.label == label)
    }

    pub fn period_of_hour(&self, hour: usize) -> Option<usize> {
        self.periods.iter().position(|p| p.hours().contains(&hour))
    }

    pub fn uncovered_hours(&self) -> Vec<usize> {
        (0..24).filter(|&h| self.period_of_hour(h).is_none()).collect()
    }
}

/// Hourly system demand in MW for one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadCurve {
    hourly: Vec<f64>,
}

impl LoadCurve {
    pub fn new(hourly: Vec<f64>) -> Result<Self> {
        if hourly.len() != 24 {
            return Err(Error::Config(format!(
                "load curve needs 24 hourly values, got {}",
                hourly.len()
            )));
        }
        if let Some(h) = hourly.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(format!(
                "load curve hour {h} has invalid demand {}",
                hourly[h]
            )));
        }
        Ok(Self { hourly })
    }

    pub fn uniform(mw: f64) -> Result<Self> {
        Self::new(vec![mw; 24])
    }

    pub fn hourly(&self) -> &[f64] {
        &self.hourly
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.hourly.iter().map(|v| v * k).collect())
    }

    /// MWh in the period's window.
    pub fn energy(&self, period: &TariffPeriod) -> f64 {
        self.hourly[period.hours()].iter().sum()
    }
}

/// A customer sector with per-unit coefficients, one per tariff period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorProfile {
    pub name: String,
    /// Fraction of total demand.
    pub share: f64,
    pub family: Family,
    pub coefficients: Vec<f64>,
    /// Explicit per-unit budget; `None` uses the initial spend. In physical
    /// units its ratio to the initial spend is preserved.
    pub budget: Option<f64>,
}

impl SectorProfile {
    /// Per-unit multi-period profile (`d0 = 1`) at the tariff's prices.
    pub fn per_unit_profile(&self, tariff: &Tariff) -> Result<MultiPeriodProfile> {
        let demands = vec![1.0; tariff.len()];
        self.profile_for(tariff, &demands)
    }

    fn profile_for(&self, tariff: &Tariff, demands: &[f64]) -> Result<MultiPeriodProfile> {
        if self.coefficients.len() != tariff.len() {
            return Err(Error::Config(format!(
                "sector `{}` has {} coefficients for {} tariff periods",
                self.name,
                self.coefficients.len(),
                tariff.len()
            )));
        }
        let periods = self
            .coefficients
            .iter()
            .zip(tariff.periods())
            .zip(demands)
            .map(|((&a_pu, tp), &d0)| {
                let model = UtilityModel::new(self.family, a_pu / d0)?;
                PeriodModel::new(model, d0, tp.price)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Config(format!("sector `{}`: {e}", self.name)))?;
        let profile = MultiPeriodProfile::new(periods)?;
        match self.budget {
            None => Ok(profile),
            Some(b) => {
                let per_unit_spend: f64 = tariff.prices().iter().sum();
                let budget = b / per_unit_spend * profile.default_budget();
                profile.with_budget(budget)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coverage {
    /// Load in hours outside every tariff window is an error.
    #[default]
    Strict,
    /// Hours outside every tariff window are dropped.
    IgnoreUncovered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorBaseline {
    pub name: String,
    pub share: f64,
    /// Profile in physical units (MWh per period, currency per day).
    pub profile: MultiPeriodProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineState {
    pub labels: Vec<String>,
    pub prices: Vec<f64>,
    pub sectors: Vec<SectorBaseline>,
}

pub fn build_baseline(
    portfolio: &[SectorProfile],
    curve: &LoadCurve,
    tariff: &Tariff,
    coverage: Coverage,
) -> Result<BaselineState> {
    if portfolio.is_empty() {
        return Err(Error::Config("portfolio has no sectors".into()));
    }
    if let Some(s) = portfolio.iter().find(|s| !(0.0..=1.0).contains(&s.share)) {
        return Err(Error::Config(format!(
            "sector `{}` has share {} outside [0, 1]",
            s.name, s.share
        )));
    }
    let total: f64 = portfolio.iter().map(|s| s.share).sum();
    if (total - 1.0).abs() > SHARE_TOLERANCE {
        return Err(Error::Config(format!("sector shares sum to {total}, expected 1")));
    }
    if coverage == Coverage::Strict {
        let loaded: Vec<String> = tariff
            .uncovered_hours()
            .into_iter()
            .filter(|&h| curve.hourly()[h] > 0.0)
            .map(|h| h.to_string())
            .collect();
        if !loaded.is_empty() {
            return Err(Error::Config(format!(
                "hour(s) {} carry load but no tariff period covers them",
                loaded.join(", ")
            )));
        }
    }

    let energy: Vec<f64> = tariff.periods().iter().map(|p| curve.energy(p)).collect();
    let sectors = portfolio
        .iter()
        .map(|s| {
            let demands: Vec<f64> = energy.iter().map(|e| s.share * e).collect();
            if let Some(i) = demands.iter().position(|d| *d <= 0.0) {
                return Err(Error::Config(format!(
                    "sector `{}` has zero demand in period `{}`",
                    s.name,
                    tariff.periods()[i].label
                )));
            }
            Ok(SectorBaseline {
                name: s.name.clone(),
                share: s.share,
                profile: s.profile_for(tariff, &demands)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaselineState {
        labels: tariff.labels(),
        prices: tariff.prices(),
        sectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub price_multipliers: Vec<f64>,
    pub income_multiplier: f64,
}

impl Scenario {
    pub fn new(price_multipliers: Vec<f64>, income_multiplier: f64) -> Result<Self> {
        let bad = price_multipliers
            .iter()
            .chain(std::iter::once(&income_multiplier))
            .find(|m| !(m.is_finite() && **m > 0.0));
        if let Some(m) = bad {
            return Err(Error::Config(format!("scenario multiplier {m} must be positive")));
        }
        Ok(Self {
            price_multipliers,
            income_multiplier,
        })
    }

    pub fn uniform(periods: usize, price: f64, income: f64) -> Result<Self> {
        Self::new(vec![price; periods], income)
    }

    pub fn identity(periods: usize) -> Self {
        Self {
            price_multipliers: vec![1.0; periods],
            income_multiplier: 1.0,
        }
    }
}

/// Demand (MWh/day), calibrated utility, budget spent and welfare
/// (`utility - budget`), all per day.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregate {
    pub demand: f64,
    pub utility: f64,
    pub budget: f64,
    pub welfare: f64,
}

impl std::ops::Add for Aggregate {
    type Output = Aggregate;

    fn add(self, o: Aggregate) -> Aggregate {
        Aggregate {
            demand: self.demand + o.demand,
            utility: self.utility + o.utility,
            budget: self.budget + o.budget,
            welfare: self.welfare + o.welfare,
        }
    }
}

impl std::iter::Sum for Aggregate {
    fn sum<I: Iterator<Item = Aggregate>>(iter: I) -> Aggregate {
        iter.fold(Aggregate::default(), |a, b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SectorStatus {
    Solved { lambda: f64 },
    Failed { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorOutcome {
    pub name: String,
    pub status: SectorStatus,
    /// Empty when the sector failed.
    pub periods: Vec<Aggregate>,
    pub total: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub labels: Vec<String>,
    pub sectors: Vec<SectorOutcome>,
    /// Per-period sums over solved sectors.
    pub period_totals: Vec<Aggregate>,
    pub total: Aggregate,
}

impl ScenarioReport {
    pub fn failures(&self) -> Vec<(&str, &str)> {
        self.sectors
            .iter()
            .filter_map(|s| match &s.status {
                SectorStatus::Failed { message } => Some((s.name.as_str(), message.as_str())),
                SectorStatus::Solved { .. } => None,
            })
            .collect()
    }

    pub fn sector(&self, name: &str) -> Option<&SectorOutcome> {
        self.sectors.iter().find(|s| s.name == name)
    }
}

fn evaluate_sector(sector: &SectorBaseline, scenario: &Scenario) -> Result<(f64, Vec<Aggregate>)> {
    let profile = &sector.profile;
    let prices: Vec<f64> = profile
        .initial_prices()
        .iter()
        .zip(&scenario.price_multipliers)
        .map(|(p, m)| p * m)
        .collect();
    let shocked = profile
        .clone()
        .with_budget(profile.budget() * scenario.income_multiplier)?;
    let alloc = solve_allocation_numeric(&shocked, &prices)?;
    let periods = profile
        .periods()
        .iter()
        .zip(&alloc.demands)
        .zip(&prices)
        .map(|((p, &d), &pi)| {
            let utility = p.cal.coeff() * utility::eval_utility(&p.model, d)?;
            let budget = pi * d;
            Ok(Aggregate {
                demand: d,
                utility,
                budget,
                welfare: utility - budget,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((alloc.lambda, periods))
}

/// Re-solves every sector with shocked prices and budget. Sector failures
/// (such as an infeasible budget) are recorded in the report; only a
/// scenario that does not fit the baseline is an error.
pub fn apply_scenario(baseline: &BaselineState, scenario: &Scenario) -> Result<ScenarioReport> {
    let t = baseline.labels.len();
    if scenario.price_multipliers.len() != t {
        return Err(Error::Config(format!(
            "scenario has {} price multipliers for {t} periods",
            scenario.price_multipliers.len()
        )));
    }
    let sectors: Vec<SectorOutcome> = baseline
        .sectors
        .par_iter()
        .map(|s| match evaluate_sector(s, scenario) {
            Ok((lambda, periods)) => SectorOutcome {
                name: s.name.clone(),
                status: SectorStatus::Solved { lambda },
                total: periods.iter().copied().sum(),
                periods,
            },
            Err(e) => SectorOutcome {
                name: s.name.clone(),
                status: SectorStatus::Failed { message: e.to_string() },
                periods: Vec::new(),
                total: Aggregate::default(),
            },
        })
        .collect();
    let period_totals: Vec<Aggregate> = (0..t)
        .map(|i| sectors.iter().filter_map(|s| s.periods.get(i).copied()).sum())
        .collect();
    let total = sectors.iter().map(|s| s.total).sum();
    Ok(ScenarioReport {
        scenario: scenario.clone(),
        labels: baseline.labels.clone(),
        sectors,
        period_totals,
        total,
    })
}

/// Shocks the price of one period only.
pub fn per_period_shock(baseline: &BaselineState, period: usize, multiplier: f64) -> Result<ScenarioReport> {
    let t = baseline.labels.len();
    if period >= t {
        return Err(Error::PeriodIndex { index: period, len: t });
    }
    let mut prices = vec![1.0; t];
    prices[period] = multiplier;
    apply_scenario(baseline, &Scenario::new(prices, 1.0)?)
}

/// A shocked report next to the unshocked baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioComparison {
    pub baseline: ScenarioReport,
    pub shocked: ScenarioReport,
}

pub fn compare(baseline: &BaselineState, scenario: &Scenario) -> Result<ScenarioComparison> {
    Ok(ScenarioComparison {
        baseline: apply_scenario(baseline, &Scenario::identity(baseline.labels.len()))?,
        shocked: apply_scenario(baseline, scenario)?,
    })
}
