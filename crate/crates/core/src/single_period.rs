//! Non-shiftable (single-period) loads: demand and welfare as functions of
//! price, own-price elasticity and its inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::utility::{self, Family, PeriodCalibration, UtilityModel};
use crate::CLASS_BAND;

/// A utility model calibrated at `(d0, pi0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinglePeriodModel {
    pub model: UtilityModel,
    pub cal: PeriodCalibration,
}

impl SinglePeriodModel {
    pub fn new(model: UtilityModel, d0: f64, pi0: f64) -> Result<Self> {
        let cal = PeriodCalibration::new(&model, d0, pi0)?;
        Ok(Self { model, cal })
    }

    /// Price at and above which demand is zero.
    pub fn cutoff_price(&self) -> f64 {
        let a = self.model.a();
        match self.model.kind() {
            Family::Exponential => self.cal.pi0() * (a * self.cal.d0()).exp(),
            Family::Quadratic => self.cal.pi0() / (1.0 - a * self.cal.d0()),
        }
    }
}

fn check_price(pi: f64) -> Result<()> {
    if pi.is_finite() && pi > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositivePrice(pi))
    }
}

/// Welfare-maximizing demand at price `pi`; zero at and beyond the cutoff.
pub fn demand(sp: &SinglePeriodModel, pi: f64) -> Result<f64> {
    check_price(pi)?;
    if pi >= sp.cutoff_price() {
        return Ok(0.0);
    }
    let a = sp.model.a();
    let (d0, pi0) = (sp.cal.d0(), sp.cal.pi0());
    let d = match sp.model.kind() {
        Family::Exponential => d0 - (pi / pi0).ln() / a,
        Family::Quadratic => 1.0 / a - (pi / pi0) * (1.0 - a * d0) / a,
    };
    Ok(d.max(0.0))
}

/// `A U(d) - pi d`.
pub fn welfare(sp: &SinglePeriodModel, d: f64, pi: f64) -> Result<f64> {
    check_price(pi)?;
    Ok(sp.cal.coeff() * utility::eval_utility(&sp.model, d)? - pi * d)
}

/// Welfare at the optimal demand, written directly in terms of price.
pub fn welfare_of_price(sp: &SinglePeriodModel, pi: f64) -> Result<f64> {
    check_price(pi)?;
    let a = sp.model.a();
    let big_a = sp.cal.coeff();
    let below = pi < sp.cutoff_price();
    Ok(match sp.model.kind() {
        Family::Exponential if below => big_a + pi / a * ((pi / (a * big_a)).ln() - 1.0),
        Family::Exponential => 0.0,
        Family::Quadratic if below => pi * pi / (4.0 * a * a * big_a) - pi / a,
        Family::Quadratic => -big_a,
    })
}

/// Own-price elasticity at the anchor: `-1/(a d0)` (exponential),
/// `-(1 - a d0)/(a d0)` (quadratic). Both equal `-1/(d0 ARA(d0))`.
pub fn own_price_elasticity(sp: &SinglePeriodModel) -> f64 {
    let ad = sp.model.a() * sp.cal.d0();
    match sp.model.kind() {
        Family::Exponential => -1.0 / ad,
        Family::Quadratic => -(1.0 - ad) / ad,
    }
}

/// How an elasticity argument to [`risk_aversion_from_elasticity`] is signed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElasticityInput {
    /// Signed own-price elasticity, expected `< 0`.
    Signed(f64),
    /// Tabulated magnitude `|E|`; the negative sign is applied internally.
    Magnitude(f64),
}

/// Inverse of [`own_price_elasticity`]: the coefficient `a` that produces
/// elasticity `e` at initial demand `d0`.
pub fn risk_aversion_from_elasticity(kind: Family, e: ElasticityInput, d0: f64) -> Result<f64> {
    let e = match e {
        ElasticityInput::Signed(e) if e > 0.0 => return Err(Error::PositiveOwnPrice(e)),
        ElasticityInput::Signed(e) => e,
        ElasticityInput::Magnitude(m) => -m.abs(),
    };
    if !e.is_finite() {
        return Err(Error::NonFiniteElasticity(e));
    }
    if e == 0.0 {
        return Err(Error::ZeroElasticity);
    }
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(Error::InvalidModel(vec![utility::Violation::InitialDemand(d0)]));
    }
    Ok(match kind {
        Family::Exponential => -1.0 / (d0 * e),
        Family::Quadratic => -1.0 / (d0 * (e - 1.0)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElasticityClass {
    PerfectlyInelastic,
    Inelastic,
    UnitElastic,
    Elastic,
    PerfectlyElastic,
}

impl ElasticityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ElasticityClass::PerfectlyInelastic => "perfectly-inelastic",
            ElasticityClass::Inelastic => "inelastic",
            ElasticityClass::UnitElastic => "unit-elastic",
            ElasticityClass::Elastic => "elastic",
            ElasticityClass::PerfectlyElastic => "perfectly-elastic",
        }
    }
}

pub fn classify_own_price(e: f64) -> Result<ElasticityClass> {
    classify_own_price_with(e, CLASS_BAND)
}

/// Own-price classification with an explicit boundary band. `-inf` is the
/// perfectly-elastic sentinel.
pub fn classify_own_price_with(e: f64, band: f64) -> Result<ElasticityClass> {
    if e.is_nan() {
        return Err(Error::NonFiniteElasticity(e));
    }
    if e == f64::NEG_INFINITY {
        return Ok(ElasticityClass::PerfectlyElastic);
    }
    if e.abs() <= band {
        return Ok(ElasticityClass::PerfectlyInelastic);
    }
    if e > 0.0 {
        return Err(Error::PositiveOwnPrice(e));
    }
    Ok(if (e + 1.0).abs() <= band {
        ElasticityClass::UnitElastic
    } else if e > -1.0 {
        ElasticityClass::Inelastic
    } else {
        ElasticityClass::Elastic
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepQuantity {
    /// Demand versus price.
    Demand,
    /// Utility versus demand.
    Utility,
    /// Optimal welfare versus price.
    WelfareOfPrice,
}

impl SweepQuantity {
    pub fn axis_labels(&self) -> (&'static str, &'static str) {
        match self {
            SweepQuantity::Demand => ("price", "demand"),
            SweepQuantity::Utility => ("demand", "utility"),
            SweepQuantity::WelfareOfPrice => ("price", "welfare"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub quantity: SweepQuantity,
    pub points: Vec<(f64, f64)>,
}

/// Evaluates `quantity` at each grid point. Price grids must be positive;
/// demand grids (utility sweeps) may start at zero.
pub fn sweep(sp: &SinglePeriodModel, quantity: SweepQuantity, grid: &[f64]) -> Result<Series> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    let first = grid[0];
    let ok_start = match quantity {
        SweepQuantity::Utility => first >= 0.0,
        _ => first > 0.0,
    };
    if !ok_start || !grid[grid.len() - 1].is_finite() {
        return Err(Error::InvalidGrid(format!("grid starts at {first}")));
    }
    let points = grid
        .iter()
        .map(|&x| {
            let y = match quantity {
                SweepQuantity::Demand => demand(sp, x)?,
                SweepQuantity::Utility => sp.cal.coeff() * utility::eval_utility(&sp.model, x)?,
                SweepQuantity::WelfareOfPrice => welfare_of_price(sp, x)?,
            };
            Ok((x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Series { quantity, points })
}
