//! Budget-constrained allocation of demand across tariff periods and the
//! elasticities it implies.
//!
//! Each period `I` carries its own calibrated utility `A_I U_I(D_I)`. The
//! customer maximizes `sum_I A_I U_I(D_I) - pi_I D_I` subject to
//! `sum_I pi_I D_I = B`. The first-order conditions are
//! `A_I U_I'(D_I) = lambda * pi_I`, so every demand is a function of the
//! single multiplier `lambda`, which [`solve_allocation_numeric`] finds by
//! bisection on the budget residual. Homogeneous profiles also have closed
//! forms ([`solve_allocation_closed`]).
//!
//! Elasticities are evaluated at the operating point reached with the
//! initial prices. Writing `r_I = 1/ARA_I(D_I)` and `R = sum_J pi_J r_J`,
//! the implicit-function theorem on the KKT system gives
//!
//! ```text
//! dD_I/dB     = r_I / R
//! dD_I/dpi_K  = r_I (r_K - D_K) / R - [I == K] r_I / pi_I
//! ```
//!
//! which is family-agnostic and reduces to the familiar exponential forms
//! when `r_I = 1/a_I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::single_period::{classify_own_price_with, ElasticityClass};
use crate::utility::{self, Family, PeriodCalibration, UtilityModel};
use crate::CLASS_BAND;

/// One period of a profile: a utility model with its calibration anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodModel {
    pub model: UtilityModel,
    pub cal: PeriodCalibration,
}

impl PeriodModel {
    pub fn new(model: UtilityModel, d0: f64, pi0: f64) -> Result<Self> {
        Ok(Self {
            model,
            cal: PeriodCalibration::new(&model, d0, pi0)?,
        })
    }

    /// Multiplier at which this period's demand reaches zero for `price`.
    fn lambda_at_zero(&self, price: f64) -> f64 {
        let mu0 = utility::marginal_utility(&self.model, 0.0).expect("zero is in every domain");
        self.cal.coeff() * mu0 / price
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPeriodProfile {
    periods: Vec<PeriodModel>,
    /// `None` means the initial spend `sum pi0 d0`.
    budget: Option<f64>,
}

impl MultiPeriodProfile {
    pub fn new(periods: Vec<PeriodModel>) -> Result<Self> {
        if periods.len() < 2 {
            return Err(Error::Config(format!(
                "a multi-period profile needs at least 2 periods, got {}",
                periods.len()
            )));
        }
        Ok(Self { periods, budget: None })
    }

    /// Builds a profile from `(model, d0, pi0)` triples.
    pub fn from_parts(parts: &[(UtilityModel, f64, f64)]) -> Result<Self> {
        let periods = parts
            .iter()
            .map(|&(m, d0, pi0)| PeriodModel::new(m, d0, pi0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(periods)
    }

    /// Replaces the budget. Feasibility against prices is checked when
    /// solving, since it depends on them.
    pub fn with_budget(mut self, budget: f64) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::InfeasibleBudget {
                budget,
                limit: f64::INFINITY,
            });
        }
        self.budget = Some(budget);
        Ok(self)
    }

    pub fn periods(&self) -> &[PeriodModel] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn budget(&self) -> f64 {
        self.budget.unwrap_or_else(|| self.default_budget())
    }

    pub fn has_default_budget(&self) -> bool {
        self.budget.is_none()
    }

    /// Initial spend `sum_J pi0_J d0_J`.
    pub fn default_budget(&self) -> f64 {
        self.periods.iter().map(|p| p.cal.pi0() * p.cal.d0()).sum()
    }

    pub fn initial_prices(&self) -> Vec<f64> {
        self.periods.iter().map(|p| p.cal.pi0()).collect()
    }

    /// The common family, if every period uses the same one.
    pub fn family(&self) -> Option<Family> {
        let first = self.periods[0].model.kind();
        self.periods.iter().all(|p| p.model.kind() == first).then_some(first)
    }

    /// Spend at which every period is saturated. Infinite as soon as one
    /// period is exponential.
    pub fn satiation_spend(&self, prices: &[f64]) -> f64 {
        self.periods
            .iter()
            .zip(prices)
            .map(|(p, &pi)| pi * p.model.saturation())
            .sum()
    }

    fn check_prices(&self, prices: &[f64]) -> Result<()> {
        if prices.len() != self.len() {
            return Err(Error::Config(format!(
                "expected {} prices, got {}",
                self.len(),
                prices.len()
            )));
        }
        match prices.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            Some(&p) => Err(Error::NonPositivePrice(p)),
            None => Ok(()),
        }
    }

    fn check_budget(&self, prices: &[f64]) -> Result<f64> {
        let budget = self.budget();
        let limit = self.satiation_spend(prices);
        if budget > 0.0 && budget < limit {
            Ok(budget)
        } else {
            Err(Error::InfeasibleBudget { budget, limit })
        }
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::PeriodIndex { index, len: self.len() })
        }
    }
}

/// Solution of the budget-constrained welfare maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub demands: Vec<f64>,
    /// Lagrange multiplier: marginal calibrated utility per currency unit.
    pub lambda: f64,
    /// The budget is an equality constraint, so this is true for every
    /// solution the solvers return.
    pub binding: bool,
}

impl Allocation {
    pub fn spend(&self, prices: &[f64]) -> f64 {
        self.demands.iter().zip(prices).map(|(d, p)| d * p).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once `hi/lo - 1` falls below this.
    pub lambda_rel_tol: f64,
    pub max_iterations: usize,
    /// Initial lower end of the bracket; lowered further if the budget
    /// demands it.
    pub lambda_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            lambda_rel_tol: 1e-15,
            max_iterations: 200,
            lambda_floor: 1e-12,
        }
    }
}

fn demands_at(profile: &MultiPeriodProfile, prices: &[f64], lambda: f64) -> Vec<f64> {
    profile
        .periods
        .iter()
        .zip(prices)
        .map(|(p, &pi)| utility::demand_at_marginal_value(&p.model, &p.cal, lambda * pi))
        .collect()
}

pub fn solve_allocation_numeric(profile: &MultiPeriodProfile, prices: &[f64]) -> Result<Allocation> {
    solve_allocation_numeric_with(profile, prices, &SolverOptions::default())
}

/// Bisection on `g(lambda) = sum_I pi_I D_I(lambda) - B`, carried out on
/// `ln lambda`. Demands are clamped to their domains, so corner solutions
/// come out naturally.
pub fn solve_allocation_numeric_with(
    profile: &MultiPeriodProfile,
    prices: &[f64],
    opts: &SolverOptions,
) -> Result<Allocation> {
    profile.check_prices(prices)?;
    let budget = profile.check_budget(prices)?;
    let residual = |lambda: f64| -> f64 {
        demands_at(profile, prices, lambda)
            .iter()
            .zip(prices)
            .map(|(d, p)| d * p)
            .sum::<f64>()
            - budget
    };

    // every demand is zero at `hi`, so g(hi) = -B < 0
    let mut hi = profile
        .periods
        .iter()
        .zip(prices)
        .map(|(p, &pi)| p.lambda_at_zero(pi))
        .fold(0.0, f64::max);
    let mut lo = opts.lambda_floor.min(0.5 * hi);
    while residual(lo) <= 0.0 {
        lo *= 1e-6;
        if lo < 1e-300 {
            return Err(Error::InfeasibleBudget {
                budget,
                limit: profile.satiation_spend(prices),
            });
        }
    }

    let mut converged = false;
    for _ in 0..opts.max_iterations {
        if hi / lo - 1.0 <= opts.lambda_rel_tol {
            converged = true;
            break;
        }
        let mid = (0.5 * (lo.ln() + hi.ln())).exp();
        if mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            lo,
            hi,
            iterations: opts.max_iterations,
        });
    }
    let lambda = (0.5 * (lo.ln() + hi.ln())).exp();
    Ok(Allocation {
        demands: demands_at(profile, prices, lambda),
        lambda,
        binding: true,
    })
}

/// Closed-form interior allocation for single-family profiles.
///
/// Fails with [`Error::CornerSolution`] if any demand would leave its
/// domain, and with [`Error::NoClosedForm`] for mixed-family profiles; the
/// numeric solver handles both.
pub fn solve_allocation_closed(profile: &MultiPeriodProfile, prices: &[f64]) -> Result<Allocation> {
    profile.check_prices(prices)?;
    let family = profile.family().ok_or(Error::NoClosedForm)?;
    let budget = profile.check_budget(prices)?;
    let ps = &profile.periods;
    let a: Vec<f64> = ps.iter().map(|p| p.model.a()).collect();

    let (demands, lambda) = match family {
        Family::Exponential => {
            // A_J a_J e^{-a_J D_J} = lambda pi_J gives D_J = (L_J - ln pi_J - ln lambda) / a_J
            // with L_J = ln(A_J a_J) = ln pi0_J + a_J d0_J; the budget fixes ln lambda.
            let head: Vec<f64> = (0..ps.len())
                .map(|j| ps[j].cal.pi0().ln() + a[j] * ps[j].cal.d0() - prices[j].ln())
                .collect();
            let weight: f64 = prices.iter().zip(&a).map(|(p, a)| p / a).sum();
            let spend: f64 = (0..ps.len()).map(|j| prices[j] * head[j] / a[j]).sum();
            let log_lambda = (spend - budget) / weight;
            let demands: Vec<f64> = (0..ps.len()).map(|j| (head[j] - log_lambda) / a[j]).collect();
            (demands, log_lambda.exp())
        }
        Family::Quadratic => {
            // 2 A_I a_I (1 - a_I D_I) = lambda pi_I
            let two_aa: Vec<f64> = ps.iter().map(|p| 2.0 * p.cal.coeff() * p.model.a()).collect();
            let sat: f64 = prices.iter().zip(&a).map(|(p, a)| p / a).sum();
            let curv: f64 = (0..ps.len()).map(|j| prices[j] * prices[j] / (two_aa[j] * a[j])).sum();
            let lambda = (sat - budget) / curv;
            let demands = (0..ps.len())
                .map(|i| (1.0 - lambda * prices[i] / two_aa[i]) / a[i])
                .collect();
            (demands, lambda)
        }
    };

    for (i, (&d, p)) in demands.iter().zip(ps).enumerate() {
        if !(d > 0.0 && d < p.model.saturation()) {
            return Err(Error::CornerSolution { period: i });
        }
    }
    Ok(Allocation {
        demands,
        lambda,
        binding: true,
    })
}

/// Demands and inverse risk aversions at the initial prices.
struct OperatingPoint {
    prices: Vec<f64>,
    demands: Vec<f64>,
    inv_ara: Vec<f64>,
    /// `sum_J pi_J / ARA_J`.
    spread: f64,
    budget: f64,
}

impl OperatingPoint {
    fn at_initial_prices(profile: &MultiPeriodProfile) -> Result<Self> {
        let prices = profile.initial_prices();
        let demands = if profile.has_default_budget() {
            profile.periods.iter().map(|p| p.cal.d0()).collect()
        } else {
            solve_allocation_numeric(profile, &prices)?.demands
        };
        let inv_ara = profile
            .periods
            .iter()
            .zip(&demands)
            .enumerate()
            .map(|(i, (p, &d))| {
                if d <= 0.0 {
                    return Err(Error::CornerSolution { period: i });
                }
                utility::ara(&p.model, d)
                    .map(|r| 1.0 / r)
                    .map_err(|_| Error::CornerSolution { period: i })
            })
            .collect::<Result<Vec<_>>>()?;
        let spread = prices.iter().zip(&inv_ara).map(|(p, r)| p * r).sum();
        Ok(Self {
            prices,
            demands,
            inv_ara,
            spread,
            budget: profile.budget(),
        })
    }

    fn price_elasticity(&self, i: usize, k: usize) -> f64 {
        let (r, d) = (&self.inv_ara, &self.demands);
        let coupled = self.prices[k] * r[i] * (r[k] - d[k]) / (d[i] * self.spread);
        if i == k {
            coupled - r[i] / d[i]
        } else {
            coupled
        }
    }

    fn income_elasticity(&self, i: usize) -> f64 {
        self.budget * self.inv_ara[i] / (self.demands[i] * self.spread)
    }
}

/// `E_II`: response of period `i` demand to its own price, budget held fixed.
pub fn own_price_elasticity_mp(profile: &MultiPeriodProfile, i: usize) -> Result<f64> {
    profile.check_index(i)?;
    Ok(OperatingPoint::at_initial_prices(profile)?.price_elasticity(i, i))
}

/// `E_IK` for `i != k`.
pub fn cross_price_elasticity_mp(profile: &MultiPeriodProfile, i: usize, k: usize) -> Result<f64> {
    profile.check_index(i)?;
    profile.check_index(k)?;
    if i == k {
        return Err(Error::SamePeriod(i));
    }
    Ok(OperatingPoint::at_initial_prices(profile)?.price_elasticity(i, k))
}

/// `E_IB`: response of period `i` demand to the budget.
pub fn income_elasticity(profile: &MultiPeriodProfile, i: usize) -> Result<f64> {
    profile.check_index(i)?;
    Ok(OperatingPoint::at_initial_prices(profile)?.income_elasticity(i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossClass {
    Substitute,
    Independent,
    Complementary,
}

impl CrossClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CrossClass::Substitute => "substitute",
            CrossClass::Independent => "independent",
            CrossClass::Complementary => "complementary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncomeClass {
    Inferior,
    Normal,
    Luxury,
}

impl IncomeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            IncomeClass::Inferior => "inferior",
            IncomeClass::Normal => "normal",
            IncomeClass::Luxury => "luxury",
        }
    }
}

pub fn classify_cross(e: f64) -> CrossClass {
    classify_cross_with(e, CLASS_BAND)
}

pub fn classify_cross_with(e: f64, band: f64) -> CrossClass {
    if e.abs() <= band {
        CrossClass::Independent
    } else if e > 0.0 {
        CrossClass::Substitute
    } else {
        CrossClass::Complementary
    }
}

pub fn classify_income(e: f64) -> IncomeClass {
    classify_income_with(e, CLASS_BAND)
}

/// Normal demand covers `[-band, 1 + band]`.
pub fn classify_income_with(e: f64, band: f64) -> IncomeClass {
    if e < -band {
        IncomeClass::Inferior
    } else if e <= 1.0 + band {
        IncomeClass::Normal
    } else {
        IncomeClass::Luxury
    }
}

/// Classification of one cell of the price-elasticity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryClass {
    Own(ElasticityClass),
    Cross(CrossClass),
}

impl EntryClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntryClass::Own(c) => c.as_str(),
            EntryClass::Cross(c) => c.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticityReport {
    /// `own_cross[i][k]`: elasticity of period `i` demand w.r.t. period `k` price.
    pub own_cross: Vec<Vec<f64>>,
    pub income: Vec<f64>,
    pub classes: Vec<Vec<EntryClass>>,
    pub income_classes: Vec<IncomeClass>,
    /// `sum_K E_IK + E_IB` per row; zero up to rounding.
    pub residuals: Vec<f64>,
}

impl ElasticityReport {
    pub fn len(&self) -> usize {
        self.income.len()
    }

    pub fn is_empty(&self) -> bool {
        self.income.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub fn elasticity_report(profile: &MultiPeriodProfile) -> Result<ElasticityReport> {
    let op = OperatingPoint::at_initial_prices(profile)?;
    let n = profile.len();
    let own_cross: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| op.price_elasticity(i, k)).collect())
        .collect();
    let income: Vec<f64> = (0..n).map(|i| op.income_elasticity(i)).collect();
    let classes = own_cross
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(k, &e)| {
                    if i == k {
                        classify_own_price_with(e, CLASS_BAND).map(EntryClass::Own)
                    } else {
                        Ok(EntryClass::Cross(classify_cross(e)))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let residuals = own_cross
        .iter()
        .zip(&income)
        .map(|(row, eb)| row.iter().sum::<f64>() + eb)
        .collect();
    Ok(ElasticityReport {
        income_classes: income.iter().map(|&e| classify_income(e)).collect(),
        own_cross,
        income,
        classes,
        residuals,
    })
}
