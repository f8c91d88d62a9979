//! Utility families, their derivatives, the Arrow-Pratt measure and
//! calibration to an initial operating point.
//!
//! Two families are supported:
//!
//! * exponential `U(D) = 1 - exp(-a D)` on `D >= 0`,
//! * quadratic `U(D) = -(1 - a D)^2` on `0 <= D <= 1/a`.
//!
//! The quadratic family is negative everywhere except at saturation, so it
//! only ranks consumption levels; `U(0) = -1` rather than `0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on `a * d <= 1` so that `d = 1.0 / a` itself is accepted.
const SATURATION_SLACK: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Exponential,
    Quadratic,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Exponential => f.write_str("exponential"),
            Family::Quadratic => f.write_str("quadratic"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(Family::Exponential),
            "quadratic" | "quad" => Ok(Family::Quadratic),
            other => Err(Error::Config(format!("unknown utility family `{other}`"))),
        }
    }
}

/// A utility family together with its risk-aversion coefficient `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityModel {
    kind: Family,
    a: f64,
}

impl UtilityModel {
    pub fn new(kind: Family, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidModel(vec![Violation::Coefficient(a)]));
        }
        Ok(Self { kind, a })
    }

    pub fn exponential(a: f64) -> Result<Self> {
        Self::new(Family::Exponential, a)
    }

    pub fn quadratic(a: f64) -> Result<Self> {
        Self::new(Family::Quadratic, a)
    }

    pub fn kind(&self) -> Family {
        self.kind
    }

    /// Risk-aversion coefficient.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Same family with a different coefficient.
    pub fn with_coefficient(&self, a: f64) -> Result<Self> {
        Self::new(self.kind, a)
    }

    /// Largest admissible demand: `1/a` for quadratic, unbounded otherwise.
    pub fn saturation(&self) -> f64 {
        match self.kind {
            Family::Exponential => f64::INFINITY,
            Family::Quadratic => 1.0 / self.a,
        }
    }

    fn check_domain(&self, d: f64) -> Result<()> {
        let ok = match self.kind {
            Family::Exponential => d >= 0.0 && d.is_finite(),
            Family::Quadratic => d >= 0.0 && self.a * d <= 1.0 + SATURATION_SLACK,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain {
                demand: d,
                upper: self.saturation(),
            })
        }
    }

    /// `1 - a d`, snapped to zero within rounding of saturation.
    fn headroom(&self, d: f64) -> f64 {
        let h = 1.0 - self.a * d;
        if h <= SATURATION_SLACK {
            0.0
        } else {
            h
        }
    }
}

/// `U(d, a)`.
pub fn eval_utility(model: &UtilityModel, d: f64) -> Result<f64> {
    model.check_domain(d)?;
    Ok(match model.kind {
        Family::Exponential => -(-model.a * d).exp_m1(),
        Family::Quadratic => {
            let h = model.headroom(d);
            -h * h
        }
    })
}

/// `dU/dD`.
pub fn marginal_utility(model: &UtilityModel, d: f64) -> Result<f64> {
    model.check_domain(d)?;
    Ok(match model.kind {
        Family::Exponential => model.a * (-model.a * d).exp(),
        Family::Quadratic => 2.0 * model.a * model.headroom(d),
    })
}

/// `d2U/dD2`.
pub fn curvature(model: &UtilityModel, d: f64) -> Result<f64> {
    model.check_domain(d)?;
    Ok(match model.kind {
        Family::Exponential => -model.a * model.a * (-model.a * d).exp(),
        Family::Quadratic => -2.0 * model.a * model.a,
    })
}

/// Arrow-Pratt absolute risk aversion `-U''/U'`.
///
/// Constant `a` for the exponential family, `a / (1 - a d)` for the
/// quadratic one, which diverges at saturation.
pub fn ara(model: &UtilityModel, d: f64) -> Result<f64> {
    model.check_domain(d)?;
    match model.kind {
        Family::Exponential => Ok(model.a),
        Family::Quadratic => {
            let h = 1.0 - model.a * d;
            if h <= SATURATION_SLACK {
                Err(Error::Singular { demand: d })
            } else {
                Ok(model.a / h)
            }
        }
    }
}

/// Calibration coefficient `A = pi0 / U'(d0)`, so that `A U'(d0) = pi0`.
pub fn calibrate(model: &UtilityModel, d0: f64, pi0: f64) -> Result<f64> {
    if !(pi0.is_finite() && pi0 > 0.0) {
        return Err(Error::NonPositivePrice(pi0));
    }
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(Error::InvalidModel(vec![Violation::InitialDemand(d0)]));
    }
    match model.kind {
        Family::Exponential => Ok(pi0 / model.a * (model.a * d0).exp()),
        Family::Quadratic => {
            let product = model.a * d0;
            if product >= 1.0 {
                return Err(Error::CalibrationInfeasible { product });
            }
            Ok(pi0 / (2.0 * model.a * (1.0 - product)))
        }
    }
}

/// A single reason a (model, anchor) pair is unusable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    Coefficient(f64),
    InitialDemand(f64),
    InitialPrice(f64),
    QuadraticSaturated { product: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Coefficient(a) => write!(f, "risk-aversion coefficient {a} must be positive"),
            Violation::InitialDemand(d) => write!(f, "initial demand {d} must be positive"),
            Violation::InitialPrice(p) => write!(f, "initial price {p} must be positive"),
            Violation::QuadraticSaturated { product } => {
                write!(f, "quadratic model needs a*d0 < 1, got {product}")
            }
        }
    }
}

/// Checks a raw (family, a, d0, pi0) combination and lists every violation.
///
/// Takes the coefficient separately from [`UtilityModel`] so that values the
/// constructor would refuse (such as `a = 0`) can still be reported.
pub fn validate_parts(kind: Family, a: f64, d0: f64, pi0: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(a.is_finite() && a > 0.0) {
        out.push(Violation::Coefficient(a));
    }
    if !(d0.is_finite() && d0 > 0.0) {
        out.push(Violation::InitialDemand(d0));
    }
    if !(pi0.is_finite() && pi0 > 0.0) {
        out.push(Violation::InitialPrice(pi0));
    }
    if kind == Family::Quadratic && out.is_empty() && a * d0 >= 1.0 {
        out.push(Violation::QuadraticSaturated { product: a * d0 });
    }
    out
}

/// Validates a model against an anchor. An empty vector means valid.
pub fn validate_model(model: &UtilityModel, d0: f64, pi0: f64) -> Vec<Violation> {
    validate_parts(model.kind, model.a, d0, pi0)
}

/// Initial operating point `(d0, pi0)` and the derived calibration
/// coefficient `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodCalibration {
    d0: f64,
    pi0: f64,
    coeff: f64,
}

impl PeriodCalibration {
    pub fn new(model: &UtilityModel, d0: f64, pi0: f64) -> Result<Self> {
        let violations = validate_model(model, d0, pi0);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        let coeff = calibrate(model, d0, pi0)?;
        Ok(Self { d0, pi0, coeff })
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    /// Calibration coefficient `A`, in currency units.
    pub fn coeff(&self) -> f64 {
        self.coeff
    }
}

/// Demand at which the calibrated marginal utility `A U'(D)` equals
/// `value`, clamped to the model domain.
///
/// Expressed relative to the anchor (`U'(D)/U'(d0) = value/pi0`) so that
/// `value == pi0` returns `d0` bit-for-bit.
pub(crate) fn demand_at_marginal_value(model: &UtilityModel, cal: &PeriodCalibration, value: f64) -> f64 {
    let ratio = value / cal.pi0;
    match model.kind {
        Family::Exponential => (cal.d0 - ratio.ln() / model.a).max(0.0),
        Family::Quadratic => {
            let d = (1.0 - ratio * (1.0 - model.a * cal.d0)) / model.a;
            d.clamp(0.0, 1.0 / model.a)
        }
    }
}
