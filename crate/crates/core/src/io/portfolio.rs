use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::toml_error;
use crate::scenario::{SectorProfile, Tariff, SHARE_TOLERANCE};
use crate::single_period::{risk_aversion_from_elasticity, ElasticityInput};
use crate::utility::{validate_parts, Family};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortfolioDoc {
    periods: Vec<String>,
    #[serde(default)]
    family: Option<Family>,
    sector: Vec<SectorDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SectorDoc {
    name: String,
    share: f64,
    #[serde(default)]
    family: Option<Family>,
    #[serde(default)]
    elasticities: Option<Vec<f64>>,
    #[serde(default)]
    coefficients: Option<Vec<f64>>,
    #[serde(default)]
    budget: Option<f64>,
}

/// Where a sector's coefficients came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientSource {
    /// Converted from own-price elasticity magnitudes at `d0 = 1`.
    Elasticities(Vec<f64>),
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorConfig {
    pub name: String,
    pub share: f64,
    pub family: Family,
    /// Per-unit risk-aversion coefficients in `PortfolioConfig::periods` order.
    pub coefficients: Vec<f64>,
    pub source: CoefficientSource,
    pub budget: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioConfig {
    pub periods: Vec<String>,
    pub sectors: Vec<SectorConfig>,
}

/// Parses a TOML portfolio.
///
/// ```toml
/// periods = ["off-peak", "mid-peak", "peak"]
/// family = "exponential"
///
/// [[sector]]
/// name = "residential"
/// share = 0.34
/// elasticities = [1.21, 0.64, 1.01]
/// ```
///
/// Each sector gives exactly one of `elasticities` (magnitudes) or
/// `coefficients`; `family` and `budget` may be set per sector.
pub fn parse_portfolio(text: &str) -> Result<PortfolioConfig> {
    let doc: PortfolioDoc = toml::from_str(text).map_err(|e| toml_error(text, e))?;
    let t = doc.periods.len();
    if t < 2 {
        return Err(Error::Config(format!("portfolio needs at least 2 periods, got {t}")));
    }
    for (i, p) in doc.periods.iter().enumerate() {
        if doc.periods[..i].contains(p) {
            return Err(Error::Config(format!("duplicate period label `{p}`")));
        }
    }
    if doc.sector.is_empty() {
        return Err(Error::Config("portfolio has no sectors".into()));
    }

    let mut sectors = Vec::with_capacity(doc.sector.len());
    for s in doc.sector {
        if sectors.iter().any(|x: &SectorConfig| x.name == s.name) {
            return Err(Error::Config(format!("duplicate sector `{}`", s.name)));
        }
        if !(s.share.is_finite() && (0.0..=1.0).contains(&s.share)) {
            return Err(Error::Config(format!(
                "sector `{}`: share {} outside [0, 1]",
                s.name, s.share
            )));
        }
        let family = s.family.or(doc.family).unwrap_or(Family::Exponential);
        let (coefficients, source) = match (s.elasticities, s.coefficients) {
            (Some(e), None) => {
                check_len(&s.name, "elasticities", e.len(), t)?;
                let a = e
                    .iter()
                    .zip(&doc.periods)
                    .map(|(&m, label)| {
                        risk_aversion_from_elasticity(family, ElasticityInput::Magnitude(m), 1.0)
                            .map_err(|err| Error::Config(format!("sector `{}`, period `{label}`: {err}", s.name)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (a, CoefficientSource::Elasticities(e))
            }
            (None, Some(a)) => {
                check_len(&s.name, "coefficients", a.len(), t)?;
                (a, CoefficientSource::Given)
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config(format!(
                    "sector `{}` gives both elasticities and coefficients",
                    s.name
                )))
            }
            (None, None) => {
                return Err(Error::Config(format!(
                    "sector `{}` gives neither elasticities nor coefficients",
                    s.name
                )))
            }
        };
        for (a, label) in coefficients.iter().zip(&doc.periods) {
            let violations = validate_parts(family, *a, 1.0, 1.0);
            if let Some(v) = violations.first() {
                return Err(Error::Config(format!("sector `{}`, period `{label}`: {v}", s.name)));
            }
        }
        if let Some(b) = s.budget {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Config(format!(
                    "sector `{}`: budget {b} must be positive",
                    s.name
                )));
            }
        }
        sectors.push(SectorConfig {
            name: s.name,
            share: s.share,
            family,
            coefficients,
            source,
            budget: s.budget,
        });
    }

    let total: f64 = sectors.iter().map(|s| s.share).sum();
    if (total - 1.0).abs() > SHARE_TOLERANCE {
        return Err(Error::Config(format!("sector shares sum to {total}, expected 1")));
    }
    Ok(PortfolioConfig {
        periods: doc.periods,
        sectors,
    })
}

fn check_len(sector: &str, what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "sector `{sector}` lists {got} {what} for {want} periods"
        )))
    }
}

impl PortfolioConfig {
    /// Matches period labels against the tariff and reorders coefficients
    /// into tariff order.
    pub fn bind(&self, tariff: &Tariff) -> Result<Vec<SectorProfile>> {
        if let Some(p) = self.periods.iter().find(|p| tariff.index_of(p).is_none()) {
            return Err(Error::Config(format!("unknown period label `{p}` (not in tariff)")));
        }
        if let Some(p) = tariff.periods().iter().find(|p| !self.periods.contains(&p.label)) {
            return Err(Error::Config(format!(
                "tariff period `{}` is missing from the portfolio",
                p.label
            )));
        }
        let order: Vec<usize> = tariff
            .periods()
            .iter()
            .map(|tp| self.periods.iter().position(|p| *p == tp.label).expect("checked above"))
            .collect();
        Ok(self
            .sectors
            .iter()
            .map(|s| SectorProfile {
                name: s.name.clone(),
                share: s.share,
                family: s.family,
                coefficients: order.iter().map(|&i| s.coefficients[i]).collect(),
                budget: s.budget,
            })
            .collect())
    }

    pub fn sector(&self, name: &str) -> Option<&SectorConfig> {
        self.sectors.iter().find(|s| s.name == name)
    }
}
