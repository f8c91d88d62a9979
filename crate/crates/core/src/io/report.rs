use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi_period::{elasticity_report, ElasticityReport};
use crate::scenario::{Aggregate, ScenarioComparison, ScenarioReport, SectorProfile, SectorStatus, Tariff};
use crate::single_period::Series;
use crate::utility::{calibrate, Family, UtilityModel};

/// Significant digits in delimited output.
pub const DELIMITED_DIGITS: usize = 6;
/// Significant digits in structured output; enough to round-trip any f64.
pub const STRUCTURED_DIGITS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Delimited,
    Structured,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delimited" | "csv" => Ok(Format::Delimited),
            "structured" | "json" => Ok(Format::Structured),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// A value that can be written as a delimited table or a JSON document.
pub trait Report: Serialize {
    fn write_delimited(&self, out: &mut String);
}

pub fn write_report<R: Report + ?Sized>(report: &R, format: Format) -> String {
    match format {
        Format::Delimited => {
            let mut out = String::new();
            report.write_delimited(&mut out);
            out
        }
        Format::Structured => {
            let mut buf = Vec::new();
            let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17::default());
            report.serialize(&mut ser).expect("reports serialize to JSON");
            let mut out = String::from_utf8(buf).expect("JSON is UTF-8");
            out.push('\n');
            out
        }
    }
}

/// Reads back a structured report.
pub fn parse_structured<R: DeserializeOwned>(text: &str) -> Result<R> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Formats like C's `%.{digits}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed. Independent of locale.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> String {
    format_significant(x, DELIMITED_DIGITS)
}

fn row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// serde_json formatter that prints floats with 17 significant digits.
#[derive(Default)]
struct Sig17 {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        let s = format!("{:.*e}", STRUCTURED_DIGITS - 1, value);
        w.write_all(s.as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

impl Report for Series {
    fn write_delimited(&self, out: &mut String) {
        let (x, y) = self.quantity.axis_labels();
        row(out, &[x.into(), y.into()]);
        for &(a, b) in &self.points {
            row(out, &[num(a), num(b)]);
        }
    }
}

fn aggregate_cells(a: &Aggregate) -> [String; 4] {
    [num(a.demand), num(a.utility), num(a.budget), num(a.welfare)]
}

impl Report for ScenarioReport {
    fn write_delimited(&self, out: &mut String) {
        row(
            out,
            &["sector", "period", "status", "demand", "utility", "budget", "welfare"].map(String::from),
        );
        let mut emit = |sector: &str, period: &str, status: &str, a: &Aggregate| {
            let mut cells = vec![sector.to_string(), period.to_string(), status.to_string()];
            cells.extend(aggregate_cells(a));
            row(out, &cells);
        };
        for s in &self.sectors {
            match &s.status {
                SectorStatus::Solved { .. } => {
                    for (label, a) in self.labels.iter().zip(&s.periods) {
                        emit(&s.name, label, "ok", a);
                    }
                    emit(&s.name, "all", "ok", &s.total);
                }
                SectorStatus::Failed { .. } => emit(&s.name, "all", "failed", &s.total),
            }
        }
        for (label, a) in self.labels.iter().zip(&self.period_totals) {
            emit("total", label, "ok", a);
        }
        emit("total", "all", "ok", &self.total);
    }
}

impl Report for ScenarioComparison {
    fn write_delimited(&self, out: &mut String) {
        let mut header = vec!["sector".to_string(), "period".to_string()];
        for m in ["demand", "utility", "budget", "welfare"] {
            header.extend([format!("{m}_base"), m.to_string(), format!("{m}_delta")]);
        }
        row(out, &header);
        let mut emit = |sector: &str, period: &str, base: &Aggregate, new: &Aggregate| {
            let mut cells = vec![sector.to_string(), period.to_string()];
            for (b, n) in [
                (base.demand, new.demand),
                (base.utility, new.utility),
                (base.budget, new.budget),
                (base.welfare, new.welfare),
            ] {
                cells.extend([num(b), num(n), num(delta(b, n))]);
            }
            row(out, &cells);
        };
        let labels = &self.shocked.labels;
        for (b, s) in self.baseline.sectors.iter().zip(&self.shocked.sectors) {
            for (i, label) in labels.iter().enumerate() {
                if let (Some(x), Some(y)) = (b.periods.get(i), s.periods.get(i)) {
                    emit(&s.name, label, x, y);
                }
            }
            emit(&s.name, "all", &b.total, &s.total);
        }
        for (label, (x, y)) in labels
            .iter()
            .zip(self.baseline.period_totals.iter().zip(&self.shocked.period_totals))
        {
            emit("total", label, x, y);
        }
        emit("total", "all", &self.baseline.total, &self.shocked.total);
    }
}

/// Differences below round-off of the operands print as 0.
fn delta(base: f64, new: f64) -> f64 {
    let d = new - base;
    if d.abs() <= 1e-12 * base.abs().max(new.abs()) {
        0.0
    } else {
        d
    }
}

/// One sector's elasticity report with its period labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorElasticity {
    pub sector: String,
    pub periods: Vec<String>,
    pub report: ElasticityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticityTable {
    pub sectors: Vec<SectorElasticity>,
}

/// Elasticity reports for every sector at per-unit demand and tariff prices.
pub fn elasticity_table(sectors: &[SectorProfile], tariff: &Tariff) -> Result<ElasticityTable> {
    let sectors = sectors
        .iter()
        .map(|s| {
            let profile = s.per_unit_profile(tariff)?;
            Ok(SectorElasticity {
                sector: s.name.clone(),
                periods: tariff.labels(),
                report: elasticity_report(&profile)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ElasticityTable { sectors })
}

impl Report for ElasticityTable {
    /// One row per (sector, period): the `T` price elasticities, then the
    /// income elasticity, the identity residual and the classifications.
    fn write_delimited(&self, out: &mut String) {
        let labels = self.sectors.first().map(|s| s.periods.clone()).unwrap_or_default();
        let mut header = vec!["sector".to_string(), "period".to_string()];
        header.extend(labels.iter().map(|l| format!("E[{l}]")));
        header.extend(["income", "residual", "classes", "income_class"].map(String::from));
        row(out, &header);
        for s in &self.sectors {
            let r = &s.report;
            for (i, label) in s.periods.iter().enumerate() {
                let mut cells = vec![s.sector.clone(), label.clone()];
                cells.extend(r.own_cross[i].iter().map(|&e| num(e)));
                cells.push(num(r.income[i]));
                cells.push(format_significant(r.residuals[i], 3));
                cells.push(r.classes[i].iter().map(|c| c.as_str()).collect::<Vec<_>>().join(";"));
                cells.push(r.income_classes[i].as_str().to_string());
                row(out, &cells);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub sector: String,
    pub period: String,
    pub family: Family,
    /// Per-unit risk-aversion coefficient.
    pub a: f64,
    /// Calibration coefficient at `d0 = 1` and the tariff price.
    #[serde(rename = "A")]
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
}

pub fn calibration_table(sectors: &[SectorProfile], tariff: &Tariff) -> Result<CalibrationTable> {
    let mut rows = Vec::new();
    for s in sectors {
        for (&a, tp) in s.coefficients.iter().zip(tariff.periods()) {
            let model = UtilityModel::new(s.family, a)?;
            let coeff = calibrate(&model, 1.0, tp.price)
                .map_err(|e| Error::Config(format!("sector `{}`, period `{}`: {e}", s.name, tp.label)))?;
            rows.push(CalibrationRow {
                sector: s.name.clone(),
                period: tp.label.clone(),
                family: s.family,
                a,
                coeff,
            });
        }
    }
    Ok(CalibrationTable { rows })
}

impl Report for CalibrationTable {
    fn write_delimited(&self, out: &mut String) {
        row(out, &["sector", "period", "family", "a", "A"].map(String::from));
        for r in &self.rows {
            row(
                out,
                &[
                    r.sector.clone(),
                    r.period.clone(),
                    r.family.to_string(),
                    num(r.a),
                    num(r.coeff),
                ],
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_study;
    use crate::scenario::{apply_scenario, build_baseline, compare, Coverage, LoadCurve, Scenario};
    use crate::single_period::{sweep, SinglePeriodModel, SweepQuantity};
    use proptest::prelude::*;

    fn portfolio() -> Vec<SectorProfile> {
        case_study::SECTORS
            .iter()
            .zip(case_study::SHARES)
            .zip(case_study::COEFFICIENTS)
            .map(|((n, s), c)| SectorProfile {
                name: n.to_string(),
                share: s,
                family: Family::Exponential,
                coefficients: c.to_vec(),
                budget: None,
            })
            .collect()
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(768299.0, 6), "768299");
        assert_eq!(format_significant(7682991.0, 6), "7.68299e+06");
        assert_eq!(format_significant(0.00753186, 6), "0.00753186");
        assert_eq!(format_significant(-1.2195121951, 6), "-1.21951");
        assert_eq!(format_significant(1.0, 6), "1");
        assert_eq!(format_significant(1.5e-7, 6), "1.5e-07");
        assert_eq!(format_significant(0.0, 6), "0");
        assert_eq!(format_significant(f64::NEG_INFINITY, 6), "-inf");
    }

    #[test]
    fn identity_report_round_trips() {
        let b = build_baseline(
            &portfolio(),
            &LoadCurve::uniform(30000.0).unwrap(),
            &case_study::tariff(),
            Coverage::IgnoreUncovered,
        )
        .unwrap();
        let r = apply_scenario(&b, &Scenario::identity(3)).unwrap();
        let text = write_report(&r, Format::Structured);
        assert_eq!(parse_structured::<ScenarioReport>(&text).unwrap(), r);
        let c = compare(&b, &Scenario::uniform(3, 1.05, 1.0).unwrap()).unwrap();
        let text = write_report(&c, Format::Structured);
        assert_eq!(parse_structured::<ScenarioComparison>(&text).unwrap(), c);
        let csv = write_report(&c, Format::Delimited);
        assert_eq!(csv.lines().count(), 1 + 5 * 4 + 4);
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn elasticity_table_shape() {
        let t = elasticity_table(&portfolio(), &case_study::tariff()).unwrap();
        let text = write_report(&t, Format::Delimited);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 5 * 3);
        let header: Vec<&str> = lines[0].split(',').collect();
        let numeric = header.iter().filter(|h| h.starts_with("E[") || **h == "income").count();
        assert_eq!(numeric, 3 + 1);
        assert!(
            lines[1].starts_with("residential,off-peak,-1.17859,-0.133835,0.00753187,1.3049,"),
            "{}",
            lines[1]
        );
        assert_eq!(
            parse_structured::<ElasticityTable>(&write_report(&t, Format::Structured)).unwrap(),
            t
        );
    }

    #[test]
    fn sweep_series_output() {
        let sp = SinglePeriodModel::new(UtilityModel::exponential(0.82).unwrap(), 1.0, 260.0).unwrap();
        let grid: Vec<f64> = (0..20).map(|i| 260.0 + 20.0 * i as f64).collect();
        let s = sweep(&sp, SweepQuantity::Demand, &grid).unwrap();
        let text = write_report(&s, Format::Delimited);
        let xs: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(text.lines().next(), Some("price,demand"));
    }

    #[test]
    fn calibration_rows() {
        let t = calibration_table(&portfolio(), &case_study::tariff()).unwrap();
        assert_eq!(t.rows.len(), 15);
        assert!((t.rows[0].coeff - 719.914582632226).abs() < 1e-9);
        let text = write_report(&t, Format::Delimited);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("residential,off-peak,exponential,0.82,719.915"));
    }

    proptest! {
        #[test]
        fn structured_floats_round_trip(points in prop::collection::vec((any::<f64>(), -1e300f64..1e300), 1..20)) {
            let points: Vec<(f64, f64)> = points.into_iter().filter(|(x, _)| x.is_finite()).collect();
            let s = Series { quantity: SweepQuantity::Demand, points };
            let back: Series = parse_structured(&write_report(&s, Format::Structured)).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
