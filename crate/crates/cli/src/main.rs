use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use riskload::io::{
    calibration_table, elasticity_table, parse_load_curve, parse_portfolio, parse_tariff, write_report, Format, Report,
};
use riskload::scenario::{build_baseline, compare, Coverage};
use riskload::single_period::{sweep, SweepQuantity};
use riskload::{Scenario, SectorProfile, SinglePeriodModel, Tariff, UtilityModel};

/// Risk-aversion demand modelling: calibration, sweeps, elasticities and
/// price/income scenarios for a sector portfolio.
#[derive(Parser)]
#[command(name = "riskload", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-sector, per-period risk-aversion and calibration coefficients.
    Calibrate(Common),
    /// Evaluate demand, utility or welfare over a grid for one sector and period.
    Sweep(SweepArgs),
    /// Own/cross-price and income elasticities per sector.
    Elasticity(Common),
    /// Compare a price/income scenario against the baseline.
    Scenario(ScenarioArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    portfolio: PathBuf,
    #[arg(long)]
    tariff: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Delimited)]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Delimited,
    Structured,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Delimited => Format::Delimited,
            OutputFormat::Structured => Format::Structured,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    /// Demand against price.
    Demand,
    /// Utility against demand.
    Utility,
    /// Optimal welfare against price.
    Welfare,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    sector: String,
    #[arg(long)]
    period: String,
    #[arg(long, value_enum, default_value_t = Quantity::Demand)]
    quantity: Quantity,
    /// First grid value (price, or demand for utility sweeps).
    #[arg(long)]
    from: f64,
    /// Last grid value.
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    common: Common,
    /// Hourly load curve (`hour,mw`).
    #[arg(long)]
    curve: PathBuf,
    /// Price multiplier: one value for all periods or one per period.
    #[arg(long, default_value = "1")]
    price: String,
    /// Per-period price multiplier, `label=F`; overrides --price.
    #[arg(long = "period-price", value_name = "LABEL=F")]
    period_price: Vec<String>,
    /// Budget multiplier.
    #[arg(long, default_value_t = 1.0)]
    income: f64,
    /// Skip hours outside every tariff period instead of rejecting the curve.
    #[arg(long)]
    allow_uncovered: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let numerical = e
        .chain()
        .filter_map(|c| c.downcast_ref::<riskload::Error>())
        .any(riskload::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Calibrate(c) => {
            let (_, sectors, tariff) = load(&c)?;
            emit(&c, &calibration_table(&sectors, &tariff)?)?;
        }
        Command::Elasticity(c) => {
            let (_, sectors, tariff) = load(&c)?;
            emit(&c, &elasticity_table(&sectors, &tariff)?)?;
        }
        Command::Sweep(s) => run_sweep(&s)?,
        Command::Scenario(s) => return run_scenario(&s),
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> anyhow::Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))?;
    Ok(text.replace("\r\n", "\n"))
}

fn load(c: &Common) -> anyhow::Result<(String, Vec<SectorProfile>, Tariff)> {
    let tariff = parse_tariff(&read(&c.tariff)?).with_context(|| format!("`{}`", c.tariff.display()))?;
    let portfolio = parse_portfolio(&read(&c.portfolio)?).with_context(|| format!("`{}`", c.portfolio.display()))?;
    let sectors = portfolio
        .bind(&tariff)
        .with_context(|| format!("`{}`", c.portfolio.display()))?;
    Ok((c.portfolio.display().to_string(), sectors, tariff))
}

fn emit<R: Report>(c: &Common, report: &R) -> anyhow::Result<()> {
    let text = write_report(report, c.format.into());
    match &c.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_sweep(s: &SweepArgs) -> anyhow::Result<()> {
    let (source, sectors, tariff) = load(&s.common)?;
    let sector = sectors
        .iter()
        .find(|x| x.name == s.sector)
        .with_context(|| format!("no sector `{}` in `{source}`", s.sector))?;
    let i = tariff
        .index_of(&s.period)
        .with_context(|| format!("no period `{}` in `{}`", s.period, s.common.tariff.display()))?;
    if s.steps < 2 {
        bail!("--steps must be at least 2, got {}", s.steps);
    }
    if !(s.from.is_finite() && s.to.is_finite() && s.from < s.to) {
        bail!("invalid range: --from {} must be below --to {}", s.from, s.to);
    }
    let quantity = match s.quantity {
        Quantity::Demand => SweepQuantity::Demand,
        Quantity::Utility => SweepQuantity::Utility,
        Quantity::Welfare => SweepQuantity::WelfareOfPrice,
    };
    let model = UtilityModel::new(sector.family, sector.coefficients[i])?;
    let sp = SinglePeriodModel::new(model, 1.0, tariff.periods()[i].price)
        .with_context(|| format!("sector `{}`, period `{}`", s.sector, s.period))?;
    let n = s.steps - 1;
    let grid: Vec<f64> = (0..=n)
        .map(|k| {
            if k == n {
                s.to
            } else {
                s.from + (s.to - s.from) * k as f64 / n as f64
            }
        })
        .collect();
    let series = sweep(&sp, quantity, &grid)?;
    emit(&s.common, &series)
}

fn price_multipliers(s: &ScenarioArgs, tariff: &Tariff) -> anyhow::Result<Vec<f64>> {
    let values = s
        .price
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid --price value `{v}`"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut prices = match values.len() {
        1 => vec![values[0]; tariff.len()],
        n if n == tariff.len() => values,
        n => bail!("--price lists {n} multipliers for {} periods", tariff.len()),
    };
    for spec in &s.period_price {
        let (label, value) = spec
            .split_once('=')
            .with_context(|| format!("--period-price expects LABEL=F, got `{spec}`"))?;
        let i = tariff
            .index_of(label.trim())
            .with_context(|| format!("--period-price: no period `{label}` in the tariff"))?;
        prices[i] = value
            .trim()
            .parse()
            .with_context(|| format!("invalid --period-price value `{value}`"))?;
    }
    Ok(prices)
}

fn run_scenario(s: &ScenarioArgs) -> anyhow::Result<ExitCode> {
    let (_, sectors, tariff) = load(&s.common)?;
    let curve = parse_load_curve(&read(&s.curve)?).with_context(|| format!("`{}`", s.curve.display()))?;
    let scenario = Scenario::new(price_multipliers(s, &tariff)?, s.income)?;
    let coverage = if s.allow_uncovered {
        Coverage::IgnoreUncovered
    } else {
        Coverage::Strict
    };
    let baseline =
        build_baseline(&sectors, &curve, &tariff, coverage).with_context(|| format!("`{}`", s.curve.display()))?;
    let comparison = compare(&baseline, &scenario)?;
    emit(&s.common, &comparison)?;
    let failures = comparison.shocked.failures();
    if failures.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for (sector, message) in failures {
        eprintln!("error: sector `{sector}`: {message}");
    }
    Ok(ExitCode::from(2))
}
